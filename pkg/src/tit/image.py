"""Square binary images, the Hamming metric on them, and PBM file I/O.

Coordinate convention, used by every module in this package: a pixel is
addressed as ``(x, y)`` where ``x`` is the column and ``y`` is the row,
both in ``range(n)``, with ``(0, 0)`` the top-left corner.  Geometric
predicates treat pixel centers as the integer points of ``[0, n-1]^2``
with the y axis pointing down, so "above" means smaller ``y``.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "BinaryImage",
    "DimensionMismatchError",
    "PBMError",
    "relative_distance",
    "read_pbm",
    "write_pbm",
]


class DimensionMismatchError(ValueError):
    """Two images with different side lengths were compared."""


class PBMError(ValueError):
    """A PBM file could not be parsed; the message names the bad field."""


class BinaryImage:
    """Immutable n-by-n bit matrix. 1 = black, 0 = white.

    The backing array is row-major with shape ``(n, n)`` indexed
    ``[y, x]``; it is frozen after construction so instances can be
    shared freely across threads.
    """

    __slots__ = ("n", "_a")

    def __init__(self, bits):
        a = np.asarray(bits)
        if a.ndim == 1:
            side = int(round(len(a) ** 0.5))
            if side * side != len(a):
                raise ValueError(f"flat bit count {len(a)} is not a perfect square")
            a = a.reshape(side, side)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"image must be square, got shape {a.shape}")
        if a.shape[0] == 0:
            raise ValueError("image side must be at least 1")
        a = (a != 0)
        a.setflags(write=False)
        self._a = a
        self.n = a.shape[0]

    @classmethod
    def blank(cls, n: int, color: int = 0) -> "BinaryImage":
        return cls(np.full((n, n), bool(color)))

    @property
    def array(self) -> np.ndarray:
        """Read-only bool array of shape (n, n), indexed [y, x]."""
        return self._a

    def get(self, x: int, y: int) -> int:
        if not (0 <= x < self.n and 0 <= y < self.n):
            raise IndexError(f"pixel ({x}, {y}) outside [0, {self.n})^2")
        return int(self._a[y, x])

    def __getitem__(self, xy) -> int:
        x, y = xy
        return self.get(x, y)

    def black_count(self) -> int:
        return int(self._a.sum())

    def black_pixels(self) -> np.ndarray:
        """(k, 2) int array of black pixel coordinates as (x, y) rows."""
        ys, xs = np.nonzero(self._a)
        return np.column_stack([xs, ys]).astype(np.int64)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BinaryImage):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self._a, other._a))

    def __hash__(self) -> int:
        return hash((self.n, self._a.tobytes()))

    def __repr__(self) -> str:
        return f"BinaryImage(n={self.n}, black={self.black_count()})"


def relative_distance(a: BinaryImage, b: BinaryImage) -> float:
    """Fraction of the n^2 pixels on which the two images differ."""
    if a.n != b.n:
        raise DimensionMismatchError(f"cannot compare {a.n}x{a.n} with {b.n}x{b.n}")
    return int(np.count_nonzero(a.array ^ b.array)) / (a.n * a.n)


def _read_token(data: bytes, pos: int) -> tuple[bytes, int]:
    # Skips whitespace and '#' comments, per the netpbm header grammar.
    k = len(data)
    while pos < k:
        c = data[pos]
        if c in b"#":
            while pos < k and data[pos] not in b"\r\n":
                pos += 1
        elif c in b" \t\r\n\x0b\x0c":
            pos += 1
        else:
            break
    start = pos
    while pos < k and data[pos] not in b" \t\r\n\x0b\x0c":
        pos += 1
    if start == pos:
        raise PBMError("unexpected end of header")
    return data[start:pos], pos


def read_pbm(path) -> BinaryImage:
    """Read a P1 (ascii) or P4 (packed binary) PBM file. '1' maps to black."""
    with open(path, "rb") as fh:
        data = fh.read()
    try:
        magic, pos = _read_token(data, 0)
    except PBMError:
        raise PBMError("magic: file is empty")
    if magic not in (b"P1", b"P4"):
        raise PBMError(f"magic: expected P1 or P4, got {magic!r}")
    try:
        wtok, pos = _read_token(data, pos)
        htok, pos = _read_token(data, pos)
        width, height = int(wtok), int(htok)
    except (PBMError, ValueError):
        raise PBMError("dimensions: missing or non-integer width/height")
    if width <= 0 or height <= 0:
        raise PBMError(f"dimensions: side must be positive, got {width}x{height}")
    if width != height:
        raise PBMError(f"dimensions: image must be square, got {width}x{height}")
    n = width
    if magic == b"P1":
        body = data[pos:]
        digits = [c for c in body if c in b"01"]
        stripped = bytes(c for c in body if c not in b" \t\r\n\x0b\x0c01#")
        # P1 bodies may contain comments; tolerate '#...' lines only.
        if b"#" not in body and stripped:
            raise PBMError(f"pixels: unexpected byte {stripped[:1]!r} in P1 body")
        if len(digits) < n * n:
            raise PBMError(f"pixels: expected {n * n} bits, found {len(digits)}")
        bits = np.frombuffer(bytes(digits[: n * n]), dtype=np.uint8) - ord("0")
        return BinaryImage(bits.reshape(n, n))
    # P4: one whitespace byte after the header, then bit-packed rows,
    # each padded to a whole byte; pad bits are ignored.
    pos += 1
    row_bytes = (n + 7) // 8
    body = data[pos : pos + row_bytes * n]
    if len(body) < row_bytes * n:
        raise PBMError(f"pixels: expected {row_bytes * n} raster bytes, found {len(body)}")
    raw = np.frombuffer(body, dtype=np.uint8).reshape(n, row_bytes)
    bits = np.unpackbits(raw, axis=1)[:, :n]
    return BinaryImage(bits)


def write_pbm(image: BinaryImage, path, binary: bool = True) -> None:
    """Write PBM; P4 when ``binary`` else P1. Round-trips bit-exactly."""
    n = image.n
    header = f"P4\n{n} {n}\n" if binary else f"P1\n{n} {n}\n"
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        if binary:
            packed = np.packbits(image.array.astype(np.uint8), axis=1)
            fh.write(packed.tobytes())
        else:
            rows = ["".join("1" if v else "0" for v in row) for row in image.array]
            fh.write(("\n".join(rows) + "\n").encode("ascii"))
