"""Command-line front end: estimate, learn, oracle, gen, bench.

JSON goes to stdout, logs to stderr.  Exit codes: 0 success, 1 I/O or
file-format failure, 2 parameter error, 3 resource cap.  With the same
flags and seed, --json and CSV outputs are byte-identical; wall-clock
time is therefore reported as 0 in machine-readable output (it still
prints to stderr).
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from .connectedness import ResourceCapError, estimate_connectedness_distance
from .convexity import (PRACTICAL_CONSTANTS, estimate_convexity_distance,
                        learn_convex)
from .gen import add_noise, gen_connected, gen_convex, gen_halfplane
from .halfplane import estimate_halfplane_distance, learn_halfplane
from .image import BinaryImage, PBMError, read_pbm, relative_distance, write_pbm
from .oracles import (OracleBudgetError, oracle_border_connectedness_distance,
                      oracle_connectedness_distance, oracle_convexity_distance,
                      oracle_halfplane_distance)
from .refgrid import PAPER_CONSTANTS

PROPERTIES = ("halfplane", "convexity", "connectedness")
CSV_SCHEMA = "tit-bench-1"

DEFAULT_MODE = {"halfplane": "uniform", "convexity": "bernoulli",
                "connectedness": "block"}


class ParameterError(ValueError):
    pass


def _constants(name: str):
    return PAPER_CONSTANTS if name == "paper" else PRACTICAL_CONSTANTS


def _load(path: str) -> BinaryImage:
    return read_pbm(path)


def _report(args, image, prop) -> dict:
    mode = args.mode or DEFAULT_MODE[prop]
    t0 = time.monotonic()
    warnings: tuple = ()
    if prop == "halfplane":
        if mode == "block":
            raise ParameterError("mode=block is not a half-plane access model")
        est = estimate_halfplane_distance(image, args.delta, seed=args.seed, mode=mode)
        estimate, samples, warnings = est.dhat, est.sample_size, est.warnings
    elif prop == "convexity":
        if mode == "block":
            raise ParameterError("mode=block is not a convexity access model")
        est = estimate_convexity_distance(image, args.delta, seed=args.seed,
                                          constants=_constants(args.constants), mode=mode)
        estimate, samples, warnings = est.dhat, est.sample_size, est.warnings
    else:
        if mode != "block":
            raise ParameterError("connectedness reads uniformly random blocks; use --mode block")
        est = estimate_connectedness_distance(image, args.delta, seed=args.seed)
        estimate, samples, warnings = est.dhat, est.sample_count, est.warnings
    wall = int((time.monotonic() - t0) * 1000)
    print(f"{prop}: wall {wall} ms", file=sys.stderr)
    return {
        "property": prop,
        "n": image.n,
        "delta": args.delta,
        "seed": args.seed,
        "constantsPreset": args.constants,
        "estimate": estimate,
        "sampleCount": samples,
        "wallMillis": 0,
        "warnings": list(warnings),
    }


def cmd_estimate(args) -> int:
    image = _load(args.image)
    report = _report(args, image, args.property)
    if args.json:
        print(json.dumps(report, sort_keys=True))
    else:
        print(f"{args.property} estimate for {args.image} (n={image.n}, "
              f"delta={args.delta}): {report['estimate']:.6f} "
              f"[{report['sampleCount']} samples]")
        for w in report["warnings"]:
            print(f"warning: {w}", file=sys.stderr)
    return 0


def cmd_learn(args) -> int:
    image = _load(args.image)
    out = args.out or (os.path.splitext(args.image)[0] + ".hypothesis.pbm")
    mode = args.mode or DEFAULT_MODE[args.property]
    if args.property == "halfplane":
        ref, hyp = learn_halfplane(image, args.delta, seed=args.seed, mode=mode)
        payload = {"property": "halfplane", "phi": ref.phi, "c": ref.c,
                   "directionIndex": ref.dir_index, "offsetIndex": ref.offset_index}
    else:
        vertices, hyp = learn_convex(image, args.delta, seed=args.seed,
                                     constants=_constants(args.constants), mode=mode)
        payload = {"property": "convex",
                   "vertices": [[x, y] for x, y in vertices]}
    write_pbm(hyp, out)
    payload.update({
        "n": image.n,
        "delta": args.delta,
        "seed": args.seed,
        "hypothesisPath": out,
        "empiricalDistance": relative_distance(image, hyp),
    })
    print(json.dumps(payload, sort_keys=True))
    return 0


def cmd_oracle(args) -> int:
    image = _load(args.image)
    fn = {
        "halfplane": oracle_halfplane_distance,
        "convexity": oracle_convexity_distance,
        "connectedness": oracle_connectedness_distance,
        "border-connectedness": oracle_border_connectedness_distance,
    }[args.property]
    value = fn(image)
    if args.json:
        print(json.dumps({"property": args.property, "n": image.n,
                          "distance": value}, sort_keys=True))
    else:
        print(f"{args.property} exact distance: {value:.6f}")
    return 0


def cmd_gen(args) -> int:
    if args.property == "halfplane":
        clean = gen_halfplane(args.n, seed=args.seed)
    elif args.property == "convexity":
        clean = gen_convex(args.n, args.vertices, seed=args.seed)
    else:
        clean = gen_connected(args.n, args.density, seed=args.seed)
    planted = add_noise(clean, args.rho, seed=args.seed + 1)
    write_pbm(planted.noisy, args.out)
    sidecar = {
        "property": args.property,
        "n": args.n,
        "rho": args.rho,
        "seed": args.seed,
        "flipCount": len(planted.flipped),
        "imagePath": args.out,
    }
    with open(args.out + ".json", "w") as fh:
        json.dump(sidecar, fh, sort_keys=True)
        fh.write("\n")
    print(json.dumps(sidecar, sort_keys=True))
    return 0


def _bench_trial(prop, n, delta, rho, seed):
    if prop == "halfplane":
        planted = add_noise(gen_halfplane(n, seed=seed), rho, seed=seed + 1)
        est = estimate_halfplane_distance(planted.noisy, delta, seed=seed).dhat
        if n <= 24:
            reference = oracle_halfplane_distance(planted.noisy)
        else:
            reference = rho
    elif prop == "convexity":
        planted = add_noise(gen_convex(n, 6, seed=seed), rho, seed=seed + 1)
        est = estimate_convexity_distance(planted.noisy, delta, seed=seed).dhat
        reference = rho
    else:
        planted = add_noise(gen_connected(n, 0.3, seed=seed), rho, seed=seed + 1)
        est = estimate_connectedness_distance(planted.noisy, delta, seed=seed).dhat
        reference = rho
    hit = int(abs(est - reference) <= delta)
    return est, reference, hit


def cmd_bench(args) -> int:
    ns = [int(x) for x in args.grid_n.split(",")]
    deltas = [float(x) for x in args.grid_delta.split(",")]
    rhos = [float(x) for x in args.grid_rho.split(",")]
    jobs = []
    for n in ns:
        for delta in deltas:
            for rho in rhos:
                for trial in range(args.trials):
                    jobs.append((args.property, n, delta, rho, trial))
    threads = max(1, int(os.environ.get("TIT_THREADS", "1")))

    def run(job):
        prop, n, delta, rho, trial = job
        seed = args.seed + trial
        est, ref, hit = _bench_trial(prop, n, delta, rho, seed)
        return [CSV_SCHEMA, prop, n, delta, rho, trial, seed,
                f"{est:.8f}", f"{ref:.8f}", hit]

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(run, jobs))
    else:
        rows = [run(j) for j in jobs]
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["schema", "property", "n", "delta", "rho", "trial",
                         "seed", "estimate", "reference", "hit"])
        writer.writerows(rows)
    finally:
        if args.out:
            out.close()
    hits = sum(r[-1] for r in rows)
    print(f"bench: {hits}/{len(rows)} trials within delta", file=sys.stderr)
    return 0


def _add_common(p, delta=True):
    if delta:
        p.add_argument("--delta", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=["uniform", "bernoulli", "block", "full"],
                   default=None)
    p.add_argument("--constants", choices=["paper", "practical"], default="practical")
    p.add_argument("--json", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tit",
                                 description="tolerant testing of binary-image properties")
    sub = ap.add_subparsers(dest="command", required=True)

    pe = sub.add_parser("estimate", help="estimate distance to a property")
    pe.add_argument("property", choices=PROPERTIES)
    pe.add_argument("image")
    _add_common(pe)
    pe.set_defaults(fn=cmd_estimate)

    pl = sub.add_parser("learn", help="learn a hypothesis inside the class")
    pl.add_argument("property", choices=["halfplane", "convexity", "convex"])
    pl.add_argument("image")
    pl.add_argument("--out", default=None)
    _add_common(pl)
    pl.set_defaults(fn=cmd_learn)

    po = sub.add_parser("oracle", help="exact brute-force distance (small n)")
    po.add_argument("property", choices=list(PROPERTIES) + ["border-connectedness"])
    po.add_argument("image")
    po.add_argument("--json", action="store_true")
    po.set_defaults(fn=cmd_oracle)

    pg = sub.add_parser("gen", help="generate a planted instance (PBM + JSON sidecar)")
    pg.add_argument("property", choices=PROPERTIES)
    pg.add_argument("--n", type=int, required=True)
    pg.add_argument("--rho", type=float, default=0.0)
    pg.add_argument("--seed", type=int, default=0)
    pg.add_argument("--vertices", type=int, default=6)
    pg.add_argument("--density", type=float, default=0.3)
    pg.add_argument("--out", required=True)
    pg.set_defaults(fn=cmd_gen)

    pb = sub.add_parser("bench", help="seeded benchmark grid, CSV output")
    pb.add_argument("property", choices=PROPERTIES)
    pb.add_argument("--trials", type=int, default=10)
    pb.add_argument("--grid-n", default="64")
    pb.add_argument("--grid-delta", default="0.2")
    pb.add_argument("--grid-rho", default="0.0")
    pb.add_argument("--seed", type=int, default=0)
    pb.add_argument("--out", default=None)
    pb.set_defaults(fn=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ParameterError, ValueError) as exc:
        if isinstance(exc, ResourceCapError):
            print(f"error: resource cap: {exc}", file=sys.stderr)
            return 3
        if isinstance(exc, (PBMError, OracleBudgetError)):
            print(f"error: {exc}", file=sys.stderr)
            return 1 if isinstance(exc, PBMError) else 2
        print(f"error: parameter: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: io: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
