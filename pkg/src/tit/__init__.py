"""Tolerant testing of binary-image properties: additive-error distance
estimation to half-plane, convexity, and connectedness, with exact
brute-force oracles and planted-instance generators for validation.
"""

from .connectedness import (ConnectednessEstimate, ResourceCapError,
                            RowConfiguration, SquarePartition, border_connectedness_distance,
                            compute_status, connectedness_square_sample_count,
                            construct_graph, estimate_connectedness_distance,
                            pad_and_partition)
from .convexity import (ConvexityDP, ConvexityEstimate, ReferenceBox,
                        TriangleInstance,
                        convexity_sample_size, estimate_convexity_distance,
                        learn_convex, render_convex_hypothesis)
from .gen import (PlantedInstance, add_noise, gen_connected, gen_convex,
                  gen_halfplane, tile_squares)
from .halfplane import (DirectionSet, HalfPlaneEstimate, HalfPlaneRef,
                        direction_set, estimate_halfplane_distance,
                        halfplane_sample_size, learn_halfplane,
                        render_halfplane)
from .image import (BinaryImage, DimensionMismatchError, PBMError,
                    read_pbm, relative_distance, write_pbm)
from .oracles import (DEFAULT_BUDGET, OracleBudget, OracleBudgetError,
                      oracle_border_connectedness_distance,
                      oracle_connectedness_distance,
                      oracle_convexity_distance, oracle_halfplane_distance)
from .predicates import (connected_components, convex_hull, is_border_connected,
                         is_connected, is_convex, is_halfplane, rasterize_hull)
from .refgrid import (PAPER_CONSTANTS, PRACTICAL_CONSTANTS, ConvexityConstants,
                      LinePointPair, ReferenceGrid, build_reference_grid,
                      precompute_count_tables)
from .sampling import (PixelSample, SampleSet, make_sample, sample_bernoulli,
                       sample_block, sample_full, sample_uniform)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
