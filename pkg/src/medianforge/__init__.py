"""Combinatorics of finite CAT(0) cube complexes.

Cubulation of wallspaces, hyperplanes and halfspaces, medians, cubical
quotients, strong separation and searches over group actions.
"""

from .actions import (
    ActionSpec,
    Generator,
    Witness,
    contracting_witness,
    double_skewer_search,
    median_trap,
    orbit,
    replay_witness,
)
from .cubecomplex import (
    CubeComplex,
    Hyperplane,
    dimension,
    distance,
    hyperplanes,
    median,
    median_vertex,
    separating_hyperplanes,
    transverse,
    validate_complex,
)
from .errors import (
    FlagViolation,
    InputError,
    MedianForgeError,
    NotMedian,
    SizeLimitExceeded,
    ValidationError,
)
from .generators import grid, grid_symmetries, product, random_wallspace, staircase, tree_ball
from .lattice import FacingTuple, HyperplaneRelationTable, facing_tuples, relation_table, ss_chains
from .quotient import QuotientMap, are_isomorphic, cubical_quotient, cut_and_glue, verify_quotient_distance
from .wallspace import (
    Orientation,
    Wallspace,
    consistent_orientations,
    cubulate,
    principal_orientation,
    validate_wallspace,
)

__version__ = "0.1.0"
