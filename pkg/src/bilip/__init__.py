"""Verifier for the statement: a locally L-bilipschitz map between
path-metric graphs is globally L-bilipschitz when the codomain is simply
connected.  Finite weighted multigraphs stand in for path-metric spaces;
every procedure of the argument (local constants, quotient inclusions,
path lifting, monodromy) is executable, and an all-pairs oracle
cross-checks every certificate.
"""
from .errors import (
    BilipError,
    EmptySampleSet,
    EscapedDomain,
    InputError,
    LiftCollision,
    LiftError,
    MoveLiftFailure,
    NoContinuation,
    NonImmersedEdge,
    NonpositiveRadius,
    NotLocallyInjective,
    NotNullHomotopic,
    PointNotOnGraph,
    PrerequisiteMissing,
    StartMismatch,
)
from .metric_graph import (
    BallRegion,
    BallSegment,
    GraphPoint,
    MetricGraph,
    Walk,
    WalkSegment,
    ahlfors_constant,
    ball,
    concat_walks,
    cycle_rank,
    distance,
    normalize_walk,
    reverse_walk,
    shortest_walk,
    subdivide_edge,
    validate_walk,
    walk_end,
    walk_length,
    walks_equal,
)
from .graph_map import (
    GraphMap,
    LocalBilipschitzReport,
    LqViolation,
    MapViolation,
    fiber,
    local_bilipschitz_constant,
    local_injectivity,
    lq_verify,
    max_multiplicity_in_ball,
    multiplicity,
    multiplicity_bound,
    subdivide_codomain_edge,
    subdivide_domain_edge,
    verify_map,
)
from .lifting import (
    Homotopy,
    MonodromyObstruction,
    RemoveSpur,
    Subdivide,
    apply_move,
    contract_loop,
    fiber_transport,
    lift_homotopy,
    lift_path,
    monodromy_injectivity,
)
from .theorem import (
    OracleReport,
    TheoremReport,
    global_bilipschitz_oracle,
    lower_bound_via_disjoint_balls,
    verify_theorem,
)
from .corpus import (
    CorpusSpec,
    SplitMix64,
    gen_cycle_cover,
    gen_mcsimpleminded,
    gen_tree_perturbed,
    tree_suite,
)

__version__ = "0.1.0"
