"""Locally exchanged twisted cubes: construction, conditional connectivity and diagnosis."""
from letq._accel import get_backend, set_backend
from letq.diagnosis import (
    MMSTAR,
    PMC,
    AdversaryPolicy,
    DiagnosisResult,
    DistinguishReport,
    Syndrome,
    TestAssignment,
    VerificationReport,
    build_assignment,
    diagnose,
    distinguish,
    generate_syndrome,
    indistinguishable_witness,
    is_consistent,
    mm_distinguishable,
    pmc_distinguishable,
    tg_formula,
    verify_tg,
)
from letq.errors import (
    CapacityError,
    InputError,
    LetqError,
    ParameterError,
    UnsupportedFamilyError,
    UnsupportedRegimeError,
)
from letq.structure import (
    CutReport,
    GoodNeighborWitness,
    MinOrderResult,
    good_neighbor_fault_set,
    is_g_good_neighbor_set,
    is_rg_cut,
    is_triangle_free,
    kappa_g_bruteforce,
    kappa_g_formula,
    max_common_neighbors,
    min_order_with_min_degree,
)
from letq.topology import (
    CubeParams,
    Topology,
    build,
    build_letq,
    build_ltq,
    cluster_partition,
    decompose,
    half_isomorphism,
    letq_adjacent,
    letq_neighbors,
    ltq_neighbors,
    swap_isomorphism,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
