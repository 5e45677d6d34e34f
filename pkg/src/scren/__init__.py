"""Negativity-based entanglement measures and monogamy checks for multi-qudit states."""

from .guards import CostGuardError
from .monogamy import (
    ANTISYMMETRIC_333,
    CKW_COUNTEREXAMPLE_322,
    CKWReport,
    IndexVector,
    SMReport,
    SMTerm,
    ckw_report,
    enumerate_subsets,
    n_scren_pure,
    sm_report,
)
from .negativity import is_ppt, negativity_mixed, negativity_pure
from .tangle import n_tangle_pure, one_tangle, two_tangle, wootters_tangle
from .wclass import (
    WClassSpec,
    build_state,
    one_scren_closed,
    random_spec,
    reduced_xy,
    two_scren_closed,
    verify_lemma1,
    verify_theorem1,
    verify_theorem2,
)
from .roof import (
    ConjectureViolation,
    Ensemble,
    MixingUnitary,
    RoofConfig,
    RoofResult,
    cren,
    haar_unitary,
    hjw_ensemble,
    roof_minimize,
    roof_sqrt_functional,
    scren2,
)
from .states import (
    Bipartition,
    DensityMatrix,
    PureState,
    SchmidtDecomposition,
    basis_state,
    bell_state,
    dump_state,
    ghz_state,
    haar_random_state,
    load_state,
    partial_trace,
    partial_transpose,
    reduced_density,
    schmidt,
    tensor,
    to_density,
    w_state,
)

__all__ = [
    "ANTISYMMETRIC_333",
    "Bipartition",
    "CKWReport",
    "CKW_COUNTEREXAMPLE_322",
    "ConjectureViolation",
    "CostGuardError",
    "DensityMatrix",
    "Ensemble",
    "IndexVector",
    "MixingUnitary",
    "PureState",
    "RoofConfig",
    "RoofResult",
    "SMReport",
    "SMTerm",
    "SchmidtDecomposition",
    "WClassSpec",
    "basis_state",
    "bell_state",
    "build_state",
    "ckw_report",
    "cren",
    "dump_state",
    "enumerate_subsets",
    "ghz_state",
    "haar_random_state",
    "haar_unitary",
    "hjw_ensemble",
    "is_ppt",
    "load_state",
    "n_scren_pure",
    "n_tangle_pure",
    "negativity_mixed",
    "negativity_pure",
    "one_scren_closed",
    "one_tangle",
    "partial_trace",
    "partial_transpose",
    "random_spec",
    "reduced_density",
    "reduced_xy",
    "roof_minimize",
    "roof_sqrt_functional",
    "schmidt",
    "scren2",
    "sm_report",
    "tensor",
    "to_density",
    "two_scren_closed",
    "two_tangle",
    "verify_lemma1",
    "verify_theorem1",
    "verify_theorem2",
    "w_state",
    "wootters_tangle",
]

__version__ = "0.1.0"
