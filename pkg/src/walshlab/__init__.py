"""Exact-arithmetic experiments with lacunary Walsh series in rearrangement-invariant norms."""

from .dyadic import (
    DistributionTable,
    DyadicInterval,
    DyadicSet,
    DyadicStep,
    UniformStep,
    combine,
    decreasing_rearrangement,
    distribution,
    integral,
    refine,
)
from .khintchine import (
    ConstantsReport,
    check_bound_eq1,
    eq1_bound,
    find_local_N,
    majorization_constant,
    ratio,
    scan_constants,
    verify_equidistribution,
)
from .norms import (
    INF,
    Local,
    Lp,
    OrliczExp,
    exp_integral,
    fundamental_function,
    localize,
    lp_norm,
    norm,
    orlicz_norm,
    parse_spec,
)
from .projection import (
    OperatorMatrix,
    averaging,
    basis_constant_estimate,
    build_Qn,
    operator_norm_estimate,
    rademacher_projection,
    sign_flip,
    verify_averaging_identity,
)
from .walsh import (
    LacunarySeq,
    SignMatrix,
    analyze,
    rademacher,
    synthesize,
    theta_matrix,
    validate_lacunary,
    walsh,
    walsh_product_index,
)

__version__ = "0.1.0"

__all__ = [
    "DistributionTable",
    "DyadicInterval",
    "DyadicSet",
    "DyadicStep",
    "UniformStep",
    "combine",
    "decreasing_rearrangement",
    "distribution",
    "integral",
    "refine",
    "ConstantsReport",
    "check_bound_eq1",
    "eq1_bound",
    "find_local_N",
    "majorization_constant",
    "ratio",
    "scan_constants",
    "verify_equidistribution",
    "INF",
    "Local",
    "Lp",
    "OrliczExp",
    "exp_integral",
    "fundamental_function",
    "localize",
    "lp_norm",
    "norm",
    "orlicz_norm",
    "parse_spec",
    "OperatorMatrix",
    "averaging",
    "basis_constant_estimate",
    "build_Qn",
    "operator_norm_estimate",
    "rademacher_projection",
    "sign_flip",
    "verify_averaging_identity",
    "LacunarySeq",
    "SignMatrix",
    "analyze",
    "rademacher",
    "synthesize",
    "theta_matrix",
    "validate_lacunary",
    "walsh",
    "walsh_product_index",
]
