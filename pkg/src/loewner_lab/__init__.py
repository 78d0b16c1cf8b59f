"""Hermitian interval interpolation, norm-constrained completions,
operator convexity testing, and a computable matrix-sequence
semicontinuity model."""

__version__ = "0.1.0"

from .completion import ColumnConstraint, CornerConstraint, fix_column, fix_corner
from .hermitian import (
    ToleranceConfig,
    compress,
    compression_inverse,
    loewner_geq,
    matrix_function,
    operator_norm,
    psd_sqrt,
    random_hermitian,
    random_projection,
    range_projection,
    spectral_decompose,
)
from .interpolation import (
    CompressionTarget,
    InterpolationCertificate,
    OperatorInterval,
    estimate_constants,
    interpolate_exact,
    interpolate_one_sided,
    interpolate_with_slack,
    row_contraction_factor,
)
from .interval import Interval
from .opfunctions import (
    ConvexIntegralRep,
    MeasureOnLine,
    MonotoneRep,
    ScalarFunction,
    StrongConvexRep,
    davis_convex_test,
    eval_convex_rep,
    eval_monotone_rep,
    eval_strong_rep,
    get_function,
    matrix_eval_rep,
    monotone_test,
    strong_convex_test,
)
from .seqmodel import (
    BlockFace,
    Face18,
    Face45,
    Face211,
    SeqMatrixElement,
    face18_classify,
    face45_classify,
    face211_classify,
    testnet_oracle,
    usc_in_Adoublestar,
    usc_on_blockface,
    verify_2_11,
)
