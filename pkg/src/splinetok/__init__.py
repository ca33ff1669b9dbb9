"""Compact B-spline tokenization of continuous multi-DoF action sequences."""

from .bspline import (
    BSplineBasis,
    KnotVector,
    build_basis_matrix,
    eval_basis,
    eval_curve,
    make_clamped_knots,
)
from .errors import (
    DegreeError,
    DofMismatchError,
    DomainError,
    EmptyDatasetError,
    ParseError,
    ShapeError,
    SplinetokError,
    VocabError,
)
from .fitting import ControlPointMatrix, FitSolver, fit, fit_conditioned, residual_mse
from .normalize import (
    NormalizationStats,
    compute_stats,
    denormalize,
    normalize,
    stats_from_json,
    stats_to_json,
)
from .pipeline import (
    StreamState,
    TokenizerConfig,
    config_from_json,
    config_to_json,
    decode,
    decode_stream,
    encode,
    encode_stream,
)
from .quantize import (
    QuantizationScheme,
    TokenSequence,
    dequantize,
    flatten,
    quantize,
    unflatten,
)

__version__ = "0.1.0"
