"""shiftindex: numerical index theory for operators with shifts on the circle.

The package realizes elliptic (pseudo)differential operators twisted by a
rotation group, certifies ellipticity of their crossed-product symbols, and
computes the Fredholm index two independent ways: stabilized singular-value
counting of the truncated operator, and the pairing of a noncommutative
Chern character (times the localized Todd class) with the fundamental class
of the doubled ball bundle.
"""

from .group_model import (
    GOLDEN_CONJUGATE,
    ConjugacyTable,
    FixedSet,
    GroupModelError,
    GroupSpec,
    codifferential_action,
    conjugacy_table,
    diophantine_margin,
    diophantine_sweep,
    fixed_set,
    growth_census,
    haar_average,
    word_length,
)
from .trig import SheetSymbol, TrigMatrixPoly
from .shift_ops import (
    PDOCoefficient,
    ShiftOperator,
    TruncatedOperator,
    assemble,
    compose,
    direct_sum,
    quantize,
    shift_matrix,
    sobolev_bound_check,
)
from .symbol_calc import (
    CrossedSymbol,
    EllipticityCertificate,
    InversionError,
    NotElliptic,
    crossed_multiply,
    invert,
    is_elliptic,
    represent,
    symbol_of,
)
from .fredholm import IndexEstimate, numerical_index
from .nc_forms import NCForm, TraceValue, nc_d, nc_product, supercommutator, trace_tau
from .chern_index import (
    CurvatureForm,
    LocalizedTodd,
    ProjectionField,
    build_projection,
    chern_character,
    curvature,
    localized_todd,
    mollify_and_idempotentize,
)
from .index_engine import IndexReport, cohomological_index, pair_fundamental

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
