"""Parametric AC power-flow solver.

Solves the rectangular-coordinate power-flow equations as a power series
in the loading parameter: every order beyond the base solution satisfies
one shared linear system, so a single factorization yields the whole
series. Supports constant-power and ZIP load models, multi-expansion
PV-curve tracing, and an independent Newton/convolution oracle suite.
"""

__version__ = "0.1.0"

from .dt_core import (
    EquationKind,
    LinearForm,
    LoadModel,
    OrderSystem,
    SeriesSolution,
    assemble_system,
    conv_at,
    delta,
    expand,
    lemma_coeffs,
    pf_const,
    pf_row,
    rhs_at_order,
    zip_linear_p,
    zip_linear_q,
)
from .errors import (
    BaseNotConvergedError,
    CaseSemanticError,
    CaseSyntaxError,
    DegenerateBranchError,
    DimensionMismatchError,
    KindMismatchError,
    NotZipBusError,
    OrderOutOfRangeError,
    OrderTooLowError,
    SeriesFlowError,
    SingularAtExpansionPointError,
    SingularMatrixError,
)
from .evaluator import (
    CurvePoint,
    PVCurve,
    TraceTermination,
    eval_series,
    mismatch,
    radius_estimate,
    trace,
    zip_injection,
)
from .netmodel import (
    BranchRecord,
    BusKind,
    BusOrdering,
    BusRecord,
    CaseData,
    DirectionVector,
    GenRecord,
    Network,
    Specified,
    ZipConfig,
    ZipEntry,
    build_ybus,
    compile_network,
    net_injections,
    parse_case,
    parse_sidecar,
    partition_and_specify,
    serialize_case,
)
from .numerics import Factorization, lu_factor, lu_solve
from .oracle import (
    NewtonReport,
    bracket_nose,
    direct_transform,
    fd_jacobian,
    flat_start,
    newton_solve,
    zip_power_coeff,
)
