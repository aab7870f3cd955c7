"""Certification of approximate Pareto, Geoffrion proper and KKT points for
multiobjective optimization problems on finite candidate sets."""
from ._backend import BACKEND
from .errors import (
    CertificationError,
    ConfigurationError,
    DomainError,
    EvaluationError,
    InputError,
    NoCertificateError,
    NotApplicableError,
    NumericalError,
    PreconditionError,
    RegistryLookupError,
    SolverError,
)
from .geoffrion import (
    GordanCertificate,
    PropernessCertificate,
    geoffrion_set,
    gordan_multipliers,
    min_M_for_point,
    qi_system_feasible,
    tradeoff_ratio,
)
from .kkt import KKTReport, Multipliers, check_bcq, check_scq, is_modified_eps_kkt, kkt_residual
from .lagrangian import (
    SaddleReport,
    Verdict,
    eps_bar,
    eps_subdiff_contains,
    lagrangian_value,
    verify_eps_kkt,
    verify_saddle,
)
from .pareto import DominanceVerdict, Mode, eps_dominates, eps_pareto_set, is_eps_pareto, is_local_pareto
from .problem import (
    CandidatePoint,
    CandidateSet,
    ProblemInstance,
    evaluate,
    make_grid,
    registry_instance,
)
from .scalarization import (
    ScalarSolveReport,
    is_s_eps_minimum,
    m_bound_from_weights,
    solve_weighted_sum,
    weighted_sum_value,
    weights_from_certificates,
)
from .sequences import SequenceTrace, build_kkt_sequence, ekeland_point, make_schedule, verify_limit_kkt

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CertificationError",
    "ConfigurationError",
    "DomainError",
    "EvaluationError",
    "InputError",
    "NoCertificateError",
    "NotApplicableError",
    "NumericalError",
    "PreconditionError",
    "RegistryLookupError",
    "SolverError",
    "GordanCertificate",
    "PropernessCertificate",
    "geoffrion_set",
    "gordan_multipliers",
    "min_M_for_point",
    "qi_system_feasible",
    "tradeoff_ratio",
    "KKTReport",
    "Multipliers",
    "check_bcq",
    "check_scq",
    "is_modified_eps_kkt",
    "kkt_residual",
    "SaddleReport",
    "Verdict",
    "eps_bar",
    "eps_subdiff_contains",
    "lagrangian_value",
    "verify_eps_kkt",
    "verify_saddle",
    "DominanceVerdict",
    "Mode",
    "eps_dominates",
    "eps_pareto_set",
    "is_eps_pareto",
    "is_local_pareto",
    "CandidatePoint",
    "CandidateSet",
    "ProblemInstance",
    "evaluate",
    "make_grid",
    "registry_instance",
    "ScalarSolveReport",
    "is_s_eps_minimum",
    "m_bound_from_weights",
    "solve_weighted_sum",
    "weighted_sum_value",
    "weights_from_certificates",
    "SequenceTrace",
    "build_kkt_sequence",
    "ekeland_point",
    "make_schedule",
    "verify_limit_kkt",
    "__version__",
]
