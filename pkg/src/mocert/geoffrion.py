"""(M, eps)-Geoffrion properness on finite candidate sets.

Every predicate below is evaluated on the gains array ``D = (f(x0) - F) - eps``:
objective ``i`` improves at ``x`` when ``D_i > 0`` and deteriorates when
``D_i < 0``.  Membership uses the product form ``D_i <= M * (-D_j)`` so that it
is the exact complement of the strict ``Q_i`` system in floating point.
"""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ._backend import kernels
from .errors import DomainError, InputError, NoCertificateError, NumericalError, PreconditionError
from .numerics import phase1_feasible
from .pareto import first_dominator, pareto_mask
from .problem import CandidatePoint, epsilon_vector

CERT_TOL = 1e-9
_TIE_RTOL = 1e-12


def _index(i, m, what="objective"):
    if not isinstance(i, (int, np.integer)) or not 0 <= i < m:
        raise InputError(f"{what} index {i!r} out of range for m={m}")
    return int(i)


def _positive(M_hat):
    M_hat = float(M_hat)
    if not M_hat > 0:
        raise InputError(f"M_hat must be positive, got {M_hat}")
    return M_hat


def tradeoff_ratio(x0, x, i, j, eps):
    """Gain in objective ``i`` per unit of loss in objective ``j`` when moving
    from ``x0`` to ``x``.

    Examples
    --------
    >>> from mocert.problem import registry_instance
    >>> prob, S = registry_instance("paper-discrete")
    >>> round(tradeoff_ratio(S[3], S[0], 0, 2, 0.0), 7)
    1.3660254
    """
    m = x0.fvals.size
    i, j = _index(i, m), _index(j, m)
    eps = epsilon_vector(eps, m)
    D = kernels.gains(x0.fvals, x.fvals, eps)
    if not D[i] > 0:
        raise DomainError(f"objective {i} does not improve: f_i(x) >= f_i(x0) - eps_i")
    if not D[j] < 0:
        raise DomainError(f"objective {j} does not deteriorate: f_j(x) <= f_j(x0) - eps_j")
    return float(D[i] / -D[j])


@dataclass(frozen=True)
class Witness:
    """One improving pair ``(i, x)`` with its best admissible ``j``.

    ``best_j`` is None and ``ratio`` is +inf when no objective deteriorates.
    """

    i: int
    x: CandidatePoint
    best_j: Optional[int]
    ratio: float
    index: int


@dataclass(frozen=True)
class PropernessCertificate:
    """Minimal trade-off bound of ``point`` over a candidate set.

    ``minimal_M`` is +inf when some improving pair has no admissible ``j``,
    and 0 with ``vacuous=True`` when no improving pair exists at all.
    """

    point: CandidatePoint
    minimal_M: float
    eps: np.ndarray
    vacuous: bool
    cset: object = field(repr=False)
    _rows: np.ndarray = field(repr=False)
    _cols: np.ndarray = field(repr=False)
    _ratio: np.ndarray = field(repr=False)
    _best_j: np.ndarray = field(repr=False)
    _gains: np.ndarray = field(repr=False)

    @property
    def witnesses(self):
        return [Witness(int(i), self.cset[int(k)], None if j < 0 else int(j), float(r), int(k))
                for k, i, j, r in zip(self._rows, self._cols, self._best_j, self._ratio)]

    def __len__(self):
        return self._rows.size

    def is_proper(self, M_hat):
        """Exact product-form membership at bound ``M_hat``."""
        return _proper_rows(self._gains, _positive(M_hat))


def _proper_rows(D, M_hat):
    """True when every improving (x, i) in the gains array has an admissible
    ``j`` with ``D_i <= M_hat * (-D_j)``."""
    if D.size == 0:
        return True
    up = D > 0
    if not up.any():
        return True
    down = D < 0
    cap = np.where(down, M_hat * -D, -np.inf)
    # for each (row, i): any j with D_i <= cap_j
    ok = (D[:, :, None] <= cap[:, None, :]).any(axis=2)
    return bool(np.all(ok[up]))


def min_M_for_point(x0, cset, eps, check_pareto=True):
    """Smallest ``M`` for which ``x0`` is (M, eps)-Geoffrion proper over ``cset``.

    Raises :class:`PreconditionError` when ``x0`` is not eps-Pareto in the set.
    """
    eps = epsilon_vector(eps, x0.fvals.size)
    if check_pareto and len(cset):
        k = first_dominator(x0, cset, eps)
        if k is not None:
            raise PreconditionError(f"point is eps-dominated by candidate {k}")
    if not len(cset):
        D = np.zeros((0, x0.fvals.size))
        best = best_j = D
    else:
        D = kernels.gains(x0.fvals, cset.F, eps)
        best, best_j = kernels.point_tradeoff(x0.fvals, cset.F, eps)
    rows, cols = np.nonzero(~np.isnan(best))
    ratio = best[rows, cols] if rows.size else np.zeros(0)
    vacuous = rows.size == 0
    minimal = 0.0 if vacuous else float(ratio.max())
    return PropernessCertificate(x0, minimal, eps, vacuous, cset, rows, cols, ratio,
                                 np.asarray(best_j)[rows, cols] if rows.size else np.zeros(0, int),
                                 D)


def geoffrion_mask(cset, M_hat, eps):
    """Mask of the eps-Pareto members whose minimal trade-off bound is at most ``M_hat``."""
    M_hat = _positive(M_hat)
    eps = epsilon_vector(eps, cset.m)
    if not len(cset):
        return np.zeros(0, dtype=bool)
    mask = pareto_mask(cset, eps)
    idx = np.flatnonzero(mask)
    if idx.size == 0:
        return mask
    bound, _ = kernels.min_tradeoff_bounds(cset.F[idx], cset.F, eps)
    bound = np.asarray(bound)
    keep = bound <= M_hat
    # the division-based bound may round across M_hat; re-decide exactly
    near = np.abs(bound - M_hat) <= _TIE_RTOL * max(1.0, M_hat)
    for t in np.flatnonzero(near):
        D = kernels.gains(cset.F[idx[t]], cset.F, eps)
        keep[t] = _proper_rows(D, M_hat)
    out = np.zeros(len(cset), dtype=bool)
    out[idx[keep]] = True
    return out


def geoffrion_set(cset, M_hat, eps):
    """Members of ``cset`` that are (M_hat, eps)-Geoffrion proper within it.

    Examples
    --------
    >>> from mocert.problem import registry_instance
    >>> _, S = registry_instance("paper-discrete")
    >>> [len(geoffrion_set(S, M, 0.0)) for M in (2.0, 1.0, 0.99)]
    [4, 3, 0]
    """
    return cset.subset(geoffrion_mask(cset, M_hat, eps))


def _qi_rows(D, i, M_hat):
    others = np.delete(np.arange(D.shape[1]), i)
    Di = D[:, i]
    return (Di > 0) & np.all(Di[:, None] > M_hat * -D[:, others], axis=1)


def qi_witness_index(x0, i, M_hat, eps, cset):
    """Index of the first member satisfying every strict inequality of ``Q_i(x0)``."""
    m = x0.fvals.size
    i = _index(i, m)
    M_hat = _positive(M_hat)
    eps = epsilon_vector(eps, m)
    if not len(cset):
        return None
    hit = np.flatnonzero(_qi_rows(kernels.gains(x0.fvals, cset.F, eps), i, M_hat))
    return int(hit[0]) if hit.size else None


def qi_system_feasible(x0, i, M_hat, eps, cset):
    """First member of ``cset`` solving the strict system ``Q_i(x0)``, or None.

    The system asks for ``f_i(x) < f_i(x0) - eps_i`` together with
    ``f_i(x0) - f_i(x) - eps_i > M_hat * (f_j(x) - f_j(x0) + eps_j)`` for all
    ``j != i``.
    """
    if len(cset) and not cset.feasible.all():
        raise PreconditionError("candidate set contains infeasible points")
    k = qi_witness_index(x0, i, M_hat, eps, cset)
    return None if k is None else cset[k]


@dataclass(frozen=True)
class GordanCertificate:
    """Nonnegative multipliers showing ``Q_i(x0)`` has no solution on a set.

    ``tau`` weighs the objective rows (``tau[i]`` the row of ``f_i`` alone,
    ``tau[j]`` the combined ``f_i + M f_j`` row) and ``mu`` the constraints.
    """

    i: int
    tau: np.ndarray
    mu: np.ndarray
    normalized: bool
    slack: float = 0.0


def _objective_rows(F, f0, i, M_hat, eps):
    """Row ``j`` of the returned (m x N) array evaluates ``h_j`` at each member."""
    D = kernels.gains(f0, F, eps)
    H = np.empty((F.shape[1], F.shape[0]))
    for j in range(F.shape[1]):
        H[j] = -D[:, i] if j == i else -D[:, i] - M_hat * D[:, j]
    return H


def aggregate_slack(cert, x0, M_hat, eps, cset):
    """Values of ``sum tau_j h_j(x) + sum mu_r g_r(x)`` at every member."""
    eps = epsilon_vector(eps, x0.fvals.size)
    H = _objective_rows(cset.F, x0.fvals, cert.i, M_hat, eps)
    return cert.tau @ H + cset.G @ cert.mu


def gordan_multipliers(x0, i, M_hat, eps, cset):
    """Multipliers certifying that ``Q_i(x0)`` (plus the constraints) has no
    solution over ``cset``.

    Solves the finite alternative with the phase-I kernel: either some convex
    combination ``y`` of set points satisfies every aggregated row strictly
    (:class:`NoCertificateError`, no multipliers exist), or ``tau, mu >= 0``
    make the aggregated inequality nonnegative at every member.  The result is
    re-verified by substitution.
    """
    m = x0.fvals.size
    i = _index(i, m)
    M_hat = _positive(M_hat)
    eps = epsilon_vector(eps, m)
    if not len(cset):
        raise PreconditionError("candidate set is empty")
    k = qi_witness_index(x0, i, M_hat, eps, cset)
    if k is not None:
        raise PreconditionError(f"Q_{i} is solved by candidate {k}; no certificate exists")
    A = np.vstack([_objective_rows(cset.F, x0.fvals, i, M_hat, eps), cset.G.T])
    res = phase1_feasible(A, nonneg=True, verify_tol=CERT_TOL)
    if res.witness is not None:
        raise NoCertificateError(
            f"a convex combination of candidates solves the aggregated system for i={i}")
    weights = res.certificate[0]
    tau, mu = weights[:m], weights[m:]
    total = tau.sum()
    normalized = bool(total > 1e-12)
    if normalized:
        tau, mu = tau / total, mu / total
    cert = GordanCertificate(i, tau, mu, normalized)
    slack = aggregate_slack(cert, x0, M_hat, eps, cset)
    worst = float(slack.min())
    if worst < -CERT_TOL:
        raise NumericalError(f"Gordan certificate fails substitution (slack {worst:.3g})")
    return GordanCertificate(i, tau, mu, normalized, worst)
