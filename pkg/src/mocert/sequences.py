"""Grid harness for approximate-KKT sequences and the vector Ekeland principle."""
import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError, PreconditionError
from .kkt import is_modified_eps_kkt, kkt_residual
from .pareto import Mode, is_local_pareto, pareto_mask
from .problem import CandidateSet


def make_schedule(eps0, factor, count):
    """Geometric schedule ``eps0 * factor**k`` for ``k = 0..count-1``.

    Examples
    --------
    >>> make_schedule(1.0, 0.5, 4)
    [1.0, 0.5, 0.25, 0.125]
    """
    eps0, factor = float(eps0), float(factor)
    if not eps0 > 0:
        raise InputError("eps0 must be positive")
    if not 0 < factor < 1:
        raise InputError("factor must lie in (0, 1)")
    if int(count) != count or count < 1:
        raise InputError("count must be a positive integer")
    return [eps0 * factor ** k for k in range(int(count))]


@dataclass(frozen=True)
class SequenceTrace:
    """Points ``x^k`` picked per schedule entry, their certificates (None
    where no certificate was found) and the limit of the stored trace.

    ``limit_kind`` records which local optimality held at the limit guess:
    ``"local-pareto"``, ``"local-weak-pareto"`` or ``"neither"``.
    """

    schedule: list
    points: list
    reports: list
    limit: object
    limit_residual: float
    limit_kind: str
    problem: object
    delta: float

    @property
    def certified(self):
        return all(r is not None for r in self.reports)


def _check_schedule(schedule):
    sched = [float(e) for e in schedule]
    if not sched:
        raise InputError("schedule is empty")
    if any(not e > 0 for e in sched):
        raise InputError("schedule entries must be positive")
    if any(b >= a for a, b in zip(sched, sched[1:])):
        raise InputError("schedule must be strictly decreasing")
    return sched


def build_kkt_sequence(problem, limit_guess, schedule, grid, delta=None):
    """Follow the eps_k e-Pareto points nearest to ``limit_guess``.

    The grid is restricted to feasible members within ``delta`` of the guess
    (the whole grid when ``delta`` is None).  For each ``eps_k`` the nearest
    ``eps_k e``-Pareto member of the restricted grid is chosen and a modified
    ``eps_k``-KKT certificate is searched on the same restricted grid.
    """
    if not limit_guess.feasible:
        raise PreconditionError("limit guess is infeasible")
    sched = _check_schedule(schedule)
    feas = grid.subset(grid.feasible) if len(grid) else grid
    dist = np.linalg.norm(feas.X - limit_guess.x, axis=1) if len(feas) else np.zeros(0)
    if delta is None:
        delta = float(dist.max()) if dist.size else 0.0
    elif not delta > 0:
        raise InputError("delta must be positive")
    near = dist <= delta
    if not near.any():
        raise InputError("no feasible grid point within delta of the limit guess")
    local = feas.subset(near)
    local_dist = dist[near]

    radius = max(float(delta), 1e-300)
    if is_local_pareto(limit_guess, local, radius, Mode.STRICT):
        kind = "local-pareto"
    elif is_local_pareto(limit_guess, local, radius, Mode.INTERIOR):
        kind = "local-weak-pareto"
    else:
        kind = "neither"

    points, reports = [], []
    for eps in sched:
        members = np.flatnonzero(pareto_mask(local, eps))
        k = int(members[np.argmin(local_dist[members])])
        xk = local[k]
        points.append(xk)
        reports.append(is_modified_eps_kkt(xk, eps, problem, local))
    limit = points[-1]
    return SequenceTrace(sched, points, reports, limit,
                         kkt_residual(limit, problem).residual, kind, problem, float(delta))


def verify_limit_kkt(trace, tol):
    """True when the trace's limit has KKT residual and complementarity
    violation both within ``tol``."""
    if not trace.points:
        raise InputError("trace is empty")
    rep = kkt_residual(trace.limit, trace.problem)
    return bool(rep.residual <= tol and rep.comp_slack >= -tol)


def _strictly_below(D):
    """Rows where ``f(x) + shift - f(xbar)`` lies in the open negative orthant,
    given ``D = f(xbar) - f(x) - shift``."""
    return np.all(D > 0, axis=1)


def ekeland_violations(k, U, rho):
    """Indices of members contradicting either Ekeland conclusion for ``U[k]``."""
    fbar, xbar = U.F[k], U.X[k]
    others = np.arange(len(U)) != k
    first = _strictly_below(fbar - U.F - rho)
    step = math.sqrt(rho) * np.linalg.norm(U.X - xbar, axis=1)
    second = _strictly_below(fbar - U.F - step[:, None])
    return np.flatnonzero(others & (first | second))


def ekeland_point(grid, problem, rho, x0):
    """Brute-force the perturbed point of the vector Ekeland principle on a grid.

    Works on ``U = grid + {x0}`` with ``c0 = e``.  Raises
    :class:`PreconditionError` if some member rho-dominates ``x0`` (premise
    violated); otherwise returns the first member within ``sqrt(rho)`` of
    ``x0`` (``x0`` itself first, then grid order) satisfying both conclusions
    against every other member, or None.
    """
    rho = float(rho)
    if not rho > 0:
        raise InputError("rho must be positive")
    U = grid.with_point(x0) if len(grid) else CandidateSet([x0])
    k0 = U.index_of(x0)
    D = x0.fvals - U.F - rho
    bad = np.flatnonzero(np.all(D >= 0, axis=1) & np.any(D > 0, axis=1))
    if bad.size:
        raise PreconditionError(f"premise violated: candidate {int(bad[0])} rho-dominates x0")
    close = np.linalg.norm(U.X - x0.x, axis=1) <= math.sqrt(rho)
    order = [k0] + [k for k in range(len(U)) if k != k0]
    for k in order:
        if close[k] and ekeland_violations(k, U, rho).size == 0:
            return U[k]
    return None
