"""KKT residuals, modified eps-KKT certification and constraint qualifications."""
import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError, NotApplicableError, SolverError
from .numerics import MinNormProblem, min_norm

ACTIVE_TOL = 1e-6
SLATER_TOL = 1e-9
BCQ_MARGIN = 1e-9
_TIE = 1e-12


@dataclass(frozen=True)
class Multipliers:
    """``lam`` on the unit Euclidean sphere of the nonnegative orthant, ``mu >= 0``."""

    lam: np.ndarray
    mu: np.ndarray


@dataclass(frozen=True)
class KKTReport:
    """Outcome of a residual computation or of a modified eps-KKT search.

    ``residual`` is the norm of ``sum lam_i u_i + sum mu_r v_r`` and
    ``comp_slack`` is ``sum mu_r g_r`` at the query point ``x``; the gradients
    are taken at ``companion``.
    """

    x: object
    companion: object
    multipliers: Multipliers
    residual: float
    comp_slack: float
    selected_generators: tuple
    epsilon: float
    combination: np.ndarray = None


def _active(problem, point, active_tol):
    return [r for r in range(problem.l) if abs(point.gvals[r]) <= active_tol]


def kkt_residual(x, problem, active_tol=ACTIVE_TOL, tol=1e-10):
    """Smallest multiplier combination norm at ``x``.

    Minimises over simplex weights on all objective generators and
    nonnegative weights on the generators of active constraints, then rescales
    so that ``||lam||_2 = 1``.

    Examples
    --------
    >>> from mocert.problem import registry_instance, evaluate
    >>> prob, _ = registry_instance("biobjective-quadratic")
    >>> rep = kkt_residual(evaluate(prob, [1.2]), prob)
    >>> round(rep.residual, 12), rep.multipliers.lam.tolist()
    (0.4, [0.0, 1.0])
    """
    if x.x.size != problem.n:
        raise InputError("point dimension does not match the problem")
    obj_gens = [f.generators(x.x) for f in problem.objectives]
    active = _active(problem, x, active_tol)
    con_gens = [problem.constraints[r].generators(x.x) for r in active]
    cols = [g for gens in obj_gens for g in gens]
    ncols = [g for gens in con_gens for g in gens]
    res = min_norm(MinNormProblem.from_blocks(cols, ncols), tol=tol)

    coef = np.maximum(res.coef, 0.0)
    lam = np.empty(problem.m)
    selected = []
    pos = 0
    for i, gens in enumerate(obj_gens):
        w = coef[pos:pos + len(gens)]
        lam[i] = w.sum()
        selected.append(sum(wk * g for wk, g in zip(w, gens)) / lam[i] if lam[i] > 0
                        else gens[0])
        pos += len(gens)
    mu = np.zeros(problem.l)
    for r, gens in zip(active, con_gens):
        w = coef[pos:pos + len(gens)]
        mu[r] = w.sum()
        selected.append(sum(wk * g for wk, g in zip(w, gens)) / mu[r] if mu[r] > 0
                        else gens[0])
        pos += len(gens)

    scale = 1.0 / float(np.linalg.norm(lam))
    lam, mu = lam * scale, mu * scale
    combo = sum(l_i * u for l_i, u in zip(lam, selected[:problem.m]))
    combo = combo + sum(mu[r] * v for r, v in zip(active, selected[problem.m:]))
    combo = np.asarray(combo, dtype=float).reshape(problem.n)
    residual = float(np.linalg.norm(combo))
    comp = float(mu @ x.gvals) if problem.l else 0.0
    report = KKTReport(x, x, Multipliers(lam, mu), residual, comp, tuple(selected),
                       max(residual ** 2, -comp, 0.0), combo)
    if not res.converged:
        raise SolverError("min-norm multiplier search did not converge", best=report,
                          iterations=res.iterations)
    return report


def is_modified_eps_kkt(x0, eps, problem, search, active_tol=ACTIVE_TOL):
    """Look for a companion ``x_eps`` in ``search`` (or ``x0`` itself) within
    ``sqrt(eps)`` of ``x0`` whose residual is at most ``sqrt(eps)`` and whose
    multipliers keep ``sum mu_r g_r(x0) >= -eps``.

    Returns the report with the smallest residual (nearest on ties), or None.
    """
    eps = float(eps)
    if not eps >= 0:
        raise InputError("eps must be nonnegative")
    if not x0.feasible:
        return None
    root = math.sqrt(eps)
    pool = [x0] + [p for p in search if p.x.size == x0.x.size]
    dist = np.array([float(np.linalg.norm(p.x - x0.x)) for p in pool])
    best = None
    for k in np.argsort(dist, kind="stable"):
        if dist[k] > root:
            break
        try:
            rep = kkt_residual(pool[k], problem, active_tol)
        except SolverError as exc:
            rep = exc.best
        if rep.residual > root:
            continue
        slack = float(rep.multipliers.mu @ x0.gvals) if problem.l else 0.0
        if slack < -eps:
            continue
        if best is None or rep.residual < best.residual - _TIE:
            best = KKTReport(x0, pool[k], rep.multipliers, rep.residual, slack,
                             rep.selected_generators, eps, rep.combination)
        if best.residual <= _TIE:
            break
    return best


def check_scq(problem, cset, tol=SLATER_TOL):
    """First member of ``cset`` with every constraint strictly below ``-tol``."""
    if problem.l == 0:
        raise NotApplicableError("Slater condition needs at least one constraint")
    if not len(cset):
        return None
    hit = np.flatnonzero(np.all(cset.G < -tol, axis=1))
    return cset[int(hit[0])] if hit.size else None


def check_bcq(x, problem, active_tol=ACTIVE_TOL):
    """``(holds, margin)``: whether no nonzero nonnegative combination of
    active constraint generators vanishes at ``x``.

    ``margin`` is the combination norm at the simplex minimiser rescaled to a
    unit multiplier vector; +inf when no constraint is active.
    """
    active = _active(problem, x, active_tol)
    if not active:
        return True, math.inf
    gens = [problem.constraints[r].generators(x.x) for r in active]
    cols = [g for gs in gens for g in gs]
    res = min_norm(MinNormProblem.from_blocks(cols))
    coef = np.maximum(res.coef, 0.0)
    p, pos = [], 0
    for gs in gens:
        p.append(coef[pos:pos + len(gs)].sum())
        pos += len(gs)
    margin = res.residual / float(np.linalg.norm(p))
    if margin > BCQ_MARGIN:
        return True, float(margin)
    return False, 0.0
