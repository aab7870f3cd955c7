"""Weighted-sum scalarization and its bridge to Geoffrion properness."""
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConfigurationError, InputError
from .numerics import projected_gradient
from .problem import epsilon_vector, evaluate, make_grid


class Method(str, Enum):
    PROJECTED_GRADIENT = "projected-gradient"
    GRID = "grid-exhaustive"


def weight_vector(s, m=None):
    """Validate a strictly positive weight vector."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    if s.ndim != 1 or s.size == 0:
        raise InputError("weights must be a nonempty vector")
    if m is not None and s.size != m:
        raise InputError(f"expected {m} weights, got {s.size}")
    if not np.all(np.isfinite(s)) or not np.all(s > 0):
        raise InputError(f"weights must be finite and strictly positive, got {s.tolist()}")
    return s


def weighted_sum_value(s, x):
    """``sum_i s_i f_i(x)`` for a candidate point ``x``.

    Examples
    --------
    >>> from mocert.problem import registry_instance
    >>> _, S = registry_instance("paper-discrete")
    >>> round(weighted_sum_value([1, 1, 1], S[3]), 7)
    1.7320508
    """
    s = weight_vector(s, x.fvals.size)
    return float(s @ x.fvals)


@dataclass(frozen=True)
class ScalarSolveReport:
    xstar: object
    value: float
    iterations: int
    tolerance_met: bool
    method: Method


def _uses_gradient(problem):
    return problem.convex and problem.smooth and (problem.l == 0 or problem.projection is not None)


def solve_weighted_sum(problem, s, tol=1e-8, maxiter=10000, method=None):
    """Minimise ``<s, f(x)>`` over the feasible part of the box.

    Convex smooth instances (with a projection when constrained) use projected
    gradient with Armijo backtracking; everything else is solved exhaustively
    on the instance grid.  Raises :class:`SolverError` at the iteration cap.
    """
    s = weight_vector(s, problem.m)
    if problem.box is None:
        raise ConfigurationError("weighted-sum solve needs a box")
    if method is None:
        method = Method.PROJECTED_GRADIENT if _uses_gradient(problem) else Method.GRID
    method = Method(method)

    if method is Method.GRID:
        grid = make_grid(problem)
        if not len(grid):
            raise ConfigurationError("instance grid has no feasible point")
        vals = grid.F @ s
        k = int(np.argmin(vals))
        return ScalarSolveReport(grid[k], float(s @ grid[k].fvals), len(grid), True, method)

    if not _uses_gradient(problem):
        raise ConfigurationError("projected gradient needs convex smooth objectives "
                                 "and a projection for constrained instances")
    lo, hi = problem.box
    if problem.l and problem.projection is not None:
        def project(x):
            return np.clip(problem.projection(x), lo, hi)
    else:
        def project(x):
            return np.clip(x, lo, hi)

    objs = problem.objectives

    def fun(x):
        return float(sum(w * f.value(x) for w, f in zip(s, objs)))

    def grad(x):
        return sum(w * f.gradient(x) for w, f in zip(s, objs))

    res = projected_gradient(fun, grad, 0.5 * (lo + hi), project, tol=tol, maxiter=maxiter)
    xstar = evaluate(problem, res.x)
    return ScalarSolveReport(xstar, float(s @ xstar.fvals), res.iterations, res.converged, method)


def is_s_eps_minimum(x0, s, eps, cset, atol=0.0):
    """True when ``<s, f(x0)> <= <s, f(x)> + <s, eps> (+ atol)`` for all ``x`` in ``cset``."""
    s = weight_vector(s, x0.fvals.size)
    eps = epsilon_vector(eps, s.size)
    if not len(cset):
        return True
    return bool(s @ x0.fvals <= float(np.min(cset.F @ s)) + s @ eps + atol)


def m_bound_from_weights(s, m):
    """``(m - 1) * max_{i,j} s_i / s_j``; the Geoffrion bound guaranteed by ``P(s)``.

    Examples
    --------
    >>> m_bound_from_weights([1, 4, 2], 3)
    8.0
    """
    s = weight_vector(s, m)
    return float((m - 1) * (s.max() / s.min()))


def weights_from_certificates(certs, M_hat):
    """Weights ``s_j = 1 + M_hat * sum_{i != j} tau^i_j`` from one normalized
    certificate per objective."""
    M_hat = float(M_hat)
    if not M_hat > 0:
        raise InputError("M_hat must be positive")
    certs = list(certs)
    if not certs:
        raise InputError("no certificates given")
    m = certs[0].tau.size
    by_i = {}
    for c in certs:
        if c.tau.size != m:
            raise InputError("certificates disagree on the number of objectives")
        if not c.normalized:
            raise InputError(f"certificate for objective {c.i} is not normalized")
        by_i[c.i] = c
    missing = sorted(set(range(m)) - set(by_i))
    if missing:
        raise InputError(f"missing certificates for objectives {missing}")
    T = np.array([by_i[i].tau for i in range(m)])
    off = T.sum(axis=0) - np.diag(T)
    return 1.0 + M_hat * off
