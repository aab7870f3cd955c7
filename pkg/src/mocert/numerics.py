"""Small dense kernels: simplex projection, min-norm QP, phase-I feasibility,
projected gradient descent and finite differences.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import linprog

from ._backend import kernels
from .errors import InputError, NumericalError, SolverError

MIN_NORM_MAXITER = 50000


def project_simplex(v):
    """Euclidean projection of ``v`` onto the unit simplex.

    Examples
    --------
    >>> project_simplex([0.6, 0.6]).tolist()
    [0.5, 0.5]
    """
    v = np.atleast_1d(np.asarray(v, dtype=float))
    if v.size < 1:
        raise InputError("cannot project an empty vector")
    return kernels.project_simplex(v)


@dataclass(frozen=True)
class MinNormProblem:
    """Columns ``G`` (n x k); the first ``n_simplex`` coefficients live on the
    unit simplex, the remaining ones in the nonnegative orthant."""

    columns: np.ndarray
    n_simplex: int

    def __post_init__(self):
        cols = np.asarray(self.columns, dtype=float)
        if cols.ndim == 1:
            cols = cols[None, :]
        object.__setattr__(self, "columns", cols)
        if not 1 <= self.n_simplex <= cols.shape[1]:
            raise InputError("min-norm problem needs at least one simplex column")

    @classmethod
    def from_blocks(cls, simplex_cols, nonneg_cols=()):
        simplex_cols = [np.atleast_1d(np.asarray(c, dtype=float)) for c in simplex_cols]
        nonneg_cols = [np.atleast_1d(np.asarray(c, dtype=float)) for c in nonneg_cols]
        if not simplex_cols:
            raise InputError("min-norm problem needs at least one simplex column")
        return cls(np.column_stack(simplex_cols + nonneg_cols), len(simplex_cols))

    @property
    def k(self):
        return self.columns.shape[1]

    def combination(self, coef):
        return self.columns @ coef


@dataclass(frozen=True)
class MinNormResult:
    coef: np.ndarray
    residual: float
    iterations: int
    converged: bool


def _polish(problem, coef, support_tol=1e-10):
    """Solve the equality-constrained least squares on the support of ``coef``."""
    G = problem.columns
    S = np.flatnonzero(coef > support_tol)
    if S.size == 0:
        return None
    a = (S < problem.n_simplex).astype(float)
    if not a.any():
        return None
    Q = G[:, S].T @ G[:, S]
    kkt = np.block([[Q, a[:, None]], [a[None, :], np.zeros((1, 1))]])
    rhs = np.zeros(S.size + 1)
    rhs[-1] = 1.0
    sol = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
    cS = sol[:-1]
    if np.any(cS < 0):
        return None
    out = np.zeros_like(coef)
    out[S] = cS
    out[: problem.n_simplex] /= out[: problem.n_simplex].sum()
    return out


def min_norm(problem, tol=1e-10, maxiter=MIN_NORM_MAXITER):
    """Minimise ``||G c||`` over the simplex x orthant block structure.

    Projected gradient with step ``1/||G'G||``, started from the simplex
    barycenter, followed by an exact solve on the detected support which is
    kept only when it is feasible and not worse.
    """
    G = problem.columns
    Q = G.T @ G
    lip = float(np.linalg.eigvalsh(Q)[-1]) if Q.size else 0.0
    c0 = np.zeros(problem.k)
    c0[: problem.n_simplex] = 1.0 / problem.n_simplex
    coef, its, ok = kernels.min_norm_pg(Q, problem.n_simplex, c0, lip, tol, maxiter)
    coef = np.asarray(coef, dtype=float)
    res = float(np.linalg.norm(G @ coef))
    polished = _polish(problem, coef)
    if polished is not None:
        pres = float(np.linalg.norm(G @ polished))
        if pres <= res:
            coef, res = polished, pres
            ok = ok or _mapping_norm(problem, Q, coef, lip) <= tol * max(1.0, lip)
    return MinNormResult(coef, res, int(its), bool(ok))


def _mapping_norm(problem, Q, coef, lip):
    if lip <= 0.0:
        return 0.0
    g = coef - (Q @ coef) / lip
    trial = np.r_[kernels.project_simplex(g[: problem.n_simplex]),
                  np.maximum(g[problem.n_simplex:], 0.0)]
    return lip * float(np.linalg.norm(coef - trial))


@dataclass(frozen=True)
class PhaseOneResult:
    """Outcome of :func:`phase1_feasible`.

    Exactly one of ``witness`` and ``certificate`` is set.  ``certificate``
    is a pair ``(tau, nu)`` with ``tau >= 0, sum(tau) = 1, nu >= 0`` and
    ``A' tau + B' nu = 0``.
    """

    witness: Optional[np.ndarray]
    certificate: Optional[tuple]
    value: float


def phase1_feasible(strict_rows, weak_rows=None, nonneg=False, threshold=1e-9,
                    verify_tol=1e-9):
    """Decide whether ``A y < 0, B y <= 0`` has a solution.

    Maximises the smallest strict slack over ``||y||_inf <= 1``.  If the
    optimum exceeds ``threshold`` the maximiser is returned as witness;
    otherwise a Motzkin multiplier certificate ``(tau, nu)`` with
    ``A' tau + B' nu = 0`` is computed and re-verified by substitution.

    ``nonneg=True`` appends the weak rows ``-y <= 0`` implicitly (as variable
    bounds, so large ``y`` stay cheap); the certificate's ``nu`` is then
    ``A' tau`` itself.
    """
    A = np.atleast_2d(np.asarray(strict_rows, dtype=float))
    if A.shape[0] == 0:
        raise InputError("phase-I needs at least one strict row")
    k = A.shape[1]
    B = (np.zeros((0, k)) if weak_rows is None
         else np.asarray(weak_rows, dtype=float).reshape(-1, k))
    p, q = A.shape[0], B.shape[0]

    # variables (y, t): maximise t  s.t.  A y + t <= 0,  B y <= 0
    c = np.zeros(k + 1)
    c[-1] = -1.0
    A_ub = np.vstack([np.hstack([A, np.ones((p, 1))]), np.hstack([B, np.zeros((q, 1))])])
    lo = 0.0 if nonneg else -1.0
    bounds = [(lo, 1.0)] * k + [(None, 1.0)]
    lp = linprog(c, A_ub=A_ub, b_ub=np.zeros(p + q), bounds=bounds, method="highs")
    if lp.status != 0:
        raise NumericalError(f"phase-I LP failed: {lp.message}")
    value = float(-lp.fun)
    if value > threshold:
        y = lp.x[:k]
        if np.all(A @ y < 0) and np.all(B @ y <= verify_tol):
            return PhaseOneResult(y, None, value)
        raise NumericalError("phase-I witness failed re-verification")

    if nonneg:
        # maximise s  s.t.  A' tau >= s,  B' ... ,  sum tau = 1,  tau >= 0
        c2 = np.zeros(p + q + 1)
        c2[-1] = -1.0
        A_ub2 = np.hstack([-A.T, -B.T, np.ones((k, 1))])
        A_eq2 = np.r_[np.ones(p), np.zeros(q), 0.0][None, :]
        lp2 = linprog(c2, A_ub=A_ub2, b_ub=np.zeros(k), A_eq=A_eq2, b_eq=[1.0],
                      bounds=[(0, None)] * (p + q) + [(None, 1.0)], method="highs")
        if lp2.status != 0:
            raise NumericalError(f"phase-I certificate LP failed: {lp2.message}")
        tau = np.maximum(lp2.x[:p], 0.0)
        nu_b = np.maximum(lp2.x[p:p + q], 0.0)
        tau /= tau.sum()
        nu = A.T @ tau + B.T @ nu_b
        if nu.min(initial=0.0) < -verify_tol:
            raise NumericalError("phase-I certificate failed re-verification")
        return PhaseOneResult(None, (tau, np.r_[nu_b, np.maximum(nu, 0.0)]), value)

    A_eq = np.vstack([np.hstack([A.T, B.T]), np.r_[np.ones(p), np.zeros(q)][None, :]])
    b_eq = np.r_[np.zeros(k), 1.0]
    lp2 = linprog(np.zeros(p + q), A_eq=A_eq, b_eq=b_eq, bounds=[(0, None)] * (p + q),
                  method="highs")
    if lp2.status != 0:
        raise NumericalError(f"phase-I certificate LP failed: {lp2.message}")
    tau = np.maximum(lp2.x[:p], 0.0)
    nu = np.maximum(lp2.x[p:], 0.0)
    tau /= tau.sum()
    if np.max(np.abs(A.T @ tau + B.T @ nu), initial=0.0) > verify_tol:
        raise NumericalError("phase-I certificate failed re-verification")
    return PhaseOneResult(None, (tau, nu), value)


def finite_diff(fun, x, h=1e-6):
    """Central-difference gradient."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty(x.size)
    for k in range(x.size):
        e = np.zeros(x.size)
        e[k] = h
        out[k] = (fun(x + e) - fun(x - e)) / (2.0 * h)
    return out


@dataclass(frozen=True)
class DescentResult:
    x: np.ndarray
    value: float
    iterations: int
    converged: bool


def projected_gradient(fun, grad, x0, project, tol=1e-8, maxiter=10000,
                       armijo=1e-4, shrink=0.5, step0=1.0):
    """Projected gradient descent with Armijo backtracking.

    A trial step is also accepted when the local Lipschitz test
    ``step * ||grad(trial) - grad(x)|| <= ||trial - x||`` holds, which keeps
    the line search working once function decreases drop below round-off.
    Each search starts from twice the previous accepted step (capped at
    ``step0``).  Stops when ``||x - P(x - grad(x))|| <= tol``; raises
    :class:`SolverError` carrying the best iterate at the iteration cap.
    """
    x = project(np.asarray(x0, dtype=float))
    fx = fun(x)
    last = step0
    for it in range(maxiter):
        g = grad(x)
        if np.linalg.norm(x - project(x - g)) <= tol:
            return DescentResult(x, fx, it, True)
        step = min(step0, 2.0 * last)
        while True:
            trial = project(x - step * g)
            ft = fun(trial)
            move = trial - x
            if ft < fx and ft <= fx + armijo * g @ move:
                break
            if step * np.linalg.norm(grad(trial) - g) <= np.linalg.norm(move):
                break
            step *= shrink
            if step < 1e-20:
                break
        if np.array_equal(trial, x):
            return DescentResult(x, fx, it, True)
        x, fx, last = trial, ft, step
    raise SolverError(f"projected gradient did not converge in {maxiter} iterations",
                      best=DescentResult(x, fx, maxiter, False), iterations=maxiter)
