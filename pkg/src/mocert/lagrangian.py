"""The (M, i)-Lagrangian, saddle-point checks and eps-subdifferential tests."""
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import InputError, PreconditionError
from .problem import epsilon_vector

SIMPLEX_TOL = 1e-12
DEFAULT_PROBE_SCALES = (1.0, 10.0, 100.0)


class Verdict(str, Enum):
    CERTIFIED_YES = "certified-yes"
    CERTIFIED_NO = "certified-no"
    SAMPLED_NO_VIOLATION = "sampled-no-violation"


def simplex_vector(tau, m=None):
    """Validate a point of the unit simplex."""
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    if m is not None and tau.size != m:
        raise InputError(f"expected a simplex vector of length {m}, got {tau.size}")
    if np.any(tau < 0) or np.any(tau > 1) or abs(tau.sum() - 1.0) > SIMPLEX_TOL:
        raise InputError(f"{tau.tolist()} is not on the unit simplex")
    return tau


def _mu(mu, l):
    mu = np.atleast_1d(np.asarray(mu, dtype=float)).reshape(-1)
    if mu.size != l:
        raise InputError(f"expected {l} constraint multipliers, got {mu.size}")
    if np.any(mu < 0):
        raise InputError("constraint multipliers must be nonnegative")
    return mu


def _weights(i, M_hat, tau):
    """Objective weights of the (M, i)-Lagrangian: 1 on i, M * tau_j elsewhere."""
    w = M_hat * tau
    w[i] = 1.0
    return w


def _check_i(i, m):
    if not isinstance(i, (int, np.integer)) or not 0 <= i < m:
        raise InputError(f"objective index {i!r} out of range for m={m}")
    return int(i)


def lagrangian_values(i, M_hat, F, G, tau, mu):
    """Vectorised Lagrangian over the rows of ``F`` (N x m) and ``G`` (N x l)."""
    return F @ _weights(i, M_hat, tau) + G @ mu


def lagrangian_value(i, M_hat, x, tau, mu):
    """``f_i(x) + M * sum_{j != i} tau_j f_j(x) + sum_r mu_r g_r(x)``.

    Examples
    --------
    >>> from mocert.problem import registry_instance, evaluate
    >>> prob, _ = registry_instance("biobjective-quadratic")
    >>> lagrangian_value(0, 2.0, evaluate(prob, [0.5]), [0.5, 0.5], [1.0, 0.0])
    0.0
    """
    m = x.fvals.size
    i = _check_i(i, m)
    tau = simplex_vector(tau, m)
    mu = _mu(mu, x.gvals.size)
    return float(x.fvals @ _weights(i, float(M_hat), tau) + x.gvals @ mu)


def eps_bar(i, eps, tau, M_hat):
    """``eps_i + M * sum_{j != i} tau_j eps_j``."""
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    eps = epsilon_vector(eps, tau.size)
    i = _check_i(i, tau.size)
    return float(eps @ _weights(i, float(M_hat), tau))


@dataclass(frozen=True)
class SaddleReport:
    """Saddle-point verdicts for one objective index.

    ``tol`` is ``eps_bar`` in the theorem form and ``eps_i`` in the strict
    form; ``left_gap``/``right_gap`` are the worst violations beyond it.
    """

    i: int
    x0: object
    tau: np.ndarray
    mu: np.ndarray
    eps_bar: float
    tol: float
    left_ok: bool
    right_ok: bool
    slack_ok: bool
    left_gap: float
    right_gap: float

    @property
    def ok(self):
        return self.left_ok and self.right_ok and self.slack_ok


def default_mu_probe(l, scales=DEFAULT_PROBE_SCALES):
    """The zero vector plus every unit vector scaled by each of ``scales``."""
    probes = [np.zeros(l)]
    for r in range(l):
        for s in scales:
            e = np.zeros(l)
            e[r] = s
            probes.append(e)
    return probes


def verify_saddle(i, x0, tau, mu, eps, M_hat, cset, mu_probe=None, strict_eps=False,
                  atol=0.0):
    """Check the approximate saddle inequalities of the (M, i)-Lagrangian.

    ``left``: ``L(x0, tau, mu') - tol <= L(x0, tau, mu)`` for every probe ``mu'``.
    ``right``: ``L(x0, tau, mu) <= L(x, tau, mu) + tol`` for every ``x`` in ``cset``.
    ``slack``: ``sum mu_r g_r(x0) >= -tol``.
    ``atol`` widens every comparison for floating-point certificates.
    """
    m, l = x0.fvals.size, x0.gvals.size
    i = _check_i(i, m)
    M_hat = float(M_hat)
    tau = simplex_vector(tau, m)
    mu = _mu(mu, l)
    eps = epsilon_vector(eps, m)
    ebar = eps_bar(i, eps, tau, M_hat)
    tol = float(eps[i]) if strict_eps else ebar
    probes = default_mu_probe(l) if mu_probe is None else [_mu(p, l) for p in mu_probe]
    if not probes or not any(np.all(p == 0) for p in probes):
        raise InputError("mu_probe must be nonempty and contain the zero vector")

    w = _weights(i, M_hat, tau)
    base = float(x0.fvals @ w)
    L0 = base + float(x0.gvals @ mu)
    left_gap = max(base + float(x0.gvals @ p) - tol - L0 for p in probes)
    if len(cset):
        right_gap = L0 - float(np.min(lagrangian_values(i, M_hat, cset.F, cset.G, tau, mu))) - tol
    else:
        right_gap = -np.inf
    slack = float(x0.gvals @ mu)
    return SaddleReport(
        i, x0, tau, mu, ebar, tol,
        left_ok=bool(left_gap <= atol),
        right_ok=bool(right_gap <= atol),
        slack_ok=bool(slack >= -tol - atol),
        left_gap=max(0.0, float(left_gap)),
        right_gap=max(0.0, float(right_gap)),
    )


def _conjugate_gap(q, fx, x, v):
    """``f(x) + f*(v) - <v, x>`` for a quadratic with positive definite ``A``;
    None when the descriptor is not positive definite."""
    A = 0.5 * (q.A + q.A.T)
    if np.all(A == 0):
        return fx - float(v @ x) - q.c if np.array_equal(v, q.b) else np.inf
    try:
        L = np.linalg.cholesky(A)
    except np.linalg.LinAlgError:
        return None
    z = np.linalg.solve(L, v - q.b)
    return 0.5 * float(z @ z) - q.c + fx - float(v @ x)


def eps_subdiff_contains(oracle, x, v, eps, probe=None):
    """Decide ``v in d_eps f(x)``.

    Quadratic descriptors with positive definite (or zero) ``A`` are decided
    exactly with the conjugate test ``f(x) + f*(v) - <v, x> <= eps``.
    Otherwise the defining inequality is checked on ``probe``: one violating
    point certifies "no", none found gives ``sampled-no-violation``.

    Examples
    --------
    >>> from mocert.problem import sqdist_oracle
    >>> f = sqdist_oracle([0.0])
    >>> eps_subdiff_contains(f, [1.0], [0.0], 1.0).value
    'certified-yes'
    >>> eps_subdiff_contains(f, [1.0], [0.0], 0.5).value
    'certified-no'
    """
    if not oracle.convex:
        raise PreconditionError(f"oracle {oracle.name!r} is not flagged convex")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    v = np.atleast_1d(np.asarray(v, dtype=float))
    eps = float(eps)
    if not eps >= 0:
        raise InputError("eps must be nonnegative")
    if x.shape != v.shape:
        raise InputError("x and v must have the same dimension")
    fx = float(oracle.value(x))
    if oracle.quadratic is not None:
        gap = _conjugate_gap(oracle.quadratic, fx, x, v)
        if gap is not None:
            return Verdict.CERTIFIED_YES if gap <= eps else Verdict.CERTIFIED_NO
    if probe is None:
        raise InputError("a probe set is needed for non-quadratic oracles")
    Y = probe.X if hasattr(probe, "X") else np.atleast_2d(np.asarray(probe, dtype=float))
    for y in Y:
        if oracle.value(y) - fx < float(v @ (y - x)) - eps:
            return Verdict.CERTIFIED_NO
    return Verdict.SAMPLED_NO_VIOLATION


def _cert_parts(cert, m, l):
    if hasattr(cert, "tau"):
        return simplex_vector(cert.tau, m), _mu(cert.mu, l)
    tau, mu = cert
    return simplex_vector(tau, m), _mu(mu, l)


def _sqrt_psd(A):
    w, V = np.linalg.eigh(0.5 * (A + A.T))
    return (V * np.sqrt(np.clip(w, 0.0, None))) @ V.T


def _zero_in_sum_of_eps_subdiffs(grad, roots, tol, maxiter=20000):
    """Whether ``-grad`` lies in ``sum_i B_i (unit ball)`` (B_i symmetric),
    decided by accelerated projected gradient on the product of balls."""
    if not roots:
        return bool(np.linalg.norm(grad) <= tol)
    B = np.hstack(roots)
    lip = float(np.linalg.eigvalsh(B.T @ B)[-1]) if B.size else 0.0
    if lip <= 0.0:
        return bool(np.linalg.norm(grad) <= tol)
    n, k = grad.size, len(roots)
    u = np.zeros(n * k)
    y, t = u.copy(), 1.0

    def project(z):
        z = z.reshape(k, n)
        norms = np.maximum(np.linalg.norm(z, axis=1), 1.0)
        return (z / norms[:, None]).reshape(-1)

    blocks = [R.T for R in roots]
    for _ in range(maxiter):
        r = B @ y + grad
        ru = B @ u + grad
        norm_ru = float(np.linalg.norm(ru))
        if norm_ru <= tol:
            return True
        # weak duality: the distance from -grad to the Minkowski sum is at
        # least (<grad, d> - sum_i ||B_i d||) / ||d|| for any direction d
        lower = (float(grad @ ru) - sum(float(np.linalg.norm(Bt @ ru)) for Bt in blocks)) / norm_ru
        if lower > tol:
            return False
        u_next = project(y - (B.T @ r) / lip)
        t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        y = u_next + ((t - 1.0) / t_next) * (u_next - u)
        u, t = u_next, t_next
    return bool(np.linalg.norm(B @ u + grad) <= tol)


def _exact_condition_a(x0, taus, mus, ebars, M_hat, problem, tol):
    funcs = problem.objectives + problem.constraints
    if any(f.quadratic is None for f in funcs):
        return None
    m = problem.m
    grad = np.zeros(problem.n)
    roots = []
    for i in range(m):
        w = np.r_[_weights(i, M_hat, taus[i]), mus[i]]
        A = sum(wk * f.quadratic.A for wk, f in zip(w, funcs))
        grad += sum(wk * f.quadratic.gradient(x0.x) for wk, f in zip(w, funcs))
        if ebars[i] > 0:
            roots.append(np.sqrt(2.0 * ebars[i]) * _sqrt_psd(A))
    return _zero_in_sum_of_eps_subdiffs(grad, roots, tol)


def verify_eps_kkt(x0, certs, eps, M_hat, cset, problem=None, atol=0.0, exact_tol=1e-9):
    """Check the eps-subdifferential KKT conditions at ``x0``.

    (B) ``sum_r mu^i_r g_r(x0) >= -eps_bar_i`` for every ``i``.
    (A) By default through its aggregate relaxation: ``x0`` is a
    ``sum_i eps_bar_i``-approximate minimiser over ``cset`` of
    ``sum_i L_i(., tau^i, mu^i)``.  When ``problem`` is given and every
    function carries a quadratic descriptor, (A) is instead decided directly
    as ``0 in sum_i d_{eps_bar_i} L_i(x0)`` over R^n.
    """
    m, l = x0.fvals.size, x0.gvals.size
    certs = list(certs)
    if len(certs) != m:
        raise InputError(f"expected {m} certificates, got {len(certs)}")
    M_hat = float(M_hat)
    eps = epsilon_vector(eps, m)
    taus, mus = zip(*(_cert_parts(c, m, l) for c in certs))
    ebars = [eps_bar(i, eps, taus[i], M_hat) for i in range(m)]

    cond_b = all(float(x0.gvals @ mus[i]) >= -ebars[i] - atol for i in range(m))
    if not cond_b:
        return False

    if problem is not None:
        exact = _exact_condition_a(x0, taus, mus, ebars, M_hat, problem, exact_tol)
        if exact is not None:
            return exact

    W = sum(_weights(i, M_hat, taus[i]) for i in range(m))
    mu_sum = sum(mus)
    at_x0 = float(x0.fvals @ W + x0.gvals @ mu_sum)
    if not len(cset):
        return True
    low = float(np.min(cset.F @ W + cset.G @ mu_sum))
    return bool(at_x0 <= low + sum(ebars) + atol)
