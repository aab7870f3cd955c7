"""Pure-numpy implementations of the hot kernels.

Same signatures and results as the compiled ``_kernels`` module; used when
the extension is unavailable or ``MOCERT_PURE_PYTHON=1`` is set.
"""
import numpy as np

_BLOCK = 64


def gains(f0, F, eps):
    """``(f0 - F) - eps``; every ordering predicate is derived from this array."""
    return (f0 - F) - eps


def dominated_mask(F, eps, strict=True):
    """``out[p]`` is True when some row of ``F`` eps-dominates row ``p``."""
    F = np.asarray(F, dtype=float)
    eps = np.asarray(eps, dtype=float)
    N = F.shape[0]
    out = np.zeros(N, dtype=bool)
    for start in range(0, N, _BLOCK):
        stop = min(start + _BLOCK, N)
        D = (F[start:stop, None, :] - F[None, :, :]) - eps
        if strict:
            dom = np.all(D >= 0, axis=2) & np.any(D > 0, axis=2)
        else:
            dom = np.all(D > 0, axis=2)
        out[start:stop] = dom.any(axis=1)
    return out


def point_tradeoff(f0, F, eps):
    """Per-(x, i) minimal admissible trade-off ratio for a single reference point.

    Returns ``(best, best_j)``, both N x m.  ``best[k, i]`` is nan when
    objective ``i`` is not improved at row ``k``, +inf when it is improved but
    no objective deteriorates, otherwise the minimum ratio over admissible j.
    """
    D = gains(f0, F, eps)
    N, m = D.shape
    best = np.full((N, m), np.nan)
    best_j = np.full((N, m), -1, dtype=np.int64)
    worse = D < 0
    denom = np.where(worse, -D, np.nan)
    for i in range(m):
        rows = D[:, i] > 0
        if not rows.any():
            continue
        with np.errstate(invalid="ignore", divide="ignore"):
            ratios = D[rows, i][:, None] / denom[rows]
        ratios = np.where(np.isnan(ratios), np.inf, ratios)
        j = np.argmin(ratios, axis=1)
        best[rows, i] = ratios[np.arange(ratios.shape[0]), j]
        best_j[rows, i] = np.where(np.isinf(best[rows, i]), -1, j)
    return best, best_j


def min_tradeoff_bounds(F0, F, eps):
    """Minimal trade-off bound of every row of ``F0`` against all rows of ``F``.

    Returns ``(bound, vacuous)``: ``bound[p]`` is the max over improving
    (x, i) pairs of the smallest admissible ratio (``inf`` if some pair has no
    admissible j, 0 if no pair exists, in which case ``vacuous[p]`` is True).
    """
    F0 = np.atleast_2d(np.asarray(F0, dtype=float))
    F = np.asarray(F, dtype=float)
    eps = np.asarray(eps, dtype=float)
    P = F0.shape[0]
    bound = np.zeros(P)
    vacuous = np.ones(P, dtype=bool)
    for p in range(P):
        best, _ = point_tradeoff(F0[p], F, eps)
        seen = ~np.isnan(best)
        if seen.any():
            vacuous[p] = False
            bound[p] = best[seen].max()
    return bound, vacuous


def project_simplex(v):
    """Euclidean projection onto ``{w >= 0, sum(w) = 1}`` (sorted threshold)."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, v.size + 1)
    rho = np.nonzero(u - css / idx > 0)[0][-1]
    theta = css[rho] / (rho + 1)
    return np.maximum(v - theta, 0.0)


def _project(c, k_simplex):
    out = np.empty_like(c)
    out[:k_simplex] = project_simplex(c[:k_simplex])
    out[k_simplex:] = np.maximum(c[k_simplex:], 0.0)
    return out


def min_norm_pg(Q, k_simplex, c0, lip, tol, maxiter):
    """Projected gradient on ``0.5 c'Qc`` over simplex x nonnegative orthant.

    Returns ``(c, iterations, converged)``.
    """
    c = np.array(c0, dtype=float)
    if lip <= 0.0:
        return c, 0, True
    step = 1.0 / lip
    for it in range(maxiter):
        trial = _project(c - step * (Q @ c), k_simplex)
        pg = lip * np.sqrt(np.sum((c - trial) ** 2))
        if pg <= tol:
            return c, it, True
        c = trial
    return c, maxiter, False
