# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels.  Mirrors ``_kernels_py`` function by function."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, INFINITY

cnp.import_array()


def gains(f0, F, eps):
    return (f0 - F) - eps


def dominated_mask(F, eps, bint strict=True):
    cdef const double[:, ::1] f = np.ascontiguousarray(F, dtype=np.float64)
    cdef const double[::1] e = np.ascontiguousarray(eps, dtype=np.float64)
    cdef Py_ssize_t N = f.shape[0], m = f.shape[1]
    cdef Py_ssize_t p, q, k
    cdef double d
    cdef bint ok, some
    out = np.zeros(N, dtype=bool)
    cdef cnp.uint8_t[::1] o = out.view(np.uint8)
    for p in range(N):
        for q in range(N):
            ok = True
            some = False
            for k in range(m):
                d = (f[p, k] - f[q, k]) - e[k]
                if strict:
                    if d < 0:
                        ok = False
                        break
                    if d > 0:
                        some = True
                else:
                    if not d > 0:
                        ok = False
                        break
            if ok and (some or not strict):
                o[p] = 1
                break
    return out


def point_tradeoff(f0, F, eps):
    cdef const double[::1] a = np.ascontiguousarray(f0, dtype=np.float64)
    cdef const double[:, ::1] f = np.ascontiguousarray(F, dtype=np.float64)
    cdef const double[::1] e = np.ascontiguousarray(eps, dtype=np.float64)
    cdef Py_ssize_t N = f.shape[0], m = f.shape[1]
    best_arr = np.full((N, m), np.nan)
    bj_arr = np.full((N, m), -1, dtype=np.int64)
    cdef double[:, ::1] best = best_arr
    cdef cnp.int64_t[:, ::1] bj = bj_arr
    cdef double[::1] d = np.empty(m)
    cdef Py_ssize_t q, i, j, k, arg
    cdef double r, low
    for q in range(N):
        for k in range(m):
            d[k] = (a[k] - f[q, k]) - e[k]
        for i in range(m):
            if not d[i] > 0:
                continue
            low = INFINITY
            arg = -1
            for j in range(m):
                if d[j] < 0:
                    r = d[i] / (-d[j])
                    if r < low:
                        low = r
                        arg = j
            best[q, i] = low
            bj[q, i] = arg
    return best_arr, bj_arr


def min_tradeoff_bounds(F0, F, eps):
    cdef const double[:, ::1] f0 = np.ascontiguousarray(np.atleast_2d(F0), dtype=np.float64)
    cdef const double[:, ::1] f = np.ascontiguousarray(F, dtype=np.float64)
    cdef const double[::1] e = np.ascontiguousarray(eps, dtype=np.float64)
    cdef Py_ssize_t P = f0.shape[0], N = f.shape[0], m = f.shape[1]
    bound_arr = np.zeros(P)
    vac_arr = np.ones(P, dtype=bool)
    cdef double[::1] bound = bound_arr
    cdef cnp.uint8_t[::1] vac = vac_arr.view(np.uint8)
    cdef double[::1] d = np.empty(m)
    cdef Py_ssize_t p, q, i, j, k
    cdef double r, low, top
    for p in range(P):
        top = 0.0
        for q in range(N):
            for k in range(m):
                d[k] = (f0[p, k] - f[q, k]) - e[k]
            for i in range(m):
                if not d[i] > 0:
                    continue
                vac[p] = 0
                low = INFINITY
                for j in range(m):
                    if d[j] < 0:
                        r = d[i] / (-d[j])
                        if r < low:
                            low = r
                if low > top:
                    top = low
            if top == INFINITY:
                break
        bound[p] = top
    return bound_arr, vac_arr


cdef void _project_simplex(const double[::1] v, double[::1] out, double[::1] work) noexcept nogil:
    cdef Py_ssize_t k = v.shape[0], a, b
    cdef double t, css, theta
    # insertion sort, descending; k is tiny
    for a in range(k):
        work[a] = v[a]
    for a in range(1, k):
        t = work[a]
        b = a - 1
        while b >= 0 and work[b] < t:
            work[b + 1] = work[b]
            b -= 1
        work[b + 1] = t
    css = 0.0
    theta = 0.0
    for a in range(k):
        css += work[a]
        t = (css - 1.0) / (a + 1)
        if work[a] - t > 0:
            theta = t
    for a in range(k):
        out[a] = v[a] - theta if v[a] - theta > 0 else 0.0


def project_simplex(v):
    cdef const double[::1] src = np.ascontiguousarray(v, dtype=np.float64)
    out = np.empty(src.shape[0])
    cdef double[::1] o = out
    cdef double[::1] work = np.empty(src.shape[0])
    _project_simplex(src, o, work)
    return out


def min_norm_pg(Q, Py_ssize_t k_simplex, c0, double lip, double tol, Py_ssize_t maxiter):
    cdef const double[:, ::1] q = np.ascontiguousarray(Q, dtype=np.float64)
    cdef Py_ssize_t k = q.shape[0], a, b, it
    c_arr = np.array(c0, dtype=np.float64)
    cdef double[::1] c = c_arr
    cdef double[::1] g = np.empty(k)
    cdef double[::1] trial = np.empty(k)
    cdef double[::1] head = np.empty(k_simplex)
    cdef double[::1] headout = np.empty(k_simplex)
    cdef double[::1] work = np.empty(k_simplex)
    cdef double step, s, pg
    if lip <= 0.0:
        return c_arr, 0, True
    step = 1.0 / lip
    for it in range(maxiter):
        for a in range(k):
            s = 0.0
            for b in range(k):
                s += q[a, b] * c[b]
            g[a] = c[a] - step * s
        for a in range(k_simplex):
            head[a] = g[a]
        _project_simplex(head, headout, work)
        for a in range(k_simplex):
            trial[a] = headout[a]
        for a in range(k_simplex, k):
            trial[a] = g[a] if g[a] > 0 else 0.0
        s = 0.0
        for a in range(k):
            s += (c[a] - trial[a]) * (c[a] - trial[a])
        pg = lip * sqrt(s)
        if pg <= tol:
            return c_arr, it, True
        for a in range(k):
            c[a] = trial[a]
    return c_arr, maxiter, False
