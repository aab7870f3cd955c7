"""Problem instances, candidate points and finite candidate sets.

A problem is ``min f(x)`` subject to ``g(x) <= 0`` with ``f: R^n -> R^m`` and
``g: R^n -> R^l``.  Every scalar function is an :class:`Oracle`.  Set-level
checks never look at the continuous feasible region directly; they work on a
:class:`CandidateSet`, a finite, fully evaluated surrogate for it.
"""
import csv
import io
import json
import math
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .errors import (
    ConfigurationError,
    EvaluationError,
    InputError,
    RegistryLookupError,
)

FEAS_TOL = 1e-9
DUPLICATE_TOL = 1e-12


@dataclass(frozen=True)
class QuadraticForm:
    """Analytic descriptor ``0.5 <x, A x> + <b, x> + c``."""

    A: np.ndarray
    b: np.ndarray
    c: float

    def __add__(self, other):
        return QuadraticForm(self.A + other.A, self.b + other.b, self.c + other.c)

    def scale(self, t):
        return QuadraticForm(t * self.A, t * self.b, t * self.c)

    def value(self, x):
        return float(0.5 * x @ self.A @ x + self.b @ x + self.c)

    def gradient(self, x):
        return self.A @ x + self.b


@dataclass(frozen=True, eq=False)
class Oracle:
    """A deterministic scalar function on R^n.

    ``gradient`` is set for smooth functions.  Piecewise-max functions carry
    their smooth ``pieces`` instead; their Clarke subdifferential is the
    convex hull of the gradients of the active pieces.
    """

    value: Callable[[np.ndarray], float]
    gradient: Optional[Callable[[np.ndarray], np.ndarray]] = None
    pieces: tuple = ()
    quadratic: Optional[QuadraticForm] = None
    convex: bool = False
    lipschitz: bool = True
    name: str = ""

    def __call__(self, x):
        return self.value(x)

    @property
    def smooth(self):
        return self.gradient is not None

    def generators(self, x, active_tol=1e-9):
        """Gradients spanning the Clarke subdifferential at ``x``."""
        if self.gradient is not None:
            return [np.asarray(self.gradient(x), dtype=float)]
        if not self.pieces:
            raise InputError(f"oracle {self.name!r} has neither gradient nor pieces")
        vals = np.array([p.value(x) for p in self.pieces])
        top = vals.max()
        cut = top - active_tol * max(1.0, abs(top))
        return [np.asarray(p.gradient(x), dtype=float)
                for p, v in zip(self.pieces, vals) if v >= cut]


def quadratic_oracle(A, b, c=0.0, name=""):
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    q = QuadraticForm(A, b, float(c))
    convex = bool(np.all(np.linalg.eigvalsh(0.5 * (A + A.T)) >= -1e-12))
    return Oracle(q.value, q.gradient, quadratic=q, convex=convex, name=name)


def sqdist_oracle(center, name=""):
    """``||x - center||^2`` evaluated in its numerically friendly form."""
    center = np.atleast_1d(np.asarray(center, dtype=float))
    n = center.size

    def value(x):
        d = x - center
        return float(d @ d)

    def gradient(x):
        return 2.0 * (x - center)

    q = QuadraticForm(2.0 * np.eye(n), -2.0 * center, float(center @ center))
    return Oracle(value, gradient, quadratic=q, convex=True, name=name)


def linear_oracle(a, c=0.0, name=""):
    a = np.atleast_1d(np.asarray(a, dtype=float))
    c = float(c)

    def value(x):
        return float(a @ x + c)

    def gradient(x):
        return a.copy()

    q = QuadraticForm(np.zeros((a.size, a.size)), a, c)
    return Oracle(value, gradient, quadratic=q, convex=True, name=name)


def max_oracle(*pieces, name=""):
    """Pointwise maximum of smooth oracles."""
    if not pieces or any(p.gradient is None for p in pieces):
        raise InputError("max_oracle needs at least one smooth piece")

    def value(x):
        return max(p.value(x) for p in pieces)

    return Oracle(value, None, pieces=tuple(pieces),
                  convex=all(p.convex for p in pieces), name=name)


@dataclass(frozen=True)
class ProblemInstance:
    n: int
    objectives: tuple
    constraints: tuple = ()
    box: Optional[tuple] = None
    projection: Optional[Callable[[np.ndarray], np.ndarray]] = None
    resolution: int = 101
    name: str = ""

    def __post_init__(self):
        if self.n < 1:
            raise InputError("decision dimension must be positive")
        if not self.objectives:
            raise InputError("at least one objective is required")
        object.__setattr__(self, "objectives", tuple(self.objectives))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        if self.box is not None:
            lo = np.broadcast_to(np.asarray(self.box[0], dtype=float), (self.n,)).copy()
            hi = np.broadcast_to(np.asarray(self.box[1], dtype=float), (self.n,)).copy()
            if np.any(lo > hi):
                raise InputError("box lower bound exceeds upper bound")
            object.__setattr__(self, "box", (lo, hi))

    @property
    def m(self):
        return len(self.objectives)

    @property
    def l(self):
        return len(self.constraints)

    @property
    def convex(self):
        return all(o.convex for o in self.objectives + self.constraints)

    @property
    def smooth(self):
        return all(o.smooth for o in self.objectives + self.constraints)

    def with_box(self, lo, hi):
        return replace(self, box=(lo, hi))


@dataclass(frozen=True, eq=False)
class CandidatePoint:
    x: np.ndarray
    fvals: np.ndarray
    gvals: np.ndarray
    feasible: bool

    @property
    def key(self):
        return tuple(float(v) for v in self.x)

    def __repr__(self):
        return f"CandidatePoint(x={self.x.tolist()}, f={self.fvals.tolist()})"


def _check_point(problem, x):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.ndim != 1 or x.size != problem.n:
        raise InputError(f"point has dimension {x.size}, problem expects {problem.n}")
    return x


def evaluate(problem, x, feas_tol=FEAS_TOL):
    """Evaluate every oracle at ``x`` and cache the values."""
    x = _check_point(problem, x).copy()
    x.setflags(write=False)
    fvals = np.empty(problem.m)
    for i, f in enumerate(problem.objectives):
        fvals[i] = f(x)
        if not math.isfinite(fvals[i]):
            raise EvaluationError(f"objective {i} is not finite at {x.tolist()}",
                                  kind="objective", index=i)
    gvals = np.empty(problem.l)
    for r, g in enumerate(problem.constraints):
        gvals[r] = g(x)
        if not math.isfinite(gvals[r]):
            raise EvaluationError(f"constraint {r} is not finite at {x.tolist()}",
                                  kind="constraint", index=r)
    fvals.setflags(write=False)
    gvals.setflags(write=False)
    feasible = bool(np.all(gvals <= feas_tol))
    return CandidatePoint(x, fvals, gvals, feasible)


def _duplicate_pairs(X, tol=DUPLICATE_TOL):
    """Index pairs whose coordinates all agree within ``tol``."""
    if len(X) < 2:
        return []
    order = np.argsort(X[:, 0], kind="stable")
    xs = X[order]
    pairs = []
    for a in range(len(xs)):
        b = a + 1
        while b < len(xs) and xs[b, 0] - xs[a, 0] <= tol:
            if np.all(np.abs(xs[b] - xs[a]) <= tol):
                pairs.append((int(order[a]), int(order[b])))
            b += 1
    return pairs


class CandidateSet:
    """Ordered, duplicate-free list of evaluated points.

    The stacked arrays ``X`` (N x n), ``F`` (N x m) and ``G`` (N x l) are what
    the kernels consume.
    """

    def __init__(self, points, provenance="explicit", params=None, *, n=None, m=None,
                 l=None, check_duplicates=True):
        self.points = tuple(points)
        self.provenance = provenance
        self.params = dict(params or {})
        if self.points:
            n, m, l = (self.points[0].x.size, self.points[0].fvals.size,
                       self.points[0].gvals.size)
        elif n is None or m is None:
            raise InputError("empty candidate set needs explicit dimensions")
        self.n, self.m, self.l = n, m, (l or 0)
        N = len(self.points)
        self.X = np.array([p.x for p in self.points], dtype=float).reshape(N, self.n)
        self.F = np.array([p.fvals for p in self.points], dtype=float).reshape(N, self.m)
        self.G = np.array([p.gvals for p in self.points], dtype=float).reshape(N, self.l)
        for arr in (self.X, self.F, self.G):
            arr.setflags(write=False)
        if check_duplicates:
            dups = _duplicate_pairs(self.X)
            if dups:
                a, b = dups[0]
                raise InputError(f"duplicate candidate points at positions {a} and {b}")

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __getitem__(self, k):
        return self.points[k]

    def __repr__(self):
        return f"CandidateSet({len(self)} points, provenance={self.provenance!r})"

    @property
    def feasible(self):
        return np.array([p.feasible for p in self.points], dtype=bool)

    def subset(self, selector):
        """Members picked by a boolean mask or index list, order preserved."""
        idx = np.arange(len(self))[np.asarray(selector)] if len(self) else []
        return CandidateSet([self.points[k] for k in idx], self.provenance, self.params,
                            n=self.n, m=self.m, l=self.l, check_duplicates=False)

    def index_of(self, point, tol=DUPLICATE_TOL):
        x = point.x if isinstance(point, CandidatePoint) else np.asarray(point, float)
        if not len(self):
            return None
        hit = np.flatnonzero(np.all(np.abs(self.X - x) <= tol, axis=1))
        return int(hit[0]) if hit.size else None

    def keys(self):
        return [p.key for p in self.points]

    def with_point(self, point):
        """This set plus ``point`` appended, unless it is already a member."""
        if self.index_of(point) is not None:
            return self
        return CandidateSet(self.points + (point,), self.provenance, self.params,
                            check_duplicates=False)


def epsilon_vector(eps, m):
    """Broadcast a scalar or sequence to a nonnegative m-vector."""
    arr = np.asarray(eps, dtype=float)
    if arr.ndim == 0:
        arr = np.full(m, float(arr))
    if arr.shape != (m,):
        raise InputError(f"epsilon must have {m} components, got {arr.size}")
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise InputError("epsilon components must be finite and nonnegative")
    return arr


def candidate_set(problem, points, provenance="explicit", params=None):
    """Evaluate an explicit list of points."""
    pts = [evaluate(problem, x) for x in points]
    return CandidateSet(pts, provenance, params, n=problem.n, m=problem.m, l=problem.l)


def make_grid(problem, resolution=None):
    """Feasible points of the uniform box grid, in lexicographic order."""
    if problem.box is None:
        raise ConfigurationError(f"instance {problem.name!r} has no box; cannot grid it")
    resolution = problem.resolution if resolution is None else int(resolution)
    if resolution < 2:
        raise InputError("grid resolution must be at least 2")
    lo, hi = problem.box
    axes = [np.linspace(lo[k], hi[k], resolution) for k in range(problem.n)]
    mesh = np.meshgrid(*axes, indexing="ij")
    X = np.stack([a.ravel() for a in mesh], axis=1)
    pts = [p for p in (evaluate(problem, x) for x in X) if p.feasible]
    return CandidateSet(pts, "grid", {"resolution": resolution},
                        n=problem.n, m=problem.m, l=problem.l, check_duplicates=False)


def sample_points(problem, count, seed=0):
    """Feasible subset of ``count`` uniform draws from the box."""
    if problem.box is None:
        raise ConfigurationError(f"instance {problem.name!r} has no box; cannot sample it")
    if count < 1:
        raise InputError("sample count must be positive")
    rng = np.random.default_rng(seed)
    lo, hi = problem.box
    X = lo + (hi - lo) * rng.random((count, problem.n))
    pts = [p for p in (evaluate(problem, x) for x in X) if p.feasible]
    return CandidateSet(pts, "sample", {"count": count, "seed": seed},
                        n=problem.n, m=problem.m, l=problem.l)


# --------------------------------------------------------------------------
# registry


def _paper_discrete():
    e = np.eye(3)
    prob = ProblemInstance(
        n=3,
        objectives=[linear_oracle(e[i], name=f"f{i + 1}") for i in range(3)],
        name="paper-discrete",
    )
    a = 1.0 / math.sqrt(3.0)
    pts = [(0.0, 0.0, 1.0), (0.0, 1.0, 0.0), (1.0, 0.0, 0.0), (a, a, a)]
    return prob, candidate_set(prob, pts)


def _clip01(x):
    return np.clip(x, 0.0, 1.0)


def _biobjective_quadratic():
    prob = ProblemInstance(
        n=1,
        objectives=[sqdist_oracle([0.0], "x^2"), sqdist_oracle([1.0], "(x-1)^2")],
        constraints=[linear_oracle([-1.0], 0.0, "-x"), linear_oracle([1.0], -1.0, "x-1")],
        box=([-1.0], [2.0]),
        projection=_clip01,
        resolution=301,
        name="biobjective-quadratic",
    )
    return prob, make_grid(prob)


def _biobjective_free():
    prob = ProblemInstance(
        n=1,
        objectives=[sqdist_oracle([0.0], "x^2"), sqdist_oracle([1.0], "(x-1)^2")],
        box=([-1.0], [2.0]),
        resolution=301,
        name="biobjective-quadratic-free",
    )
    return prob, make_grid(prob)


TRI_CENTERS = np.array([
    [1.0, 0.0],
    [-0.5, math.sqrt(3.0) / 2.0],
    [-0.5, -math.sqrt(3.0) / 2.0],
])


def _tri_quadratic():
    prob = ProblemInstance(
        n=2,
        objectives=[sqdist_oracle(c, f"|x-c{i + 1}|^2") for i, c in enumerate(TRI_CENTERS)],
        box=([-1.0, -1.0], [2.0, 2.0]),
        resolution=61,
        name="tri-quadratic",
    )
    return prob, make_grid(prob)


def _biobjective_abs():
    def absdist(c, name):
        return max_oracle(linear_oracle([1.0], -c), linear_oracle([-1.0], c), name=name)

    prob = ProblemInstance(
        n=1,
        objectives=[absdist(0.0, "|x|"), absdist(1.0, "|x-1|")],
        box=([-1.0], [2.0]),
        resolution=301,
        name="biobjective-abs",
    )
    return prob, make_grid(prob)


_REGISTRY = {
    "paper-discrete": _paper_discrete,
    "biobjective-quadratic": _biobjective_quadratic,
    "biobjective-quadratic-free": _biobjective_free,
    "tri-quadratic": _tri_quadratic,
    "biobjective-abs": _biobjective_abs,
}


def registered_names():
    return sorted(_REGISTRY)


def registry_instance(name):
    """Return ``(problem, candidate_set)`` for a built-in instance."""
    try:
        build = _REGISTRY[name]
    except KeyError:
        raise RegistryLookupError(
            f"unknown instance {name!r}; registered: {', '.join(registered_names())}"
        ) from None
    return build()


# --------------------------------------------------------------------------
# ingestion


def read_candidates_csv(problem, source, atol=1e-9):
    """Read a candidate set from a path or an open text file.

    Columns ``x1..xn`` are required; ``f1..fm``, if present, must agree with
    the oracles within ``atol``.  Other columns are ignored.
    """
    if hasattr(source, "read"):
        text = source.read()
    else:
        with open(source, newline="") as fh:
            text = fh.read()
    reader = csv.DictReader(io.StringIO(text))
    header = reader.fieldnames or []
    xcols = [f"x{k + 1}" for k in range(problem.n)]
    fcols = [f"f{k + 1}" for k in range(problem.m)]
    missing = [c for c in xcols if c not in header]
    if missing:
        raise InputError(f"candidate CSV lacks columns {missing}")
    has_f = all(c in header for c in fcols)
    pts = []
    for lineno, row in enumerate(reader, start=2):
        try:
            x = [float(row[c]) for c in xcols]
        except (TypeError, ValueError):
            raise InputError(f"line {lineno}: non-numeric coordinate") from None
        p = evaluate(problem, x)
        if has_f:
            f = np.array([float(row[c]) for c in fcols])
            bad = np.flatnonzero(np.abs(f - p.fvals) > atol)
            if bad.size:
                k = int(bad[0])
                raise InputError(
                    f"line {lineno}: f{k + 1}={f[k]!r} disagrees with oracle value "
                    f"{p.fvals[k]!r}")
        pts.append(p)
    return CandidateSet(pts, "explicit", {"source": "csv"},
                        n=problem.n, m=problem.m, l=problem.l)


def write_candidates_csv(cset, extra=None):
    """Serialize points as CSV text; ``extra`` maps column name -> per-row values."""
    extra = extra or {}
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    header = ([f"x{k + 1}" for k in range(cset.n)] + [f"f{k + 1}" for k in range(cset.m)]
              + [f"g{k + 1}" for k in range(cset.l)] + list(extra))
    writer.writerow(header)
    for idx, p in enumerate(cset):
        row = [format(v, ".17g") for v in np.concatenate([p.x, p.fvals, p.gvals])]
        row += [_csv_cell(extra[c][idx]) for c in extra]
        writer.writerow(row)
    return out.getvalue()


def _csv_cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def load_config(source):
    """Build ``(problem, cset, config)`` from a JSON document or dict.

    Recognised keys: ``instance`` (registry key, required), ``box``
    (``[lo, hi]``), ``grid_resolution``, ``sample_count`` and ``seed``.
    """
    if isinstance(source, dict):
        cfg = dict(source)
    else:
        try:
            with open(source) as fh:
                cfg = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"config is not valid JSON: {exc}") from None
    if "instance" not in cfg:
        raise ConfigurationError("config must name an 'instance'")
    problem, cset = registry_instance(cfg["instance"])
    regrid = False
    if "box" in cfg:
        lo, hi = cfg["box"]
        problem = problem.with_box(lo, hi)
        regrid = True
    if "grid_resolution" in cfg:
        problem = replace(problem, resolution=int(cfg["grid_resolution"]))
        regrid = True
    if "sample_count" in cfg:
        cset = sample_points(problem, int(cfg["sample_count"]), int(cfg.get("seed", 0)))
    elif regrid:
        cset = make_grid(problem)
    return problem, cset, cfg
