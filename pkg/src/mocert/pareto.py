"""Dominance and (weak, local) eps-Pareto membership over finite candidate sets."""
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from ._backend import kernels
from .errors import InputError, PreconditionError
from .problem import CandidatePoint, epsilon_vector


class Mode(str, Enum):
    """``STRICT``: cone minus origin (Pareto).  ``INTERIOR``: open cone (weak Pareto)."""

    STRICT = "strict-cone"
    INTERIOR = "interior-cone"


def _mode(mode):
    try:
        return Mode(mode)
    except ValueError:
        raise InputError(f"unknown dominance mode {mode!r}") from None


@dataclass(frozen=True)
class DominanceVerdict:
    dominated: bool
    witness: Optional[CandidatePoint]
    mode: Mode
    witness_index: Optional[int] = None


def _dominates_rows(D, mode):
    if mode is Mode.STRICT:
        return np.all(D >= 0, axis=-1) & np.any(D > 0, axis=-1)
    return np.all(D > 0, axis=-1)


def eps_dominates(x, xstar, eps, mode=Mode.STRICT):
    """True when ``f(x) + eps`` lies in ``f(xstar) - cone``."""
    mode = _mode(mode)
    if x.fvals.shape != xstar.fvals.shape:
        raise InputError("points have different numbers of objectives")
    eps = epsilon_vector(eps, xstar.fvals.size)
    D = kernels.gains(xstar.fvals, x.fvals, eps)
    return bool(_dominates_rows(D, mode))


def first_dominator(xstar, cset, eps, mode=Mode.STRICT):
    """Index of the first member of ``cset`` that eps-dominates ``xstar``, or None."""
    mode = _mode(mode)
    if not len(cset):
        return None
    D = kernels.gains(xstar.fvals, cset.F, eps)
    hit = np.flatnonzero(_dominates_rows(D, mode))
    return int(hit[0]) if hit.size else None


def _require_feasible(cset):
    if len(cset) and not cset.feasible.all():
        bad = int(np.flatnonzero(~cset.feasible)[0])
        raise PreconditionError(f"candidate {bad} of the set is infeasible")


def is_eps_pareto(xstar, cset, eps, mode=Mode.STRICT):
    """Check ``xstar`` against every member of a feasible candidate set."""
    mode = _mode(mode)
    if not xstar.feasible:
        raise PreconditionError("query point is infeasible")
    if not len(cset):
        raise PreconditionError("candidate set is empty")
    _require_feasible(cset)
    eps = epsilon_vector(eps, xstar.fvals.size)
    k = first_dominator(xstar, cset, eps, mode)
    if k is None:
        return DominanceVerdict(False, None, mode)
    return DominanceVerdict(True, cset[k], mode, k)


def pareto_mask(cset, eps, mode=Mode.STRICT):
    """Boolean mask of the members not eps-dominated within the set."""
    mode = _mode(mode)
    eps = epsilon_vector(eps, cset.m)
    if not len(cset):
        return np.zeros(0, dtype=bool)
    return ~kernels.dominated_mask(cset.F, eps, mode is Mode.STRICT)


def eps_pareto_set(cset, eps, mode=Mode.STRICT):
    """Members of ``cset`` that no member eps-dominates, input order kept."""
    if not len(cset):
        raise PreconditionError("candidate set is empty")
    return cset.subset(pareto_mask(cset, eps, mode))


def is_local_pareto(xstar, cset, delta, mode=Mode.STRICT):
    """No member within distance ``delta`` of ``xstar`` dominates it (eps = 0)."""
    if not delta > 0:
        raise InputError("delta must be positive")
    if not len(cset):
        return True
    near = np.linalg.norm(cset.X - xstar.x, axis=1) <= delta
    if not near.any():
        return True
    return first_dominator(xstar, cset.subset(near), np.zeros(cset.m), mode) is None
