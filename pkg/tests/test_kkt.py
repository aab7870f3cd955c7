import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mocert.errors import InputError, NotApplicableError
from mocert.kkt import check_bcq, check_scq, is_modified_eps_kkt, kkt_residual
from mocert.problem import (
    ProblemInstance,
    candidate_set,
    evaluate,
    linear_oracle,
    make_grid,
    registry_instance,
    sqdist_oracle,
)


def recomputed(rep, problem):
    v = sum(l * u for l, u in zip(rep.multipliers.lam, rep.selected_generators[:problem.m]))
    active = [r for r in range(problem.l) if abs(rep.companion.gvals[r]) <= 1e-6]
    for r, gen in zip(active, rep.selected_generators[problem.m:]):
        v = v + rep.multipliers.mu[r] * gen
    return float(np.linalg.norm(v))


def test_residual_at_compromise(biquad):
    prob, _ = biquad
    rep = kkt_residual(evaluate(prob, [0.5]), prob)
    assert rep.residual == 0.0
    assert np.allclose(rep.multipliers.lam, [1 / math.sqrt(2)] * 2)
    assert rep.epsilon == 0.0 and rep.companion is rep.x


def test_residual_outside_pareto_set(biquad):
    prob, _ = biquad
    rep = kkt_residual(evaluate(prob, [1.2]), prob)
    assert abs(rep.residual - 0.4) <= 1e-12
    assert np.allclose(rep.multipliers.lam, [0, 1])
    assert rep.epsilon == pytest.approx(0.16)


def test_every_pareto_point_of_the_line_is_kkt(biquad):
    # f = (x^2, (x-1)^2): any x in [0, 1] balances the gradients 2x and 2(x-1)
    prob, _ = biquad
    for x in (0.0, 0.25, 0.9, 1.0):
        assert kkt_residual(evaluate(prob, [x]), prob).residual <= 1e-12


def test_single_objective_minimum():
    prob = ProblemInstance(n=2, objectives=[sqdist_oracle([0.3, -0.1])])
    rep = kkt_residual(evaluate(prob, [0.3, -0.1]), prob)
    assert rep.residual == 0 and rep.multipliers.lam.tolist() == [1.0]


def test_residual_with_active_constraint(biquad):
    # at x = 2 (far outside) nothing is active; at x = 1 the bound x <= 1 is
    prob, _ = biquad
    rep = kkt_residual(evaluate(prob, [1.0]), prob)
    assert rep.residual <= 1e-12 and rep.comp_slack == 0


def test_piecewise_residual():
    prob, _ = registry_instance("biobjective-abs")
    assert kkt_residual(evaluate(prob, [0.5]), prob).residual <= 1e-12
    assert kkt_residual(evaluate(prob, [0.0]), prob).residual <= 1e-12
    rep = kkt_residual(evaluate(prob, [1.5]), prob)
    assert rep.residual == pytest.approx(math.sqrt(2))


@settings(max_examples=100, deadline=None)
@given(st.floats(-1, 2), st.sampled_from(["biobjective-quadratic", "tri-quadratic",
                                          "biobjective-abs"]), st.floats(-1, 2))
def test_residual_nonnegative_and_recomputable(a, name, b):
    prob, _ = registry_instance(name)
    x = [a] if prob.n == 1 else [a, b]
    rep = kkt_residual(evaluate(prob, x), prob)
    assert rep.residual >= 0
    assert abs(np.linalg.norm(rep.combination) - rep.residual) <= 1e-12
    assert abs(recomputed(rep, prob) - rep.residual) <= 1e-12
    assert abs(np.linalg.norm(rep.multipliers.lam) - 1) <= 1e-9
    assert np.all(rep.multipliers.mu >= 0)


def test_modified_kkt_exact_point(biquad):
    prob, grid = biquad
    x0 = evaluate(prob, [0.5])
    for eps in (0.0, 1e-4, 0.5):
        rep = is_modified_eps_kkt(x0, eps, prob, grid)
        assert rep is not None and rep.companion.x[0] == 0.5


def test_modified_kkt_companion_nearby(biquad_free):
    # 1.05 is not KKT on the unconstrained line (both gradients positive);
    # the Pareto endpoint 1.0 lies within sqrt(0.01) = 0.1
    prob, _ = biquad_free
    x0 = evaluate(prob, [1.05])
    search = make_grid(prob.with_box([0.95], [1.15]), 21)
    rep = is_modified_eps_kkt(x0, 0.01, prob, search)
    assert rep is not None
    assert rep.residual <= 0.1 and abs(rep.companion.x[0] - x0.x[0]) <= 0.1
    assert rep.companion.x[0] <= 1.0 + 1e-12


def test_modified_kkt_absent(biquad_free):
    prob, _ = biquad_free
    x0 = evaluate(prob, [1.2])
    search = make_grid(prob.with_box([1.1], [1.3]), 21)
    assert is_modified_eps_kkt(x0, 1e-6, prob, search) is None
    with pytest.raises(InputError):
        is_modified_eps_kkt(x0, -1.0, prob, search)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.9, 1.3), st.floats(1e-6, 0.05), st.floats(1.0, 10.0))
def test_modified_kkt_monotone_in_eps(x, eps, factor):
    prob, grid = registry_instance("biobjective-quadratic-free")
    x0 = evaluate(prob, [x])
    if is_modified_eps_kkt(x0, eps, prob, grid) is not None:
        assert is_modified_eps_kkt(x0, eps * factor, prob, grid) is not None


def test_scq(biquad):
    prob, grid = biquad
    x = check_scq(prob, grid)
    assert x is not None and 0 < x.x[0] < 1
    pinch = ProblemInstance(n=1, objectives=[sqdist_oracle([0.0])],
                            constraints=[linear_oracle([1.0]), linear_oracle([-1.0])],
                            box=([-1.0], [1.0]))
    assert check_scq(pinch, make_grid(pinch, 21)) is None
    free = ProblemInstance(n=1, objectives=[sqdist_oracle([0.0])])
    with pytest.raises(NotApplicableError):
        check_scq(free, candidate_set(free, [[0.0]]))


def test_bcq():
    one = ProblemInstance(n=1, objectives=[sqdist_oracle([0.0])], constraints=[linear_oracle([1.0])])
    assert check_bcq(evaluate(one, [0.0]), one) == (True, 1.0)
    two = ProblemInstance(n=1, objectives=[sqdist_oracle([0.0])],
                          constraints=[linear_oracle([1.0]), linear_oracle([-1.0])])
    assert check_bcq(evaluate(two, [0.0]), two) == (False, 0.0)
    assert check_bcq(evaluate(one, [-1.0]), one) == (True, math.inf)
