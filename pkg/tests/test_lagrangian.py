import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_fset
from mocert.errors import InputError, PreconditionError
from mocert.geoffrion import geoffrion_mask, gordan_multipliers
from mocert.lagrangian import (
    Verdict,
    default_mu_probe,
    eps_bar,
    eps_subdiff_contains,
    lagrangian_value,
    verify_eps_kkt,
    verify_saddle,
)
from mocert.problem import (
    evaluate,
    linear_oracle,
    make_grid,
    max_oracle,
    quadratic_oracle,
    sqdist_oracle,
)
from mocert.errors import NoCertificateError


def test_lagrangian_examples(biquad):
    prob, _ = biquad
    x0 = evaluate(prob, [0.0])
    assert lagrangian_value(0, 2.0, x0, [0, 1], [0, 0]) == 2.0
    assert lagrangian_value(0, 2.0, x0, [1, 0], [0, 0]) == x0.fvals[0]
    half = evaluate(prob, [0.5])
    assert lagrangian_value(0, 2.0, half, [0.5, 0.5], [1, 0]) == 0.0
    with pytest.raises(InputError):
        lagrangian_value(0, 2.0, half, [0.5, 0.5], [-1, 0])
    with pytest.raises(InputError):
        lagrangian_value(0, 2.0, half, [0.6, 0.5], [0, 0])


def test_eps_bar_examples():
    assert eps_bar(0, 0.0, [0.5, 0.5], 2.0) == 0.0
    assert eps_bar(0, [1, 1], [0.5, 0.5], 2.0) == 2.0
    assert eps_bar(1, [0.3, 0.7], [0, 1], 5.0) == 0.7


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 5).flatmap(lambda m: st.tuples(
    st.lists(st.floats(0, 10), min_size=m, max_size=m),
    st.lists(st.floats(0, 1), min_size=m, max_size=m),
    st.integers(0, m - 1))), st.floats(0.01, 100))
def test_eps_bar_dominance(data, M):
    eps, raw, i = data
    raw = np.asarray(raw) + 1e-3
    tau = raw / raw.sum()
    tau[-1] = 1.0 - tau[:-1].sum()
    assert eps_bar(i, eps, np.clip(tau, 0, 1), M) >= eps[i]


def test_saddle_examples(biquad_free):
    prob, grid = biquad_free
    rep = verify_saddle(0, evaluate(prob, [0.5]), [0, 1], [], 0.0, 1.0, grid)
    assert rep.ok and rep.right_gap == 0.0
    rep = verify_saddle(0, evaluate(prob, [0.9]), [0, 1], [], 0.0, 1.0, grid)
    assert not rep.right_ok and rep.left_ok and rep.slack_ok
    assert rep.right_gap == pytest.approx(0.32, abs=1e-12)


def test_saddle_slack_with_zero_multipliers(biquad):
    prob, grid = biquad
    for x in (0.0, 0.3, 1.0):
        assert verify_saddle(1, evaluate(prob, [x]), [1, 0], [0, 0], 0.0, 1.0, grid).slack_ok


def test_saddle_detects_infeasible_x0(biquad):
    prob, grid = biquad
    rep = verify_saddle(0, evaluate(prob, [1.5]), [0, 1], [0, 0], 0.0, 1.0, grid)
    assert not rep.left_ok


def test_saddle_probe_validation(biquad):
    prob, grid = biquad
    x0 = evaluate(prob, [0.5])
    with pytest.raises(InputError):
        verify_saddle(0, x0, [0, 1], [0, 0], 0.0, 1.0, grid, mu_probe=[[1, 0]])
    assert len(default_mu_probe(2)) == 7


def test_subdiff_examples():
    f = sqdist_oracle([0.0])
    assert eps_subdiff_contains(f, [0.0], [0.0], 0.0) is Verdict.CERTIFIED_YES
    assert eps_subdiff_contains(f, [1.0], [0.0], 1.0) is Verdict.CERTIFIED_YES
    assert eps_subdiff_contains(f, [1.0], [0.0], 0.5) is Verdict.CERTIFIED_NO


def test_subdiff_sampled_and_errors():
    f = max_oracle(linear_oracle([1.0]), linear_oracle([-1.0]), name="|x|")
    probe = np.linspace(-3, 3, 61)[:, None]
    assert eps_subdiff_contains(f, [0.0], [0.5], 0.0, probe) is Verdict.SAMPLED_NO_VIOLATION
    assert eps_subdiff_contains(f, [0.0], [2.0], 0.0, probe) is Verdict.CERTIFIED_NO
    with pytest.raises(InputError):
        eps_subdiff_contains(f, [0.0], [0.5], 0.0)
    concave = quadratic_oracle([[-2.0]], [0.0])
    with pytest.raises(PreconditionError):
        eps_subdiff_contains(concave, [0.0], [0.0], 0.0)


def test_subdiff_linear_exact():
    f = linear_oracle([2.0, -1.0], 3.0)
    assert eps_subdiff_contains(f, [1.0, 1.0], [2.0, -1.0], 0.0) is Verdict.CERTIFIED_YES
    assert eps_subdiff_contains(f, [1.0, 1.0], [2.0, 0.0], 5.0) is Verdict.CERTIFIED_NO


@settings(max_examples=100, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.1, 5), st.floats(0, 4))
def test_zero_membership_matches_minimality(x, c, a, eps):
    f = quadratic_oracle([[2 * a]], [-2 * a * c], a * c * c)
    fmin = 0.0
    verdict = eps_subdiff_contains(f, [x], [0.0], eps)
    expect = f.value(np.array([x])) <= fmin + eps
    if abs(f.value(np.array([x])) - eps) > 1e-9:
        assert (verdict is Verdict.CERTIFIED_YES) == expect


@pytest.mark.parametrize("M", [1.0, 3.0])
def test_necessity_on_line_grid(biquad, M):
    prob, _ = biquad
    grid = make_grid(prob, 101)
    mask = geoffrion_mask(grid, M, 0.0)
    assert mask.any()
    for k in np.flatnonzero(mask):
        x0 = grid[k]
        certs = [gordan_multipliers(x0, i, M, 0.0, grid) for i in range(prob.m)]
        for c in certs:
            assert verify_saddle(c.i, x0, c.tau, c.mu, 0.0, M, grid, atol=1e-9).ok
        assert verify_eps_kkt(x0, certs, 0.0, M, grid, atol=1e-9)


def _random_certificate(rng, m, l):
    tau = rng.random(m)
    tau /= tau.sum()
    tau[-1] = 1.0 - tau[:-1].sum()
    return np.clip(tau, 0, 1), rng.random(l) * rng.integers(0, 2)


def test_saddle_sufficiency_random_sets():
    rng = np.random.default_rng(7)
    checked = 0
    for _ in range(120):
        m = int(rng.integers(2, 4))
        S = random_fset(rng, m, 12, lattice=bool(rng.integers(0, 2)))
        M = float(rng.choice([0.5, 1.0, 2.0]))
        eps = rng.random(m) * 0.2 * rng.integers(0, 2)
        for k in range(len(S)):
            x0 = S[k]
            certs = []
            for i in range(m):
                tau, mu = _random_certificate(rng, m, 0)
                try:
                    c = gordan_multipliers(x0, i, M, 0.0, S)
                    tau = c.tau
                except (NoCertificateError, PreconditionError):
                    pass
                rep = verify_saddle(i, x0, tau, mu, eps, M, S, strict_eps=True)
                if not rep.ok:
                    break
                certs.append(rep)
            else:
                checked += 1
                assert k in set(np.flatnonzero(geoffrion_mask(S, (1 + M) * (m - 1), 2 * eps)))
    assert checked > 0


def test_verify_eps_kkt_examples(biquad):
    prob, grid = biquad
    grid = make_grid(prob, 101)
    x0 = evaluate(prob, [0.5])
    certs = [gordan_multipliers(x0, i, 3.0, 0.0, grid) for i in range(2)]
    assert verify_eps_kkt(x0, certs, 0.0, 3.0, grid, atol=1e-9)
    far = [([0.5, 0.5], [0, 0])] * 2
    assert not verify_eps_kkt(evaluate(prob, [0.0]), far, 0.0, 1.0, grid)
    assert verify_eps_kkt(evaluate(prob, [0.0]), far, 10.0, 1.0, grid)
    with pytest.raises(InputError):
        verify_eps_kkt(x0, certs[:1], 0.0, 3.0, grid)


def test_verify_eps_kkt_condition_b(biquad):
    prob, grid = biquad
    x0 = evaluate(prob, [0.5])
    certs = [([0.5, 0.5], [1.0, 0.0])] * 2
    assert not verify_eps_kkt(x0, certs, 0.0, 1.0, grid)
    assert verify_eps_kkt(x0, certs, [0.5, 0.5], 1.0, grid) in (True, False)


def test_exact_condition_a(biquad_free):
    prob, grid = biquad_free
    certs = [([0.5, 0.5], [])] * 2
    # each L_i = 1.5 (x^2 + (x-1)^2) + const has curvature 3, so its
    # eps_bar-subdifferential at x is the ball of radius sqrt(6 eps_bar) around
    # L_i'(x); with eps_bar = 1.5 e the radii add to 6 sqrt(e) against the
    # summed gradient 3 (4x - 2) = 0.6 at x = 0.6, giving the threshold e = 0.01
    x0 = evaluate(prob, [0.6])
    assert not verify_eps_kkt(x0, certs, 0.0, 1.0, grid, problem=prob)
    assert verify_eps_kkt(x0, certs, [0.0101, 0.0101], 1.0, grid, problem=prob)
    assert not verify_eps_kkt(x0, certs, [0.0099, 0.0099], 1.0, grid, problem=prob)
    assert verify_eps_kkt(evaluate(prob, [0.5]), certs, 0.0, 1.0, grid, problem=prob)


def test_exact_refines_relaxation(biquad_free):
    prob, grid = biquad_free
    rng = np.random.default_rng(3)
    for _ in range(40):
        x0 = evaluate(prob, [rng.uniform(-0.5, 1.5)])
        t = rng.random()
        certs = [([t, 1 - t], []), ([1 - t, t], [])]
        eps = rng.random(2) * 0.3
        if verify_eps_kkt(x0, certs, eps, 2.0, grid, problem=prob):
            assert verify_eps_kkt(x0, certs, eps, 2.0, grid, atol=1e-9)
