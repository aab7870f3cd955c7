import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import fpoint, fset
from mocert.errors import ConfigurationError, InputError
from mocert.geoffrion import GordanCertificate, geoffrion_mask, gordan_multipliers
from mocert.problem import ProblemInstance, make_grid, registry_instance, sqdist_oracle
from mocert.scalarization import (
    Method,
    is_s_eps_minimum,
    m_bound_from_weights,
    solve_weighted_sum,
    weight_vector,
    weighted_sum_value,
    weights_from_certificates,
)


def test_weighted_sum_value(discrete4):
    _, S = discrete4
    assert weighted_sum_value([1, 1, 1], S[3]) == pytest.approx(math.sqrt(3), abs=1e-12)
    assert weighted_sum_value([1, 1], fpoint([0.25, 0.25])) == 0.5
    with pytest.raises(InputError):
        weighted_sum_value([2, 0.0], fpoint([0.25, 0.25]))
    with pytest.raises(InputError):
        weighted_sum_value([1, 1, 1], fpoint([0.25, 0.25]))


@pytest.mark.parametrize("s, x", [((1, 1), 0.5), ((1, 3), 0.75)])
def test_solve_examples(biquad, s, x):
    prob, _ = biquad
    rep = solve_weighted_sum(prob, s, tol=1e-8)
    assert rep.method is Method.PROJECTED_GRADIENT and rep.tolerance_met
    assert rep.xstar.x[0] == pytest.approx(x, abs=1e-8)
    assert abs(rep.value - np.dot(s, rep.xstar.fvals)) <= 1e-12


def test_solve_dominant_weight():
    prob, _ = registry_instance("tri-quadratic")
    rep = solve_weighted_sum(prob, [1.0, 1e-9, 1e-9])
    assert np.allclose(rep.xstar.x, [1.0, 0.0], atol=1e-3)


def test_solve_grid_fallback():
    prob, grid = registry_instance("biobjective-abs")
    rep = solve_weighted_sum(prob, [1.0, 2.0])
    assert rep.method is Method.GRID
    assert rep.value == pytest.approx(float(np.min(grid.F @ [1.0, 2.0])))
    assert rep.xstar.x[0] == pytest.approx(1.0)


def test_solve_needs_box():
    prob = ProblemInstance(n=1, objectives=[sqdist_oracle([0.0])])
    with pytest.raises(ConfigurationError):
        solve_weighted_sum(prob, [1.0])


def test_solve_beats_grid(biquad):
    prob, _ = biquad
    grid = make_grid(prob, 1001)
    for s in ([1, 2], [5, 1], [0.3, 0.7]):
        rep = solve_weighted_sum(prob, s, tol=1e-8)
        assert rep.value <= float(np.min(grid.F @ s)) + 1e-8


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(0.05, 20), min_size=3, max_size=3), st.floats(0.1, 50))
def test_scale_invariance(s, alpha):
    prob, _ = registry_instance("tri-quadratic")
    a = solve_weighted_sum(prob, s, tol=1e-10)
    b = solve_weighted_sum(prob, np.multiply(alpha, s), tol=1e-10)
    assert np.allclose(a.xstar.fvals, b.xstar.fvals, atol=1e-6)


def test_is_s_eps_minimum_examples(discrete4):
    _, S = discrete4
    assert is_s_eps_minimum(S[0], [1, 1, 1], 0.0, S)
    assert not is_s_eps_minimum(S[3], [1, 1, 1], 0.0, S)
    assert is_s_eps_minimum(S[3], [1, 1, 1], 1.0, S)


@pytest.mark.parametrize("s, m, out", [((1, 1, 1), 3, 2.0), ((2, 1), 2, 2.0), ((1, 4, 2), 3, 8.0)])
def test_m_bound_examples(s, m, out):
    assert m_bound_from_weights(s, m) == out


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0.01, 100), min_size=2, max_size=5))
def test_equal_weights_minimise_bound(s):
    m = len(s)
    assert m_bound_from_weights(s, m) >= m - 1
    assert m_bound_from_weights([3.7] * m, m) == m - 1


def test_weights_from_certificates_examples():
    diag = [GordanCertificate(i, np.eye(3)[i], np.zeros(0), True) for i in range(3)]
    assert weights_from_certificates(diag, 2.0).tolist() == [1, 1, 1]
    c = [GordanCertificate(0, np.array([0.0, 1.0]), np.zeros(0), True),
         GordanCertificate(1, np.array([1.0, 0.0]), np.zeros(0), True)]
    assert weights_from_certificates(c, 1.0).tolist() == [2, 2]
    with pytest.raises(InputError):
        weights_from_certificates(c[:1], 1.0)


def test_weights_from_discrete_certificates():
    S = fset([[0, 1], [1, 0]])
    certs = [gordan_multipliers(S[0], i, 1.0, 0.0, S) for i in range(2)]
    s = weights_from_certificates(certs, 1.0)
    assert np.all(s >= 1)
    assert is_s_eps_minimum(S[0], s, 0.0, S, atol=1e-9)


def test_weight_vector_validation():
    with pytest.raises(InputError):
        weight_vector([1, -1])
    with pytest.raises(InputError):
        weight_vector([1, math.nan])


@pytest.mark.parametrize("name, M", [("biobjective-quadratic", 3.0),
                                     ("biobjective-quadratic-free", 2.0)])
def test_converse_bridge_on_line_grids(name, M):
    prob, grid = registry_instance(name)
    grid = make_grid(prob, 121)
    for k in np.flatnonzero(geoffrion_mask(grid, M, 0.0)):
        x0 = grid[k]
        certs = [gordan_multipliers(x0, i, M, 0.0, grid) for i in range(prob.m)]
        s = weights_from_certificates(certs, M)
        assert is_s_eps_minimum(x0, s, 0.0, grid, atol=1e-9)


def test_converse_bridge_soundness_on_plane_grid():
    from mocert.errors import NoCertificateError
    prob, _ = registry_instance("tri-quadratic")
    grid = make_grid(prob, 13)
    found = 0
    for k in np.flatnonzero(geoffrion_mask(grid, 4.0, 0.0)):
        try:
            certs = [gordan_multipliers(grid[k], i, 4.0, 0.0, grid) for i in range(3)]
        except NoCertificateError:
            continue
        found += 1
        s = weights_from_certificates(certs, 4.0)
        assert is_s_eps_minimum(grid[k], s, 0.0, grid, atol=1e-9)
    assert found > 0
