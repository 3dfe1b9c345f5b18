import numpy as np
import pytest
from hypothesis import given, strategies as st

from smoothsmc.surface import (MAX_ORDER, binomial_coefficients, boundary_distance,
                               make_surface, surface_rate, surface_value)


def pascal_row(m):
    row = [1]
    for _ in range(m):
        row = [a + b for a, b in zip([0] + row, row + [0])]
    return row


@pytest.mark.parametrize("n, expected", [(1, [1]), (3, [1, 2, 1]), (5, [1, 4, 6, 4, 1])])
def test_binomial_examples(n, expected):
    assert binomial_coefficients(n) == expected


@pytest.mark.parametrize("n", range(1, MAX_ORDER + 1))
def test_binomial_matches_pascal_and_sums_to_power_of_two(n):
    c = binomial_coefficients(n)
    assert c == pascal_row(n - 1)
    assert sum(c) == 2 ** (n - 1)
    assert all(isinstance(v, int) for v in c)


@pytest.mark.parametrize("n", [0, -1, MAX_ORDER + 1])
def test_binomial_rejects_out_of_range(n):
    with pytest.raises(ValueError):
        binomial_coefficients(n)


def test_binomial_rejects_non_integer():
    with pytest.raises(TypeError):
        binomial_coefficients(2.5)


def test_make_surface_examples():
    s = make_surface(2, 1.0)
    np.testing.assert_array_equal(s.coeffs_c, [1, 1])
    np.testing.assert_array_equal(s.coeffs_cbar, [0, 1])
    np.testing.assert_array_equal(make_surface(3, 2.0).coeffs_c, [4, 4, 1])
    np.testing.assert_array_equal(make_surface(1, 5.0).coeffs_c, [1])
    np.testing.assert_array_equal(make_surface(1, 5.0).coeffs_cbar, [0])


@pytest.mark.parametrize("lam", [0.0, -1.0, float("nan"), float("inf")])
def test_make_surface_rejects_bad_lambda(lam):
    with pytest.raises(ValueError):
        make_surface(2, lam)


@given(st.integers(1, 10), st.floats(0.1, 5.0))
def test_surface_invariants(n, lam):
    s = make_surface(n, lam)
    assert s.coeffs_c[-1] == 1.0
    assert s.coeffs_cbar[0] == 0.0
    np.testing.assert_array_equal(s.coeffs_cbar[1:], s.coeffs_c[:-1])
    # characteristic polynomial sum_k c[k] mu^k is (mu + lam)^(n-1)
    expected = np.atleast_1d(np.poly([-lam] * (n - 1)))[::-1]
    np.testing.assert_allclose(s.coeffs_c, expected, rtol=1e-12)
    if n > 1:
        roots = np.roots(s.coeffs_c[::-1])
        assert np.all(roots.real < 0)


def test_surface_is_read_only():
    s = make_surface(3, 1.0)
    with pytest.raises(ValueError):
        s.coeffs_c[0] = 2.0


def test_surface_value_examples():
    assert surface_value(make_surface(2, 1.0), [0, 0]) == 0
    assert surface_value(make_surface(2, 3.0), [1, -3]) == 0
    assert surface_value(make_surface(3, 2.0), [1, 1, 1]) == 9


def test_surface_value_length_mismatch():
    with pytest.raises(ValueError):
        surface_value(make_surface(3, 1.0), [1, 2])
    with pytest.raises(ValueError):
        surface_rate(make_surface(3, 1.0), [1, 2, 3, 4], 0.0)


def test_surface_rate_examples():
    assert surface_rate(make_surface(2, 1.0), [0, 0], 0.0) == 0
    assert surface_rate(make_surface(2, 2.0), [5, 1], 3.0) == 5


@given(st.integers(1, 8), st.floats(0.1, 4.0),
       st.lists(st.floats(-10, 10), min_size=8, max_size=8), st.floats(-10, 10),
       st.floats(-10, 10))
def test_surface_rate_structure(n, lam, e, other, err_n):
    spec = make_surface(n, lam)
    a = np.array(e[:n])
    base = surface_rate(spec, a, err_n)
    # the zeroth error component never enters s'
    b = a.copy()
    b[0] = other
    assert surface_rate(spec, b, err_n) == pytest.approx(base, abs=1e-9)
    # e^(n) enters with weight exactly 1
    assert surface_rate(spec, a, err_n + 1.0) - base == pytest.approx(1.0, abs=1e-9)
    # the top component e^(n-1) enters with weight C(n-1, 1) lam
    if n >= 2:
        c = a.copy()
        c[-1] += 1.0
        assert surface_rate(spec, c, err_n) - base == pytest.approx((n - 1) * lam, abs=1e-9)


@given(st.integers(1, 8), st.floats(0.1, 4.0),
       st.lists(st.floats(-10, 10), min_size=16, max_size=16),
       st.floats(-3, 3), st.floats(-3, 3))
def test_surface_value_is_linear(n, lam, vals, a, b):
    spec = make_surface(n, lam)
    e1, e2 = np.array(vals[:n]), np.array(vals[8:8 + n])
    lhs = surface_value(spec, a * e1 + b * e2)
    rhs = a * surface_value(spec, e1) + b * surface_value(spec, e2)
    scale = 1 + np.abs(spec.coeffs_c).sum() * 30
    assert lhs == pytest.approx(rhs, abs=1e-12 * scale)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_surface_rate_matches_finite_difference(n):
    # e(t) = sin(t) + 0.5 cos(2t): all derivatives analytic
    lam = 1.5
    spec = make_surface(n, lam)

    def derivs(t):
        return np.array([np.sin(t + k * np.pi / 2) + 0.5 * 2**k * np.cos(2 * t + k * np.pi / 2)
                         for k in range(n + 1)])

    t0 = 0.7
    d = derivs(t0)
    exact = surface_rate(spec, d[:n], d[n])
    errs = []
    for h in (1e-3, 5e-4):
        fd = (surface_value(spec, derivs(t0 + h)[:n]) - surface_value(spec, d[:n])) / h
        errs.append(abs(fd - exact))
    assert errs[0] / errs[1] == pytest.approx(2.0, rel=0.05)


@pytest.mark.parametrize("s, phi, expected", [(0.5, 1.0, 0.0), (2.0, 1.0, 1.0), (-3.0, 0.5, -2.5),
                                              (1.0, 1.0, 0.0), (-1.0, 1.0, 0.0)])
def test_boundary_distance_examples(s, phi, expected):
    assert boundary_distance(s, phi) == expected


@pytest.mark.parametrize("phi", [0.0, -1.0])
def test_boundary_distance_rejects_bad_phi(phi):
    with pytest.raises(ValueError):
        boundary_distance(1.0, phi)


@given(st.floats(-1e6, 1e6), st.floats(1e-3, 1e3))
def test_boundary_distance_properties(s, phi):
    d = boundary_distance(s, phi)
    assert abs(d) == pytest.approx(max(0.0, abs(s) - phi), abs=1e-9 * (1 + abs(s)))
    if d != 0:
        assert np.sign(d) == np.sign(s)
