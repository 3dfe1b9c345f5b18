import math

import pytest
from hypothesis import given, strategies as st

from smoothsmc.smoothing import SmoothingKind, evaluate, sign_fn

KINDS = list(SmoothingKind)
phis = st.floats(1e-3, 1e3)
reals = st.floats(-1e4, 1e4)


@pytest.mark.parametrize("s, expected", [(0.0, 0.0), (-7.2, -1.0), (1e-300, 1.0), (-0.0, 0.0)])
def test_sign(s, expected):
    assert sign_fn(s) == expected


def test_evaluate_examples():
    assert evaluate(SmoothingKind.SATURATION, 0.5, 1.0) == 0.5
    assert evaluate(SmoothingKind.SATURATION, -4.0, 2.0) == -1.0
    assert evaluate(SmoothingKind.HYPERBOLIC_TANGENT, 0.0, 0.3) == 0.0
    assert evaluate(SmoothingKind.SIGN, 0.2, 1e9) == 1.0


@pytest.mark.parametrize("kind", KINDS)
@pytest.mark.parametrize("phi", [0.0, -0.1])
def test_evaluate_rejects_bad_phi(kind, phi):
    with pytest.raises(ValueError):
        evaluate(kind, 1.0, phi)


def test_parse_and_flags():
    assert SmoothingKind.parse("SAT") is SmoothingKind.SATURATION
    assert SmoothingKind.parse("tanh") is SmoothingKind.HYPERBOLIC_TANGENT
    with pytest.raises(ValueError, match="sigmoid"):
        SmoothingKind.parse("sigmoid")
    assert SmoothingKind.SATURATION.exact_outside_layer
    assert not SmoothingKind.HYPERBOLIC_TANGENT.exact_outside_layer


@pytest.mark.parametrize("kind", KINDS)
@given(s=reals, phi=phis)
def test_odd_and_bounded(kind, s, phi):
    v = evaluate(kind, s, phi)
    assert -1.0 <= v <= 1.0
    assert evaluate(kind, -s, phi) == -v


@given(s=reals, phi=phis)
def test_saturation_is_sign_outside_layer(s, phi):
    if abs(s) >= phi:
        assert evaluate(SmoothingKind.SATURATION, s, phi) == sign_fn(s)


@given(s=reals.filter(lambda v: v != 0), phi=phis)
def test_tanh_tail_bound(s, phi):
    gap = abs(evaluate(SmoothingKind.HYPERBOLIC_TANGENT, s, phi) - sign_fn(s))
    assert gap <= 2 * math.exp(-2 * abs(s) / phi) + 1e-15


@pytest.mark.parametrize("kind", KINDS)
@given(a=reals, b=reals, phi=phis)
def test_monotone(kind, a, b, phi):
    lo, hi = sorted((a, b))
    assert evaluate(kind, lo, phi) <= evaluate(kind, hi, phi)
