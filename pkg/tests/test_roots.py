import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from feedbackwalk.errors import RootNotBracketed
from feedbackwalk.roots import bisect, bracketed_newton, horner, horner_with_derivative, sign_changes

coeff = st.floats(-10, 10, allow_nan=False)


@given(st.lists(coeff, min_size=1, max_size=10), st.floats(-2, 2))
def test_horner_matches_polyval(cs, x):
    assert horner(cs, x) == pytest.approx(np.polyval(cs, x), rel=1e-12, abs=1e-9)
    v, d = horner_with_derivative(cs, x)
    assert v == pytest.approx(horner(cs, x), abs=1e-12)
    assert d == pytest.approx(np.polyval(np.polyder(cs), x) if len(cs) > 1 else 0.0, rel=1e-12, abs=1e-9)


def test_bisect_full_precision():
    r = bisect(lambda x: x * x - 2.0, 0.0, 2.0)
    assert abs(r - math.sqrt(2.0)) <= 2.3e-16


def test_bisect_not_bracketed():
    with pytest.raises(RootNotBracketed):
        bisect(lambda x: x * x + 1.0, -1.0, 1.0)
    with pytest.raises(RootNotBracketed):
        bracketed_newton(lambda x: x * x + 1.0, lambda x: 2 * x, -1.0, 1.0)


@given(st.floats(0.01, 0.99))
def test_newton_agrees_with_bisect(root):
    def f(x):
        return (x - root) * (x + 3.0) * (x * x + 1.0)

    def df(x):
        h = 1e-7
        return (f(x + h) - f(x - h)) / (2 * h)

    assert bracketed_newton(f, df, 0.0, 1.0) == pytest.approx(root, abs=1e-13)
    assert bisect(f, 0.0, 1.0) == pytest.approx(root, abs=1e-15)


def test_newton_falls_back_on_flat_derivative():
    # derivative vanishes at the root: Newton alone converges slowly
    r = bracketed_newton(lambda x: (x - 0.3) ** 3, lambda x: 3 * (x - 0.3) ** 2, 0.0, 1.0)
    assert abs(r - 0.3) < 1e-6


def test_sign_changes():
    assert sign_changes([1, -1, 1]) == 2
    assert sign_changes([1, 0, 1]) == 0
    assert sign_changes([1, 0, -1]) == 1
    assert sign_changes([]) == 0


def test_newton_rejected_at_bisection_midpoint():
    # after the coarse bisection the Newton step lands one ulp outside the
    # bracket; the fallback midpoint equals the current iterate
    cs = [0.4, -0.6599999999999999, 0.19999999999999996]
    r = bracketed_newton(lambda x: horner(cs, x), lambda x: horner_with_derivative(cs, x)[1], 1 - 0.8, 1.0)
    assert abs(r - 0.4) < 1e-13


@given(st.floats(0.05, 0.95), st.floats(0.5, 3.0), st.floats(0.0, 0.04), st.floats(0.0, 0.04))
def test_newton_matches_bisect_on_quadratics(root, scale, dlo, dhi):
    other = root + 2.0
    cs = [scale, -scale * (root + other), scale * root * other]

    def f(x):
        return horner(cs, x)

    def df(x):
        return horner_with_derivative(cs, x)[1]

    lo, hi = root - 0.05 - dlo, root + 0.05 + dhi
    assert abs(bracketed_newton(f, df, lo, hi) - bisect(f, lo, hi)) <= 1e-13
