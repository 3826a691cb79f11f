import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaugelab.numerics import (BoxDomain, Interval, QuadratureError, central_diff,
                               cumulative_line, cumulative_rect, integrate_between,
                               integrate_iterated, integrate_line)


class TestInterval:
    def test_spacing(self):
        assert Interval(0.0, 1.0, 11).spacing == pytest.approx(0.1)

    @pytest.mark.parametrize("lo,hi,n", [(1.0, 1.0, 5), (2.0, 1.0, 5), (0.0, 1.0, 2),
                                         (0.0, math.inf, 5)])
    def test_invalid(self, lo, hi, n):
        with pytest.raises(ValueError):
            Interval(lo, hi, n)


def test_box_rejects_duplicate_tags():
    with pytest.raises(ValueError):
        BoxDomain((("x", Interval(0, 1)), ("x", Interval(0, 1))))
    with pytest.raises(ValueError):
        BoxDomain((("z", Interval(0, 1)),))


def test_box_lookup():
    box = BoxDomain.of(t=Interval(0, 1, 5), x=Interval(-1, 1, 7))
    assert box.tags == ("x", "t")
    assert box["t"].n == 5 and "y" not in box


def test_line_linear():
    assert integrate_line(lambda x: x, Interval(0, 1, 101)) == pytest.approx(0.5, abs=1e-12)


def test_line_zero():
    assert integrate_line(lambda x: 0 * x, Interval(-3, 4, 11)) == 0.0


def test_line_step_without_breakpoint():
    val = integrate_line(lambda x: (x >= 0.5).astype(float), Interval(0, 1, 2001))
    assert val == pytest.approx(0.5, abs=1e-3)


def test_line_step_with_breakpoint_is_exact():
    val = integrate_line(lambda x: (x >= 0.3).astype(float), Interval(0, 1, 11), [0.3])
    assert val == pytest.approx(0.7, abs=1e-12)


def test_nonfinite_names_coordinate():
    with pytest.raises(QuadratureError, match="x="):
        integrate_line(lambda x: np.where(x == 0.5, np.inf, x), Interval(0, 1, 3))


def test_between_signed():
    assert integrate_between(lambda x: 1 + 0 * x, 2.0, 0.0, 11) == pytest.approx(-2.0)
    assert integrate_between(lambda x: x, 1.0, 1.0, 11) == 0.0


def test_iterated_area():
    assert integrate_iterated(lambda u, v: 1 + 0 * u, Interval(0, 2, 11),
                              Interval(0, 3, 11)) == pytest.approx(6.0, abs=1e-12)


def test_iterated_separable():
    assert integrate_iterated(lambda x, t: x * t, Interval(0, 1, 11),
                              Interval(0, 1, 11)) == pytest.approx(0.25, abs=1e-12)


def test_iterated_strip_indicator():
    val = integrate_iterated(lambda x, t: ((x >= 0) & (x <= 1)).astype(float),
                             Interval(-1, 2, 2001), Interval(0, 3, 2001))
    assert val == pytest.approx(3.0, abs=1e-2)


def test_iterated_order_follows_arguments():
    # f(outer, inner) = outer on [0,1] x [0,2]: int_0^1 du int_0^2 dv u = 1
    val = integrate_iterated(lambda u, v: u + 0 * v, Interval(0, 1, 11), Interval(0, 2, 11))
    assert val == pytest.approx(1.0, abs=1e-13)


@pytest.mark.parametrize("f,at,h,expected,tol", [
    (lambda x: x * x, 3.0, 1e-4, 6.0, 1e-7),
    (lambda x: 4.2, 1.0, 1e-3, 0.0, 0.0),
    (math.sin, 0.0, 1e-4, 1.0, 1e-8),
])
def test_central_diff(f, at, h, expected, tol):
    assert central_diff(f, at, h) == pytest.approx(expected, abs=tol)


def test_central_diff_errors():
    with pytest.raises(ValueError):
        central_diff(math.sin, 0.0, 0.0)
    with pytest.raises(QuadratureError):
        central_diff(lambda x: math.inf, 0.0, 1e-3)


def test_cumulative_line_matches_antiderivative():
    nodes = np.linspace(-1, 2, 7)
    got = cumulative_line(lambda u: u ** 2, nodes, 0.5, 41)
    np.testing.assert_allclose(got, (nodes ** 3 - 0.125) / 3, atol=1e-12)


def test_cumulative_rect_argument_order():
    # int_0^{u} du' int_0^{v} dv' u' = u^2 v / 2 distinguishes the two axes
    nu, nv = np.array([1.0, 2.0]), np.array([0.5, 3.0])
    got = cumulative_rect(lambda u, v: u + 0 * v, nu, 0.0, nv, 0.0, 21)
    np.testing.assert_allclose(got, 0.5 * nu[:, None] ** 2 * nv[None, :], atol=1e-12)


finite = st.floats(-10, 10, allow_nan=False)


@settings(max_examples=50, deadline=None)
@given(finite, finite, finite, finite)
def test_linearity(alpha, beta, p, q):
    iv = Interval(-1.0, 2.0, 51)
    f = lambda x: np.sin(p * x)  # noqa: E731
    g = lambda x: np.exp(0.1 * q * x)  # noqa: E731
    lhs = integrate_line(lambda x: alpha * f(x) + beta * g(x), iv)
    rhs = alpha * integrate_line(f, iv) + beta * integrate_line(g, iv)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 3), st.floats(0.1, 3))
def test_fubini(a, b):
    f = lambda u, v: np.cos(a * u) * np.exp(b * v) + u * v  # noqa: E731
    one = integrate_iterated(f, Interval(0, 1, 61), Interval(0, 2, 61))
    two = integrate_iterated(lambda v, u: f(u, v), Interval(0, 2, 61), Interval(0, 1, 61))
    assert one == pytest.approx(two, rel=1e-9)


@pytest.mark.parametrize("power", [4, 5, 6])
def test_refinement_reduces_error(power):
    exact = 1.0 / (power + 1)
    errs = [abs(integrate_line(lambda x: x ** power, Interval(0, 1, n)) - exact)
            for n in (5, 9, 17)]
    assert errs[0] > errs[1] > errs[2]
