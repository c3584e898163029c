import math

import mpmath

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import dblquad, quad

from kinkernel import AppendixArgs, DomainError, F_closed, F_integrand, k_half, k_half_error, k_half_semi
from kinkernel.closed_half import first_term

ORIGIN = 1 / math.pi + 4 / math.pi ** 2
coords = st.floats(-30, 30)


def test_origin():
    assert float(k_half(0, 0)) == pytest.approx(ORIGIN, abs=1e-15)
    assert k_half_semi(0, 0) == pytest.approx(ORIGIN, rel=1e-12)
    assert first_term(0, 0) == pytest.approx(2 / math.pi ** 2)


def test_examples():
    assert k_half_semi(1, 2) == pytest.approx(float(k_half(1, 2)), rel=1e-9)
    assert k_half_semi(-3, 0.5) == pytest.approx(float(k_half(3, 0.5)), rel=1e-9)
    assert float(k_half(0, 100)) * (1 + 100 ** 3) == pytest.approx(1 / math.pi, rel=0.02)


def test_vectorized():
    x = np.array([0.0, 1.0, -2.0])
    v = np.array([0.5, -1.0, 3.0])
    out = k_half(x, v)
    assert out.shape == (3,)
    assert out[1] == pytest.approx(float(k_half(1.0, -1.0)))


@settings(max_examples=60, deadline=None)
@given(coords, coords)
def test_closed_vs_semi(x, v):
    assert k_half_semi(x, v) == pytest.approx(float(k_half(x, v)), rel=1e-9)


@given(coords, coords)
def test_symmetry_and_positivity(x, v):
    a = float(k_half(x, v))
    assert a > 0
    assert float(k_half(-x, v)) == pytest.approx(a, rel=1e-14)
    assert float(k_half(x, -v)) == pytest.approx(a, rel=1e-14)


def test_closed_form_args():
    with pytest.raises(DomainError):
        AppendixArgs(-1.0, 0.0)
    with pytest.raises(DomainError):
        AppendixArgs(math.inf, 0.0)
    args = AppendixArgs.from_phase(-1.5, -2.0)
    assert (args.a, args.b) == (3.0, 2.0)


def test_f_integrand_examples():
    assert F_integrand(AppendixArgs(0, 0), 0.0) == pytest.approx(2.0)
    assert F_integrand(AppendixArgs(1, 0), 0.0) == pytest.approx(-0.24)


def test_f_closed_origin():
    assert F_closed(AppendixArgs(0, 0)) == pytest.approx(1 + math.pi / 2, rel=1e-14)


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 8), st.floats(0, 8))
def test_f_closed_vs_quadrature(a, b):
    args = AppendixArgs(a, b)
    ref = quad(lambda x: F_integrand(args, x), -1, 1, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
    assert F_closed(args) == pytest.approx(ref, abs=1e-9)


@pytest.mark.parametrize("b", [0.0, 1.0, 2.0])
def test_f_closed_continuous_at_zero(b):
    assert F_closed(AppendixArgs(1e-9, b)) == pytest.approx(F_closed(AppendixArgs(0.0, b)), abs=1e-8)


@pytest.mark.parametrize("a", [0.1, 0.5, 1.0, 2.0, 5.0])
@pytest.mark.parametrize("b", [0.1, 0.5, 1.0, 2.0, 5.0])
def test_f_closed_grid(a, b):
    args = AppendixArgs(a, b)
    ref = quad(lambda x: F_integrand(args, x), -1, 1, epsabs=1e-14, epsrel=1e-13, limit=200)[0]
    assert F_closed(args) == pytest.approx(ref, abs=1e-9)


@settings(max_examples=50, deadline=None)
@given(st.floats(-10, 10), st.floats(-10, 10))
def test_closed_form_matches_rational_plus_integral(x, v):
    split = first_term(x, v) + 2 / math.pi ** 2 * F_closed(AppendixArgs(2 * abs(x), abs(v)))
    assert float(k_half(x, v)) == pytest.approx(split, rel=1e-12, abs=1e-15)


def test_unit_mass():
    # x = tan(p), v = tan(q) maps the quadrant onto a square; the integrand stays bounded at the far edges
    f = lambda q, p: float(k_half(math.tan(p), math.tan(q))) / (math.cos(p) * math.cos(q)) ** 2
    val, err = dblquad(f, 0, math.pi / 2, 0, math.pi / 2, epsabs=1e-11, epsrel=1e-11)
    assert 4 * val == pytest.approx(1.0, abs=1e-6)
    assert err < 1e-9


def _k_half_mp(x, v):
    # 30-digit rational term plus w-integral, split where the integrand changes sign
    with mpmath.workdps(30):
        a, b = mpmath.mpf(2 * abs(x)), mpmath.mpf(abs(v))
        ft = 2 / mpmath.pi ** 2 * (1 + a * a - b * b) / ((1 + (a + b) ** 2) * (1 + (a - b) ** 2))
        f = lambda w: ((w * w + 1) ** 2 - 4 * (a + b * w) ** 2) / (((w * w + 1) ** 2 + 4 * (a + b * w) ** 2) ** 2)
        pts = [mpmath.mpf(-1)]
        for sg in (1, -1):
            d = b * b - (1 - 2 * sg * a)
            if d >= 0:
                pts += [r for r in (sg * b - mpmath.sqrt(d), sg * b + mpmath.sqrt(d)) if -1 < r < 1]
        return ft + 4 / mpmath.pi ** 2 * mpmath.quad(f, sorted(pts) + [mpmath.mpf(1)])


@pytest.mark.parametrize("x,v", [(0, 0), (0.3, 50), (50, 0.3), (1e3, 1), (5.7e3, 0.04), (100, 200), (1e3, 2e3),
                                 (3e3, 6e3 + 1), (-4.6, 8.0), (0.005, 1.4)])
def test_closed_error_bound_covers_reference(x, v):
    ref = _k_half_mp(x, v)
    err = float(k_half_error(x, v))
    assert float(abs(float(k_half(x, v)) - ref)) <= err
    # cancellation costs about x^2 eps relative for large |x| and small |v|; the estimate keeps 3 digits here
    assert err <= 1e-3 * float(ref)
    val, semi_err = k_half_semi(x, v, full_output=True)
    assert float(abs(val - ref)) <= semi_err


def test_closed_error_vectorized():
    out = k_half_error(np.array([0.0, 1.0]), np.array([0.0, 2.0]))
    assert out.shape == (2,) and np.all(out > 0)
    with pytest.raises(DomainError):
        k_half_error(math.nan, 0.0)
