import math

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from numpy.polynomial.hermite import hermval
from scipy.integrate import quad

from kinkernel import (AsymptoticConstant, DomainError, FracLaplaceOrder, Route, SpatialRegimeInput,
                       VelocityRegimeInput, c_s1, c_s3, frac_pv, gauss_2f1, split_check)
from kinkernel.asymptotics import (QOrder, PVFunction, c3_quarter, c3_three_quarter, gamma_fn, phi_squared,
                                   polynomial_function, power_function, split_functions)
from kinkernel.symbol import phi_kappa_derivatives


def test_gamma_fn():
    assert gamma_fn(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-15)
    assert gamma_fn(5) == pytest.approx(24.0)
    for pole in (0, -1, -3):
        with pytest.raises(DomainError):
            gamma_fn(pole)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.1, 3), st.floats(0.1, 3), st.floats(0.5, 5), st.floats(0, 0.97))
def test_gauss_2f1_mpmath(a, b, c, z):
    ref = float(mpmath.hyp2f1(a, b, c, z))
    assert gauss_2f1(a, b, c, z) == pytest.approx(ref, rel=1e-11)


def test_gauss_2f1_values():
    # 2F1(1, 1; 2; z) = -log(1-z)/z
    assert gauss_2f1(1, 1, 2, 0.5) == pytest.approx(2 * math.log(2), rel=1e-15)
    assert gauss_2f1(1, 1, 2, 0.5, method="euler") == pytest.approx(2 * math.log(2), rel=1e-13)
    assert gauss_2f1(0.7, 1.3, 2.1, 0.0) == 1.0
    for z in (1.0, -0.1):
        with pytest.raises(DomainError):
            gauss_2f1(1, 1, 2, z)
    with pytest.raises(DomainError):
        gauss_2f1(1, 1, -2, 0.3)
    with pytest.raises(DomainError):
        gauss_2f1(1, 1, 2, 0.7, method="bogus")


def test_frac_laplace_order():
    with pytest.raises(DomainError):
        FracLaplaceOrder(1.0)
    with pytest.raises(DomainError):
        FracLaplaceOrder(3.2)
    assert FracLaplaceOrder(0.7).q_order == QOrder.NO_CORRECTION
    assert FracLaplaceOrder(1.4).first_free == 2
    assert FracLaplaceOrder(2.3).q_order == QOrder.FOURTH
    assert FracLaplaceOrder.from_order(0.35).alpha == pytest.approx(1.2)
    # normalization is positive below 1 and between 2 and 3, negative between 1 and 2
    assert FracLaplaceOrder(0.6).c_alpha > 0
    assert FracLaplaceOrder(1.5).c_alpha < 0
    assert FracLaplaceOrder(2.5).c_alpha > 0
    # alpha = 1/2: c = Gamma(1)/pi
    assert FracLaplaceOrder(0.5).c_alpha == pytest.approx(1 / math.pi)


def _gaussian():
    def derivs(r, n):
        return [(-1) ** j * hermval(r, [0] * j + [1]) * math.exp(-r * r) for j in range(n + 1)]
    return PVFunction(lambda t: np.exp(-np.asarray(t) ** 2), derivs)


def _gaussian_oracle(alpha, r):
    # (-Delta)^alpha exp(-t^2) = (1/pi) int_0^inf xi^(2alpha) sqrt(pi) exp(-xi^2/4) cos(xi r) dxi
    f = lambda xi: xi ** (2 * alpha) * math.exp(-xi * xi / 4) * math.cos(xi * r)
    return quad(f, 0, 40, limit=400, epsabs=1e-14, epsrel=1e-13)[0] / math.sqrt(math.pi)


@pytest.mark.parametrize("alpha", [0.3, 0.7, 1.2, 1.5, 2.3, 2.8])
@pytest.mark.parametrize("r", [0.0, 0.6, 2.5])
def test_frac_pv_gaussian_oracle(alpha, r):
    assert frac_pv(FracLaplaceOrder(alpha), _gaussian(), r) == pytest.approx(_gaussian_oracle(alpha, r), rel=1e-9, abs=1e-9)


@pytest.mark.parametrize("alpha", [0.6, 1.3, 2.4])
def test_frac_pv_dilation(alpha):
    # (-Delta)^alpha u(lam .) = lam^(2alpha) ((-Delta)^alpha u)(lam .)
    lam, r = 1.7, 0.4
    ford = FracLaplaceOrder(alpha)
    lhs = frac_pv(ford, _gaussian().dilate(lam), r)
    assert lhs == pytest.approx(lam ** (2 * alpha) * frac_pv(ford, _gaussian(), lam * r), rel=1e-8)


def test_frac_pv_kills_low_polynomials():
    # alpha > 1 annihilates affine and (alpha > 2) quadratic functions away from any kink
    assert frac_pv(FracLaplaceOrder(1.4), polynomial_function([1.0, 2.0]), 0.3) == pytest.approx(0.0, abs=1e-10)
    assert frac_pv(FracLaplaceOrder(2.6), polynomial_function([1.0, -1.0, 3.0]), 0.3) == pytest.approx(0.0, abs=1e-9)


def test_frac_pv_rejects_fast_growth_and_kinks():
    with pytest.raises(DomainError):
        frac_pv(FracLaplaceOrder(0.4), power_function(1.0), 0.5)
    with pytest.raises(DomainError):
        frac_pv(FracLaplaceOrder(1.2), phi_squared(0.35), 2.0)


def test_frac_pv_split_components():
    # (-Delta)^alpha f1 at r = 0.3 for s = 0.6 agrees with the hypergeometric-free
    # Fourier-side evaluation through linearity: f1 + f2 = phi^2 scaled
    s, r = 0.6, 0.3
    ford = FracLaplaceOrder.from_order(s)
    sp = split_functions(s)
    total = frac_pv(ford, sp.f1, r) + frac_pv(ford, sp.f2, r)
    direct = 4 * (2 * s + 1) ** 2 * 2 ** (2 * ford.alpha) * frac_pv(ford, phi_squared(s), 2 * r)
    assert total == pytest.approx(direct, rel=1e-8)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.05, 0.95).filter(lambda s: abs(s - 0.5) > 1e-3), st.floats(-3, 3))
def test_split_identity(s, t):
    assert abs(split_check(s, t)) <= 1e-9 * max(1.0, abs(t)) ** (4 * s)


def test_c_s1_examples():
    assert c_s1(0.5, VelocityRegimeInput(0.0, math.inf)).value == pytest.approx(1 / math.pi, rel=1e-12)
    assert c_s1(0.5, VelocityRegimeInput(0.5, 0.0)).value == pytest.approx(9 / (16 * math.pi), rel=1e-10)
    assert c_s1(0.5, VelocityRegimeInput(0.5, -math.inf)).value == pytest.approx(9 / (8 * math.pi ** 2), rel=1e-12)
    assert c_s1(0.5, VelocityRegimeInput(0.0, 1.0)).route == Route.HEAT_KERNEL
    with pytest.raises(DomainError):
        VelocityRegimeInput(0.7, 0.0)


def _q_tail_series(s, y):
    # convergent expansion of int_y^inf q_s for 2s < 1
    s, y = mpmath.mpf(s), mpmath.mpf(y)
    term = lambda n: (-1) ** (n + 1) * mpmath.gamma(2 * s * n) * mpmath.sin(mpmath.pi * s * n) / mpmath.factorial(n)
    return mpmath.nsum(lambda n: term(n) * y ** (-2 * s * n), [1, mpmath.inf]) / mpmath.pi


@pytest.mark.parametrize("s", [0.3, 0.4])
@pytest.mark.parametrize("iota", [-2.0, -0.7, 1.5])
def test_c_s1_error_estimate_covers_series(s, iota):
    with mpmath.workdps(40):
        arg = (1 + 2 * s) ** (1 / (2 * s)) * abs(iota)
        cdf = _q_tail_series(s, arg) if iota < 0 else 1 - _q_tail_series(s, arg)
        pref = (1 + mpmath.mpf(0.5) ** (2 + 2 * s)) * 2 ** (2 * s) * mpmath.sinpi(s) * mpmath.gamma(2 * s + 1) / mpmath.pi
        ref = float(pref * (0.5 + max(-iota, 0)) ** (2 * s) * cdf)
    c = c_s1(s, VelocityRegimeInput(0.5, iota))
    assert 0 < c.error < 1e-12 * c.value
    assert abs(c.value - ref) <= c.error


@pytest.mark.parametrize("s", [0.2, 0.6, 0.85])
@pytest.mark.parametrize("kappa", [0.0, 0.7, 1.9])
def test_c_s3_hypergeometric_error_covers_mpmath(s, kappa):
    with mpmath.workdps(40):
        s_, k = mpmath.mpf(s), mpmath.mpf(kappa)
        a = 2 * s_ + mpmath.mpf(0.5)
        const = (2 ** (2 * a + 1) * mpmath.gamma(1.5 + a) * mpmath.gamma(0.5 + a) * (1 - mpmath.sinpi(a))
                 / (mpmath.pi * (1 + a)))
        lap = 2 ** (-2 * a) / (4 * (2 * s_ + 1) ** 2) * const * mpmath.hyp2f1(0.5 + a, 1 + a, 2 + a, k ** 2 / 4)
        ref = float((1 + k ** (2 + 2 * s_)) * abs(2 - k) ** (2 * s_) / (4 * mpmath.pi) * lap)
    c = c_s3(s, SpatialRegimeInput(kappa), Route.HYPERGEOMETRIC)
    assert abs(c.value - ref) <= c.error


@pytest.mark.parametrize("s,route", [(0.25, Route.AUTO), (0.75, Route.DERIVATIVE_SPECIAL), (0.4, Route.AUTO),
                                     (0.4, Route.PV_QUADRATURE)])
def test_c_s3_carries_error_estimate(s, route):
    c = c_s3(s, SpatialRegimeInput(1.0), route)
    assert type(c.value) is float and type(c.error) is float
    assert 0 < c.error < 1e-8 * c.value
    both = c_s3(0.4, SpatialRegimeInput(1.0), cross_check=True)
    assert both.error >= c_s3(0.4, SpatialRegimeInput(1.0)).error


@settings(max_examples=20, deadline=None)
@given(st.floats(0.1, 0.9), st.floats(-5, 5))
def test_c_s1_between_limits(s, iota):
    # increases from the iota -> -inf limit to the iota = +inf limit only through q_cdf; stays positive
    val = c_s1(s, VelocityRegimeInput(0.5, iota)).value
    assert val > 0
    assert val <= c_s1(s, VelocityRegimeInput(0.5, math.inf)).value * max(1.0, (0.5 + max(-iota, 0)) ** (2 * s) / 0.5 ** (2 * s))


def test_c_s3_origin_half():
    c = c_s3(0.5, SpatialRegimeInput(0.0))
    assert isinstance(c, AsymptoticConstant)
    assert c.route == Route.HYPERGEOMETRIC
    assert c.value == pytest.approx(0.0101321, rel=1e-5)


@pytest.mark.parametrize("s", [0.2, 0.4, 0.6, 0.85])
@pytest.mark.parametrize("kappa", [0.0, 0.7, 1.5])
def test_c_s3_routes_agree(s, kappa):
    c = c_s3(s, SpatialRegimeInput(kappa), cross_check=True)
    assert c.value > 0
    assert abs(c.residual) <= 1e-7 * c.value


@pytest.mark.parametrize("s", [0.15, 0.4, 0.6, 0.85])
@pytest.mark.parametrize("kappa", [1.95, 1.99, 1.999, 1.99999])
def test_c_s3_auto_near_two(s, kappa):
    c = c_s3(s, SpatialRegimeInput(kappa))
    assert c.route == Route.HYPERGEOMETRIC
    a = 2 * s + 0.5
    f = float(mpmath.hyp2f1(0.5 + a, 1 + a, 2 + a, kappa ** 2 / 4))
    assert c.value == pytest.approx(c_s3(s, SpatialRegimeInput(0.0)).value * f * (1 + kappa ** (2 + 2 * s))
                                    * (1 - kappa / 2) ** (2 * s), rel=1e-12)


@pytest.mark.parametrize("s,kappa", [(0.35, 1.95), (0.6, 1.99), (0.85, 1.95), (0.95, 1.99)])
def test_pv_error_estimate_covers_kink_rounding(s, kappa):
    # close to the kink the PV route is limited by rounding; its estimate must cover the true error
    c = c_s3(s, SpatialRegimeInput(kappa), Route.PV_QUADRATURE)
    ref = c_s3(s, SpatialRegimeInput(kappa), Route.HYPERGEOMETRIC).value
    assert c.error is not None
    assert abs(c.value - ref) <= 3 * c.error


S_GRID = [0.15, 0.25, 0.4, 0.5, 0.6, 0.75, 0.85]
# the approach to the kappa = 2 limit is algebraically slow, about |2 - kappa|^(2s);
# for small s the values at 1.99 and 1.999 still differ by more than 5 percent
_SLOW = {0.15: 0.24, 0.25: 0.15, 0.4: 0.077, 0.5: 0.055}


@pytest.mark.parametrize("s", [pytest.param(s, marks=pytest.mark.xfail(
    strict=True, reason=f"values at 1.99 and 1.999 differ by {_SLOW[s]:.0%}")) if s in _SLOW else s for s in S_GRID])
def test_c_s3_continuity_near_two(s):
    a, b = (c_s3(s, SpatialRegimeInput(k)).value for k in (1.99, 1.999))
    assert abs(b / a - 1) < 0.05


@pytest.mark.parametrize("s", S_GRID)
def test_c_s3_converges_at_two(s):
    # successive differences along kappa = 2 - 10^-j shrink geometrically
    vals = [c_s3(s, SpatialRegimeInput(2 - 10.0 ** -j)).value for j in (2, 3, 4, 5)]
    diffs = [abs(y - x) for x, y in zip(vals, vals[1:])]
    assert diffs[2] < diffs[1] < diffs[0]
    assert diffs[2] < 0.6 * diffs[1]


@pytest.mark.parametrize("s", S_GRID)
@pytest.mark.parametrize("kappa", [0.0, 0.5, 1.0, 1.5, 1.9])
def test_c_s3_positive(s, kappa):
    assert c_s3(s, SpatialRegimeInput(kappa)).value > 0


@pytest.mark.parametrize("s0", [0.25, 0.75])
@pytest.mark.parametrize("ds", [-1e-3, 1e-3])
def test_pv_approaches_special_values(s0, ds):
    pv = c_s3(s0 + ds, SpatialRegimeInput(1.0), Route.PV_QUADRATURE).value
    assert pv == pytest.approx(c_s3(s0, SpatialRegimeInput(1.0)).value, rel=0.01)


def test_frac_pv_dilation_f2():
    s, lam, r = 0.6, 2.0, 0.2
    ford = FracLaplaceOrder.from_order(s)
    f2 = split_functions(s).f2
    assert frac_pv(ford, f2.dilate(lam), r) == pytest.approx(lam ** (2 * ford.alpha) * frac_pv(ford, f2, lam * r),
                                                               abs=1e-8)


@pytest.mark.parametrize("r", [0.3, 1.5, 4.0])
@pytest.mark.parametrize("s", [0.35, 0.6, 0.85])
def test_frac_pv_fundamental_solution(s, r):
    ford = FracLaplaceOrder.from_order(s)
    assert frac_pv(ford, power_function(4 * s), r) == pytest.approx(0.0, abs=1e-8)


def _special_from_derivatives(s, kappa):
    # (1/4pi)(1 + kappa^(2+2s)) |2-kappa|^(2s) (-1)^(n/2) d^n/dkappa^n phi^2 with n = 2 or 4
    n = 2 if s == 0.25 else 4
    d = phi_kappa_derivatives(s, kappa, n)
    sq = sum(math.comb(n, j) * d[j] * d[n - j] for j in range(n + 1))
    sign = -1 if n == 2 else 1
    return (1 + kappa ** (2 + 2 * s)) * abs(2 - kappa) ** (2 * s) / (4 * math.pi) * sign * sq


@pytest.mark.parametrize("s", [0.25, 0.75])
@pytest.mark.parametrize("kappa", [0.05, 0.5, 1.0, 1.8])
def test_special_forms_match_derivatives(s, kappa):
    c = c_s3(s, SpatialRegimeInput(kappa))
    assert c.route == Route.DERIVATIVE_SPECIAL
    assert c.value == pytest.approx(_special_from_derivatives(s, kappa), rel=1e-9)


def test_special_values():
    assert c3_quarter(0.0) == pytest.approx(math.sqrt(2) / (96 * math.pi), rel=1e-14)
    assert c3_quarter(1.0) == pytest.approx(0.0087964, rel=1e-4)
    assert c3_three_quarter(0.0) > 0


def test_c_s3_route_errors():
    with pytest.raises(DomainError):
        c_s3(0.4, SpatialRegimeInput(0.5), Route.DERIVATIVE_SPECIAL)
    with pytest.raises(DomainError):
        c_s3(0.25, SpatialRegimeInput(0.5), Route.HYPERGEOMETRIC)
    with pytest.raises(DomainError):
        c_s3(0.75, SpatialRegimeInput(0.5), Route.PV_QUADRATURE)
    with pytest.raises(DomainError):
        c_s3(0.4, SpatialRegimeInput(0.5), Route.HEAT_KERNEL)
    with pytest.raises(DomainError):
        SpatialRegimeInput(2.0)


@given(st.floats(0.01, 0.99))
def test_c_alpha_sign(s):
    assume(abs(s - 0.25) > 1e-9 and abs(s - 0.75) > 1e-9)
    neg = FracLaplaceOrder.from_order(s).c_alpha < 0
    assert neg == (0.25 < s < 0.75)


def test_c_s1_continuity_at_minus_infinity():
    deep = c_s1(0.5, VelocityRegimeInput(0.5, -1000.0)).value
    assert deep == pytest.approx(c_s1(0.5, VelocityRegimeInput(0.5, -math.inf)).value, rel=0.01)


@pytest.mark.parametrize("s", [0.35, 0.5, 0.6])
@pytest.mark.parametrize("kappa", [0.0, 0.5, 1.0, 1.5])
def test_pv_and_hypergeometric_agree(s, kappa):
    pv = c_s3(s, SpatialRegimeInput(kappa), Route.PV_QUADRATURE).value
    hyp = c_s3(s, SpatialRegimeInput(kappa), Route.HYPERGEOMETRIC).value
    assert pv == pytest.approx(hyp, rel=1e-5)
