"""The Fourier exponent phi_s, its derivatives, decay envelopes and scaling.

The kernel of the fractional Kolmogorov equation at time one, recentred as
``k_s(x, v) = p_s(1, x + v/2, v)``, has Fourier transform ``exp(-phi_s)`` with

    phi_s(xi, nu) = int_0^1 |nu + (u - 1/2) xi|^(2s) du
                  = ((nu + xi/2)|nu + xi/2|^(2s) - (nu - xi/2)|nu - xi/2|^(2s))
                    / ((2s + 1) xi).

All functions accept numpy arrays and broadcast their arguments.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, SingularityError

# relative size of |xi| below which the removable singularity at xi=0 is expanded
XI_BRANCH = 1e-4
_XI_BRANCH_DERIV = 1e-3


class Regime(Enum):
    LOW = "Low"
    QUARTER = "Quarter"
    MID = "Mid"
    THREE_QUARTER = "ThreeQuarter"
    HIGH = "High"


@dataclass(frozen=True)
class FracOrder:
    """Diffusion order s in (0, 1) with its derived exponents."""

    s: float

    def __post_init__(self):
        s = self.s
        if not isinstance(s, (int, float, np.floating)) or not np.isfinite(s):
            raise DomainError(f"order must be a finite real, got {s!r}")
        if not 0.0 < s < 1.0:
            raise DomainError(f"order s must lie in (0, 1), got {s}")
        object.__setattr__(self, "s", float(s))

    @property
    def two_s(self) -> float:
        return 2.0 * self.s

    @property
    def alpha(self) -> float:
        """Order of the fractional Laplacian in the spatial asymptotics."""
        return (1.0 + 4.0 * self.s) / 2.0

    @property
    def regime(self) -> Regime:
        s = self.s
        if s < 0.25:
            return Regime.LOW
        if s == 0.25:
            return Regime.QUARTER
        if s < 0.75:
            return Regime.MID
        if s == 0.75:
            return Regime.THREE_QUARTER
        return Regime.HIGH


def as_order(order) -> FracOrder:
    """Accept either a FracOrder or a bare float."""
    return order if isinstance(order, FracOrder) else FracOrder(order)


@dataclass(frozen=True)
class FrequencyPair:
    xi: float
    nu: float


@dataclass(frozen=True)
class PhasePoint:
    """A point (t, x, v) of time, position and velocity."""

    x: float
    v: float
    t: float = 1.0

    def __post_init__(self):
        if not np.isfinite(self.t) or self.t <= 0:
            raise DomainError(f"time must be positive, got {self.t}")


def abspow(y, p: float):
    """``|y|**p``, with ``|0|**p = 0`` for p > 0."""
    y = np.abs(np.asarray(y, dtype=float))
    with np.errstate(divide="ignore", over="ignore"):
        out = np.power(y, p)
    if p > 0:
        out = np.where(y == 0.0, 0.0, out)
    return out


def _signed_pow(y, p: float):
    # y |y|^(p-1), the odd extension of |y|^p
    y = np.asarray(y, dtype=float)
    return np.sign(y) * abspow(y, p)


def _check_finite(*args):
    for a in args:
        if not np.all(np.isfinite(a)):
            raise DomainError("non-finite input")


def _series_coeffs(s: float, m: int):
    # phi_s(xi, nu) = sum_j b_j |nu|^(2s-2j) xi^(2j), valid for |xi| < 2|nu|
    b = np.empty(m)
    binom = 1.0
    for j in range(m):
        if j > 0:
            n = 2 * j
            binom *= (2 * s - n + 2) * (2 * s - n + 1) / ((n - 1) * n)
        b[j] = binom / (4.0 ** j * (2 * j + 1))
    return b


def phi(order, xi, nu):
    """Fourier exponent phi_s(xi, nu).

    Parameters
    ----------
    order : FracOrder or float
    xi, nu : array_like
        Spatial and velocity frequencies.

    Returns
    -------
    ndarray or float
        Nonnegative values; scalars in, scalar out.
    """
    s = as_order(order).s
    xi = np.asarray(xi, dtype=float)
    nu = np.asarray(nu, dtype=float)
    _check_finite(xi, nu)
    xi, nu = np.broadcast_arrays(xi, nu)
    # phi_s is homogeneous of degree 2s; work with max(|xi|, |nu|) = 1 so no power under- or overflows
    m = np.maximum(np.abs(xi), np.abs(nu))
    safe_m = np.where(m == 0, 1.0, m)
    xi = xi / safe_m
    nu = nu / safe_m
    a = nu + 0.5 * xi
    b = nu - 0.5 * xi
    an = np.abs(nu)
    p = 1 + 2 * s
    small = np.abs(xi) <= XI_BRANCH * an
    safe_xi = np.where(xi == 0, 1.0, xi)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore", under="ignore"):
        full = (_signed_pow(a, p) - _signed_pow(b, p)) / (p * safe_xi)
        # same signs: |a|^p - |b|^p = |b|^p expm1(p log1p(|xi|/|b|)), free of cancellation
        same = np.abs(xi) < 2 * an
        lo = np.minimum(np.abs(a), np.abs(b))
        diff = abspow(lo, p) * np.expm1(p * np.log1p(np.abs(xi) / np.where(same, lo, 1.0)))
        full = np.where(same, diff / (p * np.abs(safe_xi)), full)
        corr = 2 * s * (2 * s - 1) / 24.0 * abspow(nu, 2 * s) * (xi / np.where(an > 0, nu, 1.0)) ** 2
    expansion = abspow(nu, 2 * s) + np.where(xi == 0, 0.0, corr)
    out = abspow(m, 2 * s) * np.where(small | (xi == 0), expansion, full)
    return out[()] if out.ndim == 0 else out


def _deriv_parts(s, xi, nu):
    xi = np.asarray(xi, dtype=float)
    nu = np.asarray(nu, dtype=float)
    _check_finite(xi, nu)
    xi, nu = np.broadcast_arrays(xi, nu)
    small = np.abs(xi) <= _XI_BRANCH_DERIV * np.abs(nu)
    safe_xi = np.where(small | (xi == 0), 1.0, xi)
    return xi, nu, nu + 0.5 * xi, nu - 0.5 * xi, small, safe_xi


def _ratio(xi, nu):
    # xi/nu for the series branches, which keep powers of nu and xi apart from overflowing
    return xi / np.where(nu == 0, 1.0, nu)


def _out(o):
    return o[()] if o.ndim == 0 else o


def phi_d_nu(order, xi, nu):
    """``d phi_s / d nu = (|nu + xi/2|^(2s) - |nu - xi/2|^(2s)) / xi``."""
    s = as_order(order).s
    xi, nu, a, b, small, safe_xi = _deriv_parts(s, xi, nu)
    if 2 * s < 1 and np.any((xi == 0) & (nu == 0)):
        raise SingularityError("d phi_s / d nu is singular at the origin for 2s < 1")
    c = _series_coeffs(s, 3)
    with np.errstate(divide="ignore", invalid="ignore"):
        full = (abspow(a, 2 * s) - abspow(b, 2 * s)) / safe_xi
        rho = _ratio(xi, nu)
        ser = np.sign(nu) * abspow(nu, 2 * s - 1) * sum(c[j] * (2 * s - 2 * j) * rho ** (2 * j) for j in range(3))
    return _out(np.where(small, ser, full))


def phi_d_nu2(order, xi, nu):
    """``d^2 phi_s / d nu^2 = 2s (a|a|^(2s-2) - b|b|^(2s-2)) / xi`` with a, b = nu +- xi/2.

    Raises
    ------
    SingularityError
        On the kinks nu = +-xi/2 when 2s <= 1.
    """
    s = as_order(order).s
    xi, nu, a, b, small, safe_xi = _deriv_parts(s, xi, nu)
    if 2 * s <= 1 and np.any((a == 0) | (b == 0)):
        raise SingularityError("second nu-derivative of phi_s is singular on nu = +-xi/2")
    c = _series_coeffs(s, 3)
    with np.errstate(divide="ignore", invalid="ignore"):
        full = 2 * s * (_signed_pow(a, 2 * s - 1) - _signed_pow(b, 2 * s - 1)) / safe_xi
        rho = _ratio(xi, nu)
        ser = abspow(nu, 2 * s - 2) * sum(c[j] * (2 * s - 2 * j) * (2 * s - 2 * j - 1) * rho ** (2 * j)
                                          for j in range(3))
    return _out(np.where(small, ser, full))


def phi_d_xi(order, xi, nu):
    """``d phi_s / d xi``; equals 0 on xi = 0 by evenness in xi."""
    s = as_order(order).s
    xi, nu, a, b, small, safe_xi = _deriv_parts(s, xi, nu)
    if np.any((xi == 0) & (nu == 0)) and 2 * s < 1:
        raise SingularityError("d phi_s / d xi is singular at the origin for 2s < 1")
    c = _series_coeffs(s, 3)
    with np.errstate(divide="ignore", invalid="ignore"):
        num = _signed_pow(a, 1 + 2 * s) - _signed_pow(b, 1 + 2 * s)
        full = -num / ((2 * s + 1) * safe_xi ** 2) + (abspow(a, 2 * s) + abspow(b, 2 * s)) / (2 * safe_xi)
        rho = _ratio(xi, nu)
        ser = np.sign(nu) * abspow(nu, 2 * s - 1) * sum(c[j] * 2 * j * rho ** (2 * j - 1) for j in range(1, 3))
    out = np.where(small, ser, full)
    return _out(np.where(xi == 0, 0.0, out))


def phi_derivatives(order, xi, nu):
    """First and second nu-derivatives and first xi-derivative of phi_s.

    Returns
    -------
    d_nu, d_nu2, d_xi : ndarray or float
        On xi = 0 the limits ``2s sgn(nu)|nu|^(2s-1)``, the matching second
        derivative, and 0 are returned.

    Raises
    ------
    SingularityError
        At points where one of the formulas is genuinely singular, for example
        d_nu2 on the kinks nu = +-xi/2 when 2s <= 1.
    """
    return phi_d_nu(order, xi, nu), phi_d_nu2(order, xi, nu), phi_d_xi(order, xi, nu)


def phi_taylor_coeffs(order):
    """Second and fourth xi-derivatives of phi_s at (0, 1).

    Returns
    -------
    c2, c4 : float
        ``2s(2s-1)/12`` and ``s(2s-1)(s-1)(2s-3)/20``.
    """
    s = as_order(order).s
    return 2 * s * (2 * s - 1) / 12.0, s * (2 * s - 1) * (s - 1) * (2 * s - 3) / 20.0


def phi_kappa_derivatives(order, kappa: float, nmax: int, tol: float = 1e-18):
    """Derivatives of ``kappa -> phi_s(kappa, 1)`` of orders 0..nmax for |kappa| < 2.

    Uses the power series ``sum_m binom(2s, 2m) kappa^(2m) / (4^m (2m+1))``.
    Beyond m = 1 the terms share one sign, so the sum is free of cancellation;
    the series converges geometrically with ratio (kappa/2)^2.

    Returns
    -------
    list of float
        ``[phi, phi', ..., phi^(nmax)]`` at kappa.
    """
    s = as_order(order).s
    kappa = float(kappa)
    if not abs(kappa) < 2.0:
        raise DomainError("series for phi_s(kappa, 1) requires |kappa| < 2")
    k = abs(kappa)
    sign = -1.0 if kappa < 0 else 1.0

    def coeffs(count):
        # c_m = binom(2s, 2m) / (2m+1), so phi = sum_m c_m (kappa/2)^(2m)
        n2 = 2 * np.arange(1, count, dtype=float)
        ratio = np.concatenate(([1.0], (2 * s - n2 + 2) * (2 * s - n2 + 1) / ((n2 - 1) * n2)))
        return np.cumprod(ratio) / (2 * np.arange(count) + 1)

    if k / 2 == 0.0:
        c = coeffs(nmax // 2 + 1)
        return [math.factorial(n) * c[n // 2] * 2.0 ** -n if n % 2 == 0 else 0.0 for n in range(nmax + 1)]

    # term (m, n) of the n-th derivative is c_m (2m)!/(2m-n)! (kappa/2)^(2m-n) 2^-n; summed in
    # log space since both the falling factorial and the sum itself may overflow at high order
    lk = math.log(k / 2)
    m_terms = 64
    while True:
        m = np.arange(m_terms, dtype=float)
        c = coeffs(m_terms)
        if not np.any(c[1:]):
            # s = 1/2: phi is constant
            break
        pw = 2 * m - nmax
        with np.errstate(divide="ignore"):
            lt = np.where(pw >= 0, np.log(np.abs(c)) + gammaln(2 * m + 1) - gammaln(np.maximum(pw, 0) + 1)
                          + pw * lk, -np.inf)
        if (lt[-1] < lt.max() + math.log(tol) and lt[-1] < lt[-2]) or m_terms >= 1 << 22:
            break
        m_terms *= 2
    sgn_c = np.sign(c)
    out = []
    for n in range(nmax + 1):
        pw = 2 * m - n
        ok = (pw >= 0) & (c != 0)
        if not np.any(ok):
            out.append(0.0)
            continue
        lt = np.log(np.abs(c[ok])) + gammaln(2 * m[ok] + 1) - gammaln(pw[ok] + 1) + pw[ok] * lk
        top = lt.max()
        total = float(np.sum(sgn_c[ok] * np.exp(lt - top)))
        out.append(sign ** n * total * math.exp(top - n * math.log(2)))
    return out


def envelope_j(order, x, v):
    """Decay function ``(1 + |x|^(2+2s) + |v|^(2+2s)) (1 + (2|x| - |v|)_+)^(2s)``."""
    s = as_order(order).s
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    pos = np.maximum(2 * np.abs(x) - np.abs(v), 0.0)
    out = (1 + abspow(x, 2 + 2 * s) + abspow(v, 2 + 2 * s)) * (1 + pos) ** (2 * s)
    return out[()] if out.ndim == 0 else out


def envelope_thm(order, x, v):
    """Reciprocal of the two-sided comparison function of the kernel bound.

    ``(1 + |x| + |v|)^(2+2s) (1 + (2|x| - |v|)_+)^(2s)``.
    """
    s = as_order(order).s
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    pos = np.maximum(2 * np.abs(x) - np.abs(v), 0.0)
    out = (1 + np.abs(x) + np.abs(v)) ** (2 + 2 * s) * (1 + pos) ** (2 * s)
    return out[()] if out.ndim == 0 else out


def scaling_reduce(order, p: PhasePoint):
    """Reduce a point at time t to time one.

    Returns
    -------
    prefactor, x1, v1 : float
        With ``p_s(t, x, v) = prefactor * p_s(1, x1, v1)``.
    """
    s = as_order(order).s
    t = float(p.t)
    if not t > 0:
        raise DomainError("time must be positive")
    return t ** (-(1 + 1 / s)), p.x * t ** (-1 - 1 / (2 * s)), p.v * t ** (-1 / (2 * s))


def corollary_envelope(order, p: PhasePoint):
    """Time-t comparison function for p_s(t, x, v).

    ``min(t^-(1+1/s), t^(2+2s)/|(x - tv/2, tv)|^(2+2s))
    * min(1, t^(1+2s)/(|x - tv/2| - |tv/2|)_+^(2s))``, the second factor
    being 1 when the positive part vanishes.
    """
    s = as_order(order).s
    t = float(p.t)
    if not t > 0:
        raise DomainError("time must be positive")
    y = p.x - t * p.v / 2
    w = t * p.v
    norm = np.hypot(y, w)
    first = t ** (-(1 + 1 / s))
    with np.errstate(over="ignore", divide="ignore"):
        if norm > 0:
            first = min(first, float(np.float64(t / norm) ** (2 + 2 * s)))
        pos = max(abs(y) - abs(w / 2), 0.0)
        second = 1.0 if pos == 0 else min(1.0, t * float(np.float64(t / pos) ** (2 * s)))
    return first * second
