"""Asymptotic constants of k_s along rays.

Velocity-dominant rays give ``C_{s,1}(kappa, iota)``, a closed expression in
the distribution function of q_s. Spatial-dominant rays give

    C_{s,3}(kappa) = (1/4pi) (1 + kappa^(2+2s)) |2 - kappa|^(2s) (-Delta)^alpha phi_s(., 1)^2 (kappa)

with ``alpha = (1 + 4s)/2``. The fractional Laplacian is available by three
independent routes: a regularized principal value quadrature, a Gauss
hypergeometric formula, and closed derivative formulas at s = 1/4 and s = 3/4
where alpha is an integer.
"""

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import gamma as _gamma

from .errors import ConvergenceError, DomainError
from .fourier_kernel import DEFAULT_QUAD, QuadSpec, q_cdf
from .quadrature import graded_edges, jacobi_panel, panel_rule
from .symbol import as_order, phi, phi_kappa_derivatives

_TAYLOR_ORDER = 28
# default reach of the Taylor part; larger reach lowers the rounding floor
_TAYLOR_REACH = 0.5
_EPS = np.finfo(float).eps
# rounding allowance for the closed-form routes, in units of |value|
_CLOSED_REL = 64 * _EPS


def gamma_fn(z: float) -> float:
    """Gamma function; poles raise DomainError."""
    z = float(z)
    if z <= 0 and z == math.floor(z):
        raise DomainError(f"Gamma has a pole at {z}")
    return float(_gamma(z))


def _hyp_series(a, b, c, z, tol=1e-17, kmax=1 << 27):
    # summed in chunks of growing length; the tail after the last term is bounded
    # by term * r / (1 - r) once the term ratio r has settled below one
    term, total, start, size = 1.0, 1.0, 0, 64
    while start < kmax:
        k = np.arange(start, start + size, dtype=float)
        ratio = (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        with np.errstate(under="ignore"):
            terms = term * np.cumprod(ratio)
        total += float(np.sum(terms))
        term, r = float(terms[-1]), float(ratio[-1])
        if r < 1 and abs(term) * r / (1 - r) <= tol * abs(total):
            return total
        start += size
        size = min(2 * size, 1 << 20)
    raise ConvergenceError("hypergeometric series did not converge", partial=total)


def gauss_2f1(a: float, b: float, c: float, z: float, method: str = "auto") -> float:
    """Gauss hypergeometric function for 0 <= z < 1.

    The power series is summed directly for z <= 0.5. Above that Euler's
    transformation ``2F1(a, b; c; z) = (1-z)^(c-a-b) 2F1(c-a, c-b; c; z)`` is
    used; for the parameters met here ``c - a - b < 0``, so the transformed
    coefficients decay while the original ones grow, and the transformed
    series converges even at z = 1. Its cost grows like 1/(1 - z).

    Parameters
    ----------
    method : {"auto", "series", "euler"}
        Forces one of the two evaluations, for cross-checks.
    """
    if c <= 0 and c == math.floor(c):
        raise DomainError("c must not be a nonpositive integer")
    if not 0 <= z < 1:
        raise DomainError("gauss_2f1 requires 0 <= z < 1")
    if method == "series" or (method == "auto" and z <= 0.5):
        return _hyp_series(a, b, c, z)
    if method not in ("auto", "euler"):
        raise DomainError(f"unknown method {method!r}")
    return (1 - z) ** (c - a - b) * _hyp_series(c - a, c - b, c, z)


class QOrder(Enum):
    NO_CORRECTION = "NoCorrection"
    SECOND = "Second"
    FOURTH = "Fourth"


@dataclass(frozen=True)
class FracLaplaceOrder:
    """Order alpha of ``(-Delta)^alpha`` with its normalization and Taylor correction."""

    alpha: float

    def __post_init__(self):
        a = self.alpha
        if not (0 < a < 3) or a in (1.0, 2.0):
            raise DomainError("alpha must lie in (0, 3) and not be an integer")

    @classmethod
    def from_order(cls, order) -> "FracLaplaceOrder":
        return cls(as_order(order).alpha)

    @property
    def c_alpha(self) -> float:
        a = self.alpha
        return 2 * a * math.sin(math.pi * a) * gamma_fn(2 * a) / math.pi

    @property
    def q_order(self) -> QOrder:
        if self.alpha < 1:
            return QOrder.NO_CORRECTION
        return QOrder.SECOND if self.alpha < 2 else QOrder.FOURTH

    @property
    def first_free(self) -> int:
        """Index j of the first Taylor term t^(2j) not removed by the correction."""
        return {QOrder.NO_CORRECTION: 1, QOrder.SECOND: 2, QOrder.FOURTH: 3}[self.q_order]


@dataclass(frozen=True)
class PVFunction:
    """Function handed to ``frac_pv``.

    Attributes
    ----------
    value : callable
        Vectorized values.
    derivatives : callable
        ``derivatives(r, n)`` returns ``[u(r), u'(r), ..., u^(n)(r)]``.
    kinks : tuple of float
        Points where u is not analytic.
    growth : float
        Exponent gamma with ``u(t) = O(|t|^gamma)``; must be below ``2 alpha``.
    """

    value: Callable
    derivatives: Callable
    kinks: Sequence[float] = ()
    growth: float = 0.0

    def __call__(self, t):
        return self.value(t)

    def dilate(self, lam: float) -> "PVFunction":
        """``t -> u(lam t)``."""
        lam = float(lam)
        return PVFunction(lambda t: self.value(lam * np.asarray(t)),
                          lambda r, n: [lam ** j * d for j, d in enumerate(self.derivatives(lam * r, n))],
                          tuple(k / lam for k in self.kinks), self.growth)


def _binom_seq(a: float, count: int):
    # binom(a, k) for k = 0..count-1
    k = np.arange(1, count, dtype=float)
    return np.concatenate(([1.0], np.cumprod((a - k + 1) / k)))


def _even_series_derivs(coef: Callable, r: float, n: int, radius: float, tol=1e-18):
    # derivatives at r of sum_m c_m t^(2m), converging for |t| < radius
    r = float(r)
    if abs(r) >= radius:
        raise DomainError("point outside the disc of convergence")
    if r == 0.0:
        c = coef(n // 2 + 1)
        return [math.factorial(j) * c[j // 2] if j % 2 == 0 else 0.0 for j in range(n + 1)]
    terms = 64
    while True:
        c = coef(terms)
        m = np.arange(terms, dtype=float)
        with np.errstate(under="ignore"):
            tail = abs(c[-1]) * (abs(r) / radius) ** 0 * abs(r) ** (2 * terms - 2) * (2.0 * terms) ** n
        if tail < tol * max(1.0, abs(c[0])) or terms >= 1 << 20:
            break
        terms *= 2
    out = []
    lr = math.log(abs(r))
    for j in range(n + 1):
        fall = np.ones(terms)
        for i in range(j):
            fall = fall * (2 * m - i)
        pw = 2 * m - j
        with np.errstate(under="ignore", over="ignore", invalid="ignore"):
            mag = np.where(fall != 0, np.exp(pw * lr), 0.0)
            sgn = np.where((pw % 2 == 1) & (r < 0), -1.0, 1.0)
        out.append(float(np.sum(c * fall * mag * sgn)))
    return out


def phi_squared(order) -> PVFunction:
    """``kappa -> phi_s(kappa, 1)^2`` with derivatives for |kappa| < 2."""
    s = as_order(order).s

    def derivs(r, n):
        d = phi_kappa_derivatives(s, r, n)
        return [sum(math.comb(j, i) * d[i] * d[j - i] for i in range(j + 1)) for j in range(n + 1)]

    return PVFunction(lambda t: np.asarray(phi(s, np.asarray(t, dtype=float), 1.0)) ** 2,
                      derivs, (-2.0, 2.0), 4 * s)


def power_function(gamma_exp: float) -> PVFunction:
    """``t -> |t|^gamma``."""
    g = float(gamma_exp)

    def derivs(r, n):
        if r == 0:
            raise DomainError("|t|^gamma is not smooth at 0")
        out, c = [], 1.0
        for j in range(n + 1):
            out.append(c * abs(r) ** (g - j) * (np.sign(r) ** j))
            c *= g - j
        return out

    return PVFunction(lambda t: np.abs(np.asarray(t, dtype=float)) ** g, derivs, (0.0,), g)


def polynomial_function(coeffs: Sequence[float]) -> PVFunction:
    """Polynomial with coefficients in increasing degree."""
    p = np.polynomial.Polynomial(coeffs)

    def derivs(r, n):
        out, d = [], p
        for _ in range(n + 1):
            out.append(float(d(r)))
            d = d.deriv()
        return out

    return PVFunction(lambda t: p(np.asarray(t, dtype=float)), derivs, (), float(max(p.degree(), 0)))


@dataclass(frozen=True)
class SplitFunctions:
    """The two summands of ``4(2s+1)^2 phi_s(2t, 1)^2``.

    ``f1(t) = (|1+t|^(2a+1) + |1-t|^(2a+1) - 2)/t^2`` and
    ``f2(t) = 2(1 - (1-t^2)|1-t^2|^(a-1/2))/t^2`` with ``a = alpha``.
    """

    f1: PVFunction
    f2: PVFunction
    alpha: float = field(default=0.0)


def split_functions(order) -> SplitFunctions:
    a = as_order(order).alpha
    p = 2 * a + 1

    def c1(count):
        return 2 * _binom_seq(p, 2 * count + 2)[2::2][:count]

    def c2(count):
        b = _binom_seq(a + 0.5, count + 1)[1:]
        return 2 * (-1.0) ** np.arange(count) * b

    def f1(t):
        t = np.asarray(t, dtype=float)
        small = np.abs(t) < 1e-3
        ts = np.where(small, 1.0, t)
        full = (np.abs(1 + ts) ** p + np.abs(1 - ts) ** p - 2) / ts ** 2
        c = c1(4)
        ser = sum(c[m] * t ** (2 * m) for m in range(4))
        return np.where(small, ser, full)

    def f2(t):
        t = np.asarray(t, dtype=float)
        small = np.abs(t) < 1e-3
        ts = np.where(small, 1.0, t)
        w = 1 - ts ** 2
        full = 2 * (1 - w * np.abs(w) ** (a - 0.5)) / ts ** 2
        c = c2(4)
        ser = sum(c[m] * t ** (2 * m) for m in range(4))
        return np.where(small, ser, full)

    def d1(r, n):
        if abs(r) < 1:
            return _even_series_derivs(c1, r, n, 1.0)
        raise DomainError("f1 derivatives are provided on (-1, 1)")

    def d2(r, n):
        if abs(r) < 1:
            return _even_series_derivs(c2, r, n, 1.0)
        raise DomainError("f2 derivatives are provided on (-1, 1)")

    g = 2 * a - 1
    return SplitFunctions(PVFunction(f1, d1, (-1.0, 1.0), g), PVFunction(f2, d2, (-1.0, 1.0), g), a)


def split_check(order, t: float) -> float:
    """``f1(t) + f2(t) - 4(2s+1)^2 phi_s(2t, 1)^2``; zero up to rounding."""
    s = as_order(order).s
    sp = split_functions(s)
    lhs = float(sp.f1(t)) + float(sp.f2(t))
    return lhs - 4 * (2 * s + 1) ** 2 * float(phi(s, 2 * float(t), 1.0)) ** 2


def _middle_edges(delta, big_t, t_kinks, width, levels=14):
    pts = sorted(k for k in t_kinks if delta < k < big_t)
    cuts = [delta] + pts + [big_t]
    out = [np.array([delta])]
    for i in range(len(cuts) - 1):
        a, b = cuts[i], cuts[i + 1]
        m = max(2, int(math.ceil((b - a) / width)))
        e = np.linspace(a, b, m + 1)
        if i == 0:
            # integrand grows like a power of t toward the inner cut
            left = delta * 2.0 ** np.arange(0, 60)
            left = left[left < e[1]]
        else:
            left = graded_edges(a, e[1], 0.25, levels, toward="a")[:-1]
        right = graded_edges(e[-2], b, 0.25, levels) if i < len(cuts) - 2 else e[-2:]
        out.append(np.concatenate((left, e[1:-2], right)))
    return np.unique(np.concatenate(out))


def frac_pv(ford: FracLaplaceOrder, u: PVFunction, r: float, q: QuadSpec = DEFAULT_QUAD,
            tol: float = 1e-10, full_output: bool = False):
    """Regularized principal value ``(-Delta)^alpha u(r)``.

    The symmetric combination ``2u(r) + [u'' t^2 + u'''' t^4/12] - u(r+t) - u(r-t)``
    is integrated against ``t^(-1-2alpha)`` on (0, inf):

    * on (0, delta) from the Taylor series of u at r, term by term, where
      delta is the larger of ``q.singularity_split`` and 0.5 but at most a
      quarter of the distance to the nearest kink;
    * on (delta, T) with Gauss panels graded toward the images of the kinks;
    * on (T, inf) the correction terms exactly and ``u(r +- T/tau)`` with a
      Gauss-Jacobi rule in tau.

    The panels are refined until two levels agree to ``tol`` relative, or to
    the rounding floor of the symmetric difference if that is larger. The
    floor, about ``eps u(r) delta^(-2 alpha)``, dominates close to a kink
    when alpha is large.

    Returns
    -------
    float, or (float, float) if ``full_output``
        The value and, optionally, an error estimate: the larger of the last
        refinement change and the rounding floor.

    Raises
    ------
    DomainError
        If u is not smooth at r or grows too fast.
    ConvergenceError
        If refining the middle panels does not settle.
    """
    a = ford.alpha
    r = float(r)
    if not u.growth < 2 * a:
        raise DomainError("u grows too fast for (-Delta)^alpha")
    dist = min((abs(r - k) for k in u.kinks), default=math.inf)
    if dist == 0:
        raise DomainError("u is not smooth at r")
    j0 = ford.first_free
    delta = min(max(q.singularity_split, _TAYLOR_REACH), dist / 4)
    d = u.derivatives(r, _TAYLOR_ORDER)
    u0 = d[0]
    u2 = d[2] if j0 >= 2 else 0.0
    u4 = d[4] if j0 >= 3 else 0.0

    inner = 0.0
    for j in range(j0, _TAYLOR_ORDER // 2 + 1):
        inner -= 2 * d[2 * j] / math.factorial(2 * j) * delta ** (2 * j - 2 * a) / (2 * j - 2 * a)

    big_t = 4 * (abs(r) + max((abs(k) for k in u.kinks), default=0.0) + 1)

    def sym(t):
        return (2 * u0 + u2 * t ** 2 + u4 * t ** 4 / 12 - u(r + t) - u(r - t)) / t ** (1 + 2 * a)

    tail = 2 * u0 * big_t ** (-2 * a) / (2 * a)
    if j0 >= 2:
        tail += u2 * big_t ** (2 - 2 * a) / (2 * a - 2)
    if j0 >= 3:
        tail += u4 / 12 * big_t ** (4 - 2 * a) / (2 * a - 4)
    beta = 2 * a - 1 - u.growth
    tau, wt = jacobi_panel(1.0, beta, 48)
    tail -= big_t ** (-2 * a) * float(np.sum((u(r + big_t / tau) + u(r - big_t / tau)) * tau ** (2 * a - 1) * wt))

    t_kinks = [abs(k - r) for k in u.kinks]

    def middle(width):
        # value and the rounding floor of the symmetric difference
        nodes, weights = panel_rule(_middle_edges(delta, big_t, t_kinks, width), 16)
        size = (2 * abs(u0) + abs(u2) * nodes ** 2 + abs(u4) * nodes ** 4 / 12
                + np.abs(u(r + nodes)) + np.abs(u(r - nodes))) / nodes ** (1 + 2 * a)
        return float(np.sum(sym(nodes) * weights)), 4 * _EPS * float(np.sum(size * np.abs(weights)))

    width = 0.5
    prev, _ = middle(width)
    for _ in range(6):
        width /= 2
        val, floor = middle(width)
        scale = tol * max(1.0, abs(inner + val + tail))
        if abs(val - prev) <= max(scale, floor):
            value = ford.c_alpha * (inner + val + tail)
            if full_output:
                return value, abs(ford.c_alpha) * max(abs(val - prev), floor)
            return value
        prev = val
    raise ConvergenceError("principal value quadrature did not settle",
                           partial=ford.c_alpha * (inner + val + tail), error=abs(ford.c_alpha * (val - prev)))


class Route(Enum):
    PV_QUADRATURE = "PVQuadrature"
    HYPERGEOMETRIC = "Hypergeometric"
    DERIVATIVE_SPECIAL = "DerivativeSpecial"
    AUTO = "Auto"
    HEAT_KERNEL = "HeatKernelCDF"


@dataclass(frozen=True)
class VelocityRegimeInput:
    kappa: float
    iota: float

    def __post_init__(self):
        if not 0 <= self.kappa <= 0.5:
            raise DomainError("kappa must lie in [0, 1/2] in the velocity regime")
        if math.isnan(self.iota):
            raise DomainError("iota is NaN")


@dataclass(frozen=True)
class SpatialRegimeInput:
    kappa: float

    def __post_init__(self):
        if not 0 <= self.kappa < 2:
            raise DomainError("kappa must lie in [0, 2) in the spatial regime")


@dataclass(frozen=True)
class AsymptoticConstant:
    """A limit constant.

    ``residual`` is the difference to a second route when one was requested;
    ``error`` estimates the absolute error of ``value`` on every route.
    """

    value: float
    route: Route
    residual: Optional[float] = None
    error: Optional[float] = None


def c_s1(order, inp: VelocityRegimeInput, q: QuadSpec = DEFAULT_QUAD) -> AsymptoticConstant:
    """Limit of ``j_s k_s`` along velocity-dominant rays.

    ``iota_-`` is read as ``max(-iota, 0)``.
    """
    s = as_order(order).s
    k, i = inp.kappa, inp.iota
    pref = (1 + k ** (2 + 2 * s)) * 2 ** (2 * s) * math.sin(math.pi * s) * gamma_fn(2 * s + 1) / math.pi
    if i == -math.inf:
        tail = gamma_fn(2 * s) * math.sin(math.pi * s) / ((2 * s + 1) * math.pi)
        err = _CLOSED_REL * abs(tail)
    else:
        i_minus = max(-i, 0.0)
        arg = (1 + 2 * s) ** (1 / (2 * s)) * i if math.isfinite(i) else i
        cdf = q_cdf(s, arg, q)
        # the ray rule has no built-in estimate; compare with a doubled truncation radius
        wide = q_cdf(s, arg, replace(q, truncation_safety=2 * q.truncation_safety))
        scale = (0.5 + i_minus) ** (2 * s)
        tail = scale * cdf
        err = scale * max(abs(cdf - wide), _CLOSED_REL * abs(cdf))
    return AsymptoticConstant(float(pref * tail), Route.HEAT_KERNEL, error=float(abs(pref) * err))


def _prefactor3(s, kappa):
    return (1 + kappa ** (2 + 2 * s)) * abs(2 - kappa) ** (2 * s) / (4 * math.pi)


def hypergeometric_laplacian(order, kappa: float) -> float:
    """``(-Delta)^alpha phi_s(., 1)^2`` at kappa from the hypergeometric identity.

    Only f2 of the split contributes, and
    ``(-Delta)^alpha f2(t) = 2^(2alpha+1) Gamma(3/2+alpha) Gamma(1/2+alpha) (1 - sin(pi alpha))
    / (pi (1+alpha)) 2F1(1/2+alpha, 1+alpha; 2+alpha; t^2)``.
    """
    s = as_order(order).s
    a = as_order(order).alpha
    if abs(kappa) >= 2:
        raise DomainError("hypergeometric route needs |kappa| < 2")
    const = (2 ** (2 * a + 1) * gamma_fn(1.5 + a) * gamma_fn(0.5 + a) * (1 - math.sin(math.pi * a))
             / (math.pi * (1 + a)))
    return 2 ** (-2 * a) / (4 * (2 * s + 1) ** 2) * const * gauss_2f1(0.5 + a, 1 + a, 2 + a, kappa ** 2 / 4)


def c3_quarter(kappa):
    """C_{1/4,3}(kappa) = (1/4pi)(1 + kappa^(5/2)) |2 - kappa|^(1/2) (-d^2/dkappa^2) phi_{1/4}(kappa, 1)^2.

    Written as ``(1 + kappa^(5/2)) / (12 sqrt(2) pi (1 + sqrt(1 - z))^2 sqrt(1 + kappa/2))``
    with ``z = kappa^2/4``, free of cancellation at small kappa.
    """
    z = kappa * kappa / 4
    return (1 + kappa ** 2.5) / (12 * math.sqrt(2) * math.pi * (1 + math.sqrt(1 - z)) ** 2 * math.sqrt(1 + kappa / 2))


def c3_three_quarter(kappa):
    """C_{3/4,3}(kappa) = (1/4pi)(1 + kappa^(7/2)) |2 - kappa|^(3/2) d^4/dkappa^4 phi_{3/4}(kappa, 1)^2.

    With ``w = sqrt(4 - kappa^2)`` and ``e = kappa^2/(2 + w)`` the numerator
    ``64(w - 2) + 16 kappa^2 (3 - w) - 3 kappa^4`` equals ``e^3 (8 - 3e)``, so the
    ``kappa^-6`` factor cancels exactly.
    """
    w = math.sqrt(4 - kappa * kappa)
    e = kappa * kappa / (2 + w)
    ratio = (8 - 3 * e) / ((2 + w) ** 3 * (1 + kappa / 2) ** 1.5)
    return (1 + kappa ** 3.5) / (4 * math.pi) * math.sqrt(2) * 0.6 * ratio


def c_s3(order, inp: SpatialRegimeInput, route: Route = Route.AUTO, q: QuadSpec = DEFAULT_QUAD,
         cross_check: bool = False) -> AsymptoticConstant:
    """Limit of ``j_s k_s`` along spatial-dominant rays.

    Parameters
    ----------
    route : Route
        ``AUTO`` takes the closed forms at s = 1/4 and 3/4 and the
        hypergeometric formula otherwise, on all of [0, 2).
    cross_check : bool
        Also evaluate a second route and store the difference as ``residual``;
        ``error`` then holds the larger of the two error estimates.
    """
    s = as_order(order).s
    kappa = float(inp.kappa)
    special = s in (0.25, 0.75)
    error = None
    if route == Route.AUTO:
        route = Route.DERIVATIVE_SPECIAL if special else Route.HYPERGEOMETRIC
    if route == Route.DERIVATIVE_SPECIAL:
        if not special:
            raise DomainError("closed derivative formulas exist only for s = 1/4 and s = 3/4")
        value = c3_quarter(kappa) if s == 0.25 else c3_three_quarter(kappa)
        error = _CLOSED_REL * abs(value)
    elif route == Route.HYPERGEOMETRIC:
        if special:
            raise DomainError("hypergeometric route is undefined at integer alpha")
        value = _prefactor3(s, kappa) * hypergeometric_laplacian(s, kappa)
        error = _CLOSED_REL * abs(value)
    elif route == Route.PV_QUADRATURE:
        if special:
            raise DomainError("principal value route is undefined at integer alpha")
        pv, err = frac_pv(FracLaplaceOrder.from_order(s), phi_squared(s), kappa, q, full_output=True)
        value, error = _prefactor3(s, kappa) * pv, _prefactor3(s, kappa) * err
    else:
        raise DomainError(f"route {route} does not apply to C_s3")
    residual = None
    if cross_check and not special:
        other = Route.PV_QUADRATURE if route == Route.HYPERGEOMETRIC else Route.HYPERGEOMETRIC
        second = c_s3(s, inp, other, q)
        residual = value - second.value
        error = max(error, second.error)
    return AsymptoticConstant(float(value), route, residual, None if error is None else float(error))
