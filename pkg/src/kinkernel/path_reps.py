"""Complex ray integrals and the one-dimensional representations of k_s.

Ray integrals are taken along ``gamma_theta(t) = exp(i pi theta) t``. With
``r = exp(i pi theta) y^(2s)`` every such integral becomes a real-line
integral in y whose oscillating factor ``exp(i y exp(i beta))``,
``beta = pi theta / (2s)``, decays like ``exp(-y sin beta)``.

The representations of k_s through velocity and position are evaluated on
the real axis (theta = 0). There the innermost r-integral is damped by
``exp(-c r)`` and equals a sine transform, which is obtained from the rotated
transform of ``u^(2s) exp(-u^(2s))``.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import gamma

from .errors import ConvergenceError, DomainError
from .fourier_kernel import DEFAULT_QUAD, KernelValue, Method, QuadSpec
from .quadrature import graded_edges, jacobi_panel, panel_rule
from .symbol import as_order, phi, phi_d_nu, phi_d_xi
from .transforms import damped_transform

_CUTOFF = 40.0
# complex entries per block when a rule is applied to many outer nodes
_CHUNK = 1 << 20


@dataclass(frozen=True)
class RayPath:
    """Ray ``t -> exp(i pi theta) t`` for ``0 < t < r_max``.

    Attributes
    ----------
    theta : float
        Angle as a fraction of pi.
    r_max : float or None
        Truncation radius; None picks it from the decay of the integrand.
    points : int
        Gauss nodes per panel.
    """

    theta: float
    r_max: Optional[float] = None
    points: int = 16

    def __post_init__(self):
        if not (math.isfinite(self.theta) and self.theta >= 0):
            raise DomainError("theta must be finite and nonnegative")
        if self.r_max is not None and not self.r_max > 0:
            raise DomainError("r_max must be positive")
        if self.points < 1:
            raise DomainError("points must be a positive integer")

    def check(self, s: float, upper: float):
        if not 0 < self.theta < upper:
            raise DomainError(f"theta = {self.theta} outside (0, {upper:g})")


@dataclass(frozen=True)
class ComplexValue:
    re: float
    im: float

    def __post_init__(self):
        if not (math.isfinite(self.re) and math.isfinite(self.im)):
            raise DomainError("non-finite complex value")

    def __complex__(self):
        return complex(self.re, self.im)


def _decay_end(rate: float, power: float) -> float:
    # smallest y with exp(-rate y) y^power below exp(-_CUTOFF)
    y = _CUTOFF / rate
    for _ in range(60):
        y = (_CUTOFF + max(power, 0.0) * math.log(max(y, 1.0))) / rate
    return y


def _oscillatory_rule(power, beta, y_end, n):
    # Jacobi panel at 0 for y^power, then panels short enough for the
    # oscillation exp(i y cos beta)
    h0 = min(1.0, y_end)
    t0, w0 = jacobi_panel(h0, power, n)
    width = min(2.0, 8.0 / max(abs(math.cos(beta)), 1e-3))
    m = max(1, int(math.ceil((y_end - h0) / width)))
    nodes, weights = panel_rule(np.linspace(h0, y_end, m + 1), n)
    return np.concatenate((t0, nodes.ravel())), np.concatenate((w0, weights.ravel()))


def ray_gamma_integral(order, alpha: float, path: RayPath) -> ComplexValue:
    """``(1/2s) int_{gamma_theta} exp(i r^(1/2s)) r^(1/2s + alpha) dr``.

    Raises
    ------
    DomainError
        If theta is not in (0, 2s) or ``alpha <= -1 - 1/(2s)``.
    ConvergenceError
        If a user supplied ``r_max`` cuts the ray before the integrand decays.
    """
    s = as_order(order).s
    path.check(s, 2 * s)
    if not alpha > -1 - 1 / (2 * s):
        raise DomainError("alpha must exceed -1 - 1/(2s)")
    beta = math.pi * path.theta / (2 * s)
    p = 2 * s * (1 + alpha)
    y_need = _decay_end(math.sin(beta), p)
    if path.r_max is None:
        y_end = y_need
    else:
        y_end = path.r_max ** (1 / (2 * s))
        tail = math.exp(-y_end * math.sin(beta)) * y_end ** p / math.sin(beta)
        if tail > 1e-10:
            raise ConvergenceError(f"ray truncated at r_max = {path.r_max} leaves a tail of {tail:.3g}",
                                   error=tail)
    y, w = _oscillatory_rule(p, beta, y_end, path.points)
    val = np.sum(w * y ** p * np.exp(1j * y * np.exp(1j * beta))) * np.exp(1j * math.pi * path.theta * (1 / (2 * s) + alpha + 1))
    return ComplexValue(float(val.real), float(val.imag))


def ray_gamma_identity(order, alpha: float, path: RayPath):
    """Numeric and closed values of the imaginary part of the ray Gamma integral.

    The closed value is ``cos(pi s (1 + alpha)) Gamma(2s(1 + alpha) + 1)``,
    independent of theta.

    Returns
    -------
    numeric, closed : float
    """
    s = as_order(order).s
    numeric = ray_gamma_integral(s, alpha, path).im
    closed = math.cos(math.pi * s * (1 + alpha)) * gamma(2 * s * (1 + alpha) + 1)
    return numeric, float(closed)


def _inner_rule(s, k, beta, theta, n):
    # normalized variable tau = y / lam(t); the integrand decays at least like
    # exp(-min(tau, tau^(2s))) times tau^(2sk)
    p = 2 * s * k
    h0 = 10.0 ** (-15.0 / (1.0 + p))
    big = _CUTOFF
    for _ in range(60):
        big = _CUTOFF + (p + 1) / (2 * s) * math.log(big)
    top = max(_decay_end(1.0, p), big ** (1 / (2 * s)))
    # phase speed in tau is |cot beta|; beta passes pi/2 when theta > s
    cap = max(0.5, 8.0 * abs(math.tan(beta)))
    edges = [h0]
    while edges[-1] < 1.0:
        edges.append(edges[-1] * 4.0)
    while edges[-1] < top:
        edges.append(edges[-1] + min(edges[-1], cap))
    t0, w0 = jacobi_panel(h0, p, n)
    nodes, weights = panel_rule(np.asarray(edges), n)
    return np.concatenate((t0, nodes.ravel())), np.concatenate((w0, weights.ravel()))


def _cancellation_tail(s, k, c, big_t, terms=60):
    # int_T^inf t^(-2sk) I(t) dt from I(t) = sum_m (-c)^m t^(-2sm)/m! 2s Gamma(2s(k+m)+1) e^{i pi (2s(k+m)+1)/2}
    total = 0.0
    for m in range(terms):
        e = 2 * s * (k + m)
        coef = 2 * s * math.exp(math.lgamma(e + 1) - math.lgamma(m + 1)) * (-c) ** m
        im = coef * math.sin(math.pi * (e + 1) / 2)
        if abs(e - 1) < 1e-12:
            continue  # purely real term; its imaginary part vanishes
        term = im * big_t ** (1 - e) / (e - 1)
        total += term
        if abs(coef) * big_t ** (1 - e) < 1e-18:
            break
    return total


def cancellation_identity(order, k: float, c: float, path: RayPath, tol: float = 1e-9) -> float:
    """Imaginary part of the double ray integral with the damping ``exp(-c r / t^(2s))``.

    Computes ``Im int_0^inf t^(-2sk) int_{gamma_theta} exp(i r^(1/2s))
    r^(1/2s + k - 1) exp(-c r / t^(2s)) dr dt`` with the r-integral innermost.

    For large t the inner integral is expanded in powers of ``c t^(-2s)``;
    each coefficient is a ray Gamma integral, and the tail beyond the last
    t-node is integrated term by term.

    Raises
    ------
    DomainError
        If ``k < 1/(2s)``, ``c <= 0`` or theta is not in ``(0, min(1/2, 2s))``.
    ConvergenceError
        If refining the t-grid does not settle to ``tol``.
    """
    s = as_order(order).s
    path.check(s, min(0.5, 2 * s))
    if k < 1 / (2 * s) - 1e-12:
        raise DomainError("k must be at least 1/(2s)")
    if not c > 0:
        raise DomainError("c must be positive")
    theta = path.theta
    beta = math.pi * theta / (2 * s)
    cz = c * np.exp(1j * math.pi * theta)
    tau, wt = _inner_rule(s, k, beta, theta, path.points)
    pref = 2 * s * np.exp(1j * math.pi * theta * (1 / (2 * s) + k))
    t_min = 1e-8
    big_t = (100.0 * c) ** (1 / (2 * s))
    big_t = max(big_t, 10.0)

    def inner(t):
        lam = 1.0 / (math.sin(beta) + (c * math.cos(math.pi * theta)) ** (1 / (2 * s)) / t)
        out = np.empty(t.shape, dtype=complex)
        step = max(1, _CHUNK // tau.size)
        for i in range(0, t.size, step):
            y = lam[i:i + step, None] * tau
            f = y ** (2 * s * k) * np.exp(1j * y * np.exp(1j * beta) - cz * (y / t[i:i + step, None]) ** (2 * s))
            out[i:i + step] = f @ wt
        return pref * out * lam

    def outer(width):
        lo, hi = math.log(t_min), math.log(big_t)
        m = max(2, int(math.ceil((hi - lo) / width)))
        nodes, weights = panel_rule(np.linspace(lo, hi, m + 1), 16)
        t = np.exp(nodes.ravel())
        h = t ** (1 - 2 * s * k) * inner(t)
        return float(np.sum(h.imag * weights.ravel()))

    tail = _cancellation_tail(s, k, c, big_t)
    width = 1.0
    prev = outer(width)
    for _ in range(6):
        width *= 0.5
        val = outer(width)
        if abs(val - prev) <= tol:
            return val + tail
        prev = val
    raise ConvergenceError("outer t-integral did not settle", partial=prev + tail, error=abs(val - prev))


def _sine_factor(s, c, freq):
    """``int_0^inf sin(freq r^(1/2s)) r^(1/2s) exp(-c r) dr`` for c > 0."""
    y = freq * c ** (-1 / (2 * s))
    return 2 * s * c ** (-(1 + 2 * s) / (2 * s)) * damped_transform(y, s, 2 * s, "im")


def _line_edges(points, per_unit, levels, lo, hi):
    # panels on [lo, hi] with breakpoints graded from both sides
    cuts = np.unique(np.concatenate(([lo], points, [hi])))
    out = [np.array([lo])]
    for a, b in zip(cuts[:-1], cuts[1:]):
        m = max(2, int(math.ceil((b - a) * per_unit)))
        e = np.linspace(a, b, m + 1)
        left = graded_edges(a, e[1], 0.25, levels, toward="a") if a != lo else e[:2]
        right = graded_edges(e[-2], b, 0.25, levels) if b != hi else e[-2:]
        out.append(np.concatenate((left[1:], e[2:-2], right)))
    return np.unique(np.concatenate(out))


def _rep_quadrature(s, kinks, integrand, q, levels=12):
    """``int_R f(t) dt`` with breakpoints at 0 and the kinks, tails mapped by t = T/u."""
    pts = np.array([0.0] + [k for k in kinks])
    lo, hi = pts.min() - 2.0, pts.max() + 2.0

    def rule(per_unit):
        e = _line_edges(pts, per_unit, levels, lo, hi)
        nodes, weights = panel_rule(e, 16)
        tn, tw = nodes.ravel(), weights.ravel()
        u, uw = panel_rule(np.linspace(0.0, 1.0, max(2, per_unit) + 1), 16)
        u, uw = u.ravel(), uw.ravel()
        tn = np.concatenate((tn, hi / u, lo / u))
        tw = np.concatenate((tw, hi * uw / u ** 2, -lo * uw / u ** 2))
        f = integrand(tn)
        return float(np.sum(f * tw)), float(np.sum(np.abs(f) * tw))

    per_unit = 2
    prev, _ = rule(per_unit)
    while True:
        per_unit *= 2
        val, mag = rule(per_unit)
        err = abs(val - prev) + 1e-14 * mag
        if err <= q.target(val):
            return val, err
        if per_unit * (hi - lo) > q.max_panels:
            raise ConvergenceError("representation integral did not converge", partial=val, error=err)
        prev = val


def k_via_v_rep(order, x: float, v: float, q: QuadSpec = DEFAULT_QUAD) -> KernelValue:
    """k_s(x, v) from its one-dimensional representation in the velocity variable.

    Uses ``pi^2 |v|^(2+2s) k_s = (1/2s) int_R sgn(t) |t|^(-1-2s)
    d_nu phi_s(2, t + 2x/v) S(c(t)) dt`` where
    ``c(t) = phi_s(2, t + 2x/v) / (|v| |t|)^(2s)`` and S is the sine factor.
    The t-axis is split at 0 and at the kinks ``t = -2x/v +- 1``.

    Raises
    ------
    DomainError
        If v = 0.
    """
    s = as_order(order).s
    if v == 0:
        raise DomainError("the velocity representation needs v != 0")
    x, v = abs(float(x)), abs(float(v))
    a = 2 * x / v

    def integrand(t):
        at = np.abs(t)
        nu = t + a
        ph = phi(s, 2.0, nu)
        out = np.zeros_like(t)
        ok = at > 0
        c = ph[ok] / (v * at[ok]) ** (2 * s)
        out[ok] = np.sign(t[ok]) * at[ok] ** (-1 - 2 * s) * phi_d_nu(s, 2.0, nu[ok]) * _sine_factor(s, c, 1.0)
        return out

    val, err = _rep_quadrature(s, [-a - 1, -a + 1], integrand, q)
    scale = 1 / (np.pi ** 2 * v ** (2 + 2 * s) * 2 * s)
    return KernelValue(val * scale, err * scale, Method.V_REPRESENTATION)


def k_via_x_rep(order, x: float, v: float, q: QuadSpec = DEFAULT_QUAD) -> KernelValue:
    """k_s(x, v) from its one-dimensional representation in the position variable.

    Uses ``pi^2 |x|^(2+2s) k_s = (1/2s) int_R sgn(t) |t|^(-1-2s)
    d_xi phi_s(2t + v/x, 1) S_2(c(t)) dt`` with
    ``c(t) = phi_s(2t + v/x, 1) / (|x| |t|)^(2s)``; the sine factor carries the
    frequency 2. The kinks sit at ``t = -v/(2x) +- 1``.

    Raises
    ------
    DomainError
        If x = 0.
    """
    s = as_order(order).s
    if x == 0:
        raise DomainError("the position representation needs x != 0")
    x, v = abs(float(x)), abs(float(v))
    b = v / x

    def integrand(t):
        at = np.abs(t)
        xi = 2 * t + b
        ph = phi(s, xi, 1.0)
        out = np.zeros_like(t)
        ok = at > 0
        c = ph[ok] / (x * at[ok]) ** (2 * s)
        out[ok] = np.sign(t[ok]) * at[ok] ** (-1 - 2 * s) * phi_d_xi(s, xi[ok], 1.0) * _sine_factor(s, c, 2.0)
        return out

    val, err = _rep_quadrature(s, [-0.5 * b - 1, -0.5 * b + 1], integrand, q)
    scale = 1 / (np.pi ** 2 * x ** (2 + 2 * s) * 2 * s)
    return KernelValue(val * scale, err * scale, Method.X_REPRESENTATION)
