"""Fourier inversion for the kernels k_s, p_s, the heat kernel q_s and mass.

The kernel is

    k_s(x, v) = pi^-2 int_0^inf int_0^inf cos(x xi) cos(v nu) exp(-phi_s(xi, nu)) dxi dnu.

The quadrant is split along the kink line nu = xi/2 of phi_s. Both halves
are parametrized by a radius rho and a slope w in [0, 1]:

    nu >= xi/2:  (xi, nu) = (2 rho w, rho),    phi_s = rho^(2s) phi_s(2w, 1)
    nu <= xi/2:  (xi, nu) = (rho, rho w / 2),  phi_s = rho^(2s) 2^(-2s) phi_s(2, w)

The homogeneity of phi_s turns every rho-integral into the radial transform
``J_s(y) = int_0^inf u cos(y u) exp(-u^(2s)) du`` at a rescaled frequency,
which leaves a smooth one-dimensional integral over w. The only
singularity is the kink at w = 1, and panels are graded toward it.
"""

import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy.special import gamma

from .errors import ConvergenceError, DomainError
from .quadrature import graded_edges, panel_rule
from .symbol import PhasePoint, as_order, phi, scaling_reduce
from .transforms import damped_transform, upper_tail


class Method(Enum):
    FOURIER_2D = "Fourier2D"
    FOURIER_1D = "Fourier1D"
    CLOSED_HALF = "ClosedHalf"
    SEMI_INTEGRAL = "SemiIntegral"
    V_REPRESENTATION = "VRepresentation"
    X_REPRESENTATION = "XRepresentation"
    GAUSSIAN = "Gaussian"


@dataclass(frozen=True)
class QuadSpec:
    """Quadrature policy shared by the numerical routines.

    Attributes
    ----------
    abs_tol, rel_tol : float
        Target accuracy; a result is accepted when its error estimate is
        below ``max(abs_tol, rel_tol * |value|)``.
    truncation_safety : float
        Multiplier on analytic truncation radii.
    max_panels : int
        Panel budget before a ConvergenceError is raised.
    singularity_split : float
        Half-width of the neighbourhood of an integrable singularity that is
        treated analytically.
    """

    abs_tol: float = 1e-12
    rel_tol: float = 1e-9
    truncation_safety: float = 1.0
    max_panels: int = 8192
    singularity_split: float = 0.05

    def __post_init__(self):
        if self.abs_tol < 0 or self.rel_tol < 0 or self.abs_tol + self.rel_tol <= 0:
            raise DomainError("tolerances must be nonnegative and not both zero")
        if self.truncation_safety <= 0:
            raise DomainError("truncation_safety must be positive")
        if self.max_panels < 8:
            raise DomainError("max_panels must be at least 8")
        if self.singularity_split <= 0:
            raise DomainError("singularity_split must be positive")

    def target(self, value: float) -> float:
        return max(self.abs_tol, self.rel_tol * abs(value))


DEFAULT_QUAD = QuadSpec()


@dataclass(frozen=True)
class KernelValue:
    value: float
    error: float
    method: Method

    def __float__(self):
        return self.value


def _segment_edges(a, b, panels, grade_a, grade_b, levels_b, levels_a):
    m = max(1 + (grade_a and grade_b), int(math.ceil((b - a) * panels)))
    e = np.linspace(a, b, m + 1)
    parts = [e[:-1]]
    if grade_a:
        parts[0] = e[1:-1]
        parts.insert(0, graded_edges(a, e[1], 0.25, levels_a, toward="a")[:-1])
    if grade_b:
        parts[-1] = parts[-1][:-1]
        parts.append(graded_edges(e[-2], b, 0.25, levels_b))
    else:
        parts.append([b])
    return np.concatenate(parts)


@lru_cache(maxsize=64)
def _peak_levels(s: float) -> int:
    # J_s(y) - J_s(0) changes on the scale sqrt(m_1/m_3), m_k the moments of
    # u^k exp(-u^(2s)); grade far enough below that scale
    width = math.exp(0.5 * (math.lgamma(1 / s) - math.lgamma(2 / s)))
    return int(math.ceil(math.log(1 / width) / math.log(4.0))) + 4


def _w_rule(panels: int, x: float, v: float, s: float, levels: int = 14):
    # grade toward the kink at w = 1 and toward the zeros of the radial
    # frequencies, where J_s has a narrow peak when s is small
    peak = min(_peak_levels(s), levels)
    special = sorted({w for w in (v / (2 * x) if x > 0 else -1.0, 2 * x / v if v > 0 else -1.0)
                      if 1e-12 < w < 1 - 1e-12})
    cuts = [0.0] + special + [1.0]
    edges = [np.array([0.0])]
    for i in range(len(cuts) - 1):
        last = i == len(cuts) - 2
        seg = _segment_edges(cuts[i], cuts[i + 1], panels, i > 0, True, levels if last else peak, peak)
        edges.append(seg[1:])
    return panel_rule(np.concatenate(edges), 16)


def _k_integrand(s, x, v, w, scale):
    ga = scale * phi(s, 2 * w, 1.0)
    gb = scale * 2.0 ** (-2 * s) * phi(s, 2.0, w)
    sa = ga ** (-1 / (2 * s))
    sb = gb ** (-1 / (2 * s))
    y = np.concatenate((np.abs(2 * x * w + v) * sa, np.abs(2 * x * w - v) * sa,
                        np.abs(x + 0.5 * v * w) * sb, np.abs(x - 0.5 * v * w) * sb))
    jv = damped_transform(y, s, 1.0)
    m = w.size
    return sa ** 2 * (jv[:m] + jv[m:2 * m]) + 0.25 * sb ** 2 * (jv[2 * m:3 * m] + jv[3 * m:])


def _k_rule_value(s, x, v, panels, scale):
    nodes, weights = _w_rule(panels, x, v, s)
    f = _k_integrand(s, x, v, nodes.ravel(), scale).reshape(nodes.shape)
    value = float(np.sum(f * weights)) / np.pi ** 2
    mag = float(np.sum(np.abs(f) * weights)) / np.pi ** 2
    return value, mag


def _k_quadrature(s, x, v, q, scale=1.0):
    # every node moves when the panel count doubles (the graded panels shrink
    # with the uniform ones), so successive values give an honest estimate
    x, v = abs(float(x)), abs(float(v))
    panels = 2 + int(math.ceil(x + v))
    prev, _ = _k_rule_value(s, x, v, panels, scale)
    while True:
        panels *= 2
        value, mag = _k_rule_value(s, x, v, panels, scale)
        err = abs(value - prev) + 1e-14 * mag
        if err <= q.target(value):
            return value, err
        if 2 * panels > q.max_panels:
            raise ConvergenceError(f"k_s({x}, {v}) did not converge within {q.max_panels} panels",
                                   partial=value, error=err)
        prev = value


def k_eval(order, x: float, v: float, q: QuadSpec = DEFAULT_QUAD) -> KernelValue:
    """Kernel k_s(x, v) = p_s(1, x + v/2, v) by Fourier inversion.

    Parameters
    ----------
    order : FracOrder or float
    x, v : float
    q : QuadSpec

    Returns
    -------
    KernelValue
        Tagged ``Fourier2D``.

    Raises
    ------
    ConvergenceError
        If the tolerance is not met within ``q.max_panels`` panels.
    """
    s = as_order(order).s
    if not (np.isfinite(x) and np.isfinite(v)):
        raise DomainError("non-finite position or velocity")
    value, err = _k_quadrature(s, x, v, q)
    return KernelValue(value, err, Method.FOURIER_2D)


def p_eval(order, p: PhasePoint, q: QuadSpec = DEFAULT_QUAD) -> KernelValue:
    """p_s(t, x, v) through the scaling law and the time-one kernel."""
    order = as_order(order)
    pref, x1, v1 = scaling_reduce(order, p)
    kv = k_eval(order, x1 - 0.5 * v1, v1, q)
    return KernelValue(pref * kv.value, pref * kv.error, kv.method)


def p_direct(order, p: PhasePoint, q: QuadSpec = DEFAULT_QUAD) -> KernelValue:
    """p_s(t, x, v) by Fourier inversion at time t, without the scaling law.

    The transform of p_s(t) is ``exp(-t phi_s(t xi, eta + t xi/2))``; after the
    change of variables ``(t xi, eta + t xi/2) -> (xi, nu)`` this is the kernel
    integral with exponent ``t phi_s`` at ``((x - t v/2)/t, v)``, divided by t.
    """
    s = as_order(order).s
    t = float(p.t)
    value, err = _k_quadrature(s, (p.x - 0.5 * t * p.v) / t, p.v, q, scale=t)
    return KernelValue(value / t, err / t, Method.FOURIER_2D)


def q_eval(order, x: float, q: QuadSpec = DEFAULT_QUAD) -> KernelValue:
    """Fractional heat kernel ``q_s(x) = pi^-1 int_0^inf cos(x xi) exp(-xi^(2s)) dxi``.

    The error estimate compares two truncations of the rotated ray.
    """
    s = as_order(order).s
    if not np.isfinite(x):
        raise DomainError("non-finite position")
    y = abs(float(x))
    a = damped_transform([y], s, 0.0, safety=q.truncation_safety)[0] / np.pi
    b = damped_transform([y], s, 0.0, safety=1.5 * q.truncation_safety)[0] / np.pi
    return KernelValue(float(a), abs(a - b) + 1e-15 * abs(a), Method.FOURIER_1D)


def q_cdf(order, x: float, q: QuadSpec = DEFAULT_QUAD) -> float:
    """Distribution function ``int_{-inf}^x q_s``.

    The smaller of the two tails is computed directly, so deep tails keep
    their relative accuracy.
    """
    s = as_order(order).s
    if np.isnan(x):
        raise DomainError("x is NaN")
    if np.isinf(x):
        return 1.0 if x > 0 else 0.0
    tail = float(upper_tail([abs(float(x))], s, q.truncation_safety)[0])
    return 1.0 - tail if x > 0 else tail


def q_tail_series(order, r: float, terms: int = 40):
    """Asymptotic series of ``int_r^inf q_s`` for large r.

    Integrates ``q_s(x) ~ pi^-1 sum_n (-1)^(n+1) Gamma(2sn+1) sin(pi s n)/n! x^(-2sn-1)``
    term by term. The sum stops at the smallest term, whose size is returned
    as the error estimate.

    Returns
    -------
    value, error : float
    """
    s = as_order(order).s
    total = 0.0
    prev = np.inf
    for n in range(1, terms + 1):
        term = ((-1) ** (n + 1) * math.exp(math.lgamma(2 * s * n + 1) - math.lgamma(n + 1))
                * math.sin(math.pi * s * n) * r ** (-2 * s * n) / (2 * s * n) / math.pi)
        mag = abs(math.exp(math.lgamma(2 * s * n + 1) - math.lgamma(n + 1)) * r ** (-2 * s * n) / (2 * s * n))
        if mag > prev:
            return total, prev
        total += term
        prev = mag
    return total, prev


def mass(order, q: QuadSpec = DEFAULT_QUAD, radius: float = 50.0, full_output: bool = False):
    """Total mass ``int int k_s(x, v) dx dv``.

    The inner integral over x is the zero spatial frequency of the transform,
    which leaves the velocity marginal ``q_s(v)``. The outer integral over
    |v| <= radius uses Gauss panels on values of q_eval. The two tails beyond
    the radius come from the algebraic tail expansion of q_s.

    With ``full_output`` the pair (value, error estimate) is returned. The
    estimate adds the change under panel halving to the tail series error.

    Raises
    ------
    ConvergenceError
        If the tail expansion is not accurate to ``q.abs_tol * 1e3`` at the radius.
    """
    s = as_order(order).s
    near = graded_edges(0.0, 1.0, 0.25, 12, toward="a")
    far = np.arange(2.0, radius + 0.5, 1.0)
    edges = np.concatenate((near, far))
    halves = np.sort(np.concatenate((edges, 0.5 * (edges[:-1] + edges[1:]))))
    inner = []
    for e in (edges, halves):
        nodes, weights = panel_rule(e, 16)
        vals = damped_transform(nodes.ravel(), s, 0.0).reshape(nodes.shape) / np.pi
        inner.append(2.0 * float(np.sum(vals * weights)))
    tail, tail_err = q_tail_series(s, float(edges[-1]))
    value = inner[1] + 2.0 * tail
    if tail_err > 1e3 * q.abs_tol + 1e-10:
        raise ConvergenceError("tail expansion of q_s not accurate at the chosen radius",
                               partial=value, error=2 * tail_err)
    if full_output:
        return value, abs(inner[1] - inner[0]) + 2.0 * tail_err + 16 * np.finfo(float).eps
    return value


def kolmogorov_gaussian(p: PhasePoint) -> KernelValue:
    """Kernel of the classical (s = 1) Kolmogorov equation.

    ``sqrt(3)/(2 pi t^2) exp(-v^2/(4t) - 3 (x - t v/2)^2 / t^3)``, the Gaussian
    with Fourier transform ``exp(-(t eta^2 + t^2 eta xi + t^3 xi^2/3))``.
    """
    t = float(p.t)
    if not t > 0:
        raise DomainError("time must be positive")
    y = p.x - 0.5 * t * p.v
    val = math.sqrt(3.0) / (2 * math.pi * t * t) * math.exp(-p.v ** 2 / (4 * t) - 3 * y * y / t ** 3)
    return KernelValue(val, 0.0, Method.GAUSSIAN)


def q_tail_constant(order) -> float:
    """Constant C_q of ``q_s(x) ~ C_q |x|^(-1-2s)``."""
    s = as_order(order).s
    return float(math.sin(math.pi * s) * gamma(2 * s + 1) / math.pi)
