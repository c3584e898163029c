"""Empirical checks of the two-sided kernel bound and of the ray limits."""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np

from .asymptotics import AsymptoticConstant, Route, SpatialRegimeInput, VelocityRegimeInput, c_s1, c_s3
from .closed_half import k_half, k_half_error
from .errors import DomainError, KinkernelError
from .fourier_kernel import DEFAULT_QUAD, Method, QuadSpec, k_eval
from .parallel import parallel_map
from .symbol import FracOrder, as_order, envelope_j, envelope_thm

RAY_RADIUS_CAP = 50.0


@dataclass(frozen=True)
class Rect:
    x_lo: float
    x_hi: float
    v_lo: float
    v_hi: float

    def __post_init__(self):
        if not (self.x_hi > self.x_lo and self.v_hi > self.v_lo):
            raise DomainError("rectangle is degenerate")


def axis(lo: float, hi: float, step: float) -> np.ndarray:
    """Grid ``lo, lo + step, ...`` up to hi inclusive (up to rounding)."""
    if not step > 0:
        raise DomainError("step must be positive")
    n = int(math.floor((hi - lo) / step + 1e-9))
    return lo + step * np.arange(n + 1)


@dataclass(frozen=True)
class RatioReport:
    """Extrema of g_s on a grid; ``min_error`` and ``max_error`` bound their errors."""

    order: FracOrder
    rect: Rect
    step: float
    min_ratio: float
    max_ratio: float
    argmin: Tuple[float, float]
    argmax: Tuple[float, float]
    min_error: float
    max_error: float
    method: Method

    @property
    def empirical_c(self) -> float:
        return max(self.max_ratio, 1.0 / self.min_ratio)


def kernel_method(order) -> Method:
    """Method used by :func:`kernel_value` at this order."""
    return Method.CLOSED_HALF if as_order(order).s == 0.5 else Method.FOURIER_2D


def kernel_value(order, x: float, v: float, q: QuadSpec = DEFAULT_QUAD, full_output: bool = False):
    """k_s(x, v), closed form at s = 1/2 and Fourier inversion otherwise.

    With ``full_output`` the pair (value, error estimate) is returned.
    """
    s = as_order(order).s
    if s == 0.5:
        value, err = float(k_half(x, v)), float(k_half_error(x, v))
    else:
        kv = k_eval(s, x, v, q)
        value, err = kv.value, kv.error
    return (value, err) if full_output else value


def g_ratio(order, x: float, v: float, q: QuadSpec = DEFAULT_QUAD) -> float:
    """``g_s = k_s (1+|x|+|v|)^(2+2s) (1 + (2|x|-|v|)_+)^(2s)``."""
    return kernel_value(order, x, v, q) * float(envelope_thm(order, x, v))


def ratio_grid(order, rect: Rect, step: float, q: QuadSpec = DEFAULT_QUAD,
               threads: Optional[int] = None) -> RatioReport:
    """Extrema of g_s over a rectangular grid.

    Raises
    ------
    KinkernelError
        The first failing kernel evaluation, with its grid location appended.
    """
    fo = as_order(order)
    xs = axis(rect.x_lo, rect.x_hi, step)
    vs = axis(rect.v_lo, rect.v_hi, step)
    if fo.s == 0.5:
        xx, vv = np.meshgrid(xs, vs, indexing="ij")
        env = envelope_thm(fo, xx, vv)
        g = k_half(xx, vv) * env
        gerr = k_half_error(xx, vv) * env
    else:
        pts = [(x, v) for x in xs for v in vs]

        def one(p):
            try:
                value, err = kernel_value(fo, p[0], p[1], q, full_output=True)
            except KinkernelError as exc:
                exc.args = (f"{exc.args[0] if exc.args else exc} at (x, v) = {p}",) + exc.args[1:]
                raise
            env = float(envelope_thm(fo, p[0], p[1]))
            return value * env, err * env

        res = np.array(parallel_map(one, pts, threads))
        g = res[:, 0].reshape(len(xs), len(vs))
        gerr = res[:, 1].reshape(len(xs), len(vs))
    i = np.unravel_index(np.argmin(g), g.shape)
    j = np.unravel_index(np.argmax(g), g.shape)
    return RatioReport(fo, rect, step, float(g[i]), float(g[j]),
                       (float(xs[i[0]]), float(vs[i[1]])), (float(xs[j[0]]), float(vs[j[1]])),
                       float(gerr[i]), float(gerr[j]), kernel_method(fo))


class RayKind(Enum):
    VELOCITY = "VelocityRay"
    SPATIAL = "SpatialRay"
    DIAGONAL_OFFSET = "DiagonalOffset"


@dataclass(frozen=True)
class RaySpec:
    """A path to infinity.

    * ``VELOCITY``: ``(x, v) = (kappa R, R)`` with ``kappa < 1/2``, so iota = +inf.
    * ``SPATIAL``: ``(x, v) = (R, kappa R)`` with ``kappa < 2``.
    * ``DIAGONAL_OFFSET``: ``(x, v) = (R/2 - iota, R)``, so kappa = 1/2.
    """

    kind: RayKind
    radii: Sequence[float]
    kappa: float = 0.0
    iota: float = 0.0

    def __post_init__(self):
        if self.kind == RayKind.VELOCITY and not 0 <= self.kappa < 0.5:
            raise DomainError("velocity rays need 0 <= kappa < 1/2")
        if self.kind == RayKind.SPATIAL and not 0 <= self.kappa < 2:
            raise DomainError("spatial rays need 0 <= kappa < 2")
        if self.kind == RayKind.DIAGONAL_OFFSET and not math.isfinite(self.iota):
            raise DomainError("diagonal offset must be finite")
        r = list(self.radii)
        if not r or any(b <= a for a, b in zip(r, r[1:])) or r[0] <= 0:
            raise DomainError("radii must be positive and increasing")

    def point(self, radius: float):
        if self.kind == RayKind.VELOCITY:
            return self.kappa * radius, radius
        if self.kind == RayKind.SPATIAL:
            return radius, self.kappa * radius
        return radius / 2 - self.iota, radius


def predicted_constant(order, ray: RaySpec, q: QuadSpec = DEFAULT_QUAD) -> AsymptoticConstant:
    """Limit constant of ``j_s k_s`` along the ray, with its route and error."""
    s = as_order(order).s
    if ray.kind == RayKind.VELOCITY:
        return c_s1(s, VelocityRegimeInput(ray.kappa, math.inf), q)
    if ray.kind == RayKind.DIAGONAL_OFFSET:
        return c_s1(s, VelocityRegimeInput(0.5, ray.iota), q)
    return c_s3(s, SpatialRegimeInput(ray.kappa), q=q)


def predicted_limit(order, ray: RaySpec, q: QuadSpec = DEFAULT_QUAD) -> float:
    return predicted_constant(order, ray, q).value


@dataclass(frozen=True)
class RayLimitReport:
    """``j_s k_s`` at each radius, with error estimates, and the predicted limit."""

    values: Tuple[Tuple[float, float], ...]
    predicted: float
    extrapolated: Optional[float]
    errors: Tuple[float, ...]
    predicted_error: float
    method: Method
    route: Route


def richardson(values: Sequence[float]) -> Optional[float]:
    """Extrapolate ``v(R) = L + c R^-beta`` from the last three values at doubling radii."""
    if len(values) < 3:
        return None
    v1, v2, v3 = values[-3:]
    d1, d2 = v1 - v2, v2 - v3
    if d2 == 0 or d1 / d2 <= 1:
        return None
    beta = math.log2(d1 / d2)
    return v3 - d2 / (2 ** beta - 1)


def ray_limit(order, ray: RaySpec, q: QuadSpec = DEFAULT_QUAD, threads: Optional[int] = None) -> RayLimitReport:
    """``j_s k_s`` along a ray, with the predicted limit.

    For s != 1/2 radii above 50 raise DomainError, since the Fourier
    quadrature cost grows with the radius. The Richardson estimate assumes
    the radii double.
    """
    fo = as_order(order)
    if fo.s != 0.5 and max(ray.radii) > RAY_RADIUS_CAP:
        raise DomainError(f"radii above {RAY_RADIUS_CAP} need s = 1/2")

    def one(radius):
        x, v = ray.point(radius)
        env = float(envelope_j(fo, x, v))
        value, err = kernel_value(fo, x, v, q, full_output=True)
        return env * value, env * err

    res = parallel_map(one, list(ray.radii), threads)
    vals = [r[0] for r in res]
    pred = predicted_constant(fo, ray, q)
    return RayLimitReport(tuple(zip(map(float, ray.radii), vals)), pred.value, richardson(vals),
                          tuple(r[1] for r in res), pred.error, kernel_method(fo), pred.route)
