"""Elementary closed form of the kernel k_{1/2}.

With ``a = 2|x|``, ``b = |v|``, ``c = 1 + b^2`` and ``R = sqrt(c^2 + 4a^2)`` the
formula is built from the two radicals ``P = sqrt(R + c)`` and
``M = sqrt(R - c)``. M is computed as ``2a/P`` (from ``M P = 2a``), which
avoids the cancellation in ``R - c`` when a is small compared with c.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import ConvergenceError, DomainError

_SQ2 = math.sqrt(2.0)
_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class AppendixArgs:
    """Parameters (a, b) of the rational integrand ``F_{a,b}``; ``a = 2|x|``, ``b = |v|``."""

    a: float
    b: float

    def __post_init__(self):
        if not (self.a >= 0 and self.b >= 0):
            raise DomainError("AppendixArgs requires a >= 0 and b >= 0")
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise DomainError("AppendixArgs requires finite a and b")

    @classmethod
    def from_phase(cls, x: float, v: float) -> "AppendixArgs":
        return cls(2 * abs(x), abs(v))


def _radicals(a, b):
    c = 1.0 + b * b
    R = np.sqrt(c * c + 4 * a * a)
    P = np.sqrt(R + c)
    M = 2 * a / P
    return c, R, P, M


def _log_arctan(a, b, magnitude=False):
    """Logarithmic plus four-arctangent part, shared by both closed forms.

    With ``magnitude`` the sum of the absolute values of the pieces is
    returned as well; it sets the rounding scale of the cancellation.
    """
    c, R, P, M = _radicals(a, b)
    # 1 - 2 sqrt2 a / (sqrt2 a + (a^2 + R)/P), written for log1p; zero at a = 0
    log_term = np.log1p(-2 * _SQ2 * a * P / (_SQ2 * a * P + a * a + R))
    log_coef = (2 * a * P + c * M) / (_SQ2 * 4 * R ** 3)
    # P^2 - 2 b^2 = M^2 + 2, so P - sqrt2 b = (M^2 + 2)/(P + sqrt2 b) without cancellation
    dp = P + _SQ2 * b
    dm = (M * M + 2) / dp
    parts = (np.arctan((_SQ2 - M) / dp), np.arctan((_SQ2 + M) / dp),
             np.arctan((_SQ2 + M) / dm), np.arctan((_SQ2 - M) / dm))
    atan_coef = (c * P - 2 * a * M) / (2 * _SQ2 * R ** 3)
    value = log_coef * log_term + atan_coef * sum(parts)
    if not magnitude:
        return value
    return value, np.abs(log_coef * log_term) + np.abs(atan_coef) * sum(np.abs(q) for q in parts)


def k_half(x, v):
    """Closed form of k_{1/2}(x, v); vectorized over x and v.

    Examples
    --------
    >>> round(float(k_half(0.0, 0.0)), 10)
    0.7235946208
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(v))):
        raise DomainError("non-finite position or velocity")
    a, b = 2 * np.abs(x), np.abs(v)
    c = 1.0 + b * b
    out = 2.0 / np.pi ** 2 * (2.0 / (c * c + 4 * a * a) + _log_arctan(a, b))
    return out[()] if out.ndim == 0 else out


def k_half_error(x, v):
    """Rounding error bound for :func:`k_half`; vectorized.

    ``8 eps (S + (1 + 2|x| + |v|) k)`` with S the summed magnitude of the
    cancelling pieces. The first part covers the decay along the x axis,
    where pieces of size x^-2 cancel to x^-4; the second covers the
    conditioning near v = 2x. Calibrated against 30-digit references, where
    the observed error stayed below a quarter of the bound.
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(v))):
        raise DomainError("non-finite position or velocity")
    a, b = 2 * np.abs(x), np.abs(v)
    c = 1.0 + b * b
    rational = 2.0 / (c * c + 4 * a * a)
    value, mag = _log_arctan(a, b, magnitude=True)
    k = 2.0 / np.pi ** 2 * (rational + value)
    out = 8 * _EPS * (2.0 / np.pi ** 2 * (rational + mag) + (1 + a + b) * np.abs(k))
    return out[()] if out.ndim == 0 else out


def first_term(x: float, v: float) -> float:
    """Rational term in front of the w-integral of the one-integral form."""
    a, b = 2 * abs(x), abs(v)
    return 2 / np.pi ** 2 * (1 + a * a - b * b) / ((1 + (a + b) ** 2) * (1 + (a - b) ** 2))


def _semi_integrand(w, a, b):
    u = (w * w + 1) ** 2
    z = 4 * (a + b * w) ** 2
    return (u - z) / (u + z) ** 2


def k_half_semi(x: float, v: float, q=None, full_output: bool = False):
    """k_{1/2}(x, v) from the rational term plus a w-integral over [-1, 1].

    The integral is done with adaptive Gauss-Kronrod (scipy ``quad``). With
    ``full_output`` the pair (value, error estimate) is returned, the error
    being the ``quad`` estimate plus rounding of the rational term.

    Raises
    ------
    ConvergenceError
        If ``quad`` reports an error above the requested tolerance.
    """
    abs_tol = 1e-14 if q is None else min(q.abs_tol, 1e-14)
    rel_tol = 1e-12 if q is None else min(q.rel_tol, 1e-12)
    a, b = 2 * abs(float(x)), abs(float(v))
    # the integrand turns sign where a + b w = +-(w^2+1)/2; split there
    pts = []
    for sgn in (1.0, -1.0):
        # roots of w^2 - 2 sgn b w + 1 - 2 sgn a
        disc = b * b - (1 - 2 * sgn * a)
        if disc >= 0:
            for r in (sgn * b - math.sqrt(disc), sgn * b + math.sqrt(disc)):
                if -1 < r < 1:
                    pts.append(r)
    val, err = quad(_semi_integrand, -1.0, 1.0, args=(a, b), epsabs=abs_tol, epsrel=rel_tol,
                    limit=400, points=sorted(pts) or None)
    if err > max(1e3 * abs_tol, 1e3 * rel_tol * abs(val)):
        raise ConvergenceError("w-integral did not converge", partial=val, error=err)
    ft = first_term(x, v)
    value = ft + 4 / np.pi ** 2 * val
    if full_output:
        return value, 4 / np.pi ** 2 * err + 8 * _EPS * (abs(ft) + abs(value))
    return value


def F_integrand(args: AppendixArgs, x):
    """``F_{a,b}(x) = 2((x^2+1)^2 - 4(a+bx)^2) / ((x^2+1)^2 + 4(a+bx)^2)^2``."""
    return 2 * _semi_integrand(np.asarray(x, dtype=float), args.a, args.b)


def F_closed(args: AppendixArgs) -> float:
    """Closed form of ``int_{-1}^1 F_{a,b}``.

    At a = 0 the logarithm vanishes identically, so the limit is continuous
    and needs no separate branch.

    Examples
    --------
    >>> round(F_closed(AppendixArgs(0.0, 0.0)), 12) == round(1 + math.pi / 2, 12)
    True
    """
    a, b = float(args.a), float(args.b)
    c = 1 + b * b
    a2 = a * a
    rational = ((c - a2) * c * c - 2 * a2 * a2) / ((c * c + 4 * a2) * (a2 * a2 - 2 * a2 * (b * b - 1) + c * c))
    return float(rational + _log_arctan(a, b))
