"""Damped Fourier transforms of ``u^p exp(-u^(2s))`` along a rotated ray.

Every kernel evaluation in the package reduces to one-dimensional integrals

    T_p(y) = int_0^inf u^p exp(i y u) exp(-u^(2s)) du,    y >= 0.

On the real axis they oscillate without decaying fast enough for
Gauss rules. The integrand is analytic in the sector between the real axis
and the ray u = r exp(i theta), where both factors decay, so the contour is
rotated onto that ray. There ``exp(i y u)`` gains the damping
``exp(-y r sin theta)``, and the number of oscillations before the integrand
becomes negligible is bounded independently of y.
"""

from functools import lru_cache

import numpy as np

from .quadrature import gauss_legendre, jacobi_panel

# exponent at which the damped integrand is treated as zero
_CUTOFF = 40.0
_CHUNK = 1 << 20


def ray_angle(s: float) -> float:
    """Rotation angle: half the largest angle keeping exp(-u^(2s)) decaying."""
    return 0.5 * min(np.pi / 2, np.pi / (4 * s))


@lru_cache(maxsize=256)
def _tau_rule(s: float, beta: float, safety: float):
    # normalized variable tau = r / L(y); beta is the leading power at tau = 0
    h0 = 1e-15 if beta <= 0 else 10.0 ** (-15.0 / (1.0 + beta))
    # at y = 0 the integrand is tau^beta exp(-tau^(2s)); with X = tau^(2s) the
    # cut needs X - (beta+1)/(2s) log X above the cutoff
    k = max(beta + 1.0, 0.0) / (2 * s)
    big = _CUTOFF
    for _ in range(60):
        big = _CUTOFF + k * np.log(big)
    top = safety * max(2 * _CUTOFF, 2.0 * big ** (1.0 / (2 * s)))
    t0, w0 = jacobi_panel(h0, beta, 16)
    edges = [h0]
    while edges[-1] < 1.0:
        edges.append(edges[-1] * 4.0)
    while edges[-1] < top:
        edges.append(edges[-1] * 2.0)
    edges = np.asarray(edges)
    x, w = gauss_legendre(16)
    a, b = edges[:-1], edges[1:]
    half = 0.5 * (b - a)[:, None]
    nodes = np.concatenate((t0, (a[:, None] + half * (x + 1)).ravel()))
    weights = np.concatenate((w0, (half * w).ravel()))
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def _scale(y, s, theta):
    a0 = np.cos(2 * s * theta) ** (1.0 / (2 * s))
    return 1.0 / (y * np.sin(theta) + a0)


def damped_transform(y, s: float, power: float = 0.0, part: str = "re", safety: float = 1.0):
    """Real or imaginary part of ``T_p(y)`` for y >= 0.

    Parameters
    ----------
    y : array_like
        Nonnegative frequencies.
    s : float
        Order in (0, 1).
    power : float
        Exponent p > -1 of the algebraic factor.
    part : {"re", "im"}
    safety : float
        Multiplier on the truncation point of the ray.

    Returns
    -------
    ndarray
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if np.any(y < 0):
        raise ValueError("damped_transform expects y >= 0")
    theta = ray_angle(s)
    tau, wt = _tau_rule(float(s), float(power), float(safety))
    rot_z = 1j * np.exp(1j * theta)
    rot_s = np.exp(2j * s * theta)
    phase = np.exp(1j * theta * (power + 1))
    out = np.empty(y.shape)
    flat = y.ravel()
    res = out.ravel()
    step = max(1, _CHUNK // tau.size)
    for i in range(0, flat.size, step):
        yc = flat[i:i + step]
        L = _scale(yc, s, theta)
        r = L[:, None] * tau
        z = rot_z * yc[:, None] * r - r ** (2 * s) * rot_s
        f = np.exp(z)
        if power != 0:
            f = f * r ** power
        val = phase * (f @ wt) * L
        res[i:i + step] = val.real if part == "re" else val.imag
    return res.reshape(y.shape)


def upper_tail(y, s: float, safety: float = 1.0):
    """``int_y^inf q_s(b) db`` for y >= 0 without cancellation.

    Integrating ``cos(b u)`` over b in (y, inf) produces ``i exp(i y u)/u``. Its
    pole at u = 0 contributes ``-theta/pi`` when the contour is rotated, and
    swapping the two integrals contributes the boundary value 1/2.
    """
    y = np.atleast_1d(np.asarray(y, dtype=float))
    theta = ray_angle(s)
    tau, wt = _tau_rule(float(s), 2 * s - 1.0, float(safety))
    rot_z = 1j * np.exp(1j * theta)
    rot_s = np.exp(2j * s * theta)
    out = np.empty(y.shape)
    flat = y.ravel()
    res = out.ravel()
    step = max(1, _CHUNK // tau.size)
    for i in range(0, flat.size, step):
        yc = flat[i:i + step]
        L = _scale(yc, s, theta)
        r = L[:, None] * tau
        z = rot_z * yc[:, None] * r - r ** (2 * s) * rot_s
        f = -np.exp(z.real) * np.sin(z.imag) / tau
        res[i:i + step] = 0.5 - theta / np.pi + (f @ wt) / np.pi
    out = out.reshape(y.shape)
    return np.where(y == 0, 0.5, out)
