"""Gauss rules on panels, shared by the quadrature code of every module."""

from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi


@lru_cache(maxsize=None)
def gauss_legendre(n: int):
    """Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@lru_cache(maxsize=None)
def _jacobi(n: int, beta: float):
    x, w = roots_jacobi(n, 0.0, beta)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def jacobi_panel(h: float, beta: float, n: int = 16):
    """Rule for ``int_0^h f(t) dt`` when f behaves like ``t**beta`` at 0.

    Returns plain nodes and weights: the weight function is folded into the
    weights, so the rule is applied to f itself.
    """
    x, w = _jacobi(n, float(beta))
    t = 0.5 * h * (1.0 + x)
    return t, w * (0.5 * h) ** (beta + 1.0) / t ** beta


def panel_rule(edges, n: int = 16):
    """Composite Gauss-Legendre rule on consecutive panels.

    Parameters
    ----------
    edges : array_like
        Increasing panel boundaries.
    n : int
        Nodes per panel.

    Returns
    -------
    nodes, weights : ndarray of shape (npanels, n)
    """
    edges = np.asarray(edges, dtype=float)
    a, b = edges[:-1], edges[1:]
    x, w = gauss_legendre(n)
    half = 0.5 * (b - a)[:, None]
    return a[:, None] + half * (x + 1.0), half * w


def graded_edges(a: float, b: float, ratio: float, levels: int, toward: str = "b"):
    """Boundaries on [a, b] refined geometrically toward one endpoint.

    The panel touching the chosen endpoint has length ``(b - a) * ratio**levels``.
    """
    fr = (b - a) * ratio ** np.arange(1, levels + 1)
    inner = b - fr if toward == "b" else a + fr
    return np.concatenate(([a], np.sort(inner), [b]))


@lru_cache(maxsize=None)
def _legendre_tail_matrix(n: int):
    # rows give the two highest Legendre coefficients from the values at the GL nodes
    x, w = gauss_legendre(n)
    rows = []
    for k in (n - 2, n - 1):
        c = np.zeros(k + 1)
        c[k] = 1.0
        rows.append((2 * k + 1) / 2.0 * w * np.polynomial.legendre.legval(x, c))
    m = np.array(rows)
    m.setflags(write=False)
    return m


def panel_error(values, weights, noise: float = 0.0, split: bool = False):
    """Spectral error proxy of a composite Gauss rule.

    Uses the size of the two highest Legendre coefficients of the integrand
    on every panel, scaled by the panel length. The proxy is pessimistic for
    analytic integrands, whose true Gauss error is far smaller.

    Parameters
    ----------
    values : ndarray of shape (npanels, n)
    weights : ndarray of shape (npanels, n)
        The weights of ``panel_rule``; only their row sums are used.
    noise : float
        Relative accuracy of the values. Tail coefficients below
        ``noise * max|f|`` on a panel cannot be told apart from rounding and
        are booked as rounding error.
    split : bool
        Return ``(truncation, rounding)`` instead of their sum.
    """
    n = values.shape[-1]
    coef = values @ _legendre_tail_matrix(n).T
    length = weights.sum(axis=-1)
    tail = length * np.abs(coef).sum(axis=-1)
    floor = length * noise * np.abs(values).max(axis=-1)
    trunc = float(np.sum(np.maximum(tail - floor, 0.0)))
    rnd = float(np.sum(np.minimum(tail, floor)))
    return (trunc, rnd) if split else trunc + rnd
