"""Deterministic integration rules on boxes and on low-dimensional spheres."""

import math

import numpy as np
from scipy import integrate

__all__ = ["panel_edges", "gauss_box_rule", "quad_interval", "sphere_rule"]


def panel_edges(a, b, panels, breakpoints=()):
    edges = np.linspace(a, b, int(panels) + 1)
    bp = np.asarray(breakpoints, dtype=float)
    bp = bp[(bp > a) & (bp < b)]
    return np.unique(np.concatenate([edges, bp]))


def gauss_box_rule(lo, hi, panels=8, order=8, breakpoints=None):
    """
    Tensor composite Gauss-Legendre rule on the box [lo, hi].

    Panel edges on axis i are a uniform partition plus ``breakpoints[i]``,
    so integrands that are smooth between breakpoints converge at the
    Gauss rate.  Returns (nodes, weights).
    """
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    gx, gw = np.polynomial.legendre.leggauss(int(order))
    axes_x, axes_w = [], []
    for i in range(lo.size):
        bp = () if breakpoints is None else breakpoints[i]
        e = panel_edges(lo[i], hi[i], panels, bp)
        mid = 0.5 * (e[1:] + e[:-1])
        half = 0.5 * (e[1:] - e[:-1])
        axes_x.append((mid[:, None] + half[:, None] * gx[None, :]).ravel())
        axes_w.append((half[:, None] * gw[None, :]).ravel())
    mesh = np.meshgrid(*axes_x, indexing="ij")
    wmesh = np.meshgrid(*axes_w, indexing="ij")
    nodes = np.stack([m.ravel() for m in mesh], axis=1)
    weights = np.prod(np.stack([w.ravel() for w in wmesh], axis=1), axis=1)
    return nodes, weights


_MAX_QUAD_POINTS = 200


def quad_interval(f, a, b, points=()):
    """Adaptive 1D integral of a scalar function with known rough points; (value, abserr)."""
    pts = sorted(p for p in points if a < p < b)
    # quadpack accepts fewer break points than its subinterval limit; chunk long lists
    edges = [a] + pts[_MAX_QUAD_POINTS::_MAX_QUAD_POINTS + 1] + [b]
    val = err = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        inner = [p for p in pts if lo < p < hi]
        v, e = integrate.quad(f, lo, hi, points=inner or None, limit=500,
                              epsabs=1e-13, epsrel=1e-11)
        val += v
        err += e
    return float(val), float(err)


def sphere_rule(N, resolution=256):
    """
    Deterministic nodes and weights on S^{N-1} for N <= 3.

    N = 1: the two points +-1 (exact).  N = 2: ``resolution`` equispaced
    angles (periodic trapezoid).  N = 3: Gauss-Legendre in the polar
    cosine times trapezoid in the azimuth.
    """
    if N == 1:
        return np.array([[1.0], [-1.0]]), np.array([1.0, 1.0])
    if N == 2:
        th = 2.0 * math.pi * np.arange(resolution) / resolution
        return np.column_stack([np.cos(th), np.sin(th)]), np.full(resolution, 2.0 * math.pi / resolution)
    if N == 3:
        m = max(4, int(round(math.sqrt(resolution / 2.0))))
        z, wz = np.polynomial.legendre.leggauss(m)
        phi = 2.0 * math.pi * np.arange(2 * m) / (2 * m)
        Z, P = np.meshgrid(z, phi, indexing="ij")
        rho = np.sqrt(1.0 - Z ** 2)
        nodes = np.stack([Z.ravel(), (rho * np.cos(P)).ravel(), (rho * np.sin(P)).ravel()], axis=1)
        weights = (wz[:, None] * np.full(2 * m, 2.0 * math.pi / (2 * m))[None, :]).ravel()
        return nodes, weights
    raise ValueError("sphere_rule supports N <= 3")
