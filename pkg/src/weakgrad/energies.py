"""
Local energies: int |grad u|^q, the total variation and the jump energy.

Infinite energies are returned as a tagged marker (``infinite=True``,
``value=None``) so callers compare against them symbolically.
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .constants import unit_ball_volume
from .directional import QuadConfig
from .domains import Ball, Box, BoxMinusBox
from .fields import gradient
from .quadrature import gauss_box_rule, quad_interval, sphere_rule
from .streams import block_counts, map_blocks, substream

__all__ = [
    "EnergyValue",
    "sobolev_energy",
    "total_variation",
    "jump_energy",
    "hyperplane_section",
    "sphere_f_energy",
]


@dataclass(frozen=True)
class EnergyValue:
    kind: str
    value: float
    method: str
    ci_halfwidth: float = None
    infinite: bool = False

    @classmethod
    def inf(cls, kind, reason):
        return cls(kind, None, reason, None, True)

    def scaled(self, factor):
        if self.infinite:
            return self
        ci = None if self.ci_halfwidth is None else abs(factor) * self.ci_halfwidth
        return EnergyValue(self.kind, factor * self.value, self.method, ci)

    def to_dict(self):
        return {"kind": self.kind, "value": "+inf" if self.infinite else self.value,
                "method": self.method, "ci_halfwidth": self.ci_halfwidth,
                "infinite": self.infinite}


def _radial_gradient_integrable(field, q, N):
    # |grad u| ~ r^{p - 1} near the centre
    return (field.power - 1.0) * q > -N


def _integrand(field, q, fd_step):
    def g(pts):
        norm, _ = gradient(field, pts, fd_step)
        return norm ** q
    return g


# beyond this many kinks (grid fields) a Gauss rule per cell beats adaptive quadrature
_MAX_ADAPTIVE_BREAKPOINTS = 64


def _integrate(g, domain, quad, breakpoints):
    """Integral of a vectorised g over the domain; returns (value, ci, method)."""
    if isinstance(domain, Box):
        if domain.dim == 1 and len(breakpoints[0]) <= _MAX_ADAPTIVE_BREAKPOINTS:
            val, err = quad_interval(lambda t: float(g(np.array([[t]]))[0]),
                                     domain.lo[0], domain.hi[0], breakpoints[0])
            return val, 3.0 * err, "quadrature"
        nodes, w = gauss_box_rule(domain.lo, domain.hi, quad.panels, quad.order, breakpoints)
        return float(np.dot(w, g(nodes))), 0.0, "quadrature"
    if isinstance(domain, BoxMinusBox):
        outer, _, _ = _integrate(g, domain.outer, quad, breakpoints)
        lo = np.maximum(domain.outer.lo, domain.hole.lo)
        hi = np.minimum(domain.outer.hi, domain.hole.hi)
        if np.any(hi <= lo):
            return outer, 0.0, "quadrature"
        cut, _, _ = _integrate(g, Box(lo, hi), quad, breakpoints)
        return outer - cut, 0.0, "quadrature"

    def block(b, n):
        v = g(domain.sample(substream(quad.seed, "energy", b), n))
        return v.sum(), (v * v).sum()

    parts = map_blocks(block, block_counts(quad.samples, quad.block_size), quad.workers)
    n = quad.samples
    mean = sum(p[0] for p in parts) / n
    var = max(sum(p[1] for p in parts) / n - mean * mean, 0.0)
    V = domain.volume()
    return float(V * mean), float(3.0 * V * math.sqrt(var / n)), "monte-carlo"


def sobolev_energy(field, domain, q, quad=QuadConfig(), fd_step=None):
    """
    int_Omega |grad u|^q dx (Frobenius norm for vector fields).

    Linear and constant fields are analytic.  Fields with a jump, and
    radial singularities whose gradient is not q-integrable, give the
    infinite marker.  Everything else is integrated numerically;
    ``fd_step`` switches the gradient to central differences.
    """
    if not q >= 1:
        raise ValueError("q must be >= 1")
    if field.jump is not None:
        return EnergyValue.inf("sobolev", "jump set present")
    if field.lipschitz_bound() == 0.0:
        return EnergyValue("sobolev", 0.0, "analytic")
    if field.kind == "linear":
        norm, _ = gradient(field, np.zeros(field.dim))
        return EnergyValue("sobolev", norm ** q * domain.volume(), "analytic")
    if field.kind in ("cusp", "power-singularity") and not _radial_gradient_integrable(field, q, field.dim):
        return EnergyValue.inf("sobolev", "gradient not q-integrable at the singularity")
    bps = field.axis_breakpoints() or [np.empty(0)] * field.dim
    if field.kind == "grid" and fd_step is None:
        fd_step = 1e-4 * field.h
    val, ci, method = _integrate(_integrand(field, q, fd_step), domain, quad, bps)
    if fd_step is not None:
        method = "finite-difference"
    return EnergyValue("sobolev", val, method, ci)


def hyperplane_section(domain, normal, offset):
    """H^{N-1} of {x : x . normal = offset} inside the domain (unit normal)."""
    nu = np.asarray(normal, dtype=float)
    N = domain.dim
    if N == 1:
        x = np.array([offset / nu[0]])
        return 1.0 if domain.contains(x) else 0.0
    if isinstance(domain, Ball):
        d = abs(offset - float(nu @ domain.center))
        if d >= domain.radius:
            return 0.0
        return unit_ball_volume(N - 1) * (domain.radius ** 2 - d ** 2) ** ((N - 1) / 2.0)
    if isinstance(domain, BoxMinusBox):
        hole = _clip_box(domain.hole, domain.outer)
        cut = 0.0 if hole is None else hyperplane_section(hole, nu, offset)
        return hyperplane_section(domain.outer, nu, offset) - cut
    if isinstance(domain, Box):
        return _box_section(domain, nu, offset)
    raise TypeError(f"unsupported domain {domain!r}")


def _clip_box(box, outer):
    lo = np.maximum(box.lo, outer.lo)
    hi = np.minimum(box.hi, outer.hi)
    return None if np.any(hi <= lo) else Box(lo, hi)


def _box_section(box, nu, c):
    axis = np.flatnonzero(nu != 0)
    if axis.size == 1:
        i = int(axis[0])
        x = c / nu[i]
        if not box.lo[i] < x < box.hi[i]:
            return 0.0
        return float(np.prod(np.delete(box.hi - box.lo, i)))
    if box.dim == 2:
        # clip the line p0 + t * tangent against the rectangle
        tangent = np.array([-nu[1], nu[0]])
        p0 = c * nu
        t_lo, t_hi = -math.inf, math.inf
        for k in range(2):
            if tangent[k] == 0.0:
                if not box.lo[k] < p0[k] < box.hi[k]:
                    return 0.0
                continue
            a = (box.lo[k] - p0[k]) / tangent[k]
            b = (box.hi[k] - p0[k]) / tangent[k]
            t_lo, t_hi = max(t_lo, min(a, b)), min(t_hi, max(a, b))
        return max(0.0, t_hi - t_lo)
    raise NotImplementedError("oblique hyperplane sections are supported for N <= 2 only")


def total_variation(field, domain, quad=QuadConfig()):
    """||Du||(Omega): the q = 1 Sobolev energy, or |jump| times the section measure."""
    if field.jump is not None:
        j = field.jump
        return EnergyValue("total-variation", j.jump_norm * hyperplane_section(domain, j.normal, j.offset),
                           "analytic")
    e = sobolev_energy(field, domain, 1.0, quad)
    if e.infinite:
        return EnergyValue.inf("total-variation", e.method)
    return EnergyValue("total-variation", e.value, e.method, e.ci_halfwidth)


def jump_energy(field, domain, q):
    """int_{J_u cap Omega} |u+ - u-|^q dH^{N-1} for a single planar jump."""
    if field.jump is None:
        raise ValueError(f"{field.kind} field has no jump set")
    if not q >= 1:
        raise ValueError("q must be >= 1")
    if q == 1:
        warnings.warn("jump limits assume q > 1", stacklevel=2)
    j = field.jump
    return EnergyValue("jump", j.jump_norm ** q * hyperplane_section(domain, j.normal, j.offset), "analytic")


def sphere_f_energy(field, domain, f, quad=QuadConfig()):
    """
    int_Omega int_{S^{N-1}} F(|grad u(x)| |z_1|) dH^{N-1}(z) dx.

    The sphere integral uses the deterministic sphere rule; the spatial
    integral follows :func:`sobolev_energy`.
    """
    if field.jump is not None:
        return EnergyValue.inf("sphere-F", "jump set present")
    z, w = sphere_rule(field.dim, quad.sphere_resolution)
    z1 = np.abs(z[:, 0])

    def g(pts):
        norm, _ = gradient(field, pts)
        return f(norm[:, None] * z1[None, :]) @ w

    bps = field.axis_breakpoints() or [np.empty(0)] * field.dim
    val, ci, method = _integrate(g, domain, quad, bps)
    return EnergyValue("sphere-F", val, method, ci)
