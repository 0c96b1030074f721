"""
Sphere-averaged difference quotients and the annulus-mollifier functional.

The central quantity is

    D(eps, r) = int_{S^{N-1}} int_Omega chi_Omega(x + eps n)
                |u(x + eps n) - u(x)|^q / eps^r  dx dH^{N-1}(n),

evaluated with a deterministic sphere rule (N <= 2) and either a
breakpoint-aware Gauss rule on box domains or uniform Monte Carlo on the
domain.
"""

import math
from dataclasses import asdict, dataclass, field as dc_field

import numpy as np

from .constants import sphere_surface_area
from .domains import Box
from .quadrature import gauss_box_rule, quad_interval, sphere_rule
from .streams import block_counts, map_blocks, sphere_directions, substream
from .summary import DEFAULT_PLATEAU_TOL, plateau_summary

__all__ = [
    "EpsGrid",
    "QuadConfig",
    "Estimate",
    "DirectionalProfile",
    "BesovVerdict",
    "directional_functional",
    "directional_profile",
    "single_direction_functional",
    "bbm_mollifier_functional",
    "besov_diagnostic",
]


@dataclass(frozen=True)
class EpsGrid:
    """Decreasing eps_max * 10^{-k / per_decade} down to eps_min."""

    eps_max: float
    eps_min: float
    per_decade: int = 4

    def values(self):
        if not (0 < self.eps_min < self.eps_max):
            raise ValueError("eps-grid requires 0 < eps_min < eps_max")
        k = int(math.floor(self.per_decade * math.log10(self.eps_max / self.eps_min) + 1e-9))
        return self.eps_max * 10.0 ** (-np.arange(k + 1) / self.per_decade)


@dataclass(frozen=True)
class QuadConfig:
    """
    spatial: "auto", "gauss" (box domains) or "mc".  ``samples`` is the
    Monte Carlo budget, ``panels``/``order`` the composite Gauss rule per
    axis, ``sphere_resolution`` the number of angles for N = 2.
    """

    spatial: str = "auto"
    samples: int = 200_000
    panels: int = 8
    order: int = 8
    sphere_resolution: int = 256
    seed: int = 0
    block_size: int = 1 << 14
    workers: int = 1


@dataclass(frozen=True)
class Estimate:
    value: float
    ci: float = 0.0
    method: str = "quadrature"
    warning: str = None

    def __float__(self):
        return self.value


@dataclass
class DirectionalProfile:
    eps_grid: np.ndarray
    values: np.ndarray
    ci_halfwidth: np.ndarray
    q: float
    r: float
    meta: dict = dc_field(default_factory=dict)

    def summary(self, tol=DEFAULT_PLATEAU_TOL, min_decades=1.0):
        return plateau_summary(self.eps_grid, self.values, self.ci_halfwidth, tol, min_decades)

    def rows(self):
        return zip(self.eps_grid, self.values, self.ci_halfwidth)

    def to_dict(self):
        d = asdict(self)
        for k in ("eps_grid", "values", "ci_halfwidth"):
            d[k] = [float(v) for v in d[k]]
        return d


@dataclass
class BesovVerdict:
    bounded: bool
    trend_exponent: float
    profile: DirectionalProfile
    fit_window: tuple = ()


def _check_qr(q, r):
    if not q >= 1:
        raise ValueError("q must be >= 1")
    if not r >= 0:
        raise ValueError("r must be >= 0")


def _method(domain, field, quad):
    if quad.spatial == "mc":
        return "mc"
    box_ok = isinstance(domain, Box) and field.axis_breakpoints() is not None
    if quad.spatial == "gauss":
        if not box_ok:
            raise ValueError("gauss spatial rule needs a box domain and axis-aligned singular sets")
        return "gauss"
    return "gauss" if box_ok and domain.dim <= 2 else "mc"


def _diff_q(field, x, shift, q):
    du = field.value(x + shift) - field.value(x)
    return np.linalg.norm(du, axis=1) ** q


def _box_integral(field, lo, hi, shift, q, quad):
    """int_{[lo,hi]} |u(x + shift) - u(x)|^q dx by breakpoint-aware quadrature."""
    bps = field.axis_breakpoints()
    bps = [np.concatenate([b, b - shift[i]]) for i, b in enumerate(bps)]
    if len(lo) == 1:
        def f(x):
            xx = np.array([[x]])
            return float(_diff_q(field, xx, shift, q)[0])
        val, err = quad_interval(f, lo[0], hi[0], bps[0])
        return val, err
    nodes, w = gauss_box_rule(lo, hi, quad.panels, quad.order, bps)
    return float(np.dot(w, _diff_q(field, nodes, shift, q))), 0.0


def directional_functional(field, domain, q, r, eps, quad=QuadConfig()):
    """D(eps, r) as an :class:`Estimate` (3-sigma half-width for Monte Carlo)."""
    _check_qr(q, r)
    if not eps > 0:
        raise ValueError("eps must be positive")
    N = domain.dim
    if eps >= domain.diameter():
        return Estimate(0.0, 0.0, "exact", warning="eps >= diameter: chi vanishes identically")
    if field.lipschitz_bound() == 0.0:
        return Estimate(0.0, 0.0, "exact")
    scale = eps ** (-r)
    method = _method(domain, field, quad)
    if method == "gauss":
        dirs, wts = sphere_rule(N, quad.sphere_resolution)
        total, err = 0.0, 0.0
        for n, wn in zip(dirs, wts):
            shift = eps * n
            box = domain.shifted_overlap(shift)
            if box is None:
                continue
            v, e = _box_integral(field, box[0], box[1], shift, q, quad)
            total += wn * v
            err += wn * e
        return Estimate(scale * total, 3.0 * scale * err, "quadrature")
    return _mc_directional(field, domain, q, eps, scale, quad)


def _mc_directional(field, domain, q, eps, scale, quad):
    N = domain.dim
    V = domain.volume()
    if N <= 2:
        dirs, wts = sphere_rule(N, quad.sphere_resolution)
    omega = sphere_surface_area(N)

    def block(b, n):
        rng = substream(quad.seed, "directional", b)
        x = domain.sample(rng, n)
        g = np.zeros(n)
        if N <= 2:
            ux = field.value(x)
            for d, wd in zip(dirs, wts):
                y = x + eps * d
                ok = domain.contains(y)
                du = field.value(y[ok]) - ux[ok]
                g[ok] += wd * np.linalg.norm(du, axis=1) ** q
        else:
            d = sphere_directions(rng, n, N)
            y = x + eps * d
            ok = domain.contains(y)
            g[ok] = omega * _diff_q(field, x[ok], eps * d[ok], q)
        return g.sum(), (g * g).sum()

    return _mc_finish(map_blocks(block, block_counts(quad.samples, quad.block_size), quad.workers),
                      quad.samples, V * scale)


def _mc_finish(parts, n, factor):
    s1 = sum(p[0] for p in parts)
    s2 = sum(p[1] for p in parts)
    mean = s1 / n
    var = max(s2 / n - mean * mean, 0.0)
    return Estimate(float(factor * mean), float(3.0 * factor * math.sqrt(var / n)), "monte-carlo")


def directional_profile(field, domain, q, r, eps_grid, quad=QuadConfig()):
    """D(eps, r) over a decreasing eps grid; summarise with ``.summary()``."""
    eps = eps_grid.values() if isinstance(eps_grid, EpsGrid) else np.asarray(eps_grid, dtype=float)
    if np.any(np.diff(eps) >= 0):
        raise ValueError("eps grid must be strictly decreasing")
    if eps[0] >= domain.diameter():
        raise ValueError("eps grid must lie below the domain diameter")
    ests = [directional_functional(field, domain, q, r, e, quad) for e in eps]
    return DirectionalProfile(
        eps, np.array([e.value for e in ests]), np.array([e.ci for e in ests]), q, r,
        {"method": ests[0].method, "samples": quad.samples, "seed": quad.seed,
         "sphere_resolution": quad.sphere_resolution})


def single_direction_functional(field, inner, q, eps, direction, r=1.0, quad=QuadConfig()):
    """
    int_inner |u(x + eps k) - u(x)|^q / eps^r dx for one unit direction k.

    No indicator is applied: x + eps k may leave ``inner`` (the field is
    globally defined).
    """
    k = np.atleast_1d(np.asarray(direction, dtype=float))
    if abs(np.linalg.norm(k) - 1.0) > 1e-9:
        raise ValueError("direction must be a unit vector")
    if k.size != inner.dim:
        raise ValueError("direction dimension mismatch")
    _check_qr(q, r)
    scale = eps ** (-r)
    shift = eps * k
    method = _method(inner, field, quad)
    if method == "gauss":
        v, e = _box_integral(field, inner.lo, inner.hi, shift, q, quad)
        return Estimate(scale * v, 3.0 * scale * e, "quadrature")

    def block(b, n):
        rng = substream(quad.seed, "single-direction", b)
        g = _diff_q(field, inner.sample(rng, n), shift, q)
        return g.sum(), (g * g).sum()

    parts = map_blocks(block, block_counts(quad.samples, quad.block_size), quad.workers)
    return _mc_finish(parts, quad.samples, inner.volume() * scale)


def bbm_mollifier_functional(field, domain, q, eps, sigma, quad=QuadConfig()):
    """
    int int rho_eps(|y-x|) |u(y) - u(x)|^q / |y-x|^q dy dx for the annulus
    mollifier rho_eps(t) = 1[|t - eps| <= sigma] / (2 sigma |S^{N-1}| t^{N-1}).

    Sampling x ~ U(Omega), t ~ U[eps - sigma, eps + sigma], n ~ U(S^{N-1})
    folds the mollifier weight away: the integral is V * E[chi |du|^q / t^q].
    For N = 1 both directions are evaluated for every sample.
    """
    if not q >= 1:
        raise ValueError("q must be >= 1")
    if not (0 < sigma <= eps / 8.0):
        raise ValueError("sigma must satisfy 0 < sigma <= eps / 8")
    if eps + sigma >= domain.diameter():
        raise ValueError("eps + sigma must be below the domain diameter")
    N = domain.dim
    if field.lipschitz_bound() == 0.0:
        return Estimate(0.0, 0.0, "exact")

    def block(b, n):
        rng = substream(quad.seed, "mollifier", b)
        x = domain.sample(rng, n)
        t = eps - sigma + 2.0 * sigma * rng.random(n)
        if N == 1:
            ux = field.value(x)
            g = np.zeros(n)
            for sgn in (1.0, -1.0):
                y = x + sgn * t[:, None]
                ok = domain.contains(y)
                g[ok] += 0.5 * np.linalg.norm(field.value(y[ok]) - ux[ok], axis=1) ** q / t[ok] ** q
        else:
            d = sphere_directions(rng, n, N)
            y = x + t[:, None] * d
            ok = domain.contains(y)
            g = np.zeros(n)
            g[ok] = np.linalg.norm(field.value(y[ok]) - field.value(x[ok]), axis=1) ** q / t[ok] ** q
        return g.sum(), (g * g).sum()

    parts = map_blocks(block, block_counts(quad.samples, quad.block_size), quad.workers)
    return _mc_finish(parts, quad.samples, domain.volume())


def besov_diagnostic(field, domain, q, r, eps_grid, quad=QuadConfig(),
                     slope_tol=0.05, growth_factor=10.0, fit_decades=1.0):
    """
    Boundedness verdict for D(eps, r) as eps -> 0, for 0 < r < q.

    The log-log slope of D against eps is fitted over the trailing
    ``fit_decades``; the profile counts as bounded when the slope is at
    least ``-slope_tol`` and its last value is at most ``growth_factor``
    times the window median.
    """
    if not 0 < r < q:
        raise ValueError("Besov diagnostic needs 0 < r < q")
    eps = eps_grid.values() if isinstance(eps_grid, EpsGrid) else np.asarray(eps_grid, dtype=float)
    if len(eps) < 6:
        raise ValueError("eps grid too short for a trend fit (need >= 6 points)")
    prof = directional_profile(field, domain, q, r, eps, quad)
    le = np.log10(eps)
    win = np.flatnonzero(np.abs(le - le[-1]) <= fit_decades + 1e-9)
    vals = prof.values[win]
    pos = vals > 0
    if pos.sum() < 2:
        return BesovVerdict(True, 0.0, prof, (int(win[0]), len(eps)))
    slope = float(np.polyfit(le[win][pos], np.log10(vals[pos]), 1)[0])
    # D ~ eps^slope; a negative slope means growth as eps -> 0
    bounded = slope >= -slope_tol and prof.values[-1] <= growth_factor * float(np.median(vals))
    return BesovVerdict(bool(bounded), slope, prof, (int(win[0]), len(eps)))

