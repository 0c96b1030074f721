"""
Level-set measures of the difference-quotient kernel on Omega x Omega.

For a field u on a domain Omega the kernel is

    T(x, y) = |u(y) - u(x)|^q / |y - x|^{r + N}

(or F(|u(y) - u(x)| / |y - x|) / |y - x|^N for a general F) and the tail
profile is mu(s) = L^{2N}({(x, y) in Omega x Omega : T(x, y) > s}) on a
geometric grid of thresholds.

Monte Carlo estimator
---------------------
A pair is drawn as x ~ U(Omega), y = x + t n with n uniform on the sphere
and t from a radial mixture: with probability (1/N)/(1/N + L) volume-uniform
in the ball of radius t_min, otherwise log-uniform on [t_min, t_max], where
L = ln(t_max / t_min).  The importance weight

    w = V |S^{N-1}| (1/N + L) max(t, t_min)^N

makes ``w * 1[y in Omega] * 1[T > s]`` unbiased for mu(s) with no radial
truncation below t_min.  t_max is the radius beyond which T <= s_min is
guaranteed by the field's Lipschitz or oscillation bound, and t_min the
same radius for s_max, so every decade of s gets a comparable share of
samples.  All thresholds are evaluated on one pair stream, which makes the
raw estimate monotone in s by construction.
"""

import math
from dataclasses import asdict, dataclass, field as dc_field

import numpy as np

from .constants import sphere_surface_area
from .fields import FSpec
from .streams import block_counts, map_blocks, sphere_directions, substream
from .summary import DEFAULT_PLATEAU_TOL, plateau_summary

__all__ = [
    "SGrid",
    "SamplerConfig",
    "TailProfile",
    "tail_measure_profile",
    "f_tail_profile",
    "tail_measure_exact_grid",
    "tail_summary",
    "level_set_radius",
    "InsufficientBudgetError",
    "ShellUnderflowError",
    "MIN_PAIR_BUDGET",
    "MAX_ORACLE_NODES",
]

MIN_PAIR_BUDGET = 10_000
MAX_ORACLE_NODES = 20_000
_PROBE_POINTS = 100_000
_MIN_SHELL_FRACTION = 1e-6


class InsufficientBudgetError(ValueError):
    pass


class ShellUnderflowError(ValueError):
    pass


@dataclass(frozen=True)
class SGrid:
    """Geometric thresholds s_min * 10^{k / per_decade} up to s_max."""

    s_min: float
    s_max: float
    per_decade: int = 4

    def values(self):
        if not (0 < self.s_min < self.s_max):
            raise ValueError("s-grid requires 0 < s_min < s_max")
        k = int(math.floor(self.per_decade * math.log10(self.s_max / self.s_min) + 1e-9))
        return self.s_min * 10.0 ** (np.arange(k + 1) / self.per_decade)


@dataclass(frozen=True)
class SamplerConfig:
    pairs: int = 1_000_000
    seed: int = 0
    block_size: int = 1 << 16
    workers: int = 1


@dataclass
class TailProfile:
    s_grid: np.ndarray
    mu_hat: np.ndarray
    ci_halfwidth: np.ndarray
    s_mu: np.ndarray
    sample_count: int
    estimator: str
    seed: int = None
    meta: dict = dc_field(default_factory=dict)

    @property
    def s_mu_ci(self):
        return self.s_grid * self.ci_halfwidth

    def rows(self):
        return zip(self.s_grid, self.mu_hat, self.ci_halfwidth, self.s_mu)

    def to_dict(self):
        d = asdict(self)
        for k in ("s_grid", "mu_hat", "ci_halfwidth", "s_mu"):
            d[k] = [float(v) for v in d[k]]
        return d


# level-set geometry ------------------------------------------------------------

def _osc_bound(field, domain, seed):
    b = field.osc_bound()
    if b is not None:
        return b
    # no analytic bound: 2 sup|u| over probe points
    rng = substream(seed, "probe")
    pts = domain.sample(rng, _PROBE_POINTS)
    return 2.0 * float(np.max(np.linalg.norm(field.value(pts), axis=1)))


def level_set_radius(s, N, q, r, lip=None, osc=None, cap=None):
    """
    Radius R(s) with T(x, y) > s  =>  |y - x| < R(s).

    ``lip`` and ``osc`` bound |u(y) - u(x)| by lip |y - x| and by osc; ``cap``
    bounds F in the general-F kernel (in which case r must equal q).  Returns
    inf when no bound applies.
    """
    s = np.asarray(s, dtype=float)
    R = np.full(s.shape, np.inf)
    with np.errstate(divide="ignore"):
        if lip is not None and r + N - q > 0:
            R = np.minimum(R, (lip ** q / s) ** (1.0 / (r + N - q)))
        if osc is not None:
            R = np.minimum(R, (osc ** q / s) ** (1.0 / (r + N)))
        if cap is not None:
            R = np.minimum(R, (cap / s) ** (1.0 / N))
    return R


def _zero_profile(s, pairs, estimator, seed, meta):
    z = np.zeros_like(s)
    return TailProfile(s, z, z.copy(), z.copy(), int(pairs), estimator, seed, meta)


def _finish(s, S1, S2, n, estimator, seed, meta):
    raw = S1 / n
    var = np.maximum(S2 / n - raw ** 2, 0.0)
    ci = 3.0 * np.sqrt(var / n)
    mu = np.minimum.accumulate(raw)
    meta = dict(meta, raw_max_violation=float(np.max(raw - mu)))
    return TailProfile(s, mu, ci, s * mu, int(n), estimator, seed, meta)


def _mc_profile(field, domain, kernel, s, R, sampler, label, extra_meta):
    N = domain.dim
    if field.dim != N:
        raise ValueError("field and domain dimensions differ")
    if sampler.pairs < MIN_PAIR_BUDGET:
        raise InsufficientBudgetError(
            f"pair budget {sampler.pairs} below the minimum {MIN_PAIR_BUDGET}")
    diam = domain.diameter()
    meta = dict(extra_meta, kind=label)
    if R is None:
        return _zero_profile(s, sampler.pairs, "monte-carlo", sampler.seed, meta)
    t_max = min(diam, float(R[0]))
    t_min = float(R[-1])
    if t_min < _MIN_SHELL_FRACTION * diam:
        raise ShellUnderflowError(
            f"shell radius {t_min:.3g} for s_max={s[-1]:.3g} is below "
            f"{_MIN_SHELL_FRACTION:g} * diam; lower s_max")
    t_min = min(t_min, t_max)
    L = math.log(t_max / t_min)
    p_in = (1.0 / N) / (1.0 / N + L)
    w_scale = domain.volume() * sphere_surface_area(N) * (1.0 / N + L)
    meta.update(t_min=t_min, t_max=t_max)
    K = len(s)

    def block(b, n):
        rng = substream(sampler.seed, "tail", b)
        x = domain.sample(rng, n)
        inner = rng.random(n) < p_in
        v = rng.random(n)
        t = np.where(inner, t_min * v ** (1.0 / N), t_min * np.exp(L * v))
        dirs = sphere_directions(rng, n, N)
        y = x + t[:, None] * dirs
        ok = domain.contains(y)
        T = kernel(field.value(y[ok]) - field.value(x[ok]), t[ok])
        w = w_scale * np.maximum(t[ok], t_min) ** N
        k = np.searchsorted(s, T, side="left")
        a1 = np.bincount(k, weights=w, minlength=K + 1)
        a2 = np.bincount(k, weights=w * w, minlength=K + 1)
        # sample with k thresholds below T hits s_0 .. s_{k-1}
        S1 = np.cumsum(a1[::-1])[::-1][1:]
        S2 = np.cumsum(a2[::-1])[::-1][1:]
        return S1, S2

    parts = map_blocks(block, block_counts(sampler.pairs, sampler.block_size), sampler.workers)
    S1 = np.zeros(K)
    S2 = np.zeros(K)
    for a, b in parts:
        S1 += a
        S2 += b
    return _finish(s, S1, S2, sampler.pairs, "monte-carlo", sampler.seed, meta)


def _check_qr(q, r):
    if not q >= 1:
        raise ValueError("q must be >= 1")
    if not r > 0:
        raise ValueError("r must be > 0")


def tail_measure_profile(field, domain, q, r, s_grid, sampler=SamplerConfig()):
    """
    Monte Carlo tail profile of |u(y) - u(x)|^q / |y - x|^{r + N}.

    Returns a :class:`TailProfile` in L^{2N} units with 3-sigma half-widths.
    """
    _check_qr(q, r)
    N = domain.dim
    s = s_grid.values() if isinstance(s_grid, SGrid) else np.asarray(s_grid, dtype=float)
    lip = field.lipschitz_bound()
    osc = None if (lip is not None and r + N - q > 0) else _osc_bound(field, domain, sampler.seed)
    meta = {"q": q, "r": r, "lipschitz": lip, "osc": osc}
    if lip == 0.0 or osc == 0.0:
        return _zero_profile(s, sampler.pairs, "monte-carlo", sampler.seed, meta)
    R = level_set_radius(s, N, q, r, lip=lip, osc=osc)
    p = r + N

    def kernel(du, t):
        return np.linalg.norm(du, axis=1) ** q / t ** p

    return _mc_profile(field, domain, kernel, s, R, sampler, "power", meta)


def f_tail_profile(field, domain, f, s_grid, sampler=SamplerConfig()):
    """Tail profile of F(|u(y) - u(x)| / |y - x|) / |y - x|^N."""
    if not isinstance(f, FSpec):
        raise TypeError("f must be an FSpec")
    N = domain.dim
    s = s_grid.values() if isinstance(s_grid, SGrid) else np.asarray(s_grid, dtype=float)
    q = f.q
    lip = field.lipschitz_bound()
    osc = None if (lip is not None and N > 0) else _osc_bound(field, domain, sampler.seed)
    meta = {"q": q, "cap": f.cap, "lipschitz": lip, "osc": osc}
    if lip == 0.0 or osc == 0.0 or f.cap == 0.0:
        return _zero_profile(s, sampler.pairs, "monte-carlo", sampler.seed, meta)
    R = level_set_radius(s, N, q, q, lip=lip, osc=osc, cap=f.cap)

    def kernel(du, t):
        return f(np.linalg.norm(du, axis=1) / t) / t ** N

    return _mc_profile(field, domain, kernel, s, R, sampler, "F", meta)


def tail_measure_exact_grid(field, q, r, s_grid, symmetric=False, chunk=256):
    """
    Exact discrete tail measure of a grid field.

    Every ordered pair of distinct nodes is enumerated and weighted by
    h^{2N}; nothing is interpolated.  With ``symmetric`` only i < j is
    enumerated and counts are doubled (same output).
    """
    _check_qr(q, r)
    if field.kind != "grid":
        raise TypeError("exact oracle requires a grid field")
    s = s_grid.values() if isinstance(s_grid, SGrid) else np.asarray(s_grid, dtype=float)
    X = field.nodes
    V = field.node_values
    M, N = X.shape
    if M > MAX_ORACLE_NODES:
        raise InsufficientBudgetError(f"{M} nodes exceed the oracle limit {MAX_ORACLE_NODES}")
    K = len(s)
    counts = np.zeros(K + 1, dtype=np.int64)
    p = r + N
    for i0 in range(0, M, chunk):
        i1 = min(M, i0 + chunk)
        j0 = i0 + 1 if symmetric else 0
        Xj, Vj = X[j0:], V[j0:]
        d = np.sqrt(np.sum((X[i0:i1, None, :] - Xj[None, :, :]) ** 2, axis=-1))
        du = np.sqrt(np.sum((V[i0:i1, None, :] - Vj[None, :, :]) ** 2, axis=-1))
        keep = d > 0
        if symmetric:
            # j > i within the chunk
            ii = np.arange(i0, i1)[:, None]
            jj = np.arange(j0, M)[None, :]
            keep &= jj > ii
        T = du[keep] ** q / d[keep] ** p
        counts += np.bincount(np.searchsorted(s, T, side="left"), minlength=K + 1)
    if symmetric:
        counts *= 2
    hits = np.cumsum(counts[::-1])[::-1][1:]
    mu = hits * field.h ** (2 * N)
    z = np.zeros(K)
    meta = {"q": q, "r": r, "nodes": int(M), "spacing": field.h, "pair_counts": hits.tolist()}
    return TailProfile(s, mu, z, s * mu, int(M) * (int(M) - 1), "exact-grid", None, meta)


def tail_summary(profile, tol=DEFAULT_PLATEAU_TOL, min_decades=1.0):
    """sup / limsup / liminf of s * mu(s) from the trailing plateau of the profile."""
    if len(profile.s_grid) < 8:
        raise ValueError("tail summary needs at least 8 thresholds")
    return plateau_summary(profile.s_grid, profile.s_mu, profile.s_mu_ci, tol, min_decades)
