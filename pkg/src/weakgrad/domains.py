"""
Regions of R^N: boxes, balls, and a box with a box-shaped hole.

Membership is a strict test: boundary points count as outside, which is
harmless since every quantity downstream is an integral.
"""

import itertools

import numpy as np

from .constants import unit_ball_volume

__all__ = [
    "Domain",
    "Box",
    "Ball",
    "BoxMinusBox",
    "build_domain",
    "dist_to_complement",
    "sample_uniform",
    "NestingError",
]

_MAX_REJECTION_ROUNDS = 64


class NestingError(ValueError):
    """Raised when an inner region is not contained in the outer one."""


def _as_points(points, dim):
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[None, :]
    if pts.shape[-1] != dim:
        raise ValueError(f"point dimension {pts.shape[-1]} does not match domain dimension {dim}")
    return pts


class Domain:
    """Common interface; concrete kinds below."""

    kind = None
    is_convex = False

    @property
    def dim(self):
        raise NotImplementedError

    def contains(self, points):
        """Boolean mask (or scalar bool for a single point)."""
        pts = np.asarray(points, dtype=float)
        mask = self._contains(_as_points(pts, self.dim))
        return bool(mask[0]) if pts.ndim == 1 else mask

    def bounding_box(self):
        raise NotImplementedError

    def sample(self, rng, n):
        """``n`` points uniformly distributed on the domain."""
        lo, hi = self.bounding_box()
        out = np.empty((n, self.dim))
        filled = 0
        for _ in range(_MAX_REJECTION_ROUNDS):
            need = n - filled
            # oversample by the inverse acceptance ratio
            box_vol = float(np.prod(hi - lo))
            m = int(need * box_vol / self.volume() * 1.1) + 16
            cand = lo + (hi - lo) * rng.random((m, self.dim))
            cand = cand[self._contains(cand)][:need]
            out[filled:filled + len(cand)] = cand
            filled += len(cand)
            if filled == n:
                return out
        raise RuntimeError("rejection sampling did not fill the request")

    def to_spec(self):
        raise NotImplementedError


class Box(Domain):
    kind = "box"
    is_convex = True

    def __init__(self, lo, hi):
        self.lo = np.array(lo, dtype=float).ravel()
        self.hi = np.array(hi, dtype=float).ravel()
        if self.lo.shape != self.hi.shape or self.lo.size == 0:
            raise ValueError("box corners must be vectors of equal length")
        if not np.all(self.hi > self.lo):
            raise ValueError("box requires hi > lo on every axis")
        self.lo.flags.writeable = False
        self.hi.flags.writeable = False

    @property
    def dim(self):
        return self.lo.size

    def _contains(self, pts):
        return np.all((pts > self.lo) & (pts < self.hi), axis=-1)

    def volume(self):
        return float(np.prod(self.hi - self.lo))

    def diameter(self):
        return float(np.linalg.norm(self.hi - self.lo))

    def bounding_box(self):
        return self.lo, self.hi

    def sample(self, rng, n):
        return self.lo + (self.hi - self.lo) * rng.random((n, self.dim))

    def shifted_overlap(self, shift):
        """The box {x in Omega : x + shift in Omega}, or None when empty."""
        lo = np.maximum(self.lo, self.lo - shift)
        hi = np.minimum(self.hi, self.hi - shift)
        if np.any(hi <= lo):
            return None
        return lo, hi

    def to_spec(self):
        return {"kind": "box", "lo": self.lo.tolist(), "hi": self.hi.tolist()}

    def __repr__(self):
        return f"Box(lo={self.lo.tolist()}, hi={self.hi.tolist()})"


class Ball(Domain):
    kind = "ball"
    is_convex = True

    def __init__(self, center, radius):
        self.center = np.array(center, dtype=float).ravel()
        self.radius = float(radius)
        if self.center.size == 0:
            raise ValueError("ball center must be a non-empty vector")
        if not self.radius > 0:
            raise ValueError("ball radius must be positive")
        self.center.flags.writeable = False

    @property
    def dim(self):
        return self.center.size

    def _contains(self, pts):
        d2 = np.sum((pts - self.center) ** 2, axis=-1)
        return d2 < self.radius ** 2

    def volume(self):
        return unit_ball_volume(self.dim) * self.radius ** self.dim

    def diameter(self):
        return 2.0 * self.radius

    def bounding_box(self):
        return self.center - self.radius, self.center + self.radius

    def to_spec(self):
        return {"kind": "ball", "center": self.center.tolist(), "radius": self.radius}

    def __repr__(self):
        return f"Ball(center={self.center.tolist()}, radius={self.radius})"


class BoxMinusBox(Domain):
    """Outer box with a (closed) box removed; the canonical non-convex region."""

    kind = "box-minus-box"
    is_convex = False

    def __init__(self, outer, hole):
        self.outer = outer if isinstance(outer, Box) else Box(*outer)
        self.hole = hole if isinstance(hole, Box) else Box(*hole)
        if self.outer.dim != self.hole.dim:
            raise ValueError("outer box and hole must share a dimension")
        if self.volume() <= 0:
            raise ValueError("hole covers the outer box")

    @property
    def dim(self):
        return self.outer.dim

    def _contains(self, pts):
        in_hole = np.all((pts >= self.hole.lo) & (pts <= self.hole.hi), axis=-1)
        return self.outer._contains(pts) & ~in_hole

    def volume(self):
        lo = np.maximum(self.outer.lo, self.hole.lo)
        hi = np.minimum(self.outer.hi, self.hole.hi)
        cut = float(np.prod(np.clip(hi - lo, 0.0, None)))
        return self.outer.volume() - cut

    def diameter(self):
        # the closure is a union of grid-aligned boxes, so its extreme points
        # sit on the grid generated by both boxes' coordinates
        axes = [sorted({self.outer.lo[i], self.outer.hi[i],
                        min(max(self.hole.lo[i], self.outer.lo[i]), self.outer.hi[i]),
                        min(max(self.hole.hi[i], self.outer.lo[i]), self.outer.hi[i])})
                for i in range(self.dim)]
        cand = np.array(list(itertools.product(*axes)))
        open_hole = np.all((cand > self.hole.lo) & (cand < self.hole.hi), axis=-1)
        cand = cand[~open_hole]
        diff = cand[:, None, :] - cand[None, :, :]
        return float(np.sqrt(np.max(np.sum(diff ** 2, axis=-1))))

    def bounding_box(self):
        return self.outer.lo, self.outer.hi

    def to_spec(self):
        return {"kind": "box-minus-box",
                "lo": self.outer.lo.tolist(), "hi": self.outer.hi.tolist(),
                "hole_lo": self.hole.lo.tolist(), "hole_hi": self.hole.hi.tolist()}

    def __repr__(self):
        return f"BoxMinusBox(outer={self.outer!r}, hole={self.hole!r})"


def build_domain(spec):
    """Construct a domain from a plain dict (the config-file form)."""
    kind = spec.get("kind")
    if kind == "box":
        return Box(spec["lo"], spec["hi"])
    if kind == "ball":
        return Ball(spec["center"], spec["radius"])
    if kind == "box-minus-box":
        return BoxMinusBox(Box(spec["lo"], spec["hi"]), Box(spec["hole_lo"], spec["hole_hi"]))
    raise ValueError(f"unknown domain kind {kind!r}")


def sample_uniform(domain, rng, n=1):
    return domain.sample(rng, n)


def _box_box_gap(a, b):
    gap = np.maximum(0.0, np.maximum(a.lo - b.hi, b.lo - a.hi))
    return float(np.linalg.norm(gap))


def dist_to_complement(inner, outer):
    """
    Distance from ``inner`` to R^N minus ``outer``.

    Supported pairs: box/ball inside box/ball, and a box inside a
    box-minus-box.  Raises :class:`NestingError` when ``inner`` is not
    contained in the closure of ``outer``.
    """
    if inner.dim != outer.dim:
        raise NestingError("inner and outer dimensions differ")
    tiny = 1e-12
    if isinstance(outer, Box):
        ilo, ihi = inner.bounding_box()
        d = min(float(np.min(ilo - outer.lo)), float(np.min(outer.hi - ihi)))
    elif isinstance(outer, Ball):
        if isinstance(inner, Ball):
            d = outer.radius - float(np.linalg.norm(inner.center - outer.center)) - inner.radius
        elif isinstance(inner, Box):
            corners = np.array(list(itertools.product(*zip(inner.lo, inner.hi))))
            far = float(np.max(np.linalg.norm(corners - outer.center, axis=-1)))
            d = outer.radius - far
        else:
            raise NestingError(f"unsupported pair {inner.kind} in {outer.kind}")
    elif isinstance(outer, BoxMinusBox):
        if not isinstance(inner, Box):
            raise NestingError(f"unsupported pair {inner.kind} in {outer.kind}")
        d = min(dist_to_complement(inner, outer.outer), _box_box_gap(inner, outer.hole))
        overlap = np.all(np.minimum(inner.hi, outer.hole.hi) > np.maximum(inner.lo, outer.hole.lo))
        if overlap:
            d = -1.0
    else:
        raise NestingError(f"unsupported outer kind {outer.kind}")
    if d < -tiny:
        raise NestingError("inner region is not contained in the outer one")
    return max(d, 0.0)

