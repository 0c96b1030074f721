"""
Test functions u : R^N -> R^m with closed-form values, Jacobians, bounds
and jump metadata, plus grid-sampled fields.

Every field is defined on all of R^N (cusp and power-singularity fields
vanish outside their support box) and evaluation is vectorised over the
leading axis::

    >>> f = build_field({"kind": "linear", "slope": [2.0, 3.0]})
    >>> float(f.value([1.0, 1.0])[0])
    5.0
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import RegularGridInterpolator

__all__ = [
    "Field",
    "LinearField",
    "GaussianField",
    "ConstantField",
    "StepField",
    "CuspField",
    "PowerSingularityField",
    "GridField",
    "ScaledField",
    "JumpSet",
    "FSpec",
    "build_field",
    "evaluate",
    "gradient",
    "lipschitz_bound",
    "NonDifferentiableError",
    "FieldConfigError",
    "REGULARITY",
]

REGULARITY = ("smooth", "lipschitz", "holder", "bv-with-jump", "non-besov")


class NonDifferentiableError(ValueError):
    pass


class FieldConfigError(ValueError):
    """Invalid field description; ``path`` locates the offending entry."""

    def __init__(self, message, path=()):
        self.path = tuple(path)
        loc = ".".join(str(p) for p in self.path)
        super().__init__(f"{loc}: {message}" if loc else message)


def _points(x, dim):
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = x[None, :] if single else x
    if pts.shape[-1] != dim:
        raise ValueError(f"expected points of dimension {dim}, got {pts.shape[-1]}")
    return pts, single


@dataclass(frozen=True)
class JumpSet:
    """Planar jump {x . normal = offset}; ``jump`` is u+ - u- (u+ on the side normal points to)."""

    normal: np.ndarray
    offset: float
    minus: np.ndarray
    plus: np.ndarray

    @property
    def jump(self):
        return self.plus - self.minus

    @property
    def jump_norm(self):
        return float(np.linalg.norm(self.jump))


class Field:
    kind = None
    regularity = None

    def __init__(self, dim, codim=1):
        self.dim = int(dim)
        self.codim = int(codim)

    # evaluation -----------------------------------------------------------
    def value(self, x):
        pts, single = _points(x, self.dim)
        out = self._value(pts)
        return out[0] if single else out

    def jacobian(self, x):
        pts, single = _points(x, self.dim)
        out = self._jacobian(pts)
        return out[0] if single else out

    def _jacobian(self, pts):
        raise NonDifferentiableError(f"{self.kind} field has no closed-form gradient")

    # metadata ---------------------------------------------------------------
    jump = None

    def lipschitz_bound(self):
        return None

    def osc_bound(self):
        return None

    def axis_breakpoints(self):
        """Per-axis coordinates where the field is not smooth, or None if not axis-aligned."""
        return [np.empty(0) for _ in range(self.dim)]

    def besov_bounded(self, q, r):
        """Whether the directional functional of order r stays bounded as eps -> 0."""
        return r <= q

    def scaled(self, lam):
        return ScaledField(self, lam)

    def __neg__(self):
        return ScaledField(self, -1.0)


class LinearField(Field):
    kind = "linear"
    regularity = "smooth"

    def __init__(self, slope, offset=0.0):
        A = np.atleast_2d(np.asarray(slope, dtype=float))
        super().__init__(A.shape[1], A.shape[0])
        self.A = A
        self.b = np.broadcast_to(np.asarray(offset, dtype=float), (self.codim,)).copy()

    def _value(self, pts):
        return pts @ self.A.T + self.b

    def _jacobian(self, pts):
        return np.broadcast_to(self.A, (len(pts),) + self.A.shape).copy()

    def lipschitz_bound(self):
        return float(np.linalg.norm(self.A, 2))

    def frobenius(self):
        return float(np.linalg.norm(self.A))


class GaussianField(Field):
    """amplitude * exp(-|x - center|^2 / width^2)."""

    kind = "gaussian"
    regularity = "smooth"

    def __init__(self, center, amplitude=1.0, width=1.0):
        c = np.atleast_1d(np.asarray(center, dtype=float))
        super().__init__(c.size, 1)
        self.center = c
        self.amplitude = float(amplitude)
        self.width = float(width)
        if not self.width > 0:
            raise FieldConfigError("width must be positive", ("width",))

    def _value(self, pts):
        r2 = np.sum((pts - self.center) ** 2, axis=1) / self.width ** 2
        return (self.amplitude * np.exp(-r2))[:, None]

    def _jacobian(self, pts):
        u = self._value(pts)
        g = -2.0 * (pts - self.center) / self.width ** 2 * u
        return g[:, None, :]

    def lipschitz_bound(self):
        # max of 2 r e^{-r^2} / w at r = 1/sqrt(2)
        return abs(self.amplitude) * math.sqrt(2.0) * math.exp(-0.5) / self.width

    def osc_bound(self):
        return abs(self.amplitude)


class ConstantField(Field):
    kind = "constant"
    regularity = "smooth"

    def __init__(self, dim, value=0.0):
        v = np.atleast_1d(np.asarray(value, dtype=float))
        super().__init__(dim, v.size)
        self.c = v

    def _value(self, pts):
        return np.broadcast_to(self.c, (len(pts), self.codim)).copy()

    def _jacobian(self, pts):
        return np.zeros((len(pts), self.codim, self.dim))

    def lipschitz_bound(self):
        return 0.0

    def osc_bound(self):
        return 0.0

    def besov_bounded(self, q, r):
        return True


class StepField(Field):
    """Piecewise constant across the hyperplane {x . normal = offset}."""

    kind = "step"
    regularity = "bv-with-jump"

    def __init__(self, normal, offset, jump, base=0.0):
        nu = np.atleast_1d(np.asarray(normal, dtype=float))
        if abs(np.linalg.norm(nu) - 1.0) > 1e-12:
            raise FieldConfigError("normal must be a unit vector", ("normal",))
        jv = np.atleast_1d(np.asarray(jump, dtype=float))
        minus = np.broadcast_to(np.asarray(base, dtype=float), jv.shape).copy()
        super().__init__(nu.size, jv.size)
        self.jump = JumpSet(nu, float(offset), minus, minus + jv)

    def _side(self, pts):
        return pts @ self.jump.normal >= self.jump.offset

    def _value(self, pts):
        side = self._side(pts)[:, None]
        return np.where(side, self.jump.plus, self.jump.minus)

    def _jacobian(self, pts):
        if np.any(pts @ self.jump.normal == self.jump.offset):
            raise NonDifferentiableError("gradient requested on the jump set")
        return np.zeros((len(pts), self.codim, self.dim))

    def osc_bound(self):
        return self.jump.jump_norm

    def axis_breakpoints(self):
        nu = self.jump.normal
        axis = np.flatnonzero(nu != 0)
        if axis.size != 1:
            return None
        bps = [np.empty(0) for _ in range(self.dim)]
        i = int(axis[0])
        bps[i] = np.array([self.jump.offset / nu[i]])
        return bps

    def besov_bounded(self, q, r):
        # int |u(x + eps n) - u(x)|^q dx ~ eps
        return r <= 1.0


class _RadialSingular(Field):
    """Shared machinery for amplitude * |x - center|^p clamped to a support box."""

    def __init__(self, center, power, amplitude, support_lo, support_hi):
        c = np.atleast_1d(np.asarray(center, dtype=float))
        super().__init__(c.size, 1)
        self.center = c
        self.power = float(power)
        self.amplitude = float(amplitude)
        self.support_lo = np.atleast_1d(np.asarray(support_lo, dtype=float))
        self.support_hi = np.atleast_1d(np.asarray(support_hi, dtype=float))
        if self.support_lo.shape != c.shape or self.support_hi.shape != c.shape:
            raise FieldConfigError("support box must match the center dimension", ("support",))

    def _inside(self, pts):
        return np.all((pts >= self.support_lo) & (pts <= self.support_hi), axis=1)

    def _value(self, pts):
        r = np.linalg.norm(pts - self.center, axis=1)
        with np.errstate(divide="ignore"):
            v = np.where(r > 0, self.amplitude * np.power(np.where(r > 0, r, 1.0), self.power), 0.0)
        return np.where(self._inside(pts), v, 0.0)[:, None]

    def _jacobian(self, pts):
        d = pts - self.center
        r = np.linalg.norm(d, axis=1)
        if np.any(r == 0):
            raise NonDifferentiableError(f"{self.kind} field is not differentiable at its center")
        g = self.amplitude * self.power * r[:, None] ** (self.power - 2.0) * d
        g = np.where(self._inside(pts)[:, None], g, 0.0)
        return g[:, None, :]

    def axis_breakpoints(self):
        return [np.array(sorted({self.center[i], self.support_lo[i], self.support_hi[i]}))
                for i in range(self.dim)]


class CuspField(_RadialSingular):
    """amplitude * |x - center|^beta, beta in (0, 1)."""

    kind = "cusp"
    regularity = "holder"

    def __init__(self, center, exponent, support_lo, support_hi, amplitude=1.0):
        if not 0.0 < exponent < 1.0:
            raise FieldConfigError("cusp exponent must lie in (0, 1)", ("exponent",))
        super().__init__(center, exponent, amplitude, support_lo, support_hi)

    def osc_bound(self):
        corners = np.stack([self.support_lo, self.support_hi])
        far = np.linalg.norm(np.max(np.abs(corners - self.center), axis=0))
        return abs(self.amplitude) * far ** self.power

    def besov_bounded(self, q, r):
        # int |Delta u|^q ~ eps^{min(beta q + N, q)}, with a log at equality
        crit = self.power * q + self.dim
        if crit < q:
            return r < crit
        if crit == q:
            return r < q
        return r <= q


class PowerSingularityField(_RadialSingular):
    """amplitude * |x - center|^{-gamma}, gamma > 0; unbounded at the center."""

    kind = "power-singularity"
    regularity = "non-besov"

    def __init__(self, center, exponent, support_lo, support_hi, amplitude=1.0):
        if not exponent > 0.0:
            raise FieldConfigError("singularity exponent must be positive", ("exponent",))
        super().__init__(center, -float(exponent), amplitude, support_lo, support_hi)

    def besov_bounded(self, q, r):
        # int |Delta u|^q ~ eps^{N - gamma q}
        return r <= self.dim + self.power * q


class GridField(Field):
    """
    Node values on a cell-centred grid: node i sits at lo + (i + 1/2) h.

    Evaluation is multilinear between nodes and constant in the outer half
    cells; the support is the box [lo, lo + n h].
    """

    kind = "grid"
    regularity = "lipschitz"

    def __init__(self, lo, spacing, values):
        lo = np.atleast_1d(np.asarray(lo, dtype=float))
        vals = np.asarray(values, dtype=float)
        N = lo.size
        if vals.ndim == N:
            vals = vals[..., None]
        if vals.ndim != N + 1:
            raise FieldConfigError("grid values do not match the grid dimension", ("values",))
        if not spacing > 0:
            raise FieldConfigError("grid spacing must be positive", ("spacing",))
        super().__init__(N, vals.shape[-1])
        self.lo = lo
        self.h = float(spacing)
        self.values = vals
        self.shape = vals.shape[:-1]
        self.hi = lo + self.h * np.array(self.shape)
        self.axes = [lo[i] + (np.arange(self.shape[i]) + 0.5) * self.h for i in range(N)]
        self._interp = None

    @property
    def nodes(self):
        mesh = np.meshgrid(*self.axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    @property
    def node_values(self):
        return self.values.reshape(-1, self.codim)

    def _value(self, pts):
        if np.any(pts < self.lo) or np.any(pts > self.hi):
            raise ValueError("point outside the grid support")
        if self._interp is None:
            if min(self.shape) == 1:
                return np.broadcast_to(self.values.reshape(-1, self.codim)[0], (len(pts), self.codim)).copy()
            self._interp = RegularGridInterpolator(self.axes, self.values, method="linear")
        clipped = np.clip(pts, [a[0] for a in self.axes], [a[-1] for a in self.axes])
        return self._interp(clipped)

    def lipschitz_bound(self):
        total = 0.0
        for ax in range(self.dim):
            if self.shape[ax] > 1:
                d = np.diff(self.values, axis=ax)
                total += float(np.max(np.linalg.norm(d, axis=-1))) ** 2 / self.h ** 2
        return math.sqrt(total)

    def osc_bound(self):
        v = self.node_values
        if self.codim == 1:
            return float(v.max() - v.min())
        return 2.0 * float(np.max(np.linalg.norm(v, axis=1)))

    def axis_breakpoints(self):
        return [np.concatenate([[self.lo[i]], self.axes[i], [self.hi[i]]]) for i in range(self.dim)]


class ScaledField(Field):
    """lam * base; keeps the base kind and metadata."""

    def __init__(self, base, lam):
        super().__init__(base.dim, base.codim)
        self.base = base
        self.lam = float(lam)
        self.kind = base.kind
        self.regularity = base.regularity
        if base.jump is not None:
            j = base.jump
            self.jump = JumpSet(j.normal, j.offset, self.lam * j.minus, self.lam * j.plus)

    def _value(self, pts):
        return self.lam * self.base._value(pts)

    def _jacobian(self, pts):
        return self.lam * self.base._jacobian(pts)

    def lipschitz_bound(self):
        b = self.base.lipschitz_bound()
        return None if b is None else abs(self.lam) * b

    def osc_bound(self):
        b = self.base.osc_bound()
        return None if b is None else abs(self.lam) * b

    def axis_breakpoints(self):
        return self.base.axis_breakpoints()

    def besov_bounded(self, q, r):
        return self.base.besov_bounded(q, r)

    @property
    def node_values(self):
        return self.lam * self.base.node_values

    def __getattr__(self, name):
        # expose catalog parameters (A, center, ...) of the base field
        if name == "base":
            raise AttributeError(name)
        return getattr(self.base, name)


@dataclass(frozen=True)
class FSpec:
    """F(a) = min(|a|^q, cap), or |a|^q when cap is None."""

    q: float
    cap: float = None

    def __post_init__(self):
        if not self.q >= 1:
            raise ValueError("F exponent q must be >= 1")
        if self.cap is not None and self.cap < 0:
            raise ValueError("F cap must be non-negative")

    def __call__(self, a):
        v = np.abs(a) ** self.q
        return v if self.cap is None else np.minimum(v, self.cap)


# construction ----------------------------------------------------------------

def _need(spec, key, path):
    if key not in spec:
        raise FieldConfigError("missing required key", path + (key,))
    return spec[key]


def build_field(spec, path=("field",)):
    """
    Build a field from its config-file description.

    ``spec["kind"]`` selects the catalog entry; the remaining keys are the
    parameters of that kind.  Errors carry the key path.
    """
    path = tuple(path)
    kind = _need(spec, "kind", path)
    try:
        if kind == "linear":
            return LinearField(_need(spec, "slope", path), spec.get("offset", 0.0))
        if kind == "gaussian":
            return GaussianField(_need(spec, "center", path), spec.get("amplitude", 1.0),
                                 spec.get("width", 1.0))
        if kind == "constant":
            return ConstantField(_need(spec, "dim", path), spec.get("value", 0.0))
        if kind == "step":
            return StepField(_need(spec, "normal", path), _need(spec, "offset", path),
                             _need(spec, "jump", path), spec.get("base", 0.0))
        if kind in ("cusp", "power-singularity"):
            cls = CuspField if kind == "cusp" else PowerSingularityField
            support = _need(spec, "support", path)
            return cls(_need(spec, "center", path), _need(spec, "exponent", path),
                       _need(support, "lo", path + ("support",)),
                       _need(support, "hi", path + ("support",)),
                       spec.get("amplitude", 1.0))
        if kind == "grid":
            if "sample" in spec:
                s = spec["sample"]
                src = build_field(_need(s, "field", path + ("sample",)), path + ("sample", "field"))
                return sample_to_grid(src, _need(s, "lo", path + ("sample",)),
                                      _need(s, "hi", path + ("sample",)),
                                      _need(s, "n", path + ("sample",)))
            return GridField(_need(spec, "lo", path), _need(spec, "spacing", path),
                             _need(spec, "values", path))
    except FieldConfigError as exc:
        if exc.path and exc.path[:len(path)] == path:
            raise
        raise FieldConfigError(str(exc).split(": ", 1)[-1], path + exc.path) from None
    raise FieldConfigError(f"unknown field kind {kind!r}", path + ("kind",))


def sample_to_grid(field, lo, hi, n):
    """Sample ``field`` at the cell-centred nodes of an ``n``-per-axis grid on [lo, hi]."""
    lo = np.atleast_1d(np.asarray(lo, dtype=float))
    hi = np.atleast_1d(np.asarray(hi, dtype=float))
    n = int(n)
    h = (hi - lo) / n
    if not np.allclose(h, h[0], rtol=1e-12, atol=0):
        raise FieldConfigError("grid sampling requires a cube (equal spacing per axis)", ("sample",))
    axes = [lo[i] + (np.arange(n) + 0.5) * h[0] for i in range(lo.size)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    vals = field.value(pts).reshape((n,) * lo.size + (field.codim,))
    return GridField(lo, float(h[0]), vals)


# functional interface --------------------------------------------------------

def evaluate(field, point):
    return field.value(point)


def gradient(field, point, fd_step=None):
    """
    Gradient norm and Jacobian at ``point`` (or at each row of ``point``).

    With ``fd_step`` the Jacobian is a central difference; otherwise the
    closed form is used.  The norm is Frobenius for vector-valued fields.
    """
    pts, single = _points(point, field.dim)
    if fd_step is None:
        jac = field._jacobian(pts)
    else:
        h = float(fd_step)
        cols = []
        for i in range(field.dim):
            e = np.zeros(field.dim)
            e[i] = h
            cols.append((field._value(pts + e) - field._value(pts - e)) / (2.0 * h))
        jac = np.stack(cols, axis=-1)
    norm = np.sqrt(np.sum(jac ** 2, axis=(1, 2)))
    if single:
        return float(norm[0]), jac[0]
    return norm, jac


def lipschitz_bound(field):
    return field.lipschitz_bound()
