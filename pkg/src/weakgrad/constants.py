"""
Sphere measures and first-coordinate moments.

All closed forms go through the Gamma function; :func:`moment_by_quadrature`
is an independent numerical cross-check for N <= 3.
"""

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "SphereMoment",
    "sphere_surface_area",
    "unit_ball_volume",
    "first_coord_moment",
    "bbm_constant",
    "holder_lower_constant",
    "moment_by_quadrature",
    "UnsupportedDimensionError",
]


class UnsupportedDimensionError(ValueError):
    pass


def _check_dim(N):
    if int(N) != N or N < 1:
        raise ValueError(f"dimension must be an integer >= 1, got {N!r}")
    return int(N)


@dataclass(frozen=True)
class SphereMoment:
    """Integral of |z_1|^q over the unit sphere S^{N-1}."""

    N: int
    q: float
    value: float


def sphere_surface_area(N):
    """H^{N-1}(S^{N-1}) = 2 pi^{N/2} / Gamma(N/2); equals 2 for N = 1."""
    N = _check_dim(N)
    return 2.0 * math.pi ** (N / 2.0) / math.gamma(N / 2.0)


def unit_ball_volume(N):
    N = _check_dim(N)
    return math.pi ** (N / 2.0) / math.gamma(N / 2.0 + 1.0)


def first_coord_moment(q, N):
    """
    Closed form of ``int_{S^{N-1}} |z_1|^q dH^{N-1}(z)``.

    Uses 2 pi^{(N-1)/2} Gamma((q+1)/2) / Gamma((q+N)/2); for N = 1 this
    reduces to 2 (the two points +-1, counting measure).
    """
    N = _check_dim(N)
    if not q >= 0:
        raise ValueError(f"q must be >= 0, got {q!r}")
    if N == 1:
        return SphereMoment(N, float(q), 2.0)
    a, b = (q + 1.0) / 2.0, (q + N) / 2.0
    if b < 170.0:
        ratio = math.gamma(a) / math.gamma(b)
    else:
        ratio = math.exp(math.lgamma(a) - math.lgamma(b))
    val = 2.0 * math.pi ** ((N - 1) / 2.0) * ratio
    return SphereMoment(N, float(q), val)


def bbm_constant(q, N):
    """K_{q,N}: sphere average of |z_1|^q."""
    if not q >= 1:
        raise ValueError(f"q must be >= 1, got {q!r}")
    N = _check_dim(N)
    if N == 1:
        return 1.0
    return first_coord_moment(q, N).value / sphere_surface_area(N)


def holder_lower_constant(N):
    """I_1(N) / ((N+1)(|S^{N-1}|+1)); its q-th power bounds I_q(N)/(N+q) from below."""
    N = _check_dim(N)
    return first_coord_moment(1.0, N).value / ((N + 1) * (sphere_surface_area(N) + 1.0))


def _quarter_integral(f, n):
    # int_0^{pi/2} f(theta) dtheta by the trapezoid rule in t after the
    # double-exponential map theta = pi/4 (1 + tanh(pi/2 sinh t)).  The map
    # kills the |cos|^q endpoint singularity at pi/2; f receives both theta
    # and the accurately computed complement pi/2 - theta.
    T = 4.0
    t = np.linspace(-T, T, n)
    h = t[1] - t[0]
    u = 0.5 * math.pi * np.sinh(t)
    # (1 - tanh u)/2 and (1 + tanh u)/2 without cancellation
    right = 1.0 / (1.0 + np.exp(2.0 * u))
    left = 1.0 / (1.0 + np.exp(-2.0 * u))
    theta = 0.5 * math.pi * left
    comp = 0.5 * math.pi * right
    jac = 0.5 * math.pi * (0.5 * math.pi * np.cosh(t)) / np.cosh(u) ** 2 * 0.5
    with np.errstate(over="ignore"):
        vals = f(theta, comp) * jac
    vals = np.where(np.isfinite(vals), vals, 0.0)
    return h * vals.sum()


def moment_by_quadrature(q, N, resolution):
    """
    Numerical value of ``int_{S^{N-1}} |z_1|^q`` for N in {1, 2, 3}.

    N = 1 is the exact two-point sum.  N = 2 integrates over the angle,
    N = 3 over the polar angle with the sin(theta) weight (the azimuthal
    factor 2 pi is exact since the integrand does not depend on it).  Both
    use symmetry to reduce to [0, pi/2] and a trapezoid rule after a
    double-exponential change of variable, so the rate does not degrade
    for non-integer q.
    """
    N = _check_dim(N)
    if resolution < 16:
        raise ValueError("resolution must be >= 16")
    if not q >= 0:
        raise ValueError(f"q must be >= 0, got {q!r}")
    if N == 1:
        return 2.0
    if N == 2:
        # z_1 = cos(theta); four symmetric quarters
        return 4.0 * _quarter_integral(lambda th, c: np.sin(c) ** q, resolution)
    if N == 3:
        # z_1 = cos(theta), weight sin(theta); two hemispheres, azimuth 2 pi
        quarter = _quarter_integral(lambda th, c: np.sin(c) ** q * np.sin(th), resolution)
        return 2.0 * math.pi * 2.0 * quarter
    raise UnsupportedDimensionError(f"quadrature cross-check supports N <= 3, got N={N}")
