"""
Trailing-plateau extraction for profiles indexed by a log-spaced parameter.

Both the tail profiles (s -> infinity) and the directional profiles
(eps -> 0) are reduced to finite-data stand-ins for sup, limsup and liminf
by the same rule, so the two sides of a sandwich inequality are comparable.
"""

from dataclasses import asdict, dataclass

import numpy as np

__all__ = ["PlateauSummary", "plateau_spread", "plateau_summary"]

DEFAULT_PLATEAU_TOL = 0.02


@dataclass(frozen=True)
class PlateauSummary:
    sup: float
    limsup_est: float
    liminf_est: float
    window: tuple
    converged: bool
    plateau_spread: float
    sup_ci: float = 0.0
    limsup_ci: float = 0.0
    liminf_ci: float = 0.0

    @property
    def sup_s_mu(self):
        return self.sup

    @property
    def trailing(self):
        """Midpoint of the window's range; the single-number limit estimate."""
        return 0.5 * (self.limsup_est + self.liminf_est)

    @property
    def trailing_ci(self):
        return max(self.limsup_ci, self.liminf_ci)

    def to_dict(self):
        d = asdict(self)
        d["window"] = list(self.window)
        return d


def plateau_spread(values, ci):
    """
    Relative spread of ``values`` not explained by their half-widths ``ci``.

    Zero when all the intervals [v - ci, v + ci] share a common point.
    """
    values = np.asarray(values, dtype=float)
    ci = np.asarray(ci, dtype=float)
    gap = np.max(values - ci) - np.min(values + ci)
    scale = np.max(np.abs(values))
    if scale == 0.0:
        return 0.0
    return max(0.0, float(gap)) / scale


def plateau_summary(param, values, ci=None, tol=DEFAULT_PLATEAU_TOL, min_decades=1.0):
    """
    Summarise a profile whose limit regime lies at the END of ``param``.

    The window is the longest suffix whose :func:`plateau_spread` is at most
    ``tol`` and which spans at least ``min_decades`` of ``param``.  When no
    such suffix exists the shortest suffix spanning ``min_decades`` is used
    and ``converged`` is False.  Never raises on data quality.
    """
    param = np.asarray(param, dtype=float)
    values = np.asarray(values, dtype=float)
    ci = np.zeros_like(values) if ci is None else np.asarray(ci, dtype=float)
    K = len(values)
    logp = np.log10(param)
    span = np.abs(logp[-1] - logp)
    covering = np.flatnonzero(span >= min_decades - 1e-9)

    start, converged = None, False
    for i in covering:
        if plateau_spread(values[i:], ci[i:]) <= tol:
            start, converged = int(i), True
            break
    if start is None:
        start = int(covering[-1]) if covering.size else 0
    sl = slice(start, K)
    w_vals, w_ci = values[sl], ci[sl]
    spread = plateau_spread(w_vals, w_ci)
    i_max = int(np.argmax(w_vals))
    i_min = int(np.argmin(w_vals))
    j_sup = int(np.argmax(values))
    return PlateauSummary(
        sup=float(values[j_sup]),
        limsup_est=float(w_vals[i_max]),
        liminf_est=float(w_vals[i_min]),
        window=(start, K),
        converged=bool(converged and covering.size),
        plateau_spread=float(spread),
        sup_ci=float(ci[j_sup]),
        limsup_ci=float(w_ci[i_max]),
        liminf_ci=float(w_ci[i_min]),
    )
