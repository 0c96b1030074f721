"""
Declarative checks of the limit identities and two-sided inequalities.

Each check runs the engines on one (field, domain, q, r) configuration,
evaluates an identity or inequality template and returns a
:class:`CheckRecord`.  Comparisons use

    tol = rel_tol * max(|lhs|, |rhs|) + sqrt(ci_lhs^2 + ci_rhs^2)

where the ci values are the engines' 3-sigma half-widths.  A margin is
(rhs - lhs) / tol for ``lhs <= rhs`` and -|lhs - rhs| / tol for an
identity, so a comparison holds iff its margin is at least -1.
"""

import math
import time
from dataclasses import dataclass, field as dc_field, replace

import numpy as np

from .constants import first_coord_moment, unit_ball_volume
from .directional import (
    EpsGrid,
    QuadConfig,
    besov_diagnostic,
    directional_functional,
    directional_profile,
    single_direction_functional,
)
from .domains import dist_to_complement
from .energies import jump_energy, sobolev_energy, sphere_f_energy, total_variation
from .fields import FSpec
from .streams import sphere_directions, substream
from .summary import DEFAULT_PLATEAU_TOL, plateau_summary
from .tail import (
    InsufficientBudgetError,
    SamplerConfig,
    SGrid,
    ShellUnderflowError,
    f_tail_profile,
    tail_measure_profile,
    tail_summary,
)

__all__ = [
    "THEOREM_IDS",
    "CheckConfigError",
    "TheoremCheck",
    "Comparison",
    "CheckRecord",
    "ExperimentReport",
    "run_check",
    "run_suite",
    "compare_le",
    "compare_eq",
]

THEOREM_IDS = (
    "bsvy-sup-bounds",
    "limit-identity",
    "main-sandwich",
    "constant-detection",
    "general-F-limit",
    "eps-tail-sandwich",
    "jump-sandwich",
    "convex-sup-limit",
    "direction-average-bound",
    "besov-equivalence",
)

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"


class CheckConfigError(ValueError):
    pass


@dataclass(frozen=True)
class TheoremCheck:
    """One resolved check: engine inputs, budgets and tolerances."""

    theorem_id: str
    field: object
    domain: object
    q: float = 2.0
    r: float = None
    name: str = None
    field_spec: dict = None
    domain_spec: dict = None
    s_grid: SGrid = SGrid(10.0, 1e4)
    eps_grid: EpsGrid = EpsGrid(0.1, 1e-3)
    pairs: int = 1_000_000
    spatial_samples: int = 200_000
    sphere_resolution: int = 256
    block_size: int = 1 << 16
    rel_tol: float = 0.05
    plateau_tol: float = DEFAULT_PLATEAU_TOL
    min_decades: float = 1.0
    detect_threshold: float = 0.1
    f: FSpec = None
    inner: object = None
    directions: int = 16
    seed: int = 0
    workers: int = 1

    @property
    def r_eff(self):
        return self.q if self.r is None else self.r

    def sampler(self):
        return SamplerConfig(self.pairs, self.seed, self.block_size, self.workers)

    def quad(self):
        return QuadConfig(samples=self.spatial_samples, sphere_resolution=self.sphere_resolution,
                          seed=self.seed, block_size=min(self.block_size, 1 << 14), workers=self.workers)

    def inputs(self):
        return {
            "field": self.field_spec, "domain": self.domain_spec, "q": self.q, "r": self.r_eff,
            "s_grid": [self.s_grid.s_min, self.s_grid.s_max, self.s_grid.per_decade],
            "eps_grid": [self.eps_grid.eps_max, self.eps_grid.eps_min, self.eps_grid.per_decade],
            "pairs": self.pairs, "spatial_samples": self.spatial_samples,
            "sphere_resolution": self.sphere_resolution, "rel_tol": self.rel_tol,
            "plateau_tol": self.plateau_tol, "seed": self.seed,
            "F": None if self.f is None else {"q": self.f.q, "cap": self.f.cap},
            "inner": None if self.inner is None else self.inner.to_spec(),
        }


@dataclass(frozen=True)
class Comparison:
    label: str
    lhs: float
    rhs: float
    tol: float
    margin: float
    holds: bool
    relation: str = "<="
    symbolic: bool = False

    def to_dict(self):
        return {"label": self.label, "relation": self.relation, "lhs": _num(self.lhs),
                "rhs": _num(self.rhs), "tol": self.tol, "margin": self.margin,
                "holds": self.holds, "symbolic": self.symbolic}


def _num(x):
    return "+inf" if x is None else float(x)


def _tol(lhs, rhs, ci_l, ci_r, rel_tol):
    return rel_tol * max(abs(lhs), abs(rhs)) + math.hypot(ci_l, ci_r)


def compare_le(label, lhs, rhs, rel_tol, ci_l=0.0, ci_r=0.0):
    """lhs <= rhs up to tolerance; ``None`` stands for the +infinity marker."""
    if rhs is None:
        return Comparison(label, lhs, rhs, 0.0, 1.0, True, "<=", True)
    if lhs is None:
        return Comparison(label, lhs, rhs, 0.0, -2.0, False, "<=", True)
    tol = _tol(lhs, rhs, ci_l, ci_r, rel_tol)
    diff = rhs - lhs
    margin = 0.0 if diff == 0.0 else (diff / tol if tol > 0 else math.copysign(2.0, diff))
    return Comparison(label, float(lhs), float(rhs), float(tol), float(margin), margin >= -1.0)


def compare_eq(label, lhs, rhs, rel_tol, ci_l=0.0, ci_r=0.0):
    if lhs is None or rhs is None:
        same = lhs is None and rhs is None
        return Comparison(label, lhs, rhs, 0.0, 0.0 if same else -2.0, same, "==", True)
    tol = _tol(lhs, rhs, ci_l, ci_r, rel_tol)
    diff = abs(rhs - lhs)
    margin = 0.0 if diff == 0.0 else (-diff / tol if tol > 0 else -2.0)
    return Comparison(label, float(lhs), float(rhs), float(tol), float(margin), margin >= -1.0, "==")


@dataclass
class CheckRecord:
    name: str
    theorem_id: str
    inputs: dict
    measured: dict = dc_field(default_factory=dict)
    bounds: dict = dc_field(default_factory=dict)
    comparisons: list = dc_field(default_factory=list)
    verdict: str = PASS
    notes: list = dc_field(default_factory=list)
    profiles: dict = dc_field(default_factory=dict)

    @property
    def margins(self):
        return {c.label: c.margin for c in self.comparisons}

    def to_dict(self):
        return {
            "name": self.name, "theorem_id": self.theorem_id, "inputs": self.inputs,
            "measured": self.measured, "bounds": self.bounds,
            "margins": self.margins, "comparisons": [c.to_dict() for c in self.comparisons],
            "verdict": self.verdict, "notes": list(self.notes),
        }


@dataclass
class ExperimentReport:
    checks: list
    meta: dict
    runtime_s: float = 0.0

    @property
    def counts(self):
        out = {PASS: 0, FAIL: 0, INCONCLUSIVE: 0}
        for c in self.checks:
            out[c.verdict] += 1
        return out

    @property
    def exit_code(self):
        n = self.counts
        if n[FAIL]:
            return 1
        if n[INCONCLUSIVE]:
            return 2
        return 0

    def to_dict(self):
        # wall time is kept out of the report so identical runs give identical bytes
        return {"meta": dict(self.meta), "checks": [c.to_dict() for c in self.checks]}


# helpers ------------------------------------------------------------------------

def _summary_dict(s):
    d = s.to_dict()
    d["trailing"] = s.trailing
    return d


def _tail(cfg, r=None, record=None, label="tail"):
    prof = tail_measure_profile(cfg.field, cfg.domain, cfg.q, cfg.r_eff if r is None else r,
                                cfg.s_grid, cfg.sampler())
    summ = tail_summary(prof, cfg.plateau_tol, cfg.min_decades)
    if record is not None:
        record.profiles[label] = prof
        record.measured[label] = _summary_dict(summ)
    return prof, summ


def _directional(cfg, r=None, record=None, label="directional"):
    prof = directional_profile(cfg.field, cfg.domain, cfg.q, cfg.r_eff if r is None else r,
                               cfg.eps_grid, cfg.quad())
    summ = prof.summary(cfg.plateau_tol, cfg.min_decades)
    if record is not None:
        record.profiles[label] = prof
        record.measured[label] = _summary_dict(summ)
    return prof, summ


def _energy(cfg, q=None):
    q = cfg.q if q is None else q
    if q == 1.0 and cfg.field.jump is not None:
        return total_variation(cfg.field, cfg.domain, cfg.quad())
    return sobolev_energy(cfg.field, cfg.domain, q, cfg.quad())


def _energy_parts(e):
    if e.infinite:
        return None, 0.0
    return e.value, e.ci_halfwidth or 0.0


# check templates ----------------------------------------------------------------

def _check_limit_identity(cfg, rec):
    N = cfg.domain.dim
    _, s = _tail(cfg, record=rec)
    e = _energy(cfg)
    rec.measured["energy"] = e.to_dict()
    E, Eci = _energy_parts(e)
    k = first_coord_moment(cfg.q, N).value / N
    target = None if E is None else k * E
    rec.bounds["target"] = _num(target)
    tci = 0.0 if E is None else k * Eci
    rec.comparisons += [
        compare_eq("limsup == target", s.limsup_est, target, cfg.rel_tol, s.limsup_ci, tci),
        compare_eq("liminf == target", s.liminf_est, target, cfg.rel_tol, s.liminf_ci, tci),
    ]
    return [s]


def _check_main_sandwich(cfg, rec):
    N = cfg.domain.dim
    _, s = _tail(cfg, record=rec)
    e = _energy(cfg)
    rec.measured["energy"] = e.to_dict()
    E, Eci = _energy_parts(e)
    k = first_coord_moment(cfg.q, N).value / (N + cfg.q)
    lower = None if E is None else k * E
    rec.bounds["lower"] = _num(lower)
    rec.comparisons += [
        compare_le("lower <= limsup", lower, s.limsup_est, cfg.rel_tol,
                   0.0 if E is None else k * Eci, s.limsup_ci),
        compare_le("limsup <= sup", s.limsup_est, s.sup, cfg.rel_tol, s.limsup_ci, s.sup_ci),
    ]
    if E:
        rec.measured["upper_ratio"] = s.sup / E
        rec.notes.append("upper_ratio = sup_s s*mu / energy is the observed upper constant")
    return [s]


def _check_bsvy(cfg, rec):
    N = cfg.domain.dim
    _, s = _tail(cfg, record=rec)
    e = _energy(cfg)
    rec.measured["energy"] = e.to_dict()
    E, Eci = _energy_parts(e)
    if E is None:
        rec.notes.append("energy is infinite; only the lower side is meaningful")
        rec.comparisons.append(compare_le("energy finite", None, s.sup, cfg.rel_tol))
        return [s]
    if E == 0.0:
        rec.comparisons.append(compare_eq("sup == 0", s.sup, 0.0, cfg.rel_tol, s.sup_ci))
        return [s]
    rec.measured["lower_ratio"] = s.liminf_est / E
    rec.measured["upper_ratio"] = s.sup / E
    k = first_coord_moment(cfg.q, N).value / (N + cfg.q)
    rec.bounds["lower_constant"] = k
    rec.comparisons.append(compare_le("lower_constant * energy <= sup", k * E, s.sup,
                                      cfg.rel_tol, k * Eci, s.sup_ci))
    rec.notes.append("the two-sided constants are reported as observed ratios")
    return [s]


def _check_constant_detection(cfg, rec):
    prof, s = _tail(cfg, record=rec)
    constant = cfg.field.lipschitz_bound() == 0.0
    rec.measured["is_constant"] = constant
    if constant:
        zero = bool(np.all(prof.mu_hat == 0.0))
        rec.measured["all_zero"] = zero
        rec.comparisons.append(Comparison("profile identically 0", float(np.max(prof.mu_hat)), 0.0,
                                          0.0, 0.0 if zero else -2.0, zero, "=="))
    else:
        rec.bounds["threshold"] = cfg.detect_threshold
        c = compare_le("threshold < limsup", cfg.detect_threshold, s.limsup_est, 0.0, 0.0, s.limsup_ci)
        # strict: a value only tied with the threshold within noise is not evidence
        holds = s.limsup_est - s.limsup_ci > cfg.detect_threshold
        rec.comparisons.append(replace(c, holds=holds, margin=c.margin if holds else min(c.margin, -2.0)))
    return [s]


def _check_general_f(cfg, rec):
    if cfg.f is None:
        raise CheckConfigError("general-F-limit needs an F function (F: {q, cap})")
    N = cfg.domain.dim
    prof = f_tail_profile(cfg.field, cfg.domain, cfg.f, cfg.s_grid, cfg.sampler())
    s = tail_summary(prof, cfg.plateau_tol, cfg.min_decades)
    rec.profiles["tail"] = prof
    rec.measured["tail"] = _summary_dict(s)
    e = sphere_f_energy(cfg.field, cfg.domain, cfg.f, cfg.quad())
    E, Eci = _energy_parts(e)
    target = None if E is None else E / N
    rec.bounds["target"] = _num(target)
    tci = 0.0 if E is None else Eci / N
    rec.comparisons += [
        compare_eq("limsup == target", s.limsup_est, target, cfg.rel_tol, s.limsup_ci, tci),
        compare_eq("liminf == target", s.liminf_est, target, cfg.rel_tol, s.liminf_ci, tci),
    ]
    return [s]


def _check_eps_tail(cfg, rec):
    N = cfg.domain.dim
    r = cfg.r_eff
    _, ts = _tail(cfg, record=rec)
    _, ds = _directional(cfg, record=rec)
    rec.bounds["upper"] = (N + r) * ts.limsup_est
    rec.bounds["lower"] = N * ts.liminf_est
    rec.comparisons += [
        compare_le("liminf D <= (N+r) limsup s*mu", ds.liminf_est, (N + r) * ts.limsup_est,
                   cfg.rel_tol, ds.liminf_ci, (N + r) * ts.limsup_ci),
        compare_le("N liminf s*mu <= limsup D", N * ts.liminf_est, ds.limsup_est,
                   cfg.rel_tol, N * ts.liminf_ci, ds.limsup_ci),
    ]
    return [ts, ds]


def _check_jump(cfg, rec):
    if cfg.field.jump is None:
        raise CheckConfigError("jump-sandwich needs a field with a jump set")
    N = cfg.domain.dim
    _, s = _tail(cfg, r=1.0, record=rec)
    je = jump_energy(cfg.field, cfg.domain, cfg.q)
    rec.measured["jump_energy"] = je.to_dict()
    middle = first_coord_moment(1.0, N).value * je.value
    rec.bounds["middle"] = middle
    rec.comparisons += [
        compare_le("N liminf <= I_1 * jump energy", N * s.liminf_est, middle, cfg.rel_tol, N * s.liminf_ci),
        compare_le("I_1 * jump energy <= (N+1) limsup", middle, (N + 1) * s.limsup_est, cfg.rel_tol,
                   0.0, (N + 1) * s.limsup_ci),
    ]
    return [s]


def _check_convex_sup(cfg, rec):
    if not cfg.domain.is_convex:
        raise CheckConfigError("convex-sup-limit needs a convex domain")
    prof, s = _directional(cfg, r=cfg.q, record=rec)
    rec.comparisons.append(compare_le("sup_eps D <= trailing limsup", s.sup, s.limsup_est,
                                      cfg.rel_tol, s.sup_ci, s.limsup_ci))
    # subadditivity on a few sampled pairs (t1, t2) from the grid
    eps = prof.eps_grid
    quad = cfg.quad()
    for i, j in ((len(eps) - 1, len(eps) - 1), (len(eps) - 2, len(eps) - 1), (len(eps) - 4, len(eps) - 3)):
        if i < 0:
            continue
        t = eps[i] + eps[j]
        if t >= cfg.domain.diameter():
            continue
        d = directional_functional(cfg.field, cfg.domain, cfg.q, cfg.q, t, quad)
        k = i if prof.values[i] >= prof.values[j] else j
        rec.comparisons.append(compare_le(f"D(t1+t2) <= max(D(t1), D(t2)) at t1={eps[i]:.3g}, t2={eps[j]:.3g}",
                                          d.value, prof.values[k], cfg.rel_tol, d.ci, prof.ci_halfwidth[k]))
    return [s]


def _check_direction_average(cfg, rec):
    if cfg.inner is None:
        raise CheckConfigError("direction-average-bound needs an inner domain")
    N = cfg.domain.dim
    r = cfg.r_eff
    gap = dist_to_complement(cfg.inner, cfg.domain)
    if cfg.eps_grid.eps_max >= gap:
        raise CheckConfigError(f"eps_max must be below dist(inner, complement) = {gap:g}")
    _, ds = _directional(cfg, record=rec)
    rng = substream(cfg.seed, "check")
    dirs = sphere_directions(rng, cfg.directions, N)
    eps = cfg.eps_grid.values()
    quad = cfg.quad()
    best, best_ci, best_dir = -math.inf, 0.0, None
    for k in dirs:
        ests = [single_direction_functional(cfg.field, cfg.inner, cfg.q, e, k, r, quad) for e in eps]
        v = np.array([e.value for e in ests])
        c = np.array([e.ci for e in ests])
        ss = plateau_summary(eps, v, c, cfg.plateau_tol, cfg.min_decades)
        if ss.limsup_est > best:
            best, best_ci, best_dir = ss.limsup_est, ss.limsup_ci, k
    const = 2.0 ** (N + cfg.q) / ((N - 1 + r) * unit_ball_volume(N))
    rec.measured["direction_sup"] = best
    rec.measured["direction_argmax"] = [float(x) for x in best_dir]
    rec.bounds["constant"] = const
    rec.bounds["bound"] = const * ds.limsup_est
    rec.comparisons.append(compare_le("sup_k single-direction <= C * D", best, const * ds.limsup_est,
                                      cfg.rel_tol, best_ci, const * ds.limsup_ci))
    return [ds]


def _check_besov(cfg, rec):
    r = cfg.r_eff
    v = besov_diagnostic(cfg.field, cfg.domain, cfg.q, r, cfg.eps_grid, cfg.quad())
    expected = bool(cfg.field.besov_bounded(cfg.q, r))
    rec.profiles["directional"] = v.profile
    rec.measured["bounded"] = v.bounded
    rec.measured["trend_exponent"] = v.trend_exponent
    rec.bounds["expected_bounded"] = expected
    agree = v.bounded == expected
    rec.comparisons.append(Comparison("diagnostic agrees with regularity class", float(v.bounded),
                                      float(expected), 0.0, 0.0 if agree else -2.0, agree, "=="))
    # the diagnostic itself decides boundedness; plateau convergence does not gate it
    return []


_TEMPLATES = {
    "bsvy-sup-bounds": _check_bsvy,
    "limit-identity": _check_limit_identity,
    "main-sandwich": _check_main_sandwich,
    "constant-detection": _check_constant_detection,
    "general-F-limit": _check_general_f,
    "eps-tail-sandwich": _check_eps_tail,
    "jump-sandwich": _check_jump,
    "convex-sup-limit": _check_convex_sup,
    "direction-average-bound": _check_direction_average,
    "besov-equivalence": _check_besov,
}


def validate_check(cfg):
    """Static validation that needs no engine run; raises :class:`CheckConfigError`."""
    if cfg.theorem_id not in _TEMPLATES:
        raise CheckConfigError(f"unknown theorem id {cfg.theorem_id!r}")
    if cfg.field.dim != cfg.domain.dim:
        raise CheckConfigError("field and domain dimensions differ")
    if not cfg.q >= 1:
        raise CheckConfigError("q must be >= 1")
    if cfg.theorem_id == "convex-sup-limit" and not cfg.domain.is_convex:
        raise CheckConfigError("convex-sup-limit needs a convex domain")
    if cfg.theorem_id == "general-F-limit" and cfg.f is None:
        raise CheckConfigError("general-F-limit needs an F function (F: {q, cap})")
    if cfg.theorem_id == "jump-sandwich" and cfg.field.jump is None:
        raise CheckConfigError("jump-sandwich needs a field with a jump set")
    if cfg.theorem_id == "direction-average-bound":
        if cfg.inner is None:
            raise CheckConfigError("direction-average-bound needs an inner domain")
        try:
            gap = dist_to_complement(cfg.inner, cfg.domain)
        except ValueError as exc:
            raise CheckConfigError(str(exc)) from exc
        if cfg.eps_grid.eps_max >= gap:
            raise CheckConfigError(f"eps_max must be below dist(inner, complement) = {gap:g}")
    if cfg.theorem_id == "besov-equivalence" and not 0 < cfg.r_eff < cfg.q:
        raise CheckConfigError("besov-equivalence needs 0 < r < q")


def run_check(cfg):
    """Run one :class:`TheoremCheck`; returns a :class:`CheckRecord`."""
    validate_check(cfg)
    rec = CheckRecord(cfg.name or cfg.theorem_id, cfg.theorem_id, cfg.inputs())
    try:
        summaries = _TEMPLATES[cfg.theorem_id](cfg, rec)
    except (InsufficientBudgetError, ShellUnderflowError) as exc:
        rec.verdict = INCONCLUSIVE
        rec.notes.append(f"engine could not run: {exc}")
        return rec
    unconverged = [s for s in summaries if not s.converged]
    if not all(c.holds for c in rec.comparisons) and not unconverged:
        rec.verdict = FAIL
    elif unconverged:
        rec.verdict = INCONCLUSIVE
        rec.notes.append("plateau window did not converge; comparisons are not decisive")
    else:
        rec.verdict = PASS
    return rec


def run_suite(checks, meta=None):
    """
    Validate every check, then run them in order.

    Validation happens before any engine runs, so a bad configuration
    aborts the suite without partial results.
    """
    checks = list(checks)
    for c in checks:
        validate_check(c)
    t0 = time.perf_counter()
    records = [run_check(c) for c in checks]
    return ExperimentReport(records, dict(meta or {}), time.perf_counter() - t0)
