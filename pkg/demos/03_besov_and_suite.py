"""
Regularity classes from the decay of D(eps, r)
==============================================

With 0 < r < q, D(eps, r) stays bounded as eps -> 0 exactly for functions
in the matching Besov class.  A step and a square-root cusp stay bounded;
|x|^{-1/8} grows like eps^{-1/4}.  The last cell runs a small check suite
through the same path as ``weakgrad verify``.

Run:  python3 demos/03_besov_and_suite.py
"""

from weakgrad import (
    Box,
    CuspField,
    EpsGrid,
    PowerSingularityField,
    StepField,
    TheoremCheck,
    besov_diagnostic,
    run_suite,
)
from weakgrad.io import dumps_json

grid = EpsGrid(0.1, 1e-4)
sym = Box([-1.0], [1.0])
cases = {
    "step": (StepField([1.0], 0.0, 1.0), sym),
    "cusp |x|^1/2": (CuspField([0.0], 0.5, [-1.0], [1.0]), sym),
    "|x|^-1/8": (PowerSingularityField([0.0], 0.125, [-1.0], [1.0]), sym),
}

# %% slope of log D against log eps over the last decade
for name, (u, dom) in cases.items():
    v = besov_diagnostic(u, dom, q=2, r=1, eps_grid=grid)
    print(f"{name:14s} bounded={v.bounded!s:5s} slope={v.trend_exponent:+.3f}  "
          f"D(eps_min)={v.profile.values[-1]:.4f}")

# %% a two-check suite; margins >= -1 mean the comparison holds
checks = [
    TheoremCheck("besov-equivalence", *cases["|x|^-1/8"], q=2.0, r=1.0, name="power"),
    TheoremCheck("jump-sandwich", StepField([1.0], 0.0, 1.0), sym, q=2.0, pairs=2 * 10**6, name="step"),
]
report = run_suite(checks, meta={"seed": 0})
for rec in report.checks:
    print(rec.verdict.upper(), rec.name, {k: round(m, 2) for k, m in rec.margins.items()})
print("exit code", report.exit_code)
print(dumps_json(report.checks[1].to_dict()["bounds"]))
