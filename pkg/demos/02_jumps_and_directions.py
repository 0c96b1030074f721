"""
Jumps: tail limit, directional functional and single directions
===============================================================

A unit step across x = 1/2 has no Sobolev energy, yet with r = 1 its
tail profile settles at a finite value fixed by the jump:

    N liminf s mu  <=  I_1(N) * |jump|^q * H^{N-1}(J)  <=  (N + 1) limsup s mu.

In 1D the middle term is 2 and s mu -> 1, so the upper inequality is an
equality.  The directional functional with r = 1 also sees only the jump.

Run:  python3 demos/02_jumps_and_directions.py
"""

import math

from weakgrad import (
    Box,
    EpsGrid,
    SamplerConfig,
    SGrid,
    StepField,
    directional_profile,
    first_coord_moment,
    jump_energy,
    single_direction_functional,
    tail_measure_profile,
    tail_summary,
)

# %% one dimension
u = StepField([1.0], 0.5, 1.0)
omega = Box([0.0], [1.0])
prof = tail_measure_profile(u, omega, q=2, r=1, s_grid=SGrid(10, 1e3), sampler=SamplerConfig(10**7))
summ = tail_summary(prof)
middle = first_coord_moment(1, 1).value * jump_energy(u, omega, 2).value
print(f"1D: liminf {summ.liminf_est:.4f} <= {middle:.1f} <= 2 * limsup = {2 * summ.limsup_est:.4f}")

d = directional_profile(u, omega, q=2, r=1, eps_grid=EpsGrid(0.1, 1e-3))
print("1D directional D(eps, r=1):", [round(float(v), 6) for v in d.values[:4]], "...")

# %% two dimensions: the jump line x1 = 1/2 crosses the unit square
u2 = StepField([1.0, 0.0], 0.5, 1.0)
sq = Box([0.0, 0.0], [1.0, 1.0])
p2 = tail_measure_profile(u2, sq, 2, 1, SGrid(1e3, 1e6), SamplerConfig(10**7))
s2 = tail_summary(p2)
mid2 = first_coord_moment(1, 2).value
# the upper side is again an equality in the limit, so it holds up to noise only
print(f"2D: 2 * liminf = {2 * s2.liminf_est:.3f} <= {mid2:.3f} ~ 3 * limsup = {3 * s2.limsup_est:.3f}")

# %% one direction at a time: the straddle strip has area eps * |k . nu|
for k in [(1.0, 0.0), (0.0, 1.0), (math.sqrt(0.5), math.sqrt(0.5))]:
    v = single_direction_functional(u2, sq, 2, 0.01, k, r=1)
    print(f"k = ({k[0]:.3f}, {k[1]:.3f}):  {v.value:.5f}")
