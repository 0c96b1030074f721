"""
weakgrad: weak-type difference-quotient functionals and their limits.

The tail measure

    mu(s) = L^{2N}{(x, y) in Omega^2 : |u(y) - u(x)|^q / |y - x|^{r + N} > s}

is estimated by importance-sampled Monte Carlo (or enumerated exactly on a
grid), and s * mu(s) is compared with sphere-moment multiples of the
Sobolev, total-variation and jump energies of u.
"""

__version__ = "0.1.0"

from .constants import (
    SphereMoment,
    bbm_constant,
    first_coord_moment,
    moment_by_quadrature,
    sphere_surface_area,
    unit_ball_volume,
)
from .directional import (
    DirectionalProfile,
    EpsGrid,
    QuadConfig,
    bbm_mollifier_functional,
    besov_diagnostic,
    directional_functional,
    directional_profile,
    single_direction_functional,
)
from .domains import Ball, Box, BoxMinusBox, build_domain, dist_to_complement, sample_uniform
from .energies import EnergyValue, jump_energy, sobolev_energy, total_variation
from .fields import (
    ConstantField,
    CuspField,
    FSpec,
    GaussianField,
    GridField,
    LinearField,
    PowerSingularityField,
    StepField,
    build_field,
    evaluate,
    gradient,
    lipschitz_bound,
    sample_to_grid,
)
from .summary import PlateauSummary, plateau_summary
from .tail import (
    SamplerConfig,
    SGrid,
    TailProfile,
    f_tail_profile,
    tail_measure_exact_grid,
    tail_measure_profile,
    tail_summary,
)
from .verifier import ExperimentReport, TheoremCheck, run_check, run_suite
