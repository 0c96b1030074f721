import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from weakgrad.domains import Box
from weakgrad.fields import ConstantField, FSpec, GaussianField, GridField, LinearField, StepField, sample_to_grid
from weakgrad.tail import (
    InsufficientBudgetError,
    SamplerConfig,
    SGrid,
    ShellUnderflowError,
    f_tail_profile,
    tail_measure_exact_grid,
    tail_measure_profile,
    tail_summary,
)

UNIT = Box([0.0], [1.0])
LIN = LinearField([1.0])


def mu_linear(s):
    """Closed form for u(x) = x on (0,1), q = r = 2: T = 1/|y-x|, strip |y-x| < 1/s."""
    s = np.asarray(s, dtype=float)
    return 2.0 / s - 1.0 / s ** 2


def mu_step(s):
    """u = 1[x > 1/2], q = r = 1: straddling ordered pairs with |y-x| < s^{-1/2} (s >= 4)."""
    return 1.0 / np.asarray(s, dtype=float)


def test_linear_closed_form_at_s10():
    prof = tail_measure_profile(LIN, UNIT, 2, 2, [10.0, 100.0, 1000.0], SamplerConfig(10 ** 6, seed=0))
    assert np.all(np.abs(prof.mu_hat - mu_linear(prof.s_grid)) <= prof.ci_halfwidth)
    assert np.all(np.abs(prof.s_mu / (prof.s_grid * mu_linear(prof.s_grid)) - 1) <= 0.01)


def test_constant_field_is_exactly_zero():
    prof = tail_measure_profile(ConstantField(2, 3.0), Box([0, 0], [1, 1]), 2, 1, SGrid(1, 1e4), SamplerConfig(10 ** 4))
    assert np.all(prof.mu_hat == 0) and np.all(prof.s_mu == 0)


def test_step_field_tail():
    prof = tail_measure_profile(StepField([1.0], 0.5, 1.0), UNIT, 1, 1, [100.0], SamplerConfig(10 ** 6, seed=2))
    assert abs(prof.s_mu[0] - 1.0) <= prof.s_mu_ci[0]


def test_exact_grid_linear():
    grid = sample_to_grid(LIN, [0], [1], 512)
    prof = tail_measure_exact_grid(grid, 2, 2, [10.0])
    assert abs(prof.mu_hat[0] - 0.19) <= 0.01
    assert abs(prof.mu_hat[0] / 0.19 - 1) <= 0.015


def test_exact_grid_constant_and_two_nodes():
    const = GridField([0.0], 0.1, np.full(20, 4.0))
    assert np.all(tail_measure_exact_grid(const, 2, 1, SGrid(0.1, 100)).mu_hat == 0)
    two = GridField([0.0], 1.0, [0.0, 1.0])
    assert tail_measure_exact_grid(two, 1, 1, [0.5]).mu_hat[0] == 2.0


def test_exact_grid_node_budget():
    big = GridField([0.0, 0.0], 0.001, np.zeros((150, 150)))
    with pytest.raises(InsufficientBudgetError):
        tail_measure_exact_grid(big, 2, 2, [1.0])


def test_symmetric_oracle_identical():
    g = sample_to_grid(GaussianField([0.3, 0.4], 1.0, 0.3), [0, 0], [1, 1], 24)
    s = SGrid(0.1, 1e4).values()
    a = tail_measure_exact_grid(g, 2, 1, s)
    b = tail_measure_exact_grid(g, 2, 1, s, symmetric=True)
    assert np.array_equal(a.mu_hat, b.mu_hat)


@pytest.mark.parametrize("lam", [0.5, 2.0])
@pytest.mark.parametrize("q", [1.0, 2.0])
def test_scaling_law_exact_on_oracle(lam, q):
    g = sample_to_grid(GaussianField([0.2], 1.0, 0.4), [-1], [1], 400)
    s = SGrid(1.0, 1e5).values()
    scaled = tail_measure_exact_grid(g.scaled(lam), q, q, s)
    base = tail_measure_exact_grid(g, q, q, s / lam ** q)
    assert np.array_equal(scaled.mu_hat, base.mu_hat)
    a = tail_summary(scaled)
    b = tail_summary(base)
    assert a.sup == pytest.approx(lam ** q * b.sup, rel=1e-14)
    assert a.limsup_est == pytest.approx(lam ** q * b.limsup_est, rel=1e-14)
    assert a.liminf_est == pytest.approx(lam ** q * b.liminf_est, rel=1e-14)


def test_mc_matches_oracle_over_ten_seeds():
    """Estimator vs exact-grid oracle: 3 sigma plus the oracle's own discretisation error."""
    s = SGrid(2.0, 50.0).values()
    grid = tail_measure_exact_grid(sample_to_grid(LIN, [0], [1], 4000), 2, 2, s)
    allowance = np.abs(grid.mu_hat - mu_linear(s))
    assert np.all(allowance <= 0.03 * mu_linear(s))
    for seed in range(10):
        mc = tail_measure_profile(LIN, UNIT, 2, 2, s, SamplerConfig(200_000, seed=seed))
        assert np.all(np.abs(mc.mu_hat - grid.mu_hat) <= mc.ci_halfwidth + allowance), seed


def test_monotone_and_bounded():
    g = GaussianField([0.1, 0.0], 1.0, 0.5)
    dom = Box([-1, -1], [1, 1])
    prof = tail_measure_profile(g, dom, 2, 1.5, SGrid(0.1, 1e4), SamplerConfig(200_000, seed=5))
    assert np.all(np.diff(prof.mu_hat) <= 0)
    assert prof.meta["raw_max_violation"] <= np.max(prof.ci_halfwidth)
    assert np.all(prof.mu_hat <= dom.volume() ** 2)
    assert np.all(np.isfinite(prof.s_mu)) and np.all(prof.s_mu >= 0)


def test_thread_count_does_not_change_results():
    g = GaussianField([0.0, 0.0])
    dom = Box([-2, -2], [2, 2])
    a = tail_measure_profile(g, dom, 2, 2, SGrid(1, 1e3), SamplerConfig(100_000, seed=3, block_size=8192, workers=1))
    b = tail_measure_profile(g, dom, 2, 2, SGrid(1, 1e3), SamplerConfig(100_000, seed=3, block_size=8192, workers=4))
    assert np.array_equal(a.mu_hat, b.mu_hat) and np.array_equal(a.ci_halfwidth, b.ci_halfwidth)


def test_same_seed_same_profile_and_different_seed_differs():
    cfg = SamplerConfig(50_000, seed=9)
    a = tail_measure_profile(LIN, UNIT, 2, 2, SGrid(10, 1e3), cfg)
    b = tail_measure_profile(LIN, UNIT, 2, 2, SGrid(10, 1e3), cfg)
    c = tail_measure_profile(LIN, UNIT, 2, 2, SGrid(10, 1e3), SamplerConfig(50_000, seed=10))
    assert np.array_equal(a.mu_hat, b.mu_hat)
    assert not np.array_equal(a.mu_hat, c.mu_hat)


def test_r_above_q_grows():
    """For r > q the linear field gives s mu(s) = 2 sqrt(s) - 1 (grows, q=2, r=3, N=1)."""
    s = SGrid(10, 1e4).values()
    prof = tail_measure_profile(LIN, UNIT, 2, 3, s, SamplerConfig(10 ** 6, seed=1))
    exact = 2 * np.sqrt(s) - 1
    # 13 simultaneous comparisons: 4 sigma keeps the family-wise error below 1e-3
    assert np.all(np.abs(prof.s_mu - exact) <= 4 / 3 * prof.s_mu_ci)
    assert prof.s_mu[-1] > 10 * prof.s_mu[0]


def test_errors():
    with pytest.raises(ValueError):
        tail_measure_profile(LIN, UNIT, 2, 0, [1.0])
    with pytest.raises(ValueError):
        tail_measure_profile(LIN, UNIT, 0.5, 1, [1.0])
    with pytest.raises(InsufficientBudgetError):
        tail_measure_profile(LIN, UNIT, 2, 2, [10.0], SamplerConfig(1000))
    with pytest.raises(ShellUnderflowError):
        tail_measure_profile(LIN, UNIT, 2, 2, [10.0, 1e9], SamplerConfig(10 ** 4))


def test_f_tail_reduces_to_power_kernel():
    s = SGrid(10, 1e4).values()
    cfg = SamplerConfig(200_000, seed=4)
    a = f_tail_profile(LIN, UNIT, FSpec(2.0), s, cfg)
    b = tail_measure_profile(LIN, UNIT, 2, 2, s, cfg)
    assert np.array_equal(a.mu_hat, b.mu_hat)


def test_f_tail_cap_behaviour():
    s = SGrid(10, 1e4).values()
    cfg = SamplerConfig(200_000, seed=4)
    unc = f_tail_profile(LIN, UNIT, FSpec(2.0), s, cfg)
    big = f_tail_profile(LIN, UNIT, FSpec(2.0, 1e6), s, cfg)
    assert np.all(np.abs(big.mu_hat - unc.mu_hat) <= np.hypot(big.ci_halfwidth, unc.ci_halfwidth))
    assert np.all(f_tail_profile(LIN, UNIT, FSpec(2.0, 0.0), s, cfg).mu_hat == 0)
    capped = f_tail_profile(LIN, UNIT, FSpec(2.0, 0.5), s, SamplerConfig(10 ** 6, seed=4))
    # min(|a|^2, 1/2) on |u'| = 1: s mu = 1 - 1/(4 s)
    assert np.all(np.abs(capped.s_mu - (1 - 0.25 / s)) <= capped.s_mu_ci)


def test_summary_examples():
    s = SGrid(10, 1e4).values()
    prof = tail_measure_profile(LIN, UNIT, 2, 2, s, SamplerConfig(10 ** 6))
    summ = tail_summary(prof)
    assert summ.converged
    assert abs(summ.limsup_est / 2 - 1) <= 0.01 and abs(summ.liminf_est / 2 - 1) <= 0.02
    assert summ.liminf_est <= summ.limsup_est <= summ.sup + summ.sup_ci
    zero = tail_measure_profile(ConstantField(1), UNIT, 2, 2, s, SamplerConfig(10 ** 4))
    z = tail_summary(zero)
    assert (z.sup, z.limsup_est, z.liminf_est, z.converged) == (0, 0, 0, True)
    with pytest.raises(ValueError):
        tail_summary(tail_measure_profile(LIN, UNIT, 2, 2, [10, 100], SamplerConfig(10 ** 4)))


@given(vals=st.lists(st.integers(-8, 8), min_size=3, max_size=40), k=st.integers(-2, 2), q=st.sampled_from([1.0, 2.0]))
def test_oracle_properties(vals, k, q):
    g = GridField([0.0], 0.25, np.array(vals, dtype=float))
    s = SGrid(0.01, 1e3, 2).values()
    prof = tail_measure_exact_grid(g, q, 1.0, s)
    assert np.all(np.diff(prof.mu_hat) <= 0)
    assert np.array_equal(prof.mu_hat, tail_measure_exact_grid(g, q, 1.0, s, symmetric=True).mu_hat)
    assert np.array_equal(prof.mu_hat, tail_measure_exact_grid(-g, q, 1.0, s).mu_hat)
    lam = 2.0 ** k
    scaled = tail_measure_exact_grid(g.scaled(lam), q, 1.0, s * lam ** q)
    assert np.array_equal(prof.mu_hat, scaled.mu_hat)
