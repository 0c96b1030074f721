import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from weakgrad.fields import (
    ConstantField,
    CuspField,
    FieldConfigError,
    FSpec,
    GaussianField,
    LinearField,
    NonDifferentiableError,
    PowerSingularityField,
    StepField,
    build_field,
    evaluate,
    gradient,
    lipschitz_bound,
    sample_to_grid,
)
from weakgrad.streams import substream


def test_linear_examples():
    f = build_field({"kind": "linear", "slope": [1.0, 0.0]})
    assert f.regularity == "smooth"
    assert np.allclose(f.jacobian(np.array([0.3, 0.7])), [[1.0, 0.0]])
    assert evaluate(LinearField([2.0, 3.0]), np.array([1.0, 1.0]))[0] == 5.0
    assert lipschitz_bound(f) == 1.0


def test_gaussian_examples():
    g = GaussianField([0.0, 0.0])
    assert evaluate(g, np.zeros(2))[0] == 1.0
    norm, _ = gradient(g, np.array([1.0, 0.0]))
    assert norm == pytest.approx(2 * math.exp(-1), rel=1e-14)
    fd, _ = gradient(g, np.array([1.0, 0.0]), fd_step=1e-5)
    assert fd == pytest.approx(norm, abs=1e-8)
    assert GaussianField([0.0], amplitude=3.0).lipschitz_bound() == pytest.approx(3 * math.sqrt(2) * math.exp(-0.5))


def test_gaussian_lipschitz_bound_is_attained():
    g = GaussianField([0.0])
    x = np.linspace(-3, 3, 200001)[:, None]
    slopes = np.abs(g.jacobian(x)[:, 0, 0])
    assert slopes.max() == pytest.approx(g.lipschitz_bound(), rel=1e-8)


def test_step_examples():
    s = build_field({"kind": "step", "normal": [1.0, 0.0], "offset": 0.5, "jump": 1.0})
    assert s.regularity == "bv-with-jump"
    assert s.jump is not None and s.jump.jump_norm == 1.0
    assert evaluate(s, np.array([0.6, 0.2]))[0] == 1.0
    assert evaluate(s, np.array([0.4, 0.2]))[0] == 0.0
    assert s.lipschitz_bound() is None
    with pytest.raises(NonDifferentiableError):
        gradient(s, np.array([0.5, 0.3]))


@given(a=st.floats(-0.49, -1e-6), b=st.floats(1e-6, 0.49), y=st.floats(-1, 1))
def test_step_jump_consistency(a, b, y):
    s = StepField([0.0, 1.0], 0.0, [2.0, -1.0], base=[0.5, 0.5])
    up = s.value(np.array([y, b]))
    down = s.value(np.array([y, a]))
    assert np.allclose(up - down, s.jump.jump)
    assert np.allclose(s.jump.plus - s.jump.minus, [2.0, -1.0])


def test_cusp_gradient_defined_away_from_tip():
    c = build_field({"kind": "cusp", "center": [0.0], "exponent": 0.5, "support": {"lo": [-1], "hi": [1]}})
    with pytest.raises(NonDifferentiableError):
        gradient(c, np.array([0.0]))
    norm, _ = gradient(c, np.array([0.25]))
    assert norm == pytest.approx(0.5 * 0.25 ** -0.5)
    assert c.value(np.array([2.0]))[0] == 0.0  # clamped outside support


def test_smooth_fields_gradient_vs_central_difference():
    rng = substream(11, "check")
    fields = [LinearField([[1.0, -2.0], [0.5, 3.0]]), GaussianField([0.1, -0.2], 1.5, 0.7),
              GaussianField([0.0], 1.0, 1.0), ConstantField(2, [1.0, 2.0])]
    for f in fields:
        x = rng.uniform(-1.5, 1.5, size=(100, f.dim))
        a, J = gradient(f, x)
        b, Jfd = gradient(f, x, fd_step=1e-5)
        scale = np.maximum(np.abs(J), 1e-3)
        assert np.all(np.abs(J - Jfd) <= 1e-7 * np.maximum(1.0, scale))


def test_frobenius_norm_for_vector_fields():
    f = LinearField([[3.0, 0.0], [0.0, 4.0]])
    norm, _ = gradient(f, np.zeros(2))
    assert norm == 5.0


def test_grid_reproduces_nodes():
    g = GaussianField([0.2, 0.1], 1.0, 0.5)
    grid = sample_to_grid(g, [0, 0], [1, 1], 17)
    assert np.allclose(grid.value(grid.nodes), g.value(grid.nodes), rtol=0, atol=1e-15)
    with pytest.raises(ValueError):
        grid.value(np.array([1.2, 0.5]))


def test_grid_linear_interpolation_is_exact_between_nodes():
    lin = LinearField([2.0])
    grid = sample_to_grid(lin, [0], [1], 64)
    x = np.linspace(grid.axes[0][0], grid.axes[0][-1], 101)[:, None]
    assert np.allclose(grid.value(x), lin.value(x), atol=1e-13)


def test_build_field_errors_carry_paths():
    with pytest.raises(FieldConfigError) as e:
        build_field({"kind": "cusp", "center": [0.0], "exponent": 1.5, "support": {"lo": [-1], "hi": [1]}})
    assert "exponent" in str(e.value)
    with pytest.raises(FieldConfigError) as e:
        build_field({"kind": "step", "normal": [1.0]}, ("fields[3]",))
    assert "fields[3]" in str(e.value)
    with pytest.raises(FieldConfigError):
        build_field({"kind": "step", "normal": [1.0, 1.0], "offset": 0, "jump": 1})
    with pytest.raises(FieldConfigError):
        build_field({"kind": "nope"})


def test_regularity_tags():
    ps = PowerSingularityField([0.0], 0.125, [-1], [1])
    assert ps.regularity == "non-besov"
    assert not ps.besov_bounded(2, 1) and ps.besov_bounded(2, 0.5)
    assert CuspField([0.0], 0.5, [-1], [1]).besov_bounded(2, 1)
    assert StepField([1.0], 0.5, 1.0).besov_bounded(2, 1)
    assert not StepField([1.0], 0.5, 1.0).besov_bounded(2, 1.5)


def test_scaled_and_negated_fields():
    s = StepField([1.0], 0.5, 1.0)
    t = s.scaled(3.0)
    assert t.jump.jump_norm == 3.0 and t.osc_bound() == 3.0
    n = -GaussianField([0.0])
    assert n.value(np.zeros(1))[0] == -1.0
    assert n.lipschitz_bound() == GaussianField([0.0]).lipschitz_bound()


@given(a=st.floats(0, 100), c=st.floats(0, 10), q=st.floats(1, 4))
def test_fspec_properties(a, c, q):
    F = FSpec(q, c)
    assert F(0.0) == 0.0
    assert F(a) <= abs(a) ** q + 1e-12
    assert F(a) <= F(a + 1.0)
    with pytest.raises(ValueError):
        FSpec(0.5)
