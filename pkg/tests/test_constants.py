import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import integrate

from weakgrad.constants import (
    UnsupportedDimensionError,
    bbm_constant,
    first_coord_moment,
    holder_lower_constant,
    moment_by_quadrature,
    sphere_surface_area,
    unit_ball_volume,
)


def moment_oracle(q, N):
    """|z_1|^q over S^{N-1} by nested adaptive quadrature in spherical angles."""
    if N == 1:
        return 2.0
    if N == 2:
        return integrate.quad(lambda t: abs(math.cos(t)) ** q, 0, 2 * math.pi, limit=200,
                              points=[math.pi / 2, 3 * math.pi / 2])[0]
    # N = 3: z_1 = cos(theta), area element sin(theta) dtheta dphi
    return 2 * math.pi * integrate.quad(lambda t: abs(math.cos(t)) ** q * math.sin(t), 0, math.pi,
                                        points=[math.pi / 2], limit=200)[0]


@pytest.mark.parametrize("N, expected", [(1, 2.0), (2, 2 * math.pi), (3, 4 * math.pi)])
def test_sphere_surface_area(N, expected):
    assert sphere_surface_area(N) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("N", [0, -1, 1.5])
def test_sphere_surface_area_rejects_bad_dimension(N):
    with pytest.raises(ValueError):
        sphere_surface_area(N)


@pytest.mark.parametrize("q, N, expected", [(2, 2, math.pi), (1, 2, 4.0), (1, 3, 2 * math.pi), (3, 1, 2.0)])
def test_first_coord_moment_examples(q, N, expected):
    m = first_coord_moment(q, N)
    assert (m.N, m.q) == (N, q)
    assert m.value == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("q", [0.0, 0.5, 1.0, 2.0, 3.7])
@pytest.mark.parametrize("N", [1, 2, 3])
def test_closed_form_matches_independent_quadrature(q, N):
    assert first_coord_moment(q, N).value == pytest.approx(moment_oracle(q, N), rel=1e-10)


@pytest.mark.parametrize("q", [0.0, 0.5, 1.0, 2.0, 3.7])
@pytest.mark.parametrize("N", [1, 2, 3])
def test_quadrature_cross_check(q, N):
    assert abs(moment_by_quadrature(q, N, 4096) - first_coord_moment(q, N).value) <= 1e-8


def test_quadrature_examples():
    assert abs(moment_by_quadrature(2, 2, 4096) - math.pi) <= 1e-10
    assert abs(moment_by_quadrature(0, 3, 2048) - 4 * math.pi) <= 1e-8
    assert moment_by_quadrature(5, 1, 16) == 2.0


def test_quadrature_rejects_unsupported():
    with pytest.raises(UnsupportedDimensionError):
        moment_by_quadrature(2, 4, 64)
    with pytest.raises(ValueError):
        moment_by_quadrature(2, 2, 8)


def test_bbm_constant_examples():
    assert bbm_constant(2, 1) == 1.0
    assert bbm_constant(2, 2) == 0.5
    assert bbm_constant(1, 2) == pytest.approx(4 / (2 * math.pi), rel=1e-15)


def test_zero_moment_is_surface_area():
    for N in range(1, 7):
        assert first_coord_moment(0, N).value == pytest.approx(sphere_surface_area(N), rel=1e-14)


def test_ball_volume_relation():
    # |S^{N-1}| = N |B_1|
    for N in range(1, 7):
        assert sphere_surface_area(N) == pytest.approx(N * unit_ball_volume(N), rel=1e-14)


@given(q=st.floats(0, 20), N=st.integers(1, 8))
def test_moment_positive(q, N):
    assert first_coord_moment(q, N).value > 0


@given(q1=st.floats(0, 10), dq=st.floats(0, 10), N=st.integers(1, 8))
def test_moment_nonincreasing_in_q(q1, dq, N):
    assert first_coord_moment(q1 + dq, N).value <= first_coord_moment(q1, N).value * (1 + 1e-12)


@given(q=st.floats(1, 30), N=st.integers(1, 8))
def test_bbm_constant_in_unit_interval(q, N):
    assert 0 < bbm_constant(q, N) <= 1


@pytest.mark.parametrize("q", [1, 1.5, 2, 3])
@pytest.mark.parametrize("N", [1, 2, 3])
def test_holder_chain(q, N):
    c = first_coord_moment(1, N).value / ((N + 1) * (sphere_surface_area(N) + 1))
    assert holder_lower_constant(N) == pytest.approx(c, rel=1e-15)
    assert c ** q <= first_coord_moment(q, N).value / (N + q)


def test_moment_recurrence():
    # integration by parts on the sphere: I_{q+2}(N) = I_q(N) (q+1)/(q+N)
    for N in (1, 2, 3, 5):
        for q in (0.0, 0.5, 1.0, 2.5):
            lhs = first_coord_moment(q + 2, N).value
            rhs = first_coord_moment(q, N).value * (q + 1) / (q + N)
            assert lhs == pytest.approx(rhs, rel=1e-13)


def test_rejects_negative_q():
    with pytest.raises(ValueError):
        first_coord_moment(-0.5, 2)
    with pytest.raises(ValueError):
        bbm_constant(0.5, 2)
