import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from weakgrad.domains import Ball, Box, BoxMinusBox, NestingError, build_domain, dist_to_complement, sample_uniform
from weakgrad.streams import substream

UNIT2 = Box([0, 0], [1, 1])
L_SHAPE = BoxMinusBox(UNIT2, Box([0.5, 0], [1, 0.5]))


def test_contains_examples():
    assert UNIT2.contains(np.array([0.5, 0.5]))
    assert not UNIT2.contains(np.array([1.5, 0.5]))
    assert not Ball([0, 0], 1).contains(np.array([0.8, 0.7]))


def test_boundary_is_outside():
    assert not UNIT2.contains(np.array([1.0, 0.5]))
    assert not Ball([0, 0], 1).contains(np.array([1.0, 0.0]))
    assert not L_SHAPE.contains(np.array([0.75, 0.5]))


def test_contains_dimension_mismatch():
    with pytest.raises(ValueError):
        UNIT2.contains(np.array([0.5, 0.5, 0.5]))


def test_volumes():
    assert UNIT2.volume() == 1.0
    assert Ball([0, 0], 1).volume() == pytest.approx(math.pi)
    assert L_SHAPE.volume() == pytest.approx(0.75)
    assert Ball([0, 0, 0], 2).volume() == pytest.approx(4 / 3 * math.pi * 8)


def test_diameters():
    assert UNIT2.diameter() == pytest.approx(math.sqrt(2))
    assert Ball([0, 0], 0.7).diameter() == pytest.approx(1.4)
    assert Box([0], [1]).diameter() == 1.0
    assert L_SHAPE.diameter() == pytest.approx(math.sqrt(2))


def test_convexity_flags():
    assert UNIT2.is_convex and Ball([0], 1).is_convex and not L_SHAPE.is_convex


def test_sample_mean_and_membership():
    rng = substream(123, "check")
    x = sample_uniform(UNIT2, rng, 10 ** 6)
    assert np.all(np.abs(x.mean(axis=0) - 0.5) <= 0.002)
    for dom in (UNIT2, Ball([0.3, -1], 0.5), L_SHAPE, Ball([0, 0, 0], 1)):
        pts = dom.sample(substream(1, "check"), 10 ** 4)
        assert np.all(dom.contains(pts))


def test_sampling_is_deterministic():
    a = L_SHAPE.sample(substream(7, "check"), 1000)
    b = L_SHAPE.sample(substream(7, "check"), 1000)
    assert np.array_equal(a, b)


@pytest.mark.parametrize("inner", [Ball([0.5, 0.5], 0.3), L_SHAPE])
def test_monte_carlo_volume_ratio(inner):
    n = 10 ** 6
    pts = UNIT2.sample(substream(3, "check"), n)
    p = inner.volume() / UNIT2.volume()
    frac = np.mean(inner.contains(pts))
    assert abs(frac - p) <= 3 * math.sqrt(p * (1 - p) / n)


def test_dist_to_complement_examples():
    assert dist_to_complement(Box([0.2, 0.2], [0.8, 0.8]), UNIT2) == pytest.approx(0.2)
    assert dist_to_complement(Ball([0, 0], 0.5), Ball([0, 0], 1)) == pytest.approx(0.5)
    assert dist_to_complement(UNIT2, UNIT2) == 0.0
    assert dist_to_complement(Ball([0.1, 0], 0.5), Ball([0, 0], 1)) == pytest.approx(0.4)


def test_dist_to_complement_rejects_non_nested():
    with pytest.raises(NestingError):
        dist_to_complement(Box([0.5, 0.5], [1.5, 1.5]), UNIT2)


def test_shifted_overlap():
    lo, hi = UNIT2.shifted_overlap(np.array([0.25, -0.5]))
    assert np.allclose(lo, [0, 0.5]) and np.allclose(hi, [0.75, 1])
    assert UNIT2.shifted_overlap(np.array([1.0, 0.0])) is None


def test_build_domain_round_trip():
    for d in (UNIT2, Ball([1, 2], 3), L_SHAPE):
        again = build_domain(d.to_spec())
        assert again.volume() == pytest.approx(d.volume())
        assert again.diameter() == pytest.approx(d.diameter())
    with pytest.raises(ValueError):
        build_domain({"kind": "torus"})


@given(lo=st.lists(st.floats(-5, 5), min_size=1, max_size=3),
       ext=st.lists(st.floats(0.1, 5), min_size=3, max_size=3))
def test_isodiametric_sanity_boxes(lo, ext):
    hi = [a + e for a, e in zip(lo, ext)]
    b = Box(lo, hi)
    assert b.diameter() >= b.volume() ** (1 / b.dim)


@given(r=st.floats(0.01, 10), N=st.integers(1, 3))
def test_isodiametric_sanity_balls(r, N):
    b = Ball([0.0] * N, r)
    assert b.diameter() >= b.volume() ** (1 / N)
