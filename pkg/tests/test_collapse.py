import math
from itertools import permutations

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from hkreduce.collapse import (
    Observation,
    RegionLabel,
    applicable_observations,
    consistency_check,
    effective_state,
    region_of,
)
from hkreduce.hilbert import DOWN, UP, P, Projector, basis_state, project, singlet, zero_state
from hkreduce.spacetime import Boost, Event, boost, in_closed_future_cone, in_lightlike_band, in_strict_past_cone

R2 = 1 / math.sqrt(2)
A = Event(0, -1, "A")
B = Event(0, 1, "B")
OBS_A = Observation(A, Projector(P(1), UP))
OBS_B = Observation(B, Projector(P(2), DOWN))


def test_spacelike_query_applies():
    assert applicable_observations(Event(0, 4), [OBS_A]) == [OBS_A]


def test_query_in_both_past_cones():
    assert applicable_observations(Event(-2, 0), [OBS_A, OBS_B]) == []


def test_query_on_cone_surface_applies():
    assert applicable_observations(Event(-1, 0), [OBS_A]) == [OBS_A]


def test_applicable_is_order_stable():
    q = Event(10, 0)
    assert applicable_observations(q, [OBS_B, OBS_A]) == [OBS_B, OBS_A]


@pytest.mark.parametrize(
    "query, region",
    [
        ((-0.5, 0.8), RegionLabel.REDUCED_BY_A),
        ((-0.5, -0.8), RegionLabel.REDUCED_BY_B),
        ((-3, 0), RegionLabel.UNREDUCED),
        ((0, 5), RegionLabel.REDUCED_BY_BOTH),
        ((3, 0), RegionLabel.REDUCED_BY_BOTH),
    ],
)
def test_region_examples(query, region):
    assert region_of(Event(*query), A, B) is region


def test_region_rejects_timelike_pair():
    with pytest.raises(ValueError, match="spacelike"):
        region_of(Event(0, 0), Event(0, 0), Event(3, 0))


def test_effective_state_region_two():
    rep = effective_state(singlet(), Event(-0.5, 0.8), [OBS_A, OBS_B])
    assert rep.region is RegionLabel.REDUCED_BY_A
    assert rep.effective_ket.labels == (P(2),)
    np.testing.assert_allclose(rep.effective_ket.amplitudes, [0, R2], atol=1e-12)
    assert rep.probability_weight == pytest.approx(0.5, abs=1e-12)


def test_effective_state_region_three():
    rep = effective_state(singlet(), Event(0, 5), [OBS_A, OBS_B])
    assert rep.effective_ket.scalar() == pytest.approx(R2, abs=1e-12)
    assert rep.probability_weight == pytest.approx(0.5, abs=1e-12)


def test_effective_state_unreduced():
    rep = effective_state(singlet(), Event(-3, 0), [OBS_A, OBS_B])
    assert rep.applied == ()
    assert rep.effective_ket.allclose(singlet())
    assert rep.probability_weight == pytest.approx(1.0, abs=1e-12)


def test_effective_state_errors():
    dup = Observation(Event(0, 3), Projector(P(1), DOWN))
    with pytest.raises(ValueError, match="more than once"):
        effective_state(singlet(), Event(0, 0), [OBS_A, dup])
    with pytest.raises(ValueError, match="zero"):
        effective_state(zero_state([P(1), P(2)]), Event(0, 0), [OBS_A])
    coincident = Observation(Event(0, -1), Projector(P(2), DOWN))
    with pytest.raises(ValueError, match="coincident"):
        effective_state(singlet(), Event(0, 0), [OBS_A, coincident])


def test_consistency_examples():
    assert consistency_check(singlet(), [OBS_A, OBS_B])
    bad = Observation(B, Projector(P(2), UP))
    assert not consistency_check(singlet(), [OBS_A, bad])
    assert consistency_check(singlet(), [])


def test_order_independence():
    q = Event(0, 5)
    kets = [effective_state(singlet(), q, list(order)).effective_ket for order in permutations([OBS_A, OBS_B])]
    np.testing.assert_array_equal(kets[0].amplitudes, kets[1].amplitudes)


def test_marginal_consistency():
    q = Event(0, 5)
    total = sum(
        effective_state(singlet(), q, [OBS_A, Observation(B, Projector(P(2), b))]).probability_weight for b in (0, 1)
    )
    single = effective_state(singlet(), q, [OBS_A]).probability_weight
    assert total == pytest.approx(single, abs=1e-12)
    assert single == pytest.approx(0.5, abs=1e-12)


def test_partial_reduction_between_cones():
    # after A (future cone) and before B (strict past cone): only particle 2's factor remains
    expected = project(singlet(), Projector(P(1), UP))
    b_far = Event(10, 1, "B")
    obs = [OBS_A, Observation(b_far, OBS_B.projector)]
    for q in (Event(2, -1), Event(1, 0), Event(5, 2)):
        assert in_closed_future_cone(q, A) and in_strict_past_cone(q, b_far)
        assert effective_state(singlet(), q, obs).effective_ket.allclose(expected, atol=1e-12)


def test_product_state_report():
    psi = basis_state((P(1), P(2)), (UP, DOWN))
    rep = effective_state(psi, Event(0, 5), [OBS_A, OBS_B])
    assert rep.probability_weight == pytest.approx(1.0)


coords = st.floats(min_value=-5, max_value=5, allow_nan=False)
events = st.builds(Event, coords, coords)


@settings(max_examples=500)
@given(events, st.floats(min_value=-0.99, max_value=0.99))
def test_region_frame_invariance(q, v):
    assume(not in_lightlike_band(q, A) and not in_lightlike_band(q, B))
    bst = Boost(v)
    qb, ab, bb = boost(q, bst), boost(A, bst), boost(B, bst)
    assume(not in_lightlike_band(qb, ab) and not in_lightlike_band(qb, bb))
    assert region_of(qb, ab, bb) is region_of(q, A, B)


@settings(max_examples=500)
@given(events, events, st.floats(min_value=0, max_value=5), st.floats(min_value=-1, max_value=1))
def test_reduction_monotone_along_future(o, q1, dt, slope):
    # q2 lies in q1's closed future cone
    q2 = Event(q1.t + dt, q1.x + slope * dt)
    assert in_closed_future_cone(q2, q1)
    if not in_strict_past_cone(q1, o):
        assert not in_strict_past_cone(q2, o)


@given(events, st.integers(0, 1), st.integers(0, 1))
def test_weight_in_unit_interval(q, a, b):
    obs = [Observation(A, Projector(P(1), a)), Observation(B, Projector(P(2), b))]
    w = effective_state(singlet(), q, obs).probability_weight
    assert -1e-15 <= w <= 1 + 1e-12
