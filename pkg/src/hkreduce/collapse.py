"""Covariant (Hellwig-Kraus) state reduction on light cones.

An observation reduces the state at every event that is *not* strictly
inside its backward light cone: the cone surface, the spacelike region
around it and its whole future.  The effective ket at a query event is
the initial state with the projectors of all applicable observations
applied, left unnormalized so that its squared norm is the joint weight.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

from .hilbert import Projector, StateVector, project
from .spacetime import CausalRelation, Event, in_closed_future_cone, in_strict_past_cone, relation

WEIGHT_ATOL = 1e-12


@dataclass(frozen=True)
class Observation:
    """A projective observation: the event where it is observed and the recorded outcome."""

    event: Event
    projector: Projector

    @property
    def outcome(self) -> int:
        return self.projector.outcome


class RegionLabel(enum.Enum):
    UNREDUCED = "Unreduced"
    REDUCED_BY_A = "ReducedByA"  # region II
    REDUCED_BY_B = "ReducedByB"  # region I
    REDUCED_BY_BOTH = "ReducedByBoth"  # region III and both futures


@dataclass(frozen=True)
class ReductionReport:
    query: Event
    applied: tuple[Observation, ...]
    effective_ket: StateVector
    probability_weight: float
    region: RegionLabel | None = None
    # indices into the input observation list, for serialization
    applied_indices: tuple[int, ...] = field(default=())


def applicable_observations(query: Event, observations: Sequence[Observation]) -> list[Observation]:
    return [o for o in observations if not in_strict_past_cone(query, o.event)]


def region_of(query: Event, a: Event, b: Event) -> RegionLabel:
    if relation(a, b) is not CausalRelation.SPACELIKE:
        raise ValueError(
            f"region labels need spacelike-separated observations; "
            f"{a.label or 'A'} -> {b.label or 'B'} is {relation(a, b).value}"
        )
    by_a = not in_strict_past_cone(query, a)
    by_b = not in_strict_past_cone(query, b)
    if by_a and by_b:
        return RegionLabel.REDUCED_BY_BOTH
    if by_a:
        return RegionLabel.REDUCED_BY_A
    if by_b:
        return RegionLabel.REDUCED_BY_B
    return RegionLabel.UNREDUCED


def _validate_observations(initial: StateVector, observations: Sequence[Observation]) -> None:
    seen = set()
    for o in observations:
        initial.axis(o.projector.target)
        if o.projector.target in seen:
            raise ValueError(f"subsystem {o.projector.target} is observed more than once")
        seen.add(o.projector.target)
    for i, o1 in enumerate(observations):
        for o2 in observations[i + 1 :]:
            if relation(o1.event, o2.event) is CausalRelation.COINCIDENT:
                raise ValueError(
                    f"observations at {o1.event.label or (o1.event.t, o1.event.x)} and "
                    f"{o2.event.label or (o2.event.t, o2.event.x)} are coincident"
                )


def reduce(initial: StateVector, observations: Sequence[Observation]) -> StateVector:
    out = initial
    for o in observations:
        out = project(out, o.projector)
    return out


def effective_state(
    initial: StateVector,
    query: Event,
    observations: Sequence[Observation],
) -> ReductionReport:
    if initial.is_zero():
        raise ValueError("initial state is the zero vector")
    _validate_observations(initial, observations)
    idx = tuple(i for i, o in enumerate(observations) if not in_strict_past_cone(query, o.event))
    applied = tuple(observations[i] for i in idx)
    ket = reduce(initial, applied)
    region = None
    if len(observations) == 2 and relation(observations[0].event, observations[1].event) is CausalRelation.SPACELIKE:
        region = region_of(query, observations[0].event, observations[1].event)
    return ReductionReport(query, applied, ket, ket.norm_squared(), region, idx)


def _probe_events(observations: Sequence[Observation]) -> list[Event]:
    # vertices, points just off each cone in every direction, and far past/future
    probes: list[Event] = []
    offsets = [(-2.0, 0.0), (2.0, 0.0), (-1.0, 1.0), (-1.0, -1.0), (0.5, 3.0), (0.5, -3.0), (-3.0, 0.5)]
    for o in observations:
        probes.append(o.event)
        probes.extend(Event(o.event.t + dt, o.event.x + dx) for dt, dx in offsets)
    if observations:
        xs = [o.event.x for o in observations]
        ts = [o.event.t for o in observations]
        mid = sum(xs) / len(xs)
        span = max(xs) - min(xs) + max(ts) - min(ts) + 1.0
        probes.append(Event(min(ts) - 10.0 * span, mid))
        probes.append(Event(max(ts) + 10.0 * span, mid))
    return probes


def consistency_check(initial: StateVector, observations: Sequence[Observation]) -> bool:
    """Whether the reductions never contradict each other.

    Checks that applied-observation sets grow monotonically along causal
    order over a set of probe events, and that the fully reduced state has
    nonzero weight (the recorded outcomes are jointly possible).
    """
    if not observations:
        return True
    _validate_observations(initial, observations)
    probes = _probe_events(observations)
    applied = [
        {i for i, o in enumerate(observations) if not in_strict_past_cone(q, o.event)} for q in probes
    ]
    for i, q1 in enumerate(probes):
        for j, q2 in enumerate(probes):
            if i != j and in_closed_future_cone(q2, q1) and not applied[i] <= applied[j]:
                return False
    return reduce(initial, observations).norm_squared() > WEIGHT_ATOL
