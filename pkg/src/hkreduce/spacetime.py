"""1+1 dimensional Minkowski geometry in units where c = 1.

Events are immutable ``(t, x)`` points.  Causal classification uses a
relative tolerance band around the light cone so that floating point
classification is deterministic::

    eps = 1e-9 * max(1, dt**2 + dx**2)

An interval with ``|s2| < eps`` is lightlike; a displacement with both
``|dt| < eps`` and ``|dx| < eps`` is coincident.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional

LIGHTLIKE_RTOL = 1e-9


@dataclass(frozen=True)
class Event:
    t: float
    x: float
    label: Optional[str] = None

    def __post_init__(self) -> None:
        if not (math.isfinite(self.t) and math.isfinite(self.x)):
            raise ValueError(f"event coordinates must be finite, got ({self.t}, {self.x})")
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "x", float(self.x))

    def relabel(self, label: Optional[str]) -> "Event":
        return Event(self.t, self.x, label)


@dataclass(frozen=True)
class Boost:
    """Active Lorentz boost with velocity ``v`` (fraction of c)."""

    v: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.v) or abs(self.v) >= 1.0:
            raise ValueError(f"boost velocity must satisfy |v| < 1, got {self.v}")
        object.__setattr__(self, "v", float(self.v))

    @property
    def gamma(self) -> float:
        return 1.0 / math.sqrt(1.0 - self.v * self.v)

    def inverse(self) -> "Boost":
        return Boost(-self.v)


class CausalRelation(enum.Enum):
    """Where event ``b`` sits as seen from event ``a``."""

    TIMELIKE_FUTURE = "TimelikeFuture"
    TIMELIKE_PAST = "TimelikePast"
    LIGHTLIKE_FUTURE = "LightlikeFuture"
    LIGHTLIKE_PAST = "LightlikePast"
    SPACELIKE = "Spacelike"
    COINCIDENT = "Coincident"

    def mirror(self) -> "CausalRelation":
        return _MIRROR[self]


_MIRROR = {
    CausalRelation.TIMELIKE_FUTURE: CausalRelation.TIMELIKE_PAST,
    CausalRelation.TIMELIKE_PAST: CausalRelation.TIMELIKE_FUTURE,
    CausalRelation.LIGHTLIKE_FUTURE: CausalRelation.LIGHTLIKE_PAST,
    CausalRelation.LIGHTLIKE_PAST: CausalRelation.LIGHTLIKE_FUTURE,
    CausalRelation.SPACELIKE: CausalRelation.SPACELIKE,
    CausalRelation.COINCIDENT: CausalRelation.COINCIDENT,
}


def interval(a: Event, b: Event) -> float:
    """Squared interval ``dt**2 - dx**2``; positive for timelike separation."""
    dt = b.t - a.t
    dx = b.x - a.x
    return dt * dt - dx * dx


def lightlike_tolerance(a: Event, b: Event) -> float:
    dt = b.t - a.t
    dx = b.x - a.x
    return LIGHTLIKE_RTOL * max(1.0, dt * dt + dx * dx)


def in_lightlike_band(a: Event, b: Event) -> bool:
    return abs(interval(a, b)) < lightlike_tolerance(a, b)


def relation(a: Event, b: Event) -> CausalRelation:
    dt = b.t - a.t
    dx = b.x - a.x
    eps = lightlike_tolerance(a, b)
    if abs(dt) < eps and abs(dx) < eps:
        return CausalRelation.COINCIDENT
    s2 = dt * dt - dx * dx
    if abs(s2) < eps:
        return CausalRelation.LIGHTLIKE_FUTURE if dt > 0 else CausalRelation.LIGHTLIKE_PAST
    if s2 < 0:
        return CausalRelation.SPACELIKE
    return CausalRelation.TIMELIKE_FUTURE if dt > 0 else CausalRelation.TIMELIKE_PAST


def in_strict_past_cone(query: Event, vertex: Event) -> bool:
    """True iff ``query`` lies strictly inside the backward light cone of ``vertex``.

    The cone surface is excluded: events on it count as reduced.
    """
    return relation(vertex, query) is CausalRelation.TIMELIKE_PAST


def in_closed_future_cone(query: Event, vertex: Event) -> bool:
    return relation(vertex, query) in (
        CausalRelation.TIMELIKE_FUTURE,
        CausalRelation.LIGHTLIKE_FUTURE,
        CausalRelation.COINCIDENT,
    )


def boost(e: Event, b: Boost) -> Event:
    g = b.gamma
    t = g * (e.t - b.v * e.x)
    x = g * (e.x - b.v * e.t)
    if not (math.isfinite(t) and math.isfinite(x)):
        raise OverflowError(f"boost by v={b.v} overflowed for event ({e.t}, {e.x})")
    return Event(t, x, e.label)


def compose(b1: Boost, b2: Boost) -> Boost:
    """Relativistic velocity addition of two collinear boosts."""
    v = (b1.v + b2.v) / (1.0 + b1.v * b2.v)
    # rounding can land exactly on +-1 for extreme inputs
    if abs(v) >= 1.0:
        v = math.copysign(math.nextafter(1.0, 0.0), v)
    return Boost(v)
