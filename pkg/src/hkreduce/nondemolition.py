"""Ancilla-pair model of the nonlocal nondemolition experiment.

Two particles in the singlet are each monitored by a one-qubit detector.
The detectors are prepared jointly as (|00> + |11>)/sqrt(2); each
detector-particle interaction is a CNOT from particle i to detector i
(an up particle flips its detector).  After both detectors have interacted
the same number of times the detector parity records the singlet's z
anti-correlation without disturbing it; in between, particles and
detectors are entangled.

A *comparison* of the detectors is a pure query and never changes the
state.  An *observation* is a joint Z measurement of both detectors and
reduces the state.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from itertools import product
from typing import Callable, Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from . import hilbert
from .hilbert import CNOT, HADAMARD, D, P, Projector, StateVector, apply, apply_1q
from .spacetime import Boost, CausalRelation, Event, boost, relation

MAX_INTERACTIONS = 2
PARTICLES = (P(1), P(2))
DETECTORS = (D(1), D(2))
FIDELITY_TOL = 1e-9


class Epoch(NamedTuple):
    """Interactions completed so far by detector 1 and detector 2."""

    k1: int
    k2: int

    def validate(self) -> "Epoch":
        if not (0 <= self.k1 <= MAX_INTERACTIONS and 0 <= self.k2 <= MAX_INTERACTIONS):
            raise ValueError(f"unreachable epoch {tuple(self)}; counts must lie in 0..{MAX_INTERACTIONS}")
        return self


# worldline events of each detector, by interaction count
EVENTS_OF_DETECTOR = {1: ("1", "3"), 2: ("2", "4")}


class Comparison(enum.Enum):
    DEFINITE = "Definite"
    INDEFINITE = "Indefinite"


class Verdict(enum.Enum):
    NONDEMOLITIONAL = "Nondemolitional"
    DEMOLITIONAL = "Demolitional"


def default_preparation() -> StateVector:
    return hilbert.bell_pair(D(1), D(2))


@dataclass(frozen=True)
class CycleState:
    global_state: StateVector
    epoch: Epoch
    preparation: StateVector
    # X-parity cycles conjugate each CNOT by a Hadamard on the particle
    x_parity: bool = False
    observed: bool = False

    def particles(self) -> np.ndarray:
        return hilbert.reduced_density(self.global_state, list(PARTICLES))

    def detectors(self) -> np.ndarray:
        return hilbert.reduced_density(self.global_state, list(DETECTORS))


@dataclass(frozen=True)
class PairClassification:
    pair: Epoch
    verdict: Verdict


def prepare(preparation: StateVector | None = None, x_parity: bool = False) -> CycleState:
    det = default_preparation() if preparation is None else preparation.reorder(DETECTORS).normalized()
    state = hilbert.tensor(hilbert.singlet(), det)
    return CycleState(state, Epoch(0, 0), det, x_parity)


def _interaction(state: StateVector, detector: int, x_parity: bool) -> StateVector:
    particle = P(detector)
    if x_parity:
        state = apply_1q(state, particle, HADAMARD)
    state = apply(state, CNOT(particle, D(detector)))
    if x_parity:
        state = apply_1q(state, particle, HADAMARD)
    return state


def interact(s: CycleState, detector: int) -> CycleState:
    if detector not in (1, 2):
        raise ValueError(f"detector must be 1 or 2, got {detector!r}")
    k = s.epoch[detector - 1]
    if k >= MAX_INTERACTIONS:
        raise ValueError(f"detector {detector} has already completed {MAX_INTERACTIONS} interactions")
    epoch = Epoch(s.epoch.k1 + (detector == 1), s.epoch.k2 + (detector == 2))
    return replace(s, global_state=_interaction(s.global_state, detector, s.x_parity), epoch=epoch)


def at_epoch(
    epoch: Epoch | Sequence[int],
    preparation: StateVector | None = None,
    x_parity: bool = False,
    order: Iterable[int] | None = None,
) -> CycleState:
    """The cycle state after ``epoch`` interactions, applied in ``order``.

    ``order`` lists detector numbers; by default detector 1 goes first.
    """
    epoch = Epoch(*epoch).validate()
    if order is None:
        order = [1] * epoch.k1 + [2] * epoch.k2
    order = list(order)
    if order.count(1) != epoch.k1 or order.count(2) != epoch.k2:
        raise ValueError(f"interaction order {order} does not reach epoch {tuple(epoch)}")
    s = prepare(preparation, x_parity)
    for det in order:
        s = interact(s, det)
    return s


def compare(s: CycleState) -> Comparison:
    """Whether the combined detector variables are definite, without touching the state."""
    if hilbert.is_separable(s.global_state, PARTICLES):
        return Comparison.DEFINITE
    return Comparison.INDEFINITE


def outcome_probabilities(s: CycleState) -> dict[tuple[int, int], float]:
    return hilbert.probabilities(s.global_state, list(DETECTORS))


OutcomeSelector = Callable[[Mapping[tuple[int, int], float]], tuple[int, int]]


def sampler_from_rng(rng: np.random.Generator) -> OutcomeSelector:
    def select(dist: Mapping[tuple[int, int], float]) -> tuple[int, int]:
        keys = sorted(dist)
        u = rng.random()
        acc = 0.0
        for k in keys:
            acc += dist[k]
            if u < acc:
                return k
        # u landed in the rounding slack above the cumulative sum
        return next(k for k in reversed(keys) if dist[k] > 0)

    return select


def observe(
    s: CycleState,
    outcome: tuple[int, int] | OutcomeSelector | np.random.Generator,
) -> tuple[tuple[int, int], CycleState]:
    """Jointly measure both detectors in Z, returning the outcomes and the renormalized state.

    ``outcome`` is an explicit bit pair for deterministic replay, a
    selector called with the outcome distribution, or a numpy Generator.
    """
    dist = outcome_probabilities(s)
    if isinstance(outcome, np.random.Generator):
        outcome = sampler_from_rng(outcome)
    if callable(outcome):
        outcome = outcome(dist)
    bits = (int(outcome[0]), int(outcome[1]))
    if dist[bits] <= 1e-15:
        raise ValueError(f"detector outcome {bits} has zero probability at epoch {tuple(s.epoch)}")
    post = s.global_state
    for label, bit in zip(DETECTORS, bits):
        post = hilbert.project_in_place(post, Projector(label, bit))
    return bits, replace(s, global_state=post.normalized(), observed=True)


def singlet_fidelity(s: CycleState) -> float:
    return hilbert.fidelity(s.global_state, hilbert.singlet())


def classify_pair(
    pair: Epoch | Sequence[int],
    preparation: StateVector | None = None,
    x_parity: bool = False,
) -> PairClassification:
    pair = Epoch(*pair).validate()
    verdict = Verdict.NONDEMOLITIONAL
    if compare(at_epoch(pair, preparation, x_parity)) is Comparison.INDEFINITE:
        verdict = Verdict.DEMOLITIONAL
    return PairClassification(pair, verdict)


def demolishing_outcomes(s: CycleState) -> list[tuple[int, int]]:
    """Observation outcomes whose post-state leaves the particles off the singlet."""
    bad = []
    for bits, p in outcome_probabilities(s).items():
        if p <= 1e-15:
            continue
        _, post = observe(s, bits)
        if singlet_fidelity(post) < 1.0 - FIDELITY_TOL:
            bad.append(bits)
    return bad


def pair_name(pair: Epoch | Sequence[int]) -> str:
    """Worldline event names of the last interactions, e.g. (2, 1) -> '3-2'."""
    k1, k2 = pair
    left = EVENTS_OF_DETECTOR[1][k1 - 1] if k1 else "I"
    right = EVENTS_OF_DETECTOR[2][k2 - 1] if k2 else "I"
    return f"{left}-{right}"


def validate_geometry(geometry: Mapping[str, Event]) -> None:
    """Check the two-worldline layout: 1 before 3, 2 before 4, left events spacelike to right ones."""
    missing = [k for k in ("1", "2", "3", "4") if k not in geometry]
    if missing:
        raise ValueError(f"geometry is missing interaction events {missing}")
    for det, (first, second) in EVENTS_OF_DETECTOR.items():
        r = relation(geometry[first], geometry[second])
        if r not in (CausalRelation.TIMELIKE_FUTURE, CausalRelation.LIGHTLIKE_FUTURE):
            raise ValueError(
                f"events {first} and {second} of detector {det} must be future-ordered on its worldline, got {r.value}"
            )
    for left in EVENTS_OF_DETECTOR[1]:
        for right in EVENTS_OF_DETECTOR[2]:
            r = relation(geometry[left], geometry[right])
            if r is not CausalRelation.SPACELIKE:
                raise ValueError(f"events {left} and {right} must be spacelike separated, got {r.value}")


def interaction_order(pair: Epoch, geometry: Mapping[str, Event]) -> list[int]:
    """Detector numbers of the interactions reaching ``pair``, sorted by coordinate time."""
    steps = [(geometry[EVENTS_OF_DETECTOR[det][k]], det) for det, n in ((1, pair.k1), (2, pair.k2)) for k in range(n)]
    steps.sort(key=lambda s: s[0].t)
    return [det for _, det in steps]


@dataclass(frozen=True)
class FrameResult:
    v: float
    order: tuple[str, ...]
    verdict: Verdict
    state_matches: bool


def frame_sweep_detail(
    pair: Epoch | Sequence[int],
    boosts: Sequence[Boost | float],
    geometry: Mapping[str, Event],
    preparation: StateVector | None = None,
) -> list[FrameResult]:
    pair = Epoch(*pair).validate()
    validate_geometry(geometry)
    reference = at_epoch(pair, preparation).global_state
    base = classify_pair(pair, preparation).verdict
    results = []
    for b in boosts:
        b = b if isinstance(b, Boost) else Boost(b)
        moved = {k: boost(e, b) for k, e in geometry.items()}
        order = interaction_order(pair, moved)
        s = at_epoch(pair, preparation, order=order)
        counts = {1: 0, 2: 0}
        names = []
        for det in order:
            names.append(EVENTS_OF_DETECTOR[det][counts[det]])
            counts[det] += 1
        verdict = Verdict.NONDEMOLITIONAL if compare(s) is Comparison.DEFINITE else Verdict.DEMOLITIONAL
        results.append(FrameResult(b.v, tuple(names), verdict, s.global_state.allclose(reference, atol=1e-12)))
        if verdict is not base:
            break
    return results


def frame_sweep(
    pair: Epoch | Sequence[int],
    boosts: Sequence[Boost | float],
    geometry: Mapping[str, Event],
    preparation: StateVector | None = None,
) -> bool:
    """Whether the pair's verdict and global state agree in every boosted frame.

    In each frame the interactions are applied in that frame's time order.
    """
    pair = Epoch(*pair).validate()
    base = classify_pair(pair, preparation).verdict
    return all(
        r.verdict is base and r.state_matches for r in frame_sweep_detail(pair, boosts, geometry, preparation)
    )


def _preparation_grid() -> list[StateVector]:
    # two-qubit states with amplitudes from {0, +-1, +-i}, normalized, up to global phase
    values = (0, 1, -1, 1j, -1j)
    seen = set()
    out = []
    for amps in product(values, repeat=4):
        v = np.array(amps, dtype=complex)
        if not v.any():
            continue
        first = v[np.flatnonzero(v)[0]]
        v = v / first
        key = tuple(np.round(v, 9))
        if key in seen:
            continue
        seen.add(key)
        out.append(StateVector(DETECTORS, v / np.linalg.norm(v)))
    return out


def search_preparations(
    requirements: Mapping[tuple[int, int], Comparison],
    candidates: Iterable[StateVector] | None = None,
) -> list[StateVector]:
    """Detector preparations whose comparison verdicts meet every requirement.

    With no explicit candidates, searches the grid of two-qubit states whose
    amplitudes are drawn from {0, +-1, +-i} before normalization.
    """
    reqs = {Epoch(*k).validate(): v for k, v in requirements.items()}
    found = []
    for prep in candidates if candidates is not None else _preparation_grid():
        if all(compare(at_epoch(e, prep)) is want for e, want in reqs.items()):
            found.append(prep)
    return found


def alternative_preparation() -> StateVector:
    """A detector preparation making epoch (1, 0) definite and (1, 1) indefinite."""
    found = search_preparations({(1, 0): Comparison.DEFINITE, (1, 1): Comparison.INDEFINITE})
    if not found:
        raise RuntimeError("no alternative preparation found on the search grid")
    return found[0]


def comparison_table(preparation: StateVector | None = None) -> dict[Epoch, Comparison]:
    return {
        Epoch(k1, k2): compare(at_epoch((k1, k2), preparation))
        for k1 in range(MAX_INTERACTIONS + 1)
        for k2 in range(MAX_INTERACTIONS + 1)
    }


def parity(bits: tuple[int, int]) -> int:
    return bits[0] ^ bits[1]


def detector_marginal(s: CycleState, detector: int) -> dict[int, float]:
    dist = hilbert.probabilities(s.global_state, [D(detector)])
    return {k[0]: v for k, v in dist.items()}


__all__ = [
    "Comparison",
    "CycleState",
    "Epoch",
    "FrameResult",
    "PairClassification",
    "Verdict",
    "alternative_preparation",
    "at_epoch",
    "classify_pair",
    "compare",
    "comparison_table",
    "demolishing_outcomes",
    "detector_marginal",
    "frame_sweep",
    "frame_sweep_detail",
    "interact",
    "interaction_order",
    "observe",
    "outcome_probabilities",
    "pair_name",
    "parity",
    "prepare",
    "search_preparations",
    "singlet_fidelity",
    "validate_geometry",
]
