"""Parameter independence and outcome dependence for two spacelike observers.

Observer A may or may not measure particle 1 (in Z or X); observer B
always measures particle 2 in Z.  Exact distributions are computed with
the reduction engine; Monte Carlo trials draw from them with a
counter-based generator keyed by ``(seed, trial index)`` so results do not
depend on how trials are scheduled.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional

import numpy as np

from . import hilbert
from .collapse import Observation, effective_state
from .hilbert import Basis, P, Projector, StateVector
from .spacetime import Event

EXACT_ATOL = 1e-12
SIGMA_THRESHOLD = 3.0

# the two-observer layout of fig3.json; the query sits where both reductions apply
EVENT_A = Event(0.0, -1.0, "A")
EVENT_B = Event(0.0, 1.0, "B")
QUERY_BOTH = Event(5.0, 0.0, "after")
QUERY_NEITHER = Event(-5.0, 0.0, "before")


@dataclass(frozen=True)
class Strategy:
    a_observes: bool = True
    a_basis: Basis = Basis.Z

    def describe(self) -> str:
        return f"A measures {self.a_basis.value}" if self.a_observes else "A does not look"


@dataclass(frozen=True)
class TrialRecord:
    strategy: Strategy
    a_outcome: Optional[int]
    b_outcome: int
    seed: int
    index: int

    def __post_init__(self) -> None:
        if (self.a_outcome is None) == self.strategy.a_observes:
            raise ValueError("a_outcome must be present exactly when A observes")


@dataclass(frozen=True)
class TrialRun:
    strategy: Strategy
    seed: int
    records: tuple[TrialRecord, ...]
    b_counts: Mapping[int, int]
    a_counts: Mapping[int, int]
    joint_counts: Mapping[tuple[int, int], int]

    @property
    def n(self) -> int:
        return len(self.records)

    def b_marginal(self) -> dict[int, float]:
        return {k: self.b_counts.get(k, 0) / self.n for k in (0, 1)}

    def joint_frequency(self, a: int, b: int) -> float:
        return self.joint_counts.get((a, b), 0) / self.n


def _normalize(dist: Mapping, total: float | None = None) -> dict:
    total = sum(dist.values()) if total is None else total
    return {k: v / total for k, v in dist.items()}


def exact_joint(strategy: Strategy, initial: StateVector | None = None) -> dict[tuple[Optional[int], int], float]:
    """Joint distribution of (A's outcome or None, B's Z outcome)."""
    initial = hilbert.singlet() if initial is None else initial
    if initial.is_zero():
        raise ValueError("initial state is the zero vector")
    norm2 = initial.norm_squared()
    joint: dict[tuple[Optional[int], int], float] = {}
    a_outcomes: Iterable[Optional[int]] = (0, 1) if strategy.a_observes else (None,)
    for a in a_outcomes:
        for b in (0, 1):
            obs = [Observation(EVENT_B, Projector(P(2), b))]
            if a is not None:
                obs.insert(0, Observation(EVENT_A, Projector(P(1), a, strategy.a_basis)))
            rep = effective_state(initial, QUERY_BOTH, obs)
            # A's subsystem is traced out when A does not look
            joint[(a, b)] = rep.probability_weight / norm2
    return joint


def exact_marginal_B(strategy: Strategy, initial: StateVector | None = None) -> dict[int, float]:
    marg = {0: 0.0, 1: 0.0}
    for (_, b), w in exact_joint(strategy, initial).items():
        marg[b] += w
    return marg


def exact_marginal_A(b_observes: bool, a_basis: Basis = Basis.Z, initial: StateVector | None = None) -> dict[int, float]:
    """A's outcome distribution with or without B's Z observation (the mirrored check)."""
    initial = hilbert.singlet() if initial is None else initial
    norm2 = initial.norm_squared()
    marg = {0: 0.0, 1: 0.0}
    for a in (0, 1):
        for b in (0, 1) if b_observes else (None,):
            obs = [Observation(EVENT_A, Projector(P(1), a, a_basis))]
            if b is not None:
                obs.append(Observation(EVENT_B, Projector(P(2), b)))
            marg[a] += effective_state(initial, QUERY_BOTH, obs).probability_weight / norm2
    return marg


def exact_conditional_B(
    a_outcome: int,
    a_basis: Basis = Basis.Z,
    initial: StateVector | None = None,
) -> dict[int, float]:
    joint = exact_joint(Strategy(True, a_basis), initial)
    row = {b: joint[(a_outcome, b)] for b in (0, 1)}
    total = sum(row.values())
    if total <= EXACT_ATOL:
        raise ValueError(f"A's outcome {a_outcome} has zero probability")
    return _normalize(row, total)


def total_variation(p: Mapping, q: Mapping) -> float:
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)


def trial_generator(seed: int, index: int) -> np.random.Generator:
    """Philox stream for one trial: key is the seed, counter starts at the trial index."""
    key = seed % (1 << 64)
    return np.random.Generator(np.random.Philox(key=key, counter=[0, 0, index % (1 << 64), 0]))


Sampler = Callable[[Strategy, np.random.Generator], tuple[Optional[int], int]]


def exact_sampler(initial: StateVector | None = None) -> Sampler:
    cache: dict[Strategy, tuple[list, np.ndarray]] = {}

    def sample(strategy: Strategy, rng: np.random.Generator) -> tuple[Optional[int], int]:
        if strategy not in cache:
            joint = exact_joint(strategy, initial)
            keys = sorted(joint, key=lambda k: (-1 if k[0] is None else k[0], k[1]))
            cache[strategy] = (keys, np.cumsum([joint[k] for k in keys]))
        keys, cdf = cache[strategy]
        u = rng.random() * cdf[-1]
        return keys[min(int(np.searchsorted(cdf, u, side="right")), len(keys) - 1)]

    return sample


def run_trials(
    strategy: Strategy,
    n: int,
    seed: int,
    sampler: Sampler | None = None,
) -> TrialRun:
    if n < 1:
        raise ValueError("need at least one trial")
    sampler = exact_sampler() if sampler is None else sampler
    records = []
    for i in range(n):
        a, b = sampler(strategy, trial_generator(seed, i))
        records.append(TrialRecord(strategy, a, b, seed, i))
    b_counts = Counter(r.b_outcome for r in records)
    a_counts = Counter(r.a_outcome for r in records if r.a_outcome is not None)
    joint = Counter((r.a_outcome, r.b_outcome) for r in records if r.a_outcome is not None)
    return TrialRun(strategy, seed, tuple(records), dict(b_counts), dict(a_counts), dict(joint))


@dataclass(frozen=True)
class SignalingReport:
    n: int
    seed: int
    p_observe: float
    p_ignore: float
    z: float
    chi_square: float
    passed: bool
    exact_difference: float
    exact_difference_mirrored: float
    details: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "seed": self.seed,
            "p_down_b_when_a_observes": self.p_observe,
            "p_down_b_when_a_ignores": self.p_ignore,
            "z": self.z,
            "chi_square": self.chi_square,
            "pass": self.passed,
            "exact_difference": self.exact_difference,
            "exact_difference_mirrored": self.exact_difference_mirrored,
        }


def two_proportion_z(k1: int, n1: int, k2: int, n2: int) -> float:
    """Pooled two-sample proportion z statistic (0 when both samples are degenerate)."""
    p1, p2 = k1 / n1, k2 / n2
    pooled = (k1 + k2) / (n1 + n2)
    se = math.sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2))
    if se == 0.0:
        return 0.0 if p1 == p2 else math.copysign(math.inf, p1 - p2)
    return (p1 - p2) / se


def signaling_test(
    n: int,
    seed: int,
    sampler: Sampler | None = None,
    a_basis: Basis = Basis.Z,
) -> SignalingReport:
    """Does A's choice to look shift B's statistics?

    Runs ``n`` trials with A observing and ``n`` with A not observing (the
    second batch keyed by ``seed + 1``) and compares B's spin-down rates.
    Passes when they agree within three standard errors.
    """
    if n < 100:
        raise ValueError("signaling test needs n >= 100")
    sampler = exact_sampler() if sampler is None else sampler
    looking = run_trials(Strategy(True, a_basis), n, seed, sampler)
    ignoring = run_trials(Strategy(False, a_basis), n, seed + 1, sampler)
    k1, k2 = looking.b_counts.get(1, 0), ignoring.b_counts.get(1, 0)
    z = two_proportion_z(k1, n, k2, n)

    exact_look = exact_marginal_B(Strategy(True, a_basis))
    exact_ignore = exact_marginal_B(Strategy(False, a_basis))
    exact_diff = max(abs(exact_look[b] - exact_ignore[b]) for b in (0, 1))
    mirror_look = exact_marginal_A(True, a_basis)
    mirror_ignore = exact_marginal_A(False, a_basis)
    mirror_diff = max(abs(mirror_look[a] - mirror_ignore[a]) for a in (0, 1))
    return SignalingReport(
        n=n,
        seed=seed,
        p_observe=k1 / n,
        p_ignore=k2 / n,
        z=z,
        chi_square=z * z,
        passed=abs(z) <= SIGMA_THRESHOLD,
        exact_difference=exact_diff,
        exact_difference_mirrored=mirror_diff,
        details={"looking": looking, "ignoring": ignoring},
    )
