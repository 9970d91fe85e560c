"""Exact state vectors over labeled two-level subsystems.

Basis convention: bit 0 is |up> for particles and |0> for detectors, bit 1
is |down> / |1>.  The first label is the most significant bit.  States
may be unnormalized; normalization is always an explicit step.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from itertools import product
from typing import Iterable, NamedTuple, Sequence

import numpy as np

MAX_SUBSYSTEMS = 8
SEPARABILITY_TOL = 1e-9

UP = ZERO = PLUS = 0
DOWN = ONE = MINUS = 1

_INV_SQRT2 = 1.0 / math.sqrt(2.0)
HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) * _INV_SQRT2


class Kind(enum.Enum):
    PARTICLE = "P"
    DETECTOR = "D"


class SubsystemLabel(NamedTuple):
    kind: Kind
    index: int

    def __str__(self) -> str:
        return f"{self.kind.value}{self.index}"

    @classmethod
    def parse(cls, text: str) -> "SubsystemLabel":
        text = text.strip()
        try:
            kind = Kind(text[0].upper())
            index = int(text[1:])
        except (IndexError, ValueError):
            raise ValueError(f"bad subsystem label {text!r}; expected e.g. 'P1' or 'D2'") from None
        if index < 1:
            raise ValueError(f"subsystem index must be positive, got {text!r}")
        return cls(kind, index)


def P(i: int) -> SubsystemLabel:
    return SubsystemLabel(Kind.PARTICLE, i)


def D(i: int) -> SubsystemLabel:
    return SubsystemLabel(Kind.DETECTOR, i)


class Basis(enum.Enum):
    Z = "Z"
    X = "X"


# rows are <outcome| in the computational basis
_BRAS = {
    Basis.Z: np.eye(2, dtype=complex),
    Basis.X: HADAMARD.conj().T,
}


@dataclass(frozen=True, eq=False)
class StateVector:
    labels: tuple[SubsystemLabel, ...]
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        labels = tuple(self.labels)
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate subsystem labels: {[str(l) for l in labels]}")
        if len(labels) > MAX_SUBSYSTEMS:
            raise ValueError(f"at most {MAX_SUBSYSTEMS} subsystems supported, got {len(labels)}")
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != 2 ** len(labels):
            raise ValueError(f"{len(labels)} subsystems need {2 ** len(labels)} amplitudes, got {amps.size}")
        amps.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n(self) -> int:
        return len(self.labels)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def is_zero(self, atol: float = 1e-15) -> bool:
        return self.norm() <= atol

    def normalized(self) -> "StateVector":
        nrm = self.norm()
        if nrm == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.labels, self.amplitudes / nrm)

    def tensor_view(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.n)

    def axis(self, label: SubsystemLabel) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"subsystem {label} not in state {[str(l) for l in self.labels]}") from None

    def amplitude(self, *bits: int) -> complex:
        if len(bits) != self.n:
            raise ValueError(f"need {self.n} bits, got {len(bits)}")
        return complex(self.tensor_view()[tuple(bits)])

    def scalar(self) -> complex:
        if self.n != 0:
            raise ValueError("state still has subsystems; not a scalar")
        return complex(self.amplitudes[0])

    def reorder(self, labels: Sequence[SubsystemLabel]) -> "StateVector":
        labels = tuple(labels)
        if len(labels) != self.n or set(labels) != set(self.labels):
            raise ValueError("reorder needs a permutation of the existing labels")
        perm = [self.axis(l) for l in labels]
        return StateVector(labels, np.transpose(self.tensor_view(), perm).reshape(-1))

    def allclose(self, other: "StateVector", atol: float = 1e-12) -> bool:
        if set(self.labels) != set(other.labels):
            return False
        other = other.reorder(self.labels)
        return bool(np.allclose(self.amplitudes, other.amplitudes, rtol=0.0, atol=atol))

    def __repr__(self) -> str:
        return f"StateVector({[str(l) for l in self.labels]}, {np.round(self.amplitudes, 12).tolist()})"


@dataclass(frozen=True)
class Projector:
    """The bra <outcome| on one subsystem, in the Z or X basis."""

    target: SubsystemLabel
    outcome: int
    basis: Basis = Basis.Z

    def __post_init__(self) -> None:
        if self.outcome not in (0, 1):
            raise ValueError(f"projector outcome must be 0 or 1, got {self.outcome!r}")

    @property
    def bra(self) -> np.ndarray:
        return _BRAS[self.basis][self.outcome]

    @property
    def ket(self) -> np.ndarray:
        return self.bra.conj()


@dataclass(frozen=True)
class CNOT:
    """Controlled flip of ``target`` when ``control`` is in its bit-0 state.

    Bit 0 is |up> for a particle, so an up particle flips its detector.
    """

    control: SubsystemLabel
    target: SubsystemLabel

    def __post_init__(self) -> None:
        if self.control == self.target:
            raise ValueError("CNOT control and target must differ")


Unitary2Q = CNOT


def basis_state(labels: Sequence[SubsystemLabel], bits: Sequence[int]) -> StateVector:
    labels = tuple(labels)
    if len(bits) != len(labels):
        raise ValueError("one bit per label required")
    amps = np.zeros(2 ** len(labels), dtype=complex)
    amps[int("".join(str(b) for b in bits) or "0", 2)] = 1.0
    return StateVector(labels, amps)


def scalar_state(value: complex) -> StateVector:
    return StateVector((), np.array([value], dtype=complex))


def zero_state(labels: Sequence[SubsystemLabel]) -> StateVector:
    return StateVector(tuple(labels), np.zeros(2 ** len(labels), dtype=complex))


def singlet(first: SubsystemLabel = P(1), second: SubsystemLabel = P(2)) -> StateVector:
    """(|up,down> - |down,up>)/sqrt(2) on two particles."""
    return StateVector((first, second), np.array([0.0, _INV_SQRT2, -_INV_SQRT2, 0.0], dtype=complex))


def bell_pair(first: SubsystemLabel, second: SubsystemLabel, odd: bool = False) -> StateVector:
    """(|00> + |11>)/sqrt(2), or (|01> + |10>)/sqrt(2) when ``odd``."""
    amps = [0.0, _INV_SQRT2, _INV_SQRT2, 0.0] if odd else [_INV_SQRT2, 0.0, 0.0, _INV_SQRT2]
    return StateVector((first, second), np.array(amps, dtype=complex))


def tensor(a: StateVector, b: StateVector) -> StateVector:
    overlap = set(a.labels) & set(b.labels)
    if overlap:
        raise ValueError(f"tensor product needs disjoint labels, both contain {sorted(str(l) for l in overlap)}")
    return StateVector(a.labels + b.labels, np.kron(a.amplitudes, b.amplitudes))


def project(psi: StateVector, p: Projector) -> StateVector:
    """Partial inner product <outcome|_target psi; the target is removed.

    The squared norm of the result is the outcome probability when ``psi``
    is normalized.
    """
    ax = psi.axis(p.target)
    out = np.tensordot(p.bra, psi.tensor_view(), axes=([0], [ax]))
    labels = psi.labels[:ax] + psi.labels[ax + 1 :]
    return StateVector(labels, out.reshape(-1))


def project_in_place(psi: StateVector, p: Projector) -> StateVector:
    """The operator |o><o| applied to ``psi``; the target label is kept."""
    ax = psi.axis(p.target)
    reduced = project(psi, p).tensor_view()
    out = np.multiply.outer(reduced, p.ket)  # target axis now last
    out = np.moveaxis(out, -1, ax)
    return StateVector(psi.labels, out.reshape(-1))


def apply(psi: StateVector, u: CNOT) -> StateVector:
    c = psi.axis(u.control)
    t = psi.axis(u.target)
    arr = np.array(psi.tensor_view())
    idx = [slice(None)] * psi.n
    idx[c] = 0
    sub = arr[tuple(idx)]
    # target axis index shifts down by one once the control axis is sliced away
    t_sub = t - 1 if t > c else t
    arr[tuple(idx)] = np.flip(sub, axis=t_sub).copy()
    return StateVector(psi.labels, arr.reshape(-1))


def apply_1q(psi: StateVector, target: SubsystemLabel, matrix: np.ndarray) -> StateVector:
    ax = psi.axis(target)
    out = np.tensordot(np.asarray(matrix, dtype=complex), psi.tensor_view(), axes=([1], [ax]))
    out = np.moveaxis(out, 0, ax)
    return StateVector(psi.labels, out.reshape(-1))


def swap_labels(psi: StateVector, a: SubsystemLabel, b: SubsystemLabel) -> StateVector:
    """Exchange the physical contents of two subsystems (label order kept)."""
    ia, ib = psi.axis(a), psi.axis(b)
    return StateVector(psi.labels, np.swapaxes(psi.tensor_view(), ia, ib).reshape(-1))


def bipartition_matrix(psi: StateVector, partition: Iterable[SubsystemLabel]) -> np.ndarray:
    """Coefficient matrix with rows indexed by ``partition`` and columns by the rest."""
    partition = set(partition)
    part = [l for l in psi.labels if l in partition]
    rest = [l for l in psi.labels if l not in partition]
    arr = psi.reorder(part + rest).amplitudes
    return arr.reshape(2 ** len(part), 2 ** len(rest))


def reduced_density(psi: StateVector, keep: Sequence[SubsystemLabel]) -> np.ndarray:
    """Partial trace of |psi><psi| onto ``keep`` (in the given order); not renormalized."""
    keep = list(keep)
    for l in keep:
        psi.axis(l)
    m = bipartition_matrix(psi.reorder(keep + [l for l in psi.labels if l not in keep]), keep)
    return m @ m.conj().T


def purity(psi: StateVector, partition: Iterable[SubsystemLabel]) -> float:
    partition = set(partition)
    part = [l for l in psi.labels if l in partition]
    rho = reduced_density(psi.normalized(), part)
    return float(np.real(np.trace(rho @ rho)))


def is_separable(psi: StateVector, partition: Iterable[SubsystemLabel], tol: float = SEPARABILITY_TOL) -> bool:
    """Whether ``psi`` factorizes across ``partition`` and its complement.

    Decided by the purity of the reduced state on ``partition``: a pure
    reduced state means Schmidt rank one.
    """
    partition = set(partition)
    for l in partition:
        psi.axis(l)
    if not partition or len(partition) == psi.n:
        raise ValueError("partition must be a proper nonempty subset of the labels")
    if psi.is_zero():
        raise ValueError("separability is undefined for the zero vector")
    return purity(psi, partition) >= 1.0 - tol


def probabilities(
    psi: StateVector,
    targets: Sequence[SubsystemLabel],
    basis: Basis = Basis.Z,
) -> dict[tuple[int, ...], float]:
    """Outcome distribution of measuring ``targets`` in ``basis``.

    Keys are bit tuples in the order of ``targets``.
    """
    if psi.is_zero():
        raise ValueError("probabilities are undefined for the zero vector")
    psi = psi.normalized()
    dist: dict[tuple[int, ...], float] = {}
    for bits in product((0, 1), repeat=len(targets)):
        out = psi
        for label, bit in zip(targets, bits):
            out = project(out, Projector(label, bit, basis))
        dist[bits] = out.norm_squared()
    return dist


def fidelity(psi: StateVector, target: StateVector) -> float:
    """|<target|rho|target>| where rho is psi's normalized reduced state on target's labels."""
    rho = reduced_density(psi.normalized(), list(target.labels))
    t = target.normalized().amplitudes
    return float(np.real(np.vdot(t, rho @ t)))


def equal_up_to_phase(a: StateVector, b: StateVector, atol: float = 1e-12) -> bool:
    if set(a.labels) != set(b.labels):
        return False
    b = b.reorder(a.labels)
    va, vb = a.amplitudes, b.amplitudes
    k = int(np.argmax(np.abs(va)))
    if abs(vb[k]) < atol:
        return bool(np.allclose(va, 0, atol=atol) and np.allclose(vb, 0, atol=atol))
    phase = va[k] / vb[k]
    if abs(abs(phase) - 1.0) > atol:
        return False
    return bool(np.allclose(va, phase * vb, rtol=0.0, atol=atol))
