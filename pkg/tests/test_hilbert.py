import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from hkreduce import hilbert
from hkreduce.hilbert import (
    CNOT,
    DOWN,
    HADAMARD,
    UP,
    Basis,
    D,
    P,
    Projector,
    StateVector,
    apply,
    apply_1q,
    basis_state,
    bell_pair,
    equal_up_to_phase,
    is_separable,
    probabilities,
    project,
    project_in_place,
    singlet,
    swap_labels,
    tensor,
    zero_state,
)

R2 = 1 / math.sqrt(2)


def random_state(labels, rng):
    n = len(labels)
    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return StateVector(labels, v)


states4 = st.integers(0, 2**32 - 1).map(
    lambda seed: random_state((P(1), P(2), D(1), D(2)), np.random.default_rng(seed))
)


def test_singlet_amplitudes():
    s = singlet()
    assert s.amplitude(UP, DOWN) == pytest.approx(R2, abs=1e-15)
    assert s.amplitude(DOWN, UP) == pytest.approx(-R2, abs=1e-15)
    assert s.amplitude(UP, UP) == 0
    assert s.amplitude(DOWN, DOWN) == 0
    assert s.norm() == pytest.approx(1.0, abs=1e-15)


def test_project_singlet_onto_up():
    out = project(singlet(), Projector(P(1), UP))
    assert out.labels == (P(2),)
    np.testing.assert_allclose(out.amplitudes, [0, R2], atol=1e-12)
    assert out.norm_squared() == pytest.approx(0.5, abs=1e-12)


def test_joint_projection_is_scalar():
    out = project(project(singlet(), Projector(P(1), UP)), Projector(P(2), DOWN))
    assert out.scalar() == pytest.approx(R2, abs=1e-12)
    assert abs(out.scalar()) ** 2 == pytest.approx(0.5, abs=1e-12)


def test_project_orthogonal_outcome_is_zero():
    psi = basis_state((P(1), P(2)), (UP, DOWN))
    assert project(psi, Projector(P(1), DOWN)).is_zero()


def test_project_unknown_label():
    with pytest.raises(KeyError):
        project(singlet(), Projector(D(1), 0))


def test_projector_rejects_bad_outcome():
    with pytest.raises(ValueError):
        Projector(P(1), 2)


def test_tensor_examples():
    prod = tensor(basis_state([P(1)], [UP]), basis_state([P(2)], [DOWN]))
    assert prod.amplitude(UP, DOWN) == 1
    assert prod.norm_squared() == 1
    big = tensor(singlet(), bell_pair(D(1), D(2)))
    assert big.amplitudes.size == 16
    assert big.norm() == pytest.approx(1.0, abs=1e-12)
    assert tensor(zero_state([P(1)]), bell_pair(D(1), D(2))).is_zero()


def test_tensor_rejects_overlap():
    with pytest.raises(ValueError):
        tensor(singlet(), basis_state([P(1)], [0]))


def test_cnot_truth_table():
    u = CNOT(P(1), D(1))
    up0 = basis_state((P(1), D(1)), (UP, 0))
    assert apply(up0, u).allclose(basis_state((P(1), D(1)), (UP, 1)))
    down0 = basis_state((P(1), D(1)), (DOWN, 0))
    assert apply(down0, u).allclose(down0)
    assert apply(apply(up0, u), u).allclose(up0)


def test_cnot_rejects_same_label():
    with pytest.raises(ValueError):
        CNOT(P(1), P(1))


def test_cnot_unknown_label():
    with pytest.raises(KeyError):
        apply(singlet(), CNOT(P(1), D(1)))


@pytest.mark.parametrize("control, target", [(0, 1), (1, 0), (0, 3), (3, 1), (2, 0)])
def test_cnot_matches_explicit_permutation(control, target):
    # oracle: permute basis indices by hand
    labels = (P(1), P(2), D(1), D(2))
    psi = random_state(labels, np.random.default_rng(control * 10 + target))
    expected = np.zeros(16, dtype=complex)
    for i in range(16):
        bits = [(i >> (3 - k)) & 1 for k in range(4)]
        if bits[control] == 0:
            bits[target] ^= 1
        j = int("".join(map(str, bits)), 2)
        expected[j] = psi.amplitudes[i]
    out = apply(psi, CNOT(labels[control], labels[target]))
    np.testing.assert_allclose(out.amplitudes, expected, atol=0)


def test_separability_examples():
    assert not is_separable(singlet(), {P(1)})
    prod = tensor(basis_state([P(1)], [UP]), basis_state([P(2)], [DOWN]))
    assert is_separable(prod, {P(1)})


def test_separability_errors():
    with pytest.raises(ValueError):
        is_separable(zero_state([P(1), P(2)]), {P(1)})
    with pytest.raises(ValueError):
        is_separable(singlet(), set())
    with pytest.raises(ValueError):
        is_separable(singlet(), {P(1), P(2)})


def test_probabilities_examples():
    assert probabilities(singlet(), [P(1)]) == pytest.approx({(0,): 0.5, (1,): 0.5}, abs=1e-12)
    joint = probabilities(singlet(), [P(1), P(2)])
    assert joint == pytest.approx({(0, 0): 0.0, (0, 1): 0.5, (1, 0): 0.5, (1, 1): 0.0}, abs=1e-12)
    assert probabilities(basis_state([P(1)], [UP]), [P(1)]) == {(0,): 1.0, (1,): 0.0}
    with pytest.raises(ValueError):
        probabilities(zero_state([P(1)]), [P(1)])


def test_max_subsystems():
    with pytest.raises(ValueError):
        zero_state([P(i) for i in range(1, 10)])


def test_label_parse():
    assert hilbert.SubsystemLabel.parse("D2") == D(2)
    assert str(P(1)) == "P1"
    with pytest.raises(ValueError):
        hilbert.SubsystemLabel.parse("Q1")


@given(states4, st.sampled_from([P(1), P(2), D(1), D(2)]), st.sampled_from(list(Basis)), st.integers(0, 1))
def test_projector_idempotent(psi, label, basis, outcome):
    p = Projector(label, outcome, basis)
    once = project_in_place(psi, p)
    assert project_in_place(once, p).allclose(once, atol=1e-12)


@given(states4, st.sampled_from([P(1), P(2), D(1), D(2)]), st.sampled_from(list(Basis)))
def test_projector_completeness(psi, label, basis):
    total = sum(project(psi, Projector(label, o, basis)).norm_squared() for o in (0, 1))
    assert total == pytest.approx(psi.norm_squared(), abs=1e-12 * max(1, psi.norm_squared()))


@given(states4, st.permutations([P(1), P(2), D(1), D(2)]))
def test_cnot_unitary(psi, order):
    out = apply(psi, CNOT(order[0], order[1]))
    assert out.norm() == pytest.approx(psi.norm(), abs=1e-12)
    assert apply(out, CNOT(order[0], order[1])).allclose(psi, atol=1e-12)


GRID = [0.0, 0.5, -0.5, R2, -R2]
grid_states = st.lists(st.sampled_from(GRID), min_size=16, max_size=16).map(
    lambda a: StateVector((P(1), P(2), D(1), D(2)), a)
)
grid_2q = st.lists(st.sampled_from(GRID), min_size=4, max_size=4)
product_grid_states = st.tuples(grid_2q, grid_2q).map(
    lambda ab: tensor(StateVector((P(1), D(1)), ab[0]), StateVector((P(2), D(2)), ab[1]))
)
PARTITIONS = [set(c) for k in (1, 2, 3) for c in combinations([P(1), P(2), D(1), D(2)], k)]


def factorizes(psi: StateVector, part: set) -> bool:
    """Brute-force oracle: try to write the coefficient matrix as an outer product."""
    m = hilbert.bipartition_matrix(psi, part)
    i, j = np.unravel_index(np.argmax(np.abs(m)), m.shape)
    col = m[:, j]
    row = m[i, :] / m[i, j]
    return bool(np.allclose(np.outer(col, row), m, atol=1e-12))


@given(st.one_of(grid_states, product_grid_states), st.sampled_from(PARTITIONS))
def test_separability_matches_factorization_search(psi, part):
    assume(not psi.is_zero())
    assert is_separable(psi, part) == factorizes(psi, part)


def test_singlet_antisymmetry():
    s = singlet()
    swapped = swap_labels(s, P(1), P(2))
    np.testing.assert_array_equal(swapped.amplitudes, -s.amplitudes)


def test_singlet_basis_covariance():
    s = singlet()
    rotated = apply_1q(apply_1q(s, P(1), HADAMARD), P(2), HADAMARD)
    assert equal_up_to_phase(rotated, s, atol=1e-12)


def test_x_basis_singlet_anticorrelation():
    joint = probabilities(singlet(), [P(1), P(2)], Basis.X)
    assert joint[(0, 0)] == pytest.approx(0.0, abs=1e-12)
    assert joint[(0, 1)] == pytest.approx(0.5, abs=1e-12)


def test_state_is_immutable():
    s = singlet()
    with pytest.raises(ValueError):
        s.amplitudes[0] = 1.0
