import math
from concurrent.futures import ThreadPoolExecutor

import pytest

from hkreduce.hilbert import Basis, P, basis_state
from hkreduce.nosignal import (
    Strategy,
    TrialRecord,
    exact_conditional_B,
    exact_joint,
    exact_marginal_A,
    exact_marginal_B,
    exact_sampler,
    run_trials,
    signaling_test,
    total_variation,
    trial_generator,
    two_proportion_z,
)

STRATEGIES = [Strategy(True, Basis.Z), Strategy(False, Basis.Z), Strategy(True, Basis.X), Strategy(False, Basis.X)]
HALF = {0: 0.5, 1: 0.5}


def leaky_sampler(strategy, rng):
    """Broken on purpose: B's down probability shifts by 0.1 when A looks."""
    p_down = 0.6 if strategy.a_observes else 0.5
    b = 1 if rng.random() < p_down else 0
    a = (1 - b) if strategy.a_observes else None
    return a, b


@pytest.mark.parametrize("strategy", STRATEGIES)
def test_exact_marginal_is_half(strategy):
    assert exact_marginal_B(strategy) == pytest.approx(HALF, abs=1e-12)
    assert sum(exact_marginal_B(strategy).values()) == pytest.approx(1.0, abs=1e-12)


def test_x_basis_marginal_by_hand():
    # A's X outcome leaves B's Z statistics at 1/4 per joint cell
    joint = exact_joint(Strategy(True, Basis.X))
    assert joint == pytest.approx({(a, b): 0.25 for a in (0, 1) for b in (0, 1)}, abs=1e-12)


def test_parameter_independence_exact():
    marginals = [exact_marginal_B(s) for s in STRATEGIES]
    for m in marginals[1:]:
        for b in (0, 1):
            assert abs(m[b] - marginals[0][b]) <= 1e-12


def test_mirrored_parameter_independence():
    assert exact_marginal_A(True) == pytest.approx(exact_marginal_A(False), abs=1e-12)
    assert exact_marginal_A(True, Basis.X) == pytest.approx(HALF, abs=1e-12)


def test_outcome_dependence():
    assert exact_conditional_B(0) == pytest.approx({0: 0.0, 1: 1.0}, abs=1e-12)
    assert exact_conditional_B(1) == pytest.approx({0: 1.0, 1: 0.0}, abs=1e-12)
    tv = total_variation(exact_conditional_B(0), exact_marginal_B(Strategy()))
    assert tv == pytest.approx(0.5, abs=1e-12)


def test_product_state_has_no_outcome_dependence():
    prod = basis_state((P(1), P(2)), (0, 1))
    assert exact_conditional_B(0, initial=prod) == pytest.approx(exact_marginal_B(Strategy(), prod), abs=1e-12)
    with pytest.raises(ValueError, match="zero probability"):
        exact_conditional_B(1, initial=prod)


def test_joint_consistency():
    joint = exact_joint(Strategy())
    p_a = {a: joint[(a, 0)] + joint[(a, 1)] for a in (0, 1)}
    recombined = {b: sum(p_a[a] * exact_conditional_B(a)[b] for a in (0, 1)) for b in (0, 1)}
    assert recombined == pytest.approx(exact_marginal_B(Strategy()), abs=1e-12)


def test_run_trials_converges():
    run = run_trials(Strategy(), 10_000, seed=12345)
    tol = 3 * math.sqrt(0.25 / 10_000)
    assert abs(run.b_marginal()[1] - 0.5) <= tol
    assert abs(run.joint_frequency(0, 1) - 0.5) <= tol
    # no (up, up) or (down, down) ever: perfect anti-correlation
    assert run.joint_frequency(0, 0) == 0 and run.joint_frequency(1, 1) == 0


def test_run_trials_is_deterministic():
    a = run_trials(Strategy(), 500, seed=9)
    b = run_trials(Strategy(), 500, seed=9)
    assert a.records == b.records
    assert run_trials(Strategy(), 500, seed=10).records != a.records


def test_single_trial():
    run = run_trials(Strategy(), 1, seed=3)
    assert run.n == 1
    rec = run.records[0]
    assert exact_joint(Strategy())[(rec.a_outcome, rec.b_outcome)] > 0


def test_trial_record_invariant():
    with pytest.raises(ValueError):
        TrialRecord(Strategy(False), 0, 1, 0, 0)
    with pytest.raises(ValueError):
        TrialRecord(Strategy(True), None, 1, 0, 0)
    assert all(r.a_outcome is None for r in run_trials(Strategy(False), 20, 1).records)


def test_run_trials_rejects_zero():
    with pytest.raises(ValueError):
        run_trials(Strategy(), 0, 1)


def test_trials_independent_of_execution_order():
    sampler = exact_sampler()
    serial = [sampler(Strategy(), trial_generator(77, i)) for i in range(200)]
    with ThreadPoolExecutor(4) as pool:
        parallel = list(pool.map(lambda i: sampler(Strategy(), trial_generator(77, i)), reversed(range(200))))
    assert serial == parallel[::-1]


def test_signaling_test_passes():
    rep = signaling_test(10_000, 42)
    assert rep.passed
    assert rep.exact_difference <= 1e-12
    assert rep.exact_difference_mirrored <= 1e-12
    assert rep.chi_square == pytest.approx(rep.z**2)


def test_signaling_test_detects_leak():
    rep = signaling_test(10_000, 42, sampler=leaky_sampler)
    assert not rep.passed
    assert rep.p_observe - rep.p_ignore == pytest.approx(0.1, abs=0.03)


def test_signaling_test_minimum_n():
    with pytest.raises(ValueError):
        signaling_test(99, 1)


def test_two_proportion_z():
    assert two_proportion_z(50, 100, 50, 100) == 0
    # pooled p = 0.55, se = sqrt(0.55 * 0.45 * 0.02)
    assert two_proportion_z(60, 100, 50, 100) == pytest.approx(0.1 / math.sqrt(0.00495))
    assert two_proportion_z(0, 100, 0, 100) == 0
