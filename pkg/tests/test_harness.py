import math

import numpy as np
import pytest

from compent.circuits import (
    Gate,
    bob_unitary_circuit,
    identity_circuit,
    stock_channel_zoo,
    teleport_dilution,
    unrotate_distillation,
)
from compent.harness import (
    ONE_SHOT_SUITES,
    check_concavity_dilution,
    check_convexity_distillation,
    check_locc_monotonicity_cost,
    check_locc_monotonicity_distillation,
    check_lu_invariance_cost,
    check_lu_invariance_distillation,
    check_subadditivity_cost,
    check_superadditivity_distillation,
    run_keyed_suite,
    run_noninvariance_counterexample,
    run_one_shot_check,
    run_suites,
)
from compent.linalg import haar_unitary
from compent.measures import p_err_distill
from compent.states import (
    binary_mixture_entropy,
    bipartite_pure,
    epr_pairs,
    mixture,
    rotated_epr,
)

from test_circuits import prep_gates_for_state

RNG = np.random.default_rng(4242)


def zero_state():
    return bipartite_pure(np.array([1, 0, 0, 0], dtype=complex), (1, 1))


def test_convexity_identical_states():
    rec = check_convexity_distillation(
        identity_circuit(1, 1), [epr_pairs(1), epr_pairs(1)], [0.4, 0.6], 1
    )
    assert rec.passed
    assert all(abs(e - rec.lhs) < 1e-12 for e in rec.details["eps_x"])


def test_convexity_epr_vs_zero():
    rec = check_convexity_distillation(
        identity_circuit(1, 1), [epr_pairs(1), zero_state()], [0.5, 0.5], 1
    )
    assert rec.passed
    assert abs(rec.lhs - 0.25) < 1e-12
    assert sorted(round(e, 9) for e in rec.details["eps_x"]) == [0.0, 0.5]


def test_concavity_single_state_is_equality():
    rec = check_concavity_dilution(identity_circuit(1, 1), [zero_state()], [1.0], 1)
    assert rec.passed
    assert abs(rec.lhs - rec.rhs) < 1e-12


def test_concavity_example():
    rec = check_concavity_dilution(
        identity_circuit(1, 1), [epr_pairs(1), zero_state()], [0.5, 0.5], 1
    )
    assert rec.passed
    assert abs(rec.lhs - 0.25) < 1e-12
    assert abs(rec.rhs - 0.25) < 1e-12  # equality edge of the bound


def test_superadditivity_both_perfect():
    u1, u2 = haar_unitary(2, RNG), haar_unitary(2, RNG)
    rec = check_superadditivity_distillation(
        unrotate_distillation(u1, 1), unrotate_distillation(u2, 1),
        rotated_epr(u1, 1), rotated_epr(u2, 1), 1, 1,
    )
    assert rec.passed
    assert rec.lhs <= 1e-9


def test_superadditivity_mixed_errors():
    rec = check_superadditivity_distillation(
        identity_circuit(1, 1), identity_circuit(1, 1),
        zero_state(), zero_state(), 1, 1,
    )
    assert rec.passed
    assert abs(rec.lhs - 0.75) < 1e-9  # 1 - (1/2)(1/2)
    assert rec.lhs <= rec.details["sum_bound"] + 1e-12


def test_subadditivity_two_teleports():
    vec = np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2)
    tele = teleport_dilution(prep_gates_for_state(vec, 2), 1)
    target = bipartite_pure(vec, (1, 1))
    rec = check_subadditivity_cost(tele, tele, target, target, 1, 1)
    assert rec.passed
    assert rec.lhs <= 1e-9


def test_lu_invariance_cost_identity_layer():
    u = haar_unitary(2, RNG)
    rec = check_lu_invariance_cost(
        bob_unitary_circuit(u, 1), rotated_epr(u, 1), [], [], 1
    )
    assert rec.passed and rec.details["gate_count_delta"] == 0


def test_lu_invariance_cost_bitflip_layer():
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    vec = np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2)
    tele = teleport_dilution(prep_gates_for_state(vec, 2), 1)
    rec = check_lu_invariance_cost(
        tele, bipartite_pure(vec, (1, 1)), [], [Gate.unitary(x, (0,))], 1
    )
    assert rec.passed
    assert rec.details["gate_count_delta"] == 1


def test_lu_invariance_distillation_random_layer():
    u = haar_unitary(2, RNG)
    layer_a = [Gate.unitary(haar_unitary(2, RNG), (0,))]
    layer_b = [Gate.unitary(haar_unitary(2, RNG), (0,))]
    rec = check_lu_invariance_distillation(
        unrotate_distillation(u, 1), rotated_epr(u, 1), layer_a, layer_b, 1
    )
    assert rec.passed


def test_monotonicity_cost_identity_post():
    vec = np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2)
    tele = teleport_dilution(prep_gates_for_state(vec, 2), 1)
    rec = check_locc_monotonicity_cost(tele, identity_circuit(1, 1), bipartite_pure(vec, (1, 1)), 1)
    assert rec.passed
    assert abs(rec.slack) < 1e-9  # equality for the identity post-map


def test_monotonicity_cost_all_stock_channels():
    vec = np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2)
    tele = teleport_dilution(prep_gates_for_state(vec, 2), 1)
    target = bipartite_pure(vec, (1, 1))
    for name, post in stock_channel_zoo():
        if (post.n_a, post.n_b) != (1, 1):
            continue
        rec = check_locc_monotonicity_cost(tele, post, target, 1)
        assert rec.passed, name


def test_monotonicity_distillation_unrotate_premap():
    u = haar_unitary(2, RNG)
    rec = check_locc_monotonicity_distillation(
        identity_circuit(1, 1), unrotate_distillation(u, 1), rotated_epr(u, 1), 1
    )
    assert rec.passed
    assert rec.lhs <= 1e-9 and rec.rhs <= 1e-9


def test_counterexample_eps_zero():
    rec = run_noninvariance_counterexample(1, 0.0, seed=7)
    assert rec.passed and not rec.inconclusive
    assert rec.details["threshold"] == 0.01
    assert rec.lhs < 1.0 - 1e-6
    # the bound certifies that no channel serves both packing states
    x = rec.details["overlap"]
    assert abs(rec.lhs - (1.0 - 0.5 * binary_mixture_entropy(x))) < 1e-9


def test_counterexample_eps_small():
    rec = run_noninvariance_counterexample(1, 1e-4, seed=7)
    assert rec.passed and not rec.inconclusive
    assert rec.details["threshold"] == 0.06


def test_counterexample_inconclusive():
    rec = run_noninvariance_counterexample(2, 0.25, seed=7)
    assert rec.inconclusive and rec.passed
    assert rec.details["threshold"] is None


def test_counterexample_bound_at_half_eta():
    # any pair separated at eta = 0.5 gives upper bound <= 1 - H(0.5)/2 < 1
    from compent.measures import distillable_upper_via_squashed

    rng = np.random.default_rng(3)
    u = np.eye(2, dtype=complex)
    v = haar_unitary(2, rng)
    while abs(np.trace(v)) / 2 > 0.5:
        v = haar_unitary(2, rng)
    psi = mixture([rotated_epr(u, 1), rotated_epr(v, 1)], [0.5, 0.5])
    bound = distillable_upper_via_squashed(psi, 0.0)
    assert bound <= 1 - 0.5 * binary_mixture_entropy(0.5) + 1e-9
    assert bound < 1.0


def test_keyed_suites_all_pass():
    for selector in ONE_SHOT_SUITES:
        records = run_keyed_suite(selector, kappa=1, lambdas=[1], seed=5)
        assert records, selector
        assert all(r.passed for r in records), selector
        keys = {r.key for r in records}
        if selector in ("superadditivity", "subadditivity"):
            assert len(keys) == 4  # joint key pairs
        else:
            assert keys == {"0", "1"}


def test_keyed_suite_kappa_three():
    # kappa = 3 pads to two EPR pairs per side; eight keys per family
    records = run_keyed_suite("lu-distillation", kappa=3, lambdas=[1], seed=5)
    assert len(records) == 8
    assert all(r.passed for r in records)
    with pytest.raises(ValueError):
        run_keyed_suite("convexity", kappa=4, lambdas=[1], seed=5)


def test_keyed_suite_kappa_two():
    records = run_keyed_suite("convexity", kappa=2, lambdas=[1], seed=5)
    assert len(records) == 4
    assert all(r.passed for r in records)
    eps = {r.key: r.lhs for r in records}
    # uniform error across keys by construction
    assert max(eps.values()) - min(eps.values()) < 1e-9


def test_keyed_mismatch_fails_exactly_at_wrong_keys():
    from compent.circuits import keyed_pauli_state, keyed_pauli_unrotate

    wrong = keyed_pauli_unrotate((0, 0), 1)
    for key in [(0, 0), (0, 1), (1, 0), (1, 1)]:
        err = p_err_distill(wrong, keyed_pauli_state(key, 1), 1)
        if key == (0, 0):
            assert err <= 1e-9
        else:
            assert err > 0.4


def test_one_shot_suite_instances_pass():
    for selector in ONE_SHOT_SUITES:
        for lam in (1, 2):
            for instance in (0, 1):
                rec = run_one_shot_check(selector, lam, instance, seed=13)
                assert rec.passed, (selector, lam, instance)


def test_run_suites_deterministic():
    a = run_suites(["convexity", "counterexample"], [1, 2], seed=7)
    b = run_suites(["convexity", "counterexample"], [1, 2], seed=7)
    assert [r.to_dict() for r in a] == [r.to_dict() for r in b]
    names = [r.name for r in a]
    assert names == sorted(names)


def test_run_suites_all_selector():
    records = run_suites(["all"], [1], seed=7, instances=1)
    assert len(records) >= 20
    assert all(r.passed for r in records)
    with pytest.raises(ValueError):
        run_suites(["bogus"], [1], seed=7)
