import json
import math

import numpy as np
import pytest

from compent.circuits import GateBudget
from compent.linalg import haar_unitary
from compent.packing import (
    NetBoundEstimate,
    UnitaryPacking,
    counting_ratio_log,
    epr_overlap,
    frobenius_distance,
    greedy_packing,
    max_orbit_overlap,
    net_cardinality_bounds,
    packing_from_dict,
    packing_to_dict,
    pauli_orbit,
    separation_check,
    _orbit_stack,
)
from compent.states import epr_vector, pauli_shift, rotated_epr

RNG = np.random.default_rng(31337)

X = np.array([[0, 1], [1, 0]], dtype=complex)


def test_frobenius_distance():
    assert frobenius_distance(np.eye(2), np.eye(2)) == 0.0
    assert abs(frobenius_distance(np.eye(2), X) - 2.0) < 1e-12
    for d in (2, 4):
        u, v = haar_unitary(d, RNG), haar_unitary(d, RNG)
        assert frobenius_distance(u, v) <= 2 * math.sqrt(d) + 1e-9
    with pytest.raises(ValueError):
        frobenius_distance(np.eye(2), np.eye(4))
    with pytest.raises(ValueError):
        frobenius_distance(np.ones((2, 2)), np.eye(2))


def test_epr_overlap_identity():
    assert abs(epr_overlap(np.eye(2), np.eye(2), 1) - 1.0) < 1e-12
    assert abs(epr_overlap(np.eye(2), X, 1)) < 1e-12
    for m in (1, 2):
        for _ in range(100):
            u, v = haar_unitary(2 ** m, RNG), haar_unitary(2 ** m, RNG)
            lhs = epr_overlap(u, v, m).real
            rhs = 1.0 - frobenius_distance(u, v) ** 2 / 2 ** (m + 1)
            assert abs(lhs - rhs) < 1e-9


def test_epr_overlap_matches_state_inner_product():
    for m in (1, 2):
        u, v = haar_unitary(2 ** m, RNG), haar_unitary(2 ** m, RNG)
        phi = epr_vector(m)
        d = 2 ** m
        lhs = np.vdot(np.kron(np.eye(d), u) @ phi, np.kron(np.eye(d), v) @ phi)
        assert abs(lhs - epr_overlap(u, v, m)) < 1e-12


def test_pauli_orbit():
    orbit = pauli_orbit(np.eye(2), 1)
    assert len(orbit) == 4
    expected = [np.eye(2), pauli_shift([0], [1]), pauli_shift([1], [0]), pauli_shift([1], [1])]
    seen = {tuple(np.round(o, 9).reshape(-1)) for o in orbit}
    assert seen == {tuple(np.round(e, 9).reshape(-1)) for e in expected}
    for m in (1, 2):
        v = haar_unitary(2 ** m, RNG)
        orbit = pauli_orbit(v, m)
        assert len(orbit) == 4 ** m
        assert any(np.allclose(o, v) for o in orbit)
        # generic orbits are pairwise distinct
        for i in range(len(orbit)):
            for j in range(i + 1, len(orbit)):
                assert frobenius_distance(orbit[i], orbit[j]) > 1e-9


def test_orbit_overlap_lower_bound():
    # Parseval over the Pauli basis forces max_P |tr(P W)| / 2^m >= 2^-m
    for m in (1, 2):
        for _ in range(20):
            u, v = haar_unitary(2 ** m, RNG), haar_unitary(2 ** m, RNG)
            assert max_orbit_overlap(_orbit_stack(u, m), v, m) >= 2.0 ** -m - 1e-12


def test_greedy_packing_basics():
    p = greedy_packing(1, 0.3, seed=7)
    assert len(p) >= 2
    assert separation_check(p)
    # deterministic for a fixed seed
    q = greedy_packing(1, 0.3, seed=7)
    assert all(np.array_equal(a, b) for a, b in zip(p.members, q.members))
    with pytest.raises(ValueError):
        greedy_packing(3, 0.5)
    with pytest.raises(ValueError):
        greedy_packing(1, 0.0)


def test_greedy_packing_high_eta_single_member():
    # orbit overlap >= 1/2 at m=1, so nothing survives next to one member
    p = greedy_packing(1, 0.99, seed=11)
    assert len(p) == 1
    assert separation_check(p)


def test_greedy_packing_max_size():
    p = greedy_packing(1, 0.05, seed=3, max_size=2)
    assert len(p) == 2
    assert separation_check(p)


def test_packing_size_nonincreasing_in_eta():
    sizes = []
    for i in range(1, 10):
        eta = i / 10
        p = greedy_packing(1, eta, max_rejections=500, seed=7)
        assert separation_check(p)
        sizes.append(len(p))
    assert all(b <= a for a, b in zip(sizes, sizes[1:]))


def test_separation_check_rejects_duplicates():
    u = haar_unitary(2, RNG)
    p = UnitaryPacking(1, 0.3, (u, u.copy()), 0)
    assert not separation_check(p)
    singleton = UnitaryPacking(1, 0.3, (u,), 0)
    assert separation_check(singleton)


def test_separation_matches_rotated_epr_fidelity():
    from compent.states import fidelity

    p = greedy_packing(1, 0.3, seed=5)
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            root_f = math.sqrt(fidelity(rotated_epr(p.members[i], 1), rotated_epr(p.members[j], 1)))
            assert root_f <= 1 - p.eta + 1e-9


def test_haar_moment():
    rng = np.random.default_rng(42)
    vals = [abs(np.trace(haar_unitary(2, rng))) ** 2 for _ in range(1000)]
    assert abs(float(np.mean(vals)) - 1.0) <= 0.15


def test_net_cardinality_bounds():
    b = net_cardinality_bounds(2, 0.5, 1.0, 1.0)
    assert isinstance(b, NetBoundEstimate)
    assert abs(b.log2_lower - b.log2_upper) < 1e-12
    assert abs(2 ** b.log2_lower - 1024.0) < 1e-6
    tighter = net_cardinality_bounds(2, 0.25, 1.0, 1.0)
    assert tighter.log2_lower > b.log2_lower
    assert tighter.log2_upper > b.log2_upper
    two_sided = net_cardinality_bounds(2, 0.5, 0.5, 2.0)
    assert two_sided.log2_lower <= two_sided.log2_upper
    with pytest.raises(ValueError):
        net_cardinality_bounds(2, 0.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        net_cardinality_bounds(2, 0.5, 2.0, 1.0)


def test_counting_ratio_log():
    poly = GateBudget((0.0, 0.0, 1.0))  # lam^2
    assert abs(counting_ratio_log(poly, 4, 3, 0.5) - (16 - 64)) < 1e-12
    assert counting_ratio_log(poly, 4, 0, 0.5) > 0  # degenerate m: poly dominates
    vals = [counting_ratio_log(poly, 4, m, 0.5) for m in (0, 1, 2, 3)]
    assert all(b < a for a, b in zip(vals, vals[1:]))
    with pytest.raises(ValueError):
        counting_ratio_log(poly, 4, 1, 1.5)


def test_packing_serialization_round_trip():
    p = greedy_packing(1, 0.3, seed=9)
    packed = json.dumps(packing_to_dict(p))
    back = packing_from_dict(json.loads(packed))
    assert back.m == p.m and back.eta == p.eta and back.seed == p.seed
    assert len(back) == len(p)
    for a, b in zip(p.members, back.members):
        assert np.array_equal(a, b)
    assert separation_check(back)
