"""Executable checks for the structural properties of the bound measures.

Each check measures the quantities on concrete witnesses and returns a
CheckRecord with the observed slack; equality-style checks record the
negative absolute residual as slack so that pass <=> slack >= -tolerance
holds uniformly.  All randomness flows through per-check seeds derived from
(master seed, check name, lambda, instance), so reruns are bit-identical.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .circuits import (
    Gate,
    LoccCircuit,
    apply,
    bob_unitary_circuit,
    compose,
    conjugate_by_local_unitary,
    dephase_bob_circuit,
    gate_count,
    identity_circuit,
    keyed_pauli_rotate,
    keyed_pauli_state,
    keyed_pauli_unrotate,
    local_layer_unitary,
    local_unitary_circuit,
    replace_bob_circuit,
    teleport_dilution,
    tensor,
    unrotate_distillation,
)
from .linalg import haar_unitary
from .measures import (
    counterexample_eta_threshold,
    distillable_upper_via_squashed,
    p_err_dilute,
    p_err_distill,
)
from .packing import greedy_packing
from .states import (
    BipartiteState,
    all_keys,
    bipartite_from_matrix,
    bipartite_pure,
    conjugate_local,
    mixture,
    random_density_matrix,
    random_pure_state,
    rotated_epr,
    tensor_states,
)

EQ_TOL = 1e-9          # default tolerance for equality checks
STRICT_MARGIN = 1e-6   # margin demanded of strict inequalities

ONE_SHOT_SUITES = (
    "convexity",
    "concavity",
    "superadditivity",
    "subadditivity",
    "lu-cost",
    "lu-distillation",
    "monotonicity-cost",
    "monotonicity-distillation",
)


@dataclass(frozen=True)
class CheckRecord:
    name: str
    lam: int | None
    key: str | None
    lhs: float
    rhs: float
    slack: float
    tolerance: float
    passed: bool
    inconclusive: bool = False
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lambda": self.lam,
            "key": self.key,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "inconclusive": self.inconclusive,
            "details": self.details,
        }


def _equality(name, lhs, rhs, tol, lam=None, key=None, details=None) -> CheckRecord:
    slack = -abs(lhs - rhs)
    return CheckRecord(
        name, lam, key, float(lhs), float(rhs), float(slack), tol,
        slack >= -tol, details=details or {},
    )


def _upper_bound(name, lhs, rhs, tol, lam=None, key=None, details=None) -> CheckRecord:
    slack = rhs - lhs
    return CheckRecord(
        name, lam, key, float(lhs), float(rhs), float(slack), tol,
        slack >= -tol, details=details or {},
    )


def _rng(seed: int, name: str, lam: int, instance: int) -> np.random.Generator:
    ss = np.random.SeedSequence([seed, zlib.crc32(name.encode()), lam, instance])
    return np.random.default_rng(ss)


# -- one-shot checks -----------------------------------------------------------


def check_convexity_distillation(
    g: LoccCircuit,
    states: Sequence[BipartiteState],
    p: Sequence[float],
    m: int,
    tolerance: float = EQ_TOL,
    lam: int | None = None,
    key: str | None = None,
    name: str = "convexity",
) -> CheckRecord:
    """Distillation error of a mixture equals the weighted individual errors."""
    eps = p_err_distill(g, mixture(states, p), m)
    eps_x = [p_err_distill(g, s, m) for s in states]
    rhs = float(sum(w * e for w, e in zip(p, eps_x)))
    return _equality(name, eps, rhs, tolerance, lam, key,
                     {"eps_x": eps_x, "p": [float(w) for w in p]})


def check_concavity_dilution(
    g: LoccCircuit,
    states: Sequence[BipartiteState],
    p: Sequence[float],
    n: int,
    tolerance: float = EQ_TOL,
    lam: int | None = None,
    key: str | None = None,
    name: str = "concavity",
) -> CheckRecord:
    """Dilution error toward a mixture is at most the weighted individual errors."""
    eps = p_err_dilute(g, mixture(states, p), n)
    eps_x = [p_err_dilute(g, s, n) for s in states]
    rhs = float(sum(w * e for w, e in zip(p, eps_x)))
    return _upper_bound(name, eps, rhs, tolerance, lam, key,
                        {"eps_x": eps_x, "p": [float(w) for w in p]})


def check_superadditivity_distillation(
    g1: LoccCircuit,
    g2: LoccCircuit,
    rho1: BipartiteState,
    rho2: BipartiteState,
    m1: int,
    m2: int,
    tolerance: float = EQ_TOL,
    lam: int | None = None,
    key: str | None = None,
    name: str = "superadditivity",
) -> CheckRecord:
    """Product witnesses obey eps12 = 1 - (1-eps1)(1-eps2) exactly."""
    eps1 = p_err_distill(g1, rho1, m1)
    eps2 = p_err_distill(g2, rho2, m2)
    eps12 = p_err_distill(tensor(g1, g2), tensor_states(rho1, rho2), m1 + m2)
    rhs = 1.0 - (1.0 - eps1) * (1.0 - eps2)
    return _equality(name, eps12, rhs, tolerance, lam, key,
                     {"eps1": eps1, "eps2": eps2, "sum_bound": eps1 + eps2})


def check_subadditivity_cost(
    g1: LoccCircuit,
    g2: LoccCircuit,
    rho1: BipartiteState,
    rho2: BipartiteState,
    n1: int,
    n2: int,
    tolerance: float = EQ_TOL,
    lam: int | None = None,
    key: str | None = None,
    name: str = "subadditivity",
) -> CheckRecord:
    """Fidelity factorization makes product dilution errors multiply."""
    eps1 = p_err_dilute(g1, rho1, n1)
    eps2 = p_err_dilute(g2, rho2, n2)
    eps12 = p_err_dilute(
        tensor(g1, g2), tensor_states(rho1, rho2), n1 + n2
    )
    rhs = 1.0 - (1.0 - eps1) * (1.0 - eps2)
    return _equality(name, eps12, rhs, tolerance, lam, key,
                     {"eps1": eps1, "eps2": eps2, "sum_bound": eps1 + eps2})


def check_lu_invariance_cost(
    g: LoccCircuit,
    target: BipartiteState,
    alice_layer: Sequence[Gate],
    bob_layer: Sequence[Gate],
    n: int,
    tolerance: float = EQ_TOL,
    lam: int | None = None,
    key: str | None = None,
    name: str = "lu-cost",
) -> CheckRecord:
    """Conjugated witnesses dilute the conjugated targets at identical error."""
    u_a = local_layer_unitary(alice_layer, g.m_a)
    u_b = local_layer_unitary(bob_layer, g.m_b)
    base = p_err_dilute(g, target, n)
    conjugated = conjugate_by_local_unitary(g, alice_layer, bob_layer)
    moved = p_err_dilute(conjugated, conjugate_local(target, u_a, u_b), n)
    delta = gate_count(conjugated) - gate_count(g)
    return _equality(name, moved, base, tolerance, lam, key,
                     {"gate_count_delta": delta,
                      "layer_size": len(alice_layer) + len(bob_layer)})


def _inverse_layer_circuit(
    alice_layer: Sequence[Gate], bob_layer: Sequence[Gate], n_a: int, n_b: int
) -> LoccCircuit:
    """Local circuit applying the inverse of a (U_A, U_B) layer on the input."""
    alice = tuple(
        Gate.unitary(g.matrix.conj().T, g.wires) for g in reversed(alice_layer)
    )
    bob = tuple(
        Gate.unitary(g.matrix.conj().T, tuple(w + n_a for w in g.wires))
        for g in reversed(bob_layer)
    )
    return local_unitary_circuit(alice, bob, n_a, n_b)


def check_lu_invariance_distillation(
    g: LoccCircuit,
    rho: BipartiteState,
    alice_layer: Sequence[Gate],
    bob_layer: Sequence[Gate],
    m: int,
    tolerance: float = EQ_TOL,
    lam: int | None = None,
    key: str | None = None,
    name: str = "lu-distillation",
) -> CheckRecord:
    """Pre-composing with the inverse layer distills the rotated family at the
    original error."""
    u_a = local_layer_unitary(alice_layer, g.n_a)
    u_b = local_layer_unitary(bob_layer, g.n_b)
    base = p_err_distill(g, rho, m)
    inverse = _inverse_layer_circuit(alice_layer, bob_layer, g.n_a, g.n_b)
    moved = p_err_distill(compose(g, inverse), conjugate_local(rho, u_a, u_b), m)
    return _equality(name, moved, base, tolerance, lam, key,
                     {"layer_size": len(alice_layer) + len(bob_layer)})


def check_locc_monotonicity_cost(
    g: LoccCircuit,
    post: LoccCircuit,
    target: BipartiteState,
    n: int,
    tolerance: float = EQ_TOL,
    lam: int | None = None,
    key: str | None = None,
    name: str = "monotonicity-cost",
) -> CheckRecord:
    """Post-processing the witness dilutes the processed target no worse."""
    base = p_err_dilute(g, target, n)
    processed = p_err_dilute(compose(post, g), apply(post, target), n)
    return _upper_bound(name, processed, base, tolerance, lam, key,
                        {"post_gates": gate_count(post)})


def check_locc_monotonicity_distillation(
    g: LoccCircuit,
    pre_map: LoccCircuit,
    rho: BipartiteState,
    m: int,
    tolerance: float = EQ_TOL,
    lam: int | None = None,
    key: str | None = None,
    name: str = "monotonicity-distillation",
) -> CheckRecord:
    """Distilling through a pre-map equals distilling the mapped state."""
    lhs = p_err_distill(compose(g, pre_map), rho, m)
    rhs = p_err_distill(g, apply(pre_map, rho), m)
    return _equality(name, lhs, rhs, tolerance, lam, key,
                     {"combined_gates": gate_count(g) + gate_count(pre_map)})


def run_noninvariance_counterexample(
    m: int, eps: float, seed: int, name: str = "noninvariance-counterexample"
) -> CheckRecord:
    """Certify that no single channel distills both members of a separated pair.

    Finds the grid threshold eta, builds a two-member packing there, mixes the
    two rotated EPR states, and checks that the squashed-type upper bound on
    the mixture drops strictly below m.  Without a threshold the record is
    inconclusive rather than failed.
    """
    eta = counterexample_eta_threshold(m, eps)
    if eta is None:
        return CheckRecord(
            name, None, None, 0.0, 0.0, 0.0, 0.0, True, True,
            {"m": m, "eps": eps, "threshold": None},
        )
    packing = greedy_packing(m, eta, seed=seed, max_size=2)
    if len(packing) < 2:
        return CheckRecord(
            name, None, None, 0.0, 0.0, 0.0, 0.0, True, True,
            {"m": m, "eps": eps, "threshold": eta, "packing_size": len(packing)},
        )
    u, v = packing.members[0], packing.members[1]
    overlap = float(abs(np.trace(u.conj().T @ v)) / 2 ** m)
    psi = mixture([rotated_epr(u, m), rotated_epr(v, m)], [0.5, 0.5])
    upper = distillable_upper_via_squashed(psi, eps)
    record = _upper_bound(
        name, upper, m - STRICT_MARGIN, 0.0,
        details={"m": m, "eps": eps, "threshold": eta, "overlap": overlap,
                 "squashed_upper": upper},
    )
    return record


# -- randomized one-shot suites ---------------------------------------------------


def _size(lam: int) -> int:
    return min(lam, 2)


def _random_states(cut, count, rng):
    dim = 2 ** (cut[0] + cut[1])
    return [bipartite_from_matrix(random_density_matrix(dim, rng), cut) for _ in range(count)]


def _random_local_layer(width: int, rng, two_qubit: bool = False) -> list[Gate]:
    gates = [Gate.unitary(haar_unitary(2, rng), (w,)) for w in range(width)]
    if two_qubit and width >= 2:
        gates.append(Gate.unitary(haar_unitary(4, rng), (0, 1)))
    return gates


def _random_local_circuit(s: int, rng) -> LoccCircuit:
    alice = [Gate.unitary(haar_unitary(2, rng), (w,)) for w in range(s)]
    bob = [Gate.unitary(haar_unitary(2, rng), (s + w,)) for w in range(s)]
    if s == 2:
        alice.append(Gate.unitary(haar_unitary(4, rng), (0, 1)))
        bob.append(Gate.unitary(haar_unitary(4, rng), (2, 3)))
    return local_unitary_circuit(alice, bob, s, s)


def _teleport_for_random_pure(rng) -> tuple[LoccCircuit, BipartiteState]:
    vec = random_pure_state(2, rng)
    d = 4
    m = np.eye(d, dtype=complex)
    m[:, 0] = vec
    q, r = np.linalg.qr(m)
    q = q * (r[0, 0] / abs(r[0, 0]))
    circuit = teleport_dilution([Gate.unitary(q, (0, 1))], 1)
    return circuit, bipartite_pure(vec, (1, 1))


def _post_channel(instance: int, rng) -> LoccCircuit:
    choices = (
        dephase_bob_circuit(1),
        replace_bob_circuit(1),
        bob_unitary_circuit(haar_unitary(2, rng), 1),
        identity_circuit(1, 1),
    )
    return choices[instance % len(choices)]


def run_one_shot_check(selector: str, lam: int, instance: int, seed: int,
                       tolerance: float = EQ_TOL) -> CheckRecord:
    """One randomized instance of a named one-shot check."""
    rng = _rng(seed, selector, lam, instance)
    s = _size(lam)
    name = f"{selector}#{instance}"
    if selector == "convexity":
        g = _random_local_circuit(s, rng)
        states = _random_states((s, s), 3, rng)
        p = rng.dirichlet(np.ones(3))
        return check_convexity_distillation(g, states, p, s, tolerance, lam, name=name)
    if selector == "concavity":
        g = bob_unitary_circuit(haar_unitary(2 ** s, rng), s)
        states = _random_states((s, s), 3, rng)
        p = rng.dirichlet(np.ones(3))
        return check_concavity_dilution(g, states, p, s, tolerance, lam, name=name)
    if selector == "superadditivity":
        u1, u2 = haar_unitary(2, rng), haar_unitary(2 ** s, rng)
        g1, rho1 = unrotate_distillation(u1, 1), rotated_epr(u1, 1)
        if instance % 2 == 0:
            g2, rho2 = unrotate_distillation(u2, s), rotated_epr(u2, s)
        else:  # a deliberately noisy second witness
            g2, rho2 = identity_circuit(s, s), rotated_epr(u2, s)
        return check_superadditivity_distillation(
            g1, g2, rho1, rho2, 1, s, tolerance, lam, name=name
        )
    if selector == "subadditivity":
        g1, target1 = _teleport_for_random_pure(rng)
        if instance % 2 == 0:
            u = haar_unitary(2, rng)
            g2, target2 = bob_unitary_circuit(u, 1), rotated_epr(u, 1)
        else:  # identity witness toward a mixed target: nonzero error
            g2 = identity_circuit(1, 1)
            target2 = _random_states((1, 1), 1, rng)[0]
        return check_subadditivity_cost(
            g1, g2, target1, target2, 1, 1, tolerance, lam, name=name
        )
    if selector == "lu-cost":
        g, target = _teleport_for_random_pure(rng)
        return check_lu_invariance_cost(
            g, target,
            _random_local_layer(g.m_a, rng),
            _random_local_layer(g.m_b, rng),
            1, tolerance, lam, name=name,
        )
    if selector == "lu-distillation":
        u = haar_unitary(2 ** s, rng)
        g, rho = unrotate_distillation(u, s), rotated_epr(u, s)
        return check_lu_invariance_distillation(
            g, rho,
            _random_local_layer(s, rng, two_qubit=True),
            _random_local_layer(s, rng, two_qubit=True),
            s, tolerance, lam, name=name,
        )
    if selector == "monotonicity-cost":
        g, target = _teleport_for_random_pure(rng)
        post = _post_channel(instance + lam, rng)
        return check_locc_monotonicity_cost(g, post, target, 1, tolerance, lam, name=name)
    if selector == "monotonicity-distillation":
        u = haar_unitary(2 ** s, rng)
        if instance % 2 == 0:
            # the trivial-LOCC mechanism: unrotation as a pre-map
            g, pre, rho = identity_circuit(s, s), unrotate_distillation(u, s), rotated_epr(u, s)
        else:
            g, pre, rho = unrotate_distillation(u, s), _random_local_circuit(s, rng), rotated_epr(u, s)
        return check_locc_monotonicity_distillation(g, pre, rho, s, tolerance, lam, name=name)
    raise ValueError(f"unknown suite selector {selector!r}")


# -- keyed (uniform) suites --------------------------------------------------------


def _key_label(*keys: tuple[int, ...]) -> str:
    return "|".join("".join(map(str, k)) for k in keys)


def run_keyed_suite(
    selector: str,
    kappa: int,
    lambdas: Sequence[int],
    seed: int,
    tolerance: float = EQ_TOL,
) -> list[CheckRecord]:
    """Run the keyed analogue of a one-shot check for every key.

    The stock keyed family is the Pauli-rotated EPR family on
    m = max(1, ceil(kappa/2)) pairs; witnesses are the matching keyed
    rotations, so a uniform error budget holds across keys.
    """
    if kappa < 1 or kappa > 3:
        raise ValueError("keyed suites run with 1 <= kappa <= 3")
    m = max(1, math.ceil(kappa / 2))
    records: list[CheckRecord] = []
    name = f"keyed-{selector}"
    for lam in lambdas:
        rng = _rng(seed, name, lam, 0)
        fixed = [haar_unitary(2 ** m, rng) for _ in range(2)]
        alice_layer = _random_local_layer(m, rng)
        bob_layer = _random_local_layer(m, rng)
        if selector in ("superadditivity", "subadditivity"):
            for k1 in all_keys(kappa):
                for k2 in all_keys(kappa):
                    label = _key_label(k1, k2)
                    if selector == "superadditivity":
                        records.append(check_superadditivity_distillation(
                            keyed_pauli_unrotate(k1, m), keyed_pauli_unrotate(k2, m),
                            keyed_pauli_state(k1, m), keyed_pauli_state(k2, m),
                            m, m, tolerance, lam, label, name=name,
                        ))
                    else:
                        records.append(check_subadditivity_cost(
                            keyed_pauli_rotate(k1, m), keyed_pauli_rotate(k2, m),
                            keyed_pauli_state(k1, m), keyed_pauli_state(k2, m),
                            m, m, tolerance, lam, label, name=name,
                        ))
            continue
        for key in all_keys(kappa):
            label = _key_label(key)
            base = keyed_pauli_state(key, m)
            if selector == "convexity":
                shift = keyed_pauli_unrotate(key, m)
                states = [
                    apply(bob_unitary_circuit(u, m), base) for u in fixed
                ]
                records.append(check_convexity_distillation(
                    shift, states, [0.5, 0.5], m, tolerance, lam, label, name=name,
                ))
            elif selector == "concavity":
                witness = keyed_pauli_rotate(key, m)
                targets = [
                    apply(bob_unitary_circuit(u, m), base) for u in fixed
                ]
                records.append(check_concavity_dilution(
                    witness, targets, [0.5, 0.5], m, tolerance, lam, label, name=name,
                ))
            elif selector == "lu-cost":
                records.append(check_lu_invariance_cost(
                    keyed_pauli_rotate(key, m), base, alice_layer, bob_layer,
                    m, tolerance, lam, label, name=name,
                ))
            elif selector == "lu-distillation":
                records.append(check_lu_invariance_distillation(
                    keyed_pauli_unrotate(key, m), base, alice_layer, bob_layer,
                    m, tolerance, lam, label, name=name,
                ))
            elif selector == "monotonicity-cost":
                records.append(check_locc_monotonicity_cost(
                    keyed_pauli_rotate(key, m), dephase_bob_circuit(m), base,
                    m, tolerance, lam, label, name=name,
                ))
            elif selector == "monotonicity-distillation":
                records.append(check_locc_monotonicity_distillation(
                    identity_circuit(m, m), keyed_pauli_unrotate(key, m), base,
                    m, tolerance, lam, label, name=name,
                ))
            else:
                raise ValueError(f"unknown suite selector {selector!r}")
    return records


# -- orchestration ------------------------------------------------------------------


def run_suites(
    selectors: Sequence[str],
    lambdas: Sequence[int],
    seed: int,
    tolerance: float = EQ_TOL,
    instances: int = 2,
    kappa: int = 1,
) -> list[CheckRecord]:
    """Run the requested suites and return records in canonical order."""
    chosen = []
    for sel in selectors:
        if sel == "all":
            chosen.extend(ONE_SHOT_SUITES)
            chosen.extend(f"keyed-{s}" for s in ONE_SHOT_SUITES)
            chosen.append("counterexample")
        else:
            chosen.append(sel)
    seen = set()
    ordered = [s for s in chosen if not (s in seen or seen.add(s))]

    records: list[CheckRecord] = []
    for sel in ordered:
        if sel == "counterexample":
            records.append(run_noninvariance_counterexample(1, 0.0, seed))
            records.append(run_noninvariance_counterexample(1, 1e-4, seed))
            records.append(run_noninvariance_counterexample(2, 0.25, seed))
        elif sel.startswith("keyed-"):
            records.extend(run_keyed_suite(sel[len("keyed-"):], kappa, lambdas, seed, tolerance))
        elif sel in ONE_SHOT_SUITES:
            for lam in lambdas:
                for instance in range(instances):
                    records.append(run_one_shot_check(sel, lam, instance, seed, tolerance))
        else:
            raise ValueError(f"unknown suite selector {sel!r}")
    records.sort(key=lambda r: (r.name, r.lam if r.lam is not None else -1, r.key or ""))
    return records


def all_selectors() -> list[str]:
    return (
        ["all"]
        + list(ONE_SHOT_SUITES)
        + [f"keyed-{s}" for s in ONE_SHOT_SUITES]
        + ["counterexample"]
    )
