"""Round-structured circuit representation of LOCC channels.

A circuit acts on five registers laid out in the fixed global order

    A (n_a) | A' (t_a) | C (q) | B (n_b) | B' (t_b)

A and B hold the bipartite input, A' and B' are local ancillas initialized
to |0..0>, and C is a shared classical register initialized to |0..0>.
Each round applies Alice's gates (on A, A', C), dephases C in the
computational basis, then applies Bob's gates (on B, B', C) and dephases C
again.  Measurement is modeled exactly as that pinching; no trajectories are
sampled.  Finally every wire not designated as an output is traced out.

Gate counting: every unitary or controlled gate costs 1, every pinched wire
in an explicit measure gate costs 1, and every ancilla or communication
qubit costs 1 at creation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .linalg import (
    QUBIT_CAP,
    SizeLimitError,
    as_complex,
    embed_operator,
    require_unitary,
)
from .states import (
    BipartiteState,
    all_keys,
    bipartite_from_matrix,
    epr_vector,
    pauli_shift,
    rotated_epr,
)

UNITARY = "unitary"
CONTROLLED = "controlled"
PINCH = "pinch"

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_CNOT = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
_SWAP = np.array(
    [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex
)


def _wires(w) -> tuple[int, ...]:
    if isinstance(w, (int, np.integer)):
        return (int(w),)
    return tuple(int(x) for x in w)


@dataclass(frozen=True, eq=False)
class Gate:
    """A single circuit element: unitary, computational-basis controlled
    unitary, or measure-pinch on classical wires."""

    kind: str
    wires: tuple[int, ...]
    matrix: np.ndarray | None = None
    controls: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "wires", _wires(self.wires))
        object.__setattr__(self, "controls", _wires(self.controls))
        touched = self.wires + self.controls
        if len(set(touched)) != len(touched):
            raise ValueError(f"duplicate wires in gate: {touched}")
        if self.kind in (UNITARY, CONTROLLED):
            if not 1 <= len(self.wires) <= 2:
                raise ValueError("unitary payloads act on 1 or 2 qubits")
            m = require_unitary(self.matrix, "gate payload")
            if m.shape != (2 ** len(self.wires),) * 2:
                raise ValueError(
                    f"payload shape {m.shape} does not match wires {self.wires}"
                )
            object.__setattr__(self, "matrix", m)
            if self.kind == CONTROLLED and not self.controls:
                raise ValueError("controlled gate needs at least one control wire")
            if self.kind == UNITARY and self.controls:
                raise ValueError("plain unitary gate cannot carry controls")
        elif self.kind == PINCH:
            if not self.wires:
                raise ValueError("measure-pinch needs at least one wire")
            if self.matrix is not None or self.controls:
                raise ValueError("measure-pinch carries no payload or controls")
        else:
            raise ValueError(f"unknown gate kind {self.kind!r}")

    @staticmethod
    def unitary(matrix, wires) -> "Gate":
        return Gate(UNITARY, _wires(wires), as_complex(matrix))

    @staticmethod
    def controlled(matrix, wires, controls) -> "Gate":
        return Gate(CONTROLLED, _wires(wires), as_complex(matrix), _wires(controls))

    @staticmethod
    def pinch(wires) -> "Gate":
        return Gate(PINCH, _wires(wires))

    @property
    def cost(self) -> int:
        return len(self.wires) if self.kind == PINCH else 1

    def touched(self) -> tuple[int, ...]:
        return self.controls + self.wires

    def remap(self, wire_map: dict[int, int]) -> "Gate":
        return Gate(
            self.kind,
            tuple(wire_map[w] for w in self.wires),
            self.matrix,
            tuple(wire_map[w] for w in self.controls),
        )


@dataclass(frozen=True)
class Round:
    alice: tuple[Gate, ...] = ()
    bob: tuple[Gate, ...] = ()


@dataclass(frozen=True, eq=False)
class LoccCircuit:
    """LOCC channel as alternating per-round local circuits.

    ``out_a`` / ``out_b`` are the positions, within the concatenated (A, A')
    and (B, B') blocks, of the output qubits.  They default to the first
    ``m_a`` / ``m_b`` positions.
    """

    n_a: int
    t_a: int
    q: int
    n_b: int
    t_b: int
    rounds: tuple[Round, ...]
    m_a: int
    m_b: int
    out_a: tuple[int, ...] | None = None
    out_b: tuple[int, ...] | None = None

    def __post_init__(self):
        for name in ("n_a", "t_a", "q", "n_b", "t_b", "m_a", "m_b"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if self.total_qubits > QUBIT_CAP:
            raise SizeLimitError(
                f"circuit needs {self.total_qubits} qubits, cap is {QUBIT_CAP}"
            )
        if self.m_a > self.n_a + self.t_a or self.m_b > self.n_b + self.t_b:
            raise ValueError("output sizes exceed the available qubits")
        if self.m_a < 1 or self.m_b < 1:
            raise ValueError("each party must output at least one qubit")
        object.__setattr__(self, "rounds", tuple(self.rounds))
        out_a = tuple(self.out_a) if self.out_a is not None else tuple(range(self.m_a))
        out_b = tuple(self.out_b) if self.out_b is not None else tuple(range(self.m_b))
        for out, size, block in ((out_a, self.m_a, self.n_a + self.t_a),
                                 (out_b, self.m_b, self.n_b + self.t_b)):
            if len(out) != size or len(set(out)) != size:
                raise ValueError(f"output positions {out} do not match size {size}")
            if any(p < 0 or p >= block for p in out):
                raise ValueError(f"output positions {out} outside block of {block}")
        object.__setattr__(self, "out_a", out_a)
        object.__setattr__(self, "out_b", out_b)
        alice_ok = set(self.alice_wires)
        bob_ok = set(self.bob_wires)
        for rnd in self.rounds:
            for g in rnd.alice:
                if not set(g.touched()) <= alice_ok:
                    raise ValueError(f"Alice gate touches foreign wires: {g.touched()}")
                self._check_pinch(g)
            for g in rnd.bob:
                if not set(g.touched()) <= bob_ok:
                    raise ValueError(f"Bob gate touches foreign wires: {g.touched()}")
                self._check_pinch(g)

    def _check_pinch(self, g: Gate) -> None:
        if g.kind == PINCH and not set(g.wires) <= set(self.c_wires):
            raise ValueError(f"measure-pinch wires {g.wires} must lie in C")

    # -- register geometry ---------------------------------------------------

    @property
    def total_qubits(self) -> int:
        return self.n_a + self.t_a + self.q + self.n_b + self.t_b

    @property
    def a_wires(self) -> range:
        return range(0, self.n_a)

    @property
    def ta_wires(self) -> range:
        return range(self.n_a, self.n_a + self.t_a)

    @property
    def c_wires(self) -> range:
        off = self.n_a + self.t_a
        return range(off, off + self.q)

    @property
    def b_wires(self) -> range:
        off = self.n_a + self.t_a + self.q
        return range(off, off + self.n_b)

    @property
    def tb_wires(self) -> range:
        off = self.n_a + self.t_a + self.q + self.n_b
        return range(off, off + self.t_b)

    @property
    def alice_wires(self) -> tuple[int, ...]:
        return tuple(self.a_wires) + tuple(self.ta_wires) + tuple(self.c_wires)

    @property
    def bob_wires(self) -> tuple[int, ...]:
        return tuple(self.b_wires) + tuple(self.tb_wires) + tuple(self.c_wires)

    @property
    def out_a_global(self) -> tuple[int, ...]:
        return self.out_a  # the (A, A') block starts at global wire 0

    @property
    def out_b_global(self) -> tuple[int, ...]:
        off = self.n_a + self.t_a + self.q
        return tuple(off + p for p in self.out_b)


def gate_count(circuit: LoccCircuit) -> int:
    """Total cost: gates, pinched wires, and ancilla/communication creation."""
    gates = sum(
        g.cost for rnd in circuit.rounds for g in (*rnd.alice, *rnd.bob)
    )
    return gates + circuit.t_a + circuit.t_b + circuit.q


# -- simulation ---------------------------------------------------------------


class _TensorState:
    """State over a dynamic set of active wires.

    Pure inputs are tracked as an amplitude tensor until a pinch or partial
    trace forces densification; afterwards the state is a (2,)*2k density
    tensor where bra axis i and ket axis k+i both belong to ``active[i]``.
    Unitaries act on the density tensor as a single contraction with
    U (x) conj(U), which halves the number of large transpose copies.
    """

    def __init__(self, matrix: np.ndarray, wires: Sequence[int], vector=None):
        self.active: list[int] = list(wires)
        k = len(self.active)
        if vector is not None:
            self.pure = True
            self.t = np.array(vector, dtype=complex).reshape((2,) * k)
        else:
            self.pure = False
            self.t = np.array(matrix, dtype=complex).reshape((2,) * (2 * k))

    @property
    def k(self) -> int:
        return len(self.active)

    def densify(self) -> None:
        if self.pure:
            v = self.t.reshape(-1)
            self.t = np.outer(v, v.conj()).reshape((2,) * (2 * self.k))
            self.pure = False

    def ensure(self, wires: Iterable[int]) -> None:
        fresh = [w for w in wires if w not in self.active]
        if not fresh:
            return
        if self.pure:
            block = np.zeros((2,) * len(fresh), dtype=complex)
            block[(0,) * len(fresh)] = 1.0
            self.t = np.multiply.outer(self.t, block)
        else:
            d = 2 ** len(fresh)
            block = np.zeros((d, d), dtype=complex)
            block[0, 0] = 1.0
            k = self.k
            f = len(fresh)
            t = np.multiply.outer(self.t, block.reshape((2,) * (2 * f)))
            # new bra axes sit after the old bras, new kets at the end
            self.t = np.moveaxis(t, range(2 * k, 2 * k + f), range(k, k + f))
        self.active.extend(fresh)

    def _axes(self, wires: Sequence[int]) -> list[int]:
        return [self.active.index(w) for w in wires]

    def unitary(self, u: np.ndarray, wires: Sequence[int]) -> None:
        w = len(wires)
        axes = self._axes(wires)
        if self.pure:
            ut = u.reshape((2,) * (2 * w))
            contract = list(range(w, 2 * w))
            self.t = np.moveaxis(
                np.tensordot(ut, self.t, axes=(contract, axes)), range(w), axes
            )
            return
        both = np.kron(u, np.conj(u)).reshape((2,) * (4 * w))
        targets = axes + [self.k + a for a in axes]
        self.t = np.moveaxis(
            np.tensordot(both, self.t, axes=(list(range(2 * w, 4 * w)), targets)),
            range(2 * w),
            targets,
        )

    def controlled(self, u: np.ndarray, wires: Sequence[int], controls: Sequence[int]) -> None:
        c, w = len(controls), len(wires)
        dim_c, dim_w = 2 ** c, 2 ** w
        m = np.eye(dim_c * dim_w, dtype=complex)
        m[(dim_c - 1) * dim_w:, (dim_c - 1) * dim_w:] = u
        self.unitary(m, tuple(controls) + tuple(wires))

    def pinch(self, wires: Iterable[int]) -> None:
        wires = list(wires)
        if not wires:
            return
        self.densify()
        for w in wires:
            p = self.active.index(w)
            view = np.moveaxis(self.t, (p, self.k + p), (0, 1))
            view[0, 1] = 0.0
            view[1, 0] = 0.0

    def trace_out(self, wires: Iterable[int]) -> None:
        wires = list(wires)
        if not wires:
            return
        if self.pure:
            # fuse densification with the trace: contract the outer product
            # over the dropped axes without materializing the full matrix
            axes = self._axes(wires)
            keep = [i for i in range(self.k) if i not in set(axes)]
            self.t = np.tensordot(self.t, np.conj(self.t), axes=(axes, axes))
            self.active = [self.active[i] for i in keep]
            self.pure = False
            return
        for w in wires:
            p = self.active.index(w)
            self.t = np.trace(self.t, axis1=p, axis2=self.k + p)
            self.active.pop(p)

    def extract(self, wires: Sequence[int]) -> np.ndarray:
        self.trace_out([w for w in self.active if w not in set(wires)])
        self.densify()
        perm = self._axes(wires)
        k = self.k
        t = np.transpose(self.t, perm + [k + p for p in perm])
        return t.reshape(2 ** k, 2 ** k)


def _as_vector(matrix: np.ndarray) -> np.ndarray | None:
    """Amplitudes of a numerically pure density matrix, else None."""
    if matrix.shape[0] > 256:
        return None
    purity = float(np.real(np.einsum("ij,ji->", matrix, matrix)))
    if abs(purity - 1.0) > 1e-12:
        return None
    vals, vecs = np.linalg.eigh(matrix)
    return vecs[:, -1]


def _liveness(circuit: LoccCircuit) -> dict[int, int]:
    """Index of the last gate touching each wire, over a global gate count."""
    last: dict[int, int] = {}
    idx = 0
    for rnd in circuit.rounds:
        for gates in (rnd.alice, rnd.bob):
            for g in gates:
                for w in g.touched():
                    last[w] = idx
                idx += 1
    return last


def apply(circuit: LoccCircuit, state: BipartiteState) -> BipartiteState:
    """Run the channel on a bipartite input and return the bipartite output.

    Pure inputs ride a state-vector fast path until the first pinch; wires
    are activated lazily (ancillas start in |0>) and traced out once no later
    gate touches them.  Every move is an exact density-matrix identity, so
    the result equals the static full-register simulation.
    """
    if state.cut != (circuit.n_a, circuit.n_b):
        raise ValueError(
            f"input cut {state.cut} does not match circuit ({circuit.n_a}, {circuit.n_b})"
        )
    if circuit.total_qubits > QUBIT_CAP:
        raise SizeLimitError(f"{circuit.total_qubits} qubits exceed cap {QUBIT_CAP}")

    last = _liveness(circuit)
    keep_forever = set(circuit.out_a_global) | set(circuit.out_b_global)
    input_wires = list(circuit.a_wires) + list(circuit.b_wires)
    sim = _TensorState(state.matrix, input_wires, vector=_as_vector(state.matrix))
    done = -1  # index of the last completed gate

    def retire() -> None:
        dead = [
            w for w in sim.active
            if w not in keep_forever and last.get(w, -1) <= done
        ]
        sim.trace_out(dead)

    if not sim.pure:
        retire()
    for rnd in circuit.rounds:
        for gates in (rnd.alice, rnd.bob):
            for g in gates:
                sim.ensure(g.touched())
                if g.kind == UNITARY:
                    sim.unitary(g.matrix, g.wires)
                elif g.kind == CONTROLLED:
                    sim.controlled(g.matrix, g.wires, g.controls)
                else:
                    if sim.pure:
                        retire()  # shed dead wires before densifying
                    sim.pinch(g.wires)
                done += 1
                if not sim.pure:
                    retire()
            live_c = [w for w in circuit.c_wires if w in sim.active]
            if live_c:
                if sim.pure:
                    retire()  # shed dead wires before the pinch densifies
                    live_c = [w for w in circuit.c_wires if w in sim.active]
                if live_c:
                    sim.pinch(live_c)
                retire()

    out_wires = circuit.out_a_global + circuit.out_b_global
    sim.ensure(out_wires)  # untouched ancilla outputs are still |0>
    out = sim.extract(out_wires)
    return bipartite_from_matrix(out, (circuit.m_a, circuit.m_b))


# -- combinators ---------------------------------------------------------------


def _remap_rounds(circuit: LoccCircuit, wire_map: dict[int, int]) -> list[Round]:
    return [
        Round(
            tuple(g.remap(wire_map) for g in rnd.alice),
            tuple(g.remap(wire_map) for g in rnd.bob),
        )
        for rnd in circuit.rounds
    ]


def _block_map(circuit: LoccCircuit, a0: int, ta0: int, c0: int, b0: int, tb0: int) -> dict[int, int]:
    m: dict[int, int] = {}
    for i, w in enumerate(circuit.a_wires):
        m[w] = a0 + i
    for i, w in enumerate(circuit.ta_wires):
        m[w] = ta0 + i
    for i, w in enumerate(circuit.c_wires):
        m[w] = c0 + i
    for i, w in enumerate(circuit.b_wires):
        m[w] = b0 + i
    for i, w in enumerate(circuit.tb_wires):
        m[w] = tb0 + i
    return m


def tensor(g1: LoccCircuit, g2: LoccCircuit) -> LoccCircuit:
    """Parallel composition: g1 on the first A:B block, g2 on the second."""
    n_a, t_a, q = g1.n_a + g2.n_a, g1.t_a + g2.t_a, g1.q + g2.q
    n_b, t_b = g1.n_b + g2.n_b, g1.t_b + g2.t_b
    c0 = n_a + t_a
    b0 = c0 + q
    tb0 = b0 + n_b
    map1 = _block_map(g1, 0, n_a, c0, b0, tb0)
    map2 = _block_map(
        g2, g1.n_a, n_a + g1.t_a, c0 + g1.q, b0 + g1.n_b, tb0 + g1.t_b
    )
    rounds1 = _remap_rounds(g1, map1)
    rounds2 = _remap_rounds(g2, map2)
    rounds = []
    for i in range(max(len(rounds1), len(rounds2))):
        r1 = rounds1[i] if i < len(rounds1) else Round()
        r2 = rounds2[i] if i < len(rounds2) else Round()
        rounds.append(Round(r1.alice + r2.alice, r1.bob + r2.bob))

    def merge_out(o1, o2, n1, n2, tsub1):
        out = [p if p < n1 else n2 + p for p in o1]
        out += [n1 + p if p < n2 else n1 + tsub1 + p for p in o2]
        return tuple(out)

    return LoccCircuit(
        n_a, t_a, q, n_b, t_b, tuple(rounds),
        g1.m_a + g2.m_a, g1.m_b + g2.m_b,
        out_a=merge_out(g1.out_a, g2.out_a, g1.n_a, g2.n_a, g1.t_a),
        out_b=merge_out(g1.out_b, g2.out_b, g1.n_b, g2.n_b, g1.t_b),
    )


def compose(second: LoccCircuit, first: LoccCircuit) -> LoccCircuit:
    """Sequential composition: run ``first``, feed its output to ``second``."""
    if (second.n_a, second.n_b) != (first.m_a, first.m_b):
        raise ValueError(
            f"shape mismatch: first outputs ({first.m_a}, {first.m_b}), "
            f"second expects ({second.n_a}, {second.n_b})"
        )
    n_a, t_a, q = first.n_a, first.t_a + second.t_a, first.q + second.q
    n_b, t_b = first.n_b, first.t_b + second.t_b
    c0 = n_a + t_a
    b0 = c0 + q
    tb0 = b0 + n_b
    map1 = _block_map(first, 0, n_a, c0, b0, tb0)

    # second's A block rides on first's output wires; ancillas are fresh
    def pos_to_global_a(p: int) -> int:
        return p  # (A, A') block starts at 0 and A' keeps its offset

    def pos_to_global_b(p: int) -> int:
        return b0 + p

    map2: dict[int, int] = {}
    for i, w in enumerate(second.a_wires):
        map2[w] = pos_to_global_a(first.out_a[i])
    for i, w in enumerate(second.ta_wires):
        map2[w] = n_a + first.t_a + i
    for i, w in enumerate(second.c_wires):
        map2[w] = c0 + first.q + i
    for i, w in enumerate(second.b_wires):
        map2[w] = pos_to_global_b(first.out_b[i])
    for i, w in enumerate(second.tb_wires):
        map2[w] = tb0 + first.t_b + i

    rounds = tuple(_remap_rounds(first, map1) + _remap_rounds(second, map2))
    out_a = tuple(
        first.out_a[p] if p < second.n_a else n_a + first.t_a + (p - second.n_a)
        for p in second.out_a
    )
    out_b = tuple(
        first.out_b[p] if p < second.n_b else n_b + first.t_b + (p - second.n_b)
        for p in second.out_b
    )
    return LoccCircuit(
        n_a, t_a, q, n_b, t_b, rounds, second.m_a, second.m_b,
        out_a=out_a, out_b=out_b,
    )


def local_layer_unitary(gates: Sequence[Gate], n_qubits: int) -> np.ndarray:
    """Product of a list of local unitary gates as one matrix.

    Gate wires index the target block 0..n_qubits-1; gates apply in list
    order, so the matrix is gates[-1] .. gates[0].
    """
    u = np.eye(2 ** n_qubits, dtype=complex)
    for g in gates:
        if g.kind != UNITARY:
            raise ValueError("a local unitary layer may contain only unitary gates")
        u = embed_operator(g.matrix, g.wires, n_qubits) @ u
    return u


def conjugate_by_local_unitary(
    g: LoccCircuit, alice_layer: Sequence[Gate], bob_layer: Sequence[Gate]
) -> LoccCircuit:
    """Append a local unitary layer acting on the output qubits.

    Layer gate wires are indices into the output blocks (0..m_a-1 and
    0..m_b-1).  The gate count grows by exactly the number of supplied gates.
    """
    a_map = {i: circuit_pos for i, circuit_pos in enumerate(g.out_a_global)}
    b_map = {i: circuit_pos for i, circuit_pos in enumerate(g.out_b_global)}
    alice = tuple(gate.remap(a_map) for gate in alice_layer)
    bob = tuple(gate.remap(b_map) for gate in bob_layer)
    for gate in alice + bob:
        if gate.kind != UNITARY:
            raise ValueError("conjugation layers may contain only unitary gates")
    return LoccCircuit(
        g.n_a, g.t_a, g.q, g.n_b, g.t_b,
        g.rounds + (Round(alice, bob),),
        g.m_a, g.m_b, out_a=g.out_a, out_b=g.out_b,
    )


# -- stock protocols ------------------------------------------------------------


def identity_circuit(n_a: int, n_b: int) -> LoccCircuit:
    return LoccCircuit(n_a, 0, 0, n_b, 0, (Round(),), n_a, n_b)


def local_unitary_circuit(
    alice_gates: Sequence[Gate], bob_gates: Sequence[Gate], n_a: int, n_b: int
) -> LoccCircuit:
    """One-round circuit of purely local unitaries (wires are global)."""
    return LoccCircuit(
        n_a, 0, 0, n_b, 0, (Round(tuple(alice_gates), tuple(bob_gates)),), n_a, n_b
    )


def bob_unitary_circuit(u, m: int) -> LoccCircuit:
    """Bob applies a single unitary on his m qubits."""
    u = require_unitary(u)
    if m > 2:
        raise ValueError("single-gate payloads cover at most 2 qubits")
    wires = tuple(range(m, 2 * m))
    return local_unitary_circuit((), (Gate.unitary(u, wires),), m, m)


def unrotate_distillation(u, m: int) -> LoccCircuit:
    """Bob-only circuit applying u^dag; maps the rotated EPR state Phi_U back
    to m perfect pairs."""
    u = require_unitary(u)
    return bob_unitary_circuit(u.conj().T, m)


def teleport_dilution(prep: Sequence[Gate], n: int, m_a: int | None = None) -> LoccCircuit:
    """Standard teleportation consuming n EPR pairs.

    ``prep`` acts on Alice's ancilla block of m_a + n qubits (wires indexed
    0..m_a+n-1 within that block) and prepares the target's purification:
    the first m_a qubits are Alice's share, the last n are teleported to Bob.
    Per teleported qubit: entangling CNOT, Hadamard, two outcome-copy CNOTs
    into C, a two-wire measure-pinch, and Bob's classically controlled X and
    Z corrections.
    """
    if m_a is None:
        m_a = n
    t_a = m_a + n
    circ_q = 2 * n
    total = n + t_a + circ_q + n
    if total > QUBIT_CAP:
        raise SizeLimitError(f"teleportation needs {total} qubits, cap is {QUBIT_CAP}")
    anc = n  # A' offset
    c_off = n + t_a
    b_off = c_off + circ_q

    prep_map = {i: anc + i for i in range(t_a)}
    alice: list[Gate] = [g.remap(prep_map) for g in prep]
    bob: list[Gate] = []
    measures: list[Gate] = []
    for i in range(n):
        source = anc + m_a + i   # purification qubit headed to Bob
        epr_a = i                # Alice's half of pair i
        c_x, c_z = c_off + 2 * i, c_off + 2 * i + 1
        alice.append(Gate.unitary(_CNOT, (source, epr_a)))
        alice.append(Gate.unitary(_H, (source,)))
        alice.append(Gate.unitary(_CNOT, (epr_a, c_x)))
        alice.append(Gate.unitary(_CNOT, (source, c_z)))
        measures.append(Gate.pinch((c_x, c_z)))
        bob.append(Gate.controlled(_X, (b_off + i,), (c_x,)))
        bob.append(Gate.controlled(_Z, (b_off + i,), (c_z,)))
    alice.extend(measures)  # pinches commute past the disjoint-wire unitaries
    return LoccCircuit(
        n, t_a, circ_q, n, 0,
        (Round(tuple(alice), tuple(bob)),),
        m_a, n,
        out_a=tuple(n + j for j in range(m_a)),  # Alice keeps her purification share
        out_b=tuple(range(n)),
    )


def bbpssw_round() -> LoccCircuit:
    """One recurrence round of two-pair entanglement purification.

    Input: two 2-qubit pairs across the cut (pair i = A-qubit i with B-qubit
    i).  Both parties CNOT pair 1 onto pair 2, measure the pair-2 qubits and
    compare through C.  On agreement the first pair is kept; on disagreement
    both halves are swapped out for fresh |0> ancillas, so the failure branch
    emits |00><00|.  The comparison flag is the parity wire in C.
    """
    a1, a2, a_anc = 0, 1, 2
    c0, c1, flag = 3, 4, 5
    b1, b2, b_anc = 6, 7, 8
    round1 = Round(
        alice=(
            Gate.unitary(_CNOT, (a1, a2)),
            Gate.unitary(_CNOT, (a2, c0)),
            Gate.pinch((c0,)),
        ),
        bob=(
            Gate.unitary(_CNOT, (b1, b2)),
            Gate.unitary(_CNOT, (b2, c1)),
            Gate.pinch((c1,)),
            Gate.unitary(_CNOT, (c0, flag)),
            Gate.unitary(_CNOT, (c1, flag)),
            Gate.controlled(_SWAP, (b1, b_anc), (flag,)),
        ),
    )
    round2 = Round(alice=(Gate.controlled(_SWAP, (a1, a_anc), (flag,)),))
    return LoccCircuit(2, 1, 3, 2, 1, (round1, round2), 1, 1)


def dephase_bob_circuit(n_b: int = 1) -> LoccCircuit:
    """Fully dephase each of Bob's qubits in the computational basis."""
    c_off = n_b  # n_a = n_b, t_a = 0
    gates: list[Gate] = []
    b_off = n_b + n_b
    for i in range(n_b):
        gates.append(Gate.unitary(_CNOT, (b_off + i, c_off + i)))
        gates.append(Gate.pinch((c_off + i,)))
    return LoccCircuit(n_b, 0, n_b, n_b, 0, (Round(bob=tuple(gates)),), n_b, n_b)


def replace_bob_circuit(n_b: int = 1) -> LoccCircuit:
    """Discard Bob's qubits and hand out fresh |0> ancillas instead."""
    b_off = n_b
    gates = tuple(
        Gate.unitary(_SWAP, (b_off + i, b_off + n_b + i)) for i in range(n_b)
    )
    return LoccCircuit(n_b, 0, 0, n_b, n_b, (Round(bob=gates),), n_b, n_b)


def stock_channel_zoo() -> list[tuple[str, LoccCircuit]]:
    """Small named channels used by the property checks."""
    feedback = LoccCircuit(
        1, 0, 1, 1, 0,
        (
            Round(
                alice=(Gate.unitary(_CNOT, (0, 1)), Gate.pinch((1,))),
                bob=(Gate.controlled(_Z, (2,), (1,)),),
            ),
        ),
        1, 1,
    )
    return [
        ("identity", identity_circuit(1, 1)),
        ("bob-bitflip", bob_unitary_circuit(_X, 1)),
        ("bob-hadamard", bob_unitary_circuit(_H, 1)),
        ("dephase-bob", dephase_bob_circuit(1)),
        ("replace-bob", replace_bob_circuit(1)),
        ("alice-measure-bob-phase", feedback),
        ("purify-round", bbpssw_round()),
    ]


# -- budgets and families --------------------------------------------------------


@dataclass(frozen=True)
class GateBudget:
    """Polynomial gate budget with nonnegative coefficients c0..cd."""

    coeffs: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if not self.coeffs or any(c < 0 for c in self.coeffs):
            raise ValueError("budget coefficients must be nonnegative")

    def __call__(self, lam: int) -> float:
        return float(sum(c * lam ** i for i, c in enumerate(self.coeffs)))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1


@dataclass(frozen=True)
class ChannelFamily:
    generator: Callable[[int], LoccCircuit]
    budget: GateBudget

    def circuit(self, lam: int) -> LoccCircuit:
        return self.generator(lam)


@dataclass(frozen=True)
class KeyedChannelFamily:
    kappa: Callable[[int], int]
    generator: Callable[[int, tuple[int, ...]], LoccCircuit]
    budget: GateBudget

    def circuit(self, lam: int, key: tuple[int, ...]) -> LoccCircuit:
        if len(key) != self.kappa(lam):
            raise ValueError(f"key {key} has wrong length for lambda={lam}")
        return self.generator(lam, key)


@dataclass(frozen=True)
class EfficiencyReport:
    passed: bool
    checked: tuple[int, ...]
    violations: tuple[tuple, ...]  # (lam, key or None, count, budget)

    def to_dict(self) -> dict:
        return {
            "pass": self.passed,
            "checked": list(self.checked),
            "violations": [
                {
                    "lambda": lam,
                    "key": None if key is None else "".join(map(str, key)),
                    "gate_count": count,
                    "budget": budget,
                }
                for lam, key, count, budget in self.violations
            ],
        }


def is_efficient(family, lambdas: Sequence[int]) -> EfficiencyReport:
    """Check every generated circuit against the declared polynomial budget.

    Keyed families are checked for every key; unequal gate counts across keys
    of one lambda are reported as violations as well.
    """
    if not lambdas:
        raise ValueError("need at least one lambda to check")
    violations: list[tuple] = []
    for lam in lambdas:
        cap = family.budget(lam)
        if isinstance(family, KeyedChannelFamily):
            counts = {}
            for key in all_keys(family.kappa(lam)):
                count = gate_count(family.circuit(lam, key))
                counts[key] = count
                if count > cap:
                    violations.append((lam, key, count, cap))
            if len(set(counts.values())) > 1:
                for key, count in counts.items():
                    violations.append((lam, key, count, cap))
        else:
            count = gate_count(family.circuit(lam))
            if count > cap:
                violations.append((lam, None, count, cap))
    return EfficiencyReport(not violations, tuple(lambdas), tuple(violations))


def keyed_pauli_state(key: tuple[int, ...], m: int) -> BipartiteState:
    """Stock keyed family: EPR pairs rotated by the key's Pauli shift.

    The key is zero-padded to 2m bits; the first m bits choose X factors and
    the last m choose Z factors.
    """
    bits = tuple(key) + (0,) * (2 * m - len(key))
    if len(bits) != 2 * m:
        raise ValueError(f"key {key} longer than 2m = {2 * m}")
    return rotated_epr(pauli_shift(bits[:m], bits[m:]), m)


def keyed_pauli_unrotate(key: tuple[int, ...], m: int) -> LoccCircuit:
    """Witness circuit distilling the stock keyed family exactly."""
    bits = tuple(key) + (0,) * (2 * m - len(key))
    return unrotate_distillation(pauli_shift(bits[:m], bits[m:]), m)


def keyed_pauli_rotate(key: tuple[int, ...], m: int) -> LoccCircuit:
    """Witness circuit preparing the stock keyed family from EPR pairs."""
    bits = tuple(key) + (0,) * (2 * m - len(key))
    return bob_unitary_circuit(pauli_shift(bits[:m], bits[m:]), m)


# -- serialization ---------------------------------------------------------------


def _gate_to_dict(g: Gate) -> dict:
    d: dict = {"kind": g.kind, "wires": list(g.wires)}
    if g.controls:
        d["controls"] = list(g.controls)
    if g.matrix is not None:
        d["re"] = g.matrix.real.reshape(-1).tolist()
        d["im"] = g.matrix.imag.reshape(-1).tolist()
    return d


def _gate_from_dict(d: dict) -> Gate:
    matrix = None
    if "re" in d:
        flat = np.asarray(d["re"], dtype=float) + 1j * np.asarray(d["im"], dtype=float)
        dim = int(round(np.sqrt(flat.shape[0])))
        matrix = flat.reshape(dim, dim)
    return Gate(
        d["kind"],
        tuple(d["wires"]),
        matrix,
        tuple(d.get("controls", ())),
    )


def circuit_to_dict(c: LoccCircuit) -> dict:
    return {
        "registers": {
            "nA": c.n_a, "tA": c.t_a, "q": c.q,
            "nB": c.n_b, "tB": c.t_b, "mA": c.m_a, "mB": c.m_b,
        },
        "outA": list(c.out_a),
        "outB": list(c.out_b),
        "rounds": [
            {
                "alice": [_gate_to_dict(g) for g in rnd.alice],
                "bob": [_gate_to_dict(g) for g in rnd.bob],
            }
            for rnd in c.rounds
        ],
    }


def circuit_from_dict(d: dict) -> LoccCircuit:
    r = d["registers"]
    rounds = tuple(
        Round(
            tuple(_gate_from_dict(g) for g in rnd["alice"]),
            tuple(_gate_from_dict(g) for g in rnd["bob"]),
        )
        for rnd in d["rounds"]
    )
    return LoccCircuit(
        r["nA"], r["tA"], r["q"], r["nB"], r["tB"], rounds, r["mA"], r["mB"],
        out_a=tuple(d["outA"]) if "outA" in d else None,
        out_b=tuple(d["outB"]) if "outB" in d else None,
    )


def epr_expectation(state: BipartiteState, m: int) -> float:
    """<phi^(x)m| rho |phi^(x)m> for a state on cut (m, m)."""
    if state.cut != (m, m):
        raise ValueError(f"state cut {state.cut} does not match {m} EPR pairs")
    v = epr_vector(m)
    return float(np.real(v.conj() @ state.matrix @ v))
