"""Density matrices, EPR resources, and entropy functionals.

All entropies are in bits (base-2 logarithms) with the convention
``0 * log 0 = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .linalg import (
    HERMITIAN_TOL,
    PSD_FLOOR,
    RegisterLayout,
    SizeLimitError,
    as_complex,
    haar_unitary,
    partial_trace,
    permute_qubits,
    psd_sqrt,
    require_unitary,
)

TRACE_TOL = 1e-9
NORM_TOL = 1e-10
# Full spectrum validation is skipped above this dimension; large states are
# only produced internally by the circuit simulator, which is trace preserving
# and completely positive by construction.
PSD_CHECK_DIM = 256


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A density matrix together with its register layout."""

    matrix: np.ndarray
    layout: RegisterLayout

    def __post_init__(self):
        m = as_complex(self.matrix)
        object.__setattr__(self, "matrix", m)
        if m.shape != (self.layout.dim, self.layout.dim):
            raise ValueError(
                f"matrix shape {m.shape} does not match layout dim {self.layout.dim}"
            )
        if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
            raise ValueError("density matrix is not Hermitian within tolerance")
        tr = np.trace(m).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"density matrix trace {tr} is not 1")
        if m.shape[0] <= PSD_CHECK_DIM:
            low = np.linalg.eigvalsh(m).min()
            if low < PSD_FLOOR:
                raise ValueError(f"density matrix has negative eigenvalue {low}")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def n_qubits(self) -> int:
        return self.layout.total

    def reduce(self, keep) -> "DensityMatrix":
        """Partial trace keeping only the named registers."""
        return DensityMatrix(
            partial_trace(self.matrix, self.layout, keep), self.layout.restrict(keep)
        )


@dataclass(frozen=True, eq=False)
class PureState:
    """State vector together with its register layout."""

    amplitudes: np.ndarray
    layout: RegisterLayout

    def __post_init__(self):
        v = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        object.__setattr__(self, "amplitudes", v)
        if v.shape[0] != self.layout.dim:
            raise ValueError("amplitude count does not match layout dimension")
        if abs(np.linalg.norm(v) - 1.0) > NORM_TOL:
            raise ValueError("state vector is not normalized")

    def to_density(self) -> DensityMatrix:
        return DensityMatrix(np.outer(self.amplitudes, self.amplitudes.conj()), self.layout)


@dataclass(frozen=True, eq=False)
class BipartiteState:
    """Density matrix with an explicit A:B qubit bipartition.

    All A qubits are stored before all B qubits.
    """

    state: DensityMatrix
    cut: tuple[int, int]

    def __post_init__(self):
        n_a, n_b = self.cut
        expected = RegisterLayout.of(("A", n_a), ("B", n_b))
        if self.state.layout != expected:
            raise ValueError(
                f"layout {self.state.layout} does not match cut {self.cut}"
            )

    @property
    def n_a(self) -> int:
        return self.cut[0]

    @property
    def n_b(self) -> int:
        return self.cut[1]

    @property
    def matrix(self) -> np.ndarray:
        return self.state.matrix

    @property
    def dim(self) -> int:
        return self.state.dim

    def reduced_a(self) -> DensityMatrix:
        return self.state.reduce({"A"})

    def reduced_b(self) -> DensityMatrix:
        return self.state.reduce({"B"})


@dataclass(frozen=True)
class StateFamily:
    """Growth-parameter indexed family of bipartite states."""

    generator: object  # Callable[[int], BipartiteState]
    n_a: object        # Callable[[int], int]
    n_b: object        # Callable[[int], int]

    def state(self, lam: int) -> BipartiteState:
        s = self.generator(lam)
        if s.cut != (self.n_a(lam), self.n_b(lam)):
            raise ValueError(
                f"family produced cut {s.cut} at lambda={lam}, "
                f"declared ({self.n_a(lam)}, {self.n_b(lam)})"
            )
        return s


@dataclass(frozen=True)
class KeyedStateFamily:
    """Key-indexed family; keys are bit tuples of length kappa(lam)."""

    kappa: object      # Callable[[int], int]
    generator: object  # Callable[[int, tuple[int, ...]], BipartiteState]

    def state(self, lam: int, key: tuple[int, ...]) -> BipartiteState:
        if len(key) != self.kappa(lam) or any(b not in (0, 1) for b in key):
            raise ValueError(f"key {key} is not a bit string of length {self.kappa(lam)}")
        return self.generator(lam, key)


def all_keys(kappa: int) -> list[tuple[int, ...]]:
    """All bit tuples of length kappa, in lexicographic order."""
    return [tuple((i >> (kappa - 1 - j)) & 1 for j in range(kappa)) for i in range(2 ** kappa)]


def bipartite_pure(amplitudes, cut: tuple[int, int]) -> BipartiteState:
    layout = RegisterLayout.of(("A", cut[0]), ("B", cut[1]))
    return BipartiteState(PureState(amplitudes, layout).to_density(), cut)


def bipartite_from_matrix(matrix, cut: tuple[int, int]) -> BipartiteState:
    layout = RegisterLayout.of(("A", cut[0]), ("B", cut[1]))
    return BipartiteState(DensityMatrix(matrix, layout), cut)


def epr_vector(n: int) -> np.ndarray:
    """Amplitudes of n EPR pairs, all A qubits before all B qubits."""
    d = 2 ** n
    v = np.zeros(d * d, dtype=complex)
    for x in range(d):
        v[x * d + x] = 1.0
    return v / math.sqrt(d)


def epr_pairs(n: int) -> BipartiteState:
    """n EPR pairs on cut (n, n); pair i spans A-qubit i and B-qubit i."""
    if not 1 <= n <= 7:
        raise SizeLimitError(f"epr_pairs supports 1..7 pairs, got {n}")
    return bipartite_pure(epr_vector(n), (n, n))


def rotated_epr(u, m: int) -> BipartiteState:
    """EPR pairs with a unitary applied to Bob's half: (I (x) U) |phi^(x)m>."""
    u = require_unitary(u, "rotation")
    d = 2 ** m
    if u.shape != (d, d):
        raise ValueError(f"unitary shape {u.shape} does not match {m} qubits")
    v = (u.T.reshape(-1)) / math.sqrt(d)  # v[x*d + y] = u[y, x] / sqrt(d)
    return bipartite_pure(v, (m, m))


def pauli_shift(a, b) -> np.ndarray:
    """Product of per-qubit X powers then Z powers, sigma_X(a) sigma_Z(b)."""
    a, b = _bits(a), _bits(b)
    if len(a) != len(b):
        raise ValueError(f"bit strings must have equal length, got {len(a)} and {len(b)}")
    x = np.array([[0, 1], [1, 0]], dtype=complex)
    z = np.array([[1, 0], [0, -1]], dtype=complex)
    out = np.array([[1]], dtype=complex)
    for ai, bi in zip(a, b):
        factor = np.eye(2, dtype=complex)
        if ai:
            factor = x @ factor
        if bi:
            factor = factor @ z
        out = np.kron(out, factor)
    return out


def _bits(bits) -> tuple[int, ...]:
    if isinstance(bits, str):
        bits = [int(c) for c in bits]
    bits = tuple(int(b) for b in bits)
    if any(b not in (0, 1) for b in bits):
        raise ValueError(f"{bits} is not a bit string")
    return bits


def _mat(x) -> np.ndarray:
    if isinstance(x, BipartiteState):
        return x.matrix
    if isinstance(x, DensityMatrix):
        return x.matrix
    return as_complex(x)


def fidelity(rho, sigma) -> float:
    """Uhlmann fidelity ||sqrt(rho) sqrt(sigma)||_1^2.

    Computed from the spectrum of sqrt(rho) sigma sqrt(rho).  Negative
    eigenvalue noise is clipped to zero, and eigenvalues below 1e-12 of the
    largest one are dropped: the square root would otherwise amplify
    O(machine epsilon) rank noise into O(1e-8) fidelity error.
    """
    r, s = _mat(rho), _mat(sigma)
    if r.shape != s.shape:
        raise ValueError(f"dimension mismatch {r.shape} vs {s.shape}")
    root = psd_sqrt(r)
    core = root @ s @ root
    vals = np.linalg.eigvalsh((core + core.conj().T) / 2.0)
    vals = np.clip(vals, 0.0, None)
    top = vals.max(initial=0.0)
    if top > 0.0:
        vals[vals < top * 1e-12] = 0.0
    f = float(np.sum(np.sqrt(vals)) ** 2)
    return min(f, 1.0) if f <= 1.0 + 1e-9 else f


def trace_distance(rho, sigma) -> float:
    """Half the trace norm of rho - sigma."""
    r, s = _mat(rho), _mat(sigma)
    if r.shape != s.shape:
        raise ValueError(f"dimension mismatch {r.shape} vs {s.shape}")
    vals = np.linalg.eigvalsh(r - s)
    return float(0.5 * np.sum(np.abs(vals)))


def von_neumann_entropy(rho) -> float:
    """-sum(p log2 p) over the spectrum, with 0 log 0 = 0."""
    vals = np.linalg.eigvalsh(_mat(rho))
    vals = vals[vals > 1e-15]
    return float(-np.sum(vals * np.log2(vals)))


def conditional_mutual_information(rho: DensityMatrix) -> float:
    """I(A;B|E) = H(AE) + H(BE) - H(ABE) - H(E) for a state on registers A, B, E."""
    for name in ("A", "B", "E"):
        if name not in rho.layout.names:
            raise ValueError(f"register {name!r} missing from layout")
    h_ae = von_neumann_entropy(rho.reduce({"A", "E"}))
    h_be = von_neumann_entropy(rho.reduce({"B", "E"}))
    h_abe = von_neumann_entropy(rho)
    h_e = von_neumann_entropy(rho.reduce({"E"}))
    value = h_ae + h_be - h_abe - h_e
    if value < -1e-9:
        raise ValueError(f"conditional mutual information {value} is negative")
    return max(value, 0.0)


def squashed_trivial_upper(rho: BipartiteState) -> float:
    """Half the mutual information I(A;B); the trivial-extension upper bound
    on squashed entanglement."""
    h_a = von_neumann_entropy(rho.reduced_a())
    h_b = von_neumann_entropy(rho.reduced_b())
    h_ab = von_neumann_entropy(rho.state)
    return 0.5 * (h_a + h_b - h_ab)


def binary_mixture_entropy(x: float) -> float:
    """Entropy of an equal mixture of two pure states with overlap magnitude x.

    Equals 1 - (1-x)/2 log2(1-x) - (1+x)/2 log2(1+x); the mixture eigenvalues
    are (1 +- x)/2.
    """
    if not 0.0 <= x < 1.0:
        raise ValueError(f"overlap magnitude must lie in [0, 1), got {x}")
    return 1.0 - 0.5 * (1.0 - x) * math.log2(1.0 - x) - 0.5 * (1.0 + x) * math.log2(1.0 + x)


def h_star(eta: float) -> float:
    """1 - eta/2 log2(eta) - (2-eta)/2 log2(2-eta); equals
    binary_mixture_entropy(1 - eta)."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    t1 = 0.0 if eta == 0.0 else eta * math.log2(eta)
    t2 = (2.0 - eta) * math.log2(2.0 - eta)
    return 1.0 - 0.5 * t1 - 0.5 * t2


def g2(delta: float) -> float:
    """(delta+1) log2(delta+1) - delta log2(delta), continuous at 0."""
    if delta < 0.0:
        raise ValueError(f"delta must be nonnegative, got {delta}")
    if delta == 0.0:
        return 0.0
    return (delta + 1.0) * math.log2(delta + 1.0) - delta * math.log2(delta)


def mixture(states: Sequence[BipartiteState], p: Sequence[float]) -> BipartiteState:
    """Convex combination of bipartite states with matching cuts."""
    if len(states) != len(p) or not states:
        raise ValueError("need one weight per state")
    weights = np.asarray(p, dtype=float)
    if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-12:
        raise ValueError(f"weights {p} are not a probability vector")
    cut = states[0].cut
    if any(s.cut != cut for s in states):
        raise ValueError("all states must share the same cut")
    acc = np.zeros_like(states[0].matrix)
    for w, s in zip(weights, states):
        acc = acc + w * s.matrix
    return bipartite_from_matrix(acc, cut)


def tensor_states(s1: BipartiteState, s2: BipartiteState) -> BipartiteState:
    """Bipartite tensor product: A parts concatenate, B parts concatenate."""
    m = np.kron(s1.matrix, s2.matrix)  # qubit order A1 B1 A2 B2
    a1, b1 = s1.cut
    a2, b2 = s2.cut
    n = a1 + b1 + a2 + b2
    # target order A1 A2 B1 B2
    order = (
        list(range(a1))
        + [a1 + b1 + i for i in range(a2)]
        + [a1 + i for i in range(b1)]
        + [a1 + b1 + a2 + i for i in range(b2)]
    )
    return bipartite_from_matrix(permute_qubits(m, n, order), (a1 + a2, b1 + b2))


def conjugate_local(s: BipartiteState, u_a, u_b) -> BipartiteState:
    """Apply a local unitary U_A (x) U_B to a bipartite state."""
    u_a = require_unitary(u_a, "U_A")
    u_b = require_unitary(u_b, "U_B")
    u = np.kron(u_a, u_b)
    return bipartite_from_matrix(u @ s.matrix @ u.conj().T, s.cut)


def random_pure_state(n_qubits: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random state vector on n qubits."""
    return haar_unitary(2 ** n_qubits, rng)[:, 0]


def random_density_matrix(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random mixed state from the induced (Ginibre) measure."""
    rank = rank or dim
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def state_to_dict(s: BipartiteState) -> dict:
    """JSON-ready form; floats round-trip exactly through json."""
    m = s.matrix
    return {
        "dims": [int(m.shape[0]), int(m.shape[1])],
        "cut": [int(s.n_a), int(s.n_b)],
        "re": m.real.reshape(-1).tolist(),
        "im": m.imag.reshape(-1).tolist(),
    }


def state_from_dict(d: dict) -> BipartiteState:
    rows, cols = d["dims"]
    m = np.asarray(d["re"], dtype=float).reshape(rows, cols) + 1j * np.asarray(
        d["im"], dtype=float
    ).reshape(rows, cols)
    return bipartite_from_matrix(m, (int(d["cut"][0]), int(d["cut"][1])))
