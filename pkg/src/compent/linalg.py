"""Dense complex matrix kernel over labeled qubit registers.

Index convention used throughout the package: qubits are numbered left to
right and qubit 0 is the most significant bit of a row/column index.  A
matrix acting on qubits ``(0, .., n-1)`` therefore has dimension ``2**n``
and the basis state ``|b_0 b_1 .. b_{n-1}>`` sits at row
``sum(b_i * 2**(n-1-i))``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

QUBIT_CAP = 14          # hard limit on dense simulation size
HERMITIAN_TOL = 1e-10   # entrywise |m - m^dag| tolerance
PSD_FLOOR = -1e-10      # eigenvalues in [PSD_FLOOR, 0) are treated as 0
UNITARY_TOL = 1e-9


class SizeLimitError(ValueError):
    """An operation would exceed the dense-simulation qubit cap."""


@dataclass(frozen=True)
class RegisterLayout:
    """Ordered, named qubit registers fixing the tensor-factor order.

    The register order fixes the global qubit order; qubit 0 of the first
    register is the most significant bit.
    """

    registers: tuple[tuple[str, int], ...]

    def __post_init__(self):
        names = [name for name, _ in self.registers]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate register names in {names}")
        for name, count in self.registers:
            if count < 1:
                raise ValueError(f"register {name!r} must hold at least one qubit")

    @staticmethod
    def of(*registers: tuple[str, int]) -> "RegisterLayout":
        return RegisterLayout(tuple((str(n), int(c)) for n, c in registers))

    @property
    def total(self) -> int:
        return sum(c for _, c in self.registers)

    @property
    def dim(self) -> int:
        return 2 ** self.total

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.registers)

    def count(self, name: str) -> int:
        for n, c in self.registers:
            if n == name:
                return c
        raise ValueError(f"unknown register {name!r}")

    def wires(self, name: str) -> range:
        """Global qubit indices of a register."""
        offset = 0
        for n, c in self.registers:
            if n == name:
                return range(offset, offset + c)
            offset += c
        raise ValueError(f"unknown register {name!r}")

    def restrict(self, keep: Iterable[str]) -> "RegisterLayout":
        keep = set(keep)
        unknown = keep - set(self.names)
        if unknown:
            raise ValueError(f"unknown registers {sorted(unknown)}")
        return RegisterLayout(tuple(r for r in self.registers if r[0] in keep))


def as_complex(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if not np.all(np.isfinite(m.real)) or not np.all(np.isfinite(m.imag)):
        raise ValueError("matrix entries must be finite")
    return m


def tensor_product(a, b) -> np.ndarray:
    """Kronecker product with ``a``'s indices most significant."""
    a, b = as_complex(a), as_complex(b)
    cap = 2 ** QUBIT_CAP
    if a.shape[0] * b.shape[0] > cap or a.shape[1] * b.shape[1] > cap:
        raise SizeLimitError(
            f"tensor product exceeds the {QUBIT_CAP}-qubit cap: "
            f"{a.shape} x {b.shape}"
        )
    return np.kron(a, b)


def permute_qubits(m: np.ndarray, n_qubits: int, new_order: Sequence[int]) -> np.ndarray:
    """Reorder the qubits of a ``2**n x 2**n`` matrix.

    ``new_order[i]`` is the old position of the qubit that lands at new
    position ``i``; both rows and columns are permuted.
    """
    if sorted(new_order) != list(range(n_qubits)):
        raise ValueError(f"new_order must be a permutation of 0..{n_qubits - 1}")
    t = m.reshape((2,) * (2 * n_qubits))
    axes = list(new_order) + [n_qubits + q for q in new_order]
    return np.transpose(t, axes).reshape(m.shape)


def trace_out_qubits(m: np.ndarray, n_qubits: int, drop: Iterable[int]) -> np.ndarray:
    """Partial trace over the given global qubit positions."""
    drop = sorted(set(drop))
    if any(q < 0 or q >= n_qubits for q in drop):
        raise ValueError(f"qubit positions {drop} out of range for {n_qubits} qubits")
    keep = [q for q in range(n_qubits) if q not in drop]
    t = m.reshape((2,) * (2 * n_qubits))
    order = keep + drop + [n_qubits + q for q in keep] + [n_qubits + q for q in drop]
    k, d = 2 ** len(keep), 2 ** len(drop)
    t = np.transpose(t, order).reshape(k, d, k, d)
    return np.einsum("abcb->ac", t)


def partial_trace(m, layout: RegisterLayout, keep: Iterable[str]) -> np.ndarray:
    """Trace out every register not named in ``keep``; order is preserved."""
    m = as_complex(m)
    if m.shape[0] != m.shape[1] or m.shape[0] != layout.dim:
        raise ValueError(f"matrix shape {m.shape} does not match layout dim {layout.dim}")
    keep = set(keep)
    unknown = keep - set(layout.names)
    if unknown:
        raise ValueError(f"unknown registers {sorted(unknown)}")
    drop = []
    for name in layout.names:
        if name not in keep:
            drop.extend(layout.wires(name))
    return trace_out_qubits(m, layout.total, drop)


def schatten_norm(m, p) -> float:
    """Schatten p-norm (sum of singular values to the p, to the 1/p)."""
    m = as_complex(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError("schatten_norm expects a square matrix")
    if not (p == np.inf or p >= 1):
        raise ValueError(f"order p must be >= 1 or inf, got {p}")
    sv = np.linalg.svd(m, compute_uv=False)
    if p == np.inf:
        return float(sv.max(initial=0.0))
    return float(np.sum(sv ** p) ** (1.0 / p))


def eig_hermitian(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    m = as_complex(m)
    if m.shape[0] != m.shape[1]:
        raise ValueError("eig_hermitian expects a square matrix")
    if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
        raise ValueError("matrix is not Hermitian within tolerance")
    vals, vecs = np.linalg.eigh(m)
    return vals, vecs


def psd_sqrt(m) -> np.ndarray:
    """Principal square root of a positive semidefinite matrix."""
    vals, vecs = eig_hermitian(m)
    if vals.min(initial=0.0) < PSD_FLOOR:
        raise ValueError(f"matrix is not PSD: min eigenvalue {vals.min()}")
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


def is_unitary(m, tol: float = UNITARY_TOL) -> bool:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return bool(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))) <= tol)


def require_unitary(m, what: str = "matrix") -> np.ndarray:
    m = as_complex(m)
    if not is_unitary(m):
        raise ValueError(f"{what} is not unitary within {UNITARY_TOL}")
    return m


def embed_operator(op: np.ndarray, wires: Sequence[int], n_qubits: int) -> np.ndarray:
    """Embed an operator on the given wires into the full ``2**n`` space."""
    wires = list(wires)
    k = len(wires)
    if op.shape != (2 ** k, 2 ** k):
        raise ValueError(f"operator shape {op.shape} does not match {k} wires")
    rest = [q for q in range(n_qubits) if q not in wires]
    full = np.kron(op, np.eye(2 ** (n_qubits - k), dtype=complex))
    cur = wires + rest
    inv = [cur.index(q) for q in range(n_qubits)]
    return permute_qubits(full, n_qubits, inv)


def haar_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Gaussian matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
    z /= np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))
