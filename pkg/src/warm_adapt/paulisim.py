"""Dense statevector simulation of cost phases and Pauli-sum mixers.

States are plain complex numpy arrays of length ``2**n``; bit ``j`` of a basis
index is qubit ``j``.  Pauli operators use the symplectic (x-mask, z-mask)
encoding with ``Y = i X Z`` so that ``Y|0> = i|1>`` and ``Y|1> = -i|0>``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.linalg import expm_multiply

from .graphs import CutResult, Graph


class DimensionError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class PauliTerm:
    """Hermitian Pauli string; qubit j is X, Z or Y when only its x bit, only
    its z bit, or both bits are set."""

    x_mask: int
    z_mask: int

    @classmethod
    def from_label(cls, ops: dict[int, str]) -> "PauliTerm":
        x = z = 0
        for q, p in ops.items():
            if p in "XY":
                x |= 1 << q
            if p in "ZY":
                z |= 1 << q
        return cls(x, z)

    @property
    def support(self) -> int:
        return self.x_mask | self.z_mask

    @property
    def weight(self) -> int:
        return bin(self.support).count("1")

    def label(self) -> str:
        parts = []
        sup = self.support
        q = 0
        while sup >> q:
            if (sup >> q) & 1:
                xb, zb = (self.x_mask >> q) & 1, (self.z_mask >> q) & 1
                parts.append(("Y" if xb and zb else "X" if xb else "Z") + str(q))
            q += 1
        return "".join(parts) or "I"

    def commutes(self, other: "PauliTerm") -> bool:
        anti = bin(self.x_mask & other.z_mask).count("1") + bin(self.z_mask & other.x_mask).count("1")
        return anti % 2 == 0


@lru_cache(maxsize=8192)
def pauli_action(n, x_mask, z_mask):
    # (P psi)[c] = phase[c] * psi[perm[c]]
    idx = np.arange(1 << n)
    perm = idx ^ x_mask
    n_y = bin(x_mask & z_mask).count("1")
    parity = np.bitwise_count(perm & z_mask) & 1
    phase = (1j ** n_y) * (1 - 2 * parity.astype(float))
    perm.setflags(write=False)
    phase.setflags(write=False)
    return perm, phase


def apply_pauli(state: np.ndarray, term: PauliTerm) -> np.ndarray:
    perm, phase = pauli_action(num_qubits(state), term.x_mask, term.z_mask)
    return phase * state[perm]


@dataclass(frozen=True)
class MixerOp:
    """Real-weighted sum of Pauli terms.

    ``name`` is the label written to run records (``"sumX"``, ``"adjusted"``
    or a Pauli string such as ``"Y2Z5"``).
    """

    terms: tuple[tuple[float, PauliTerm], ...]
    name: str = ""

    def __post_init__(self):
        if not self.name:
            object.__setattr__(self, "name", "+".join(t.label() for _, t in self.terms))

    @classmethod
    def single(cls, term: PauliTerm) -> "MixerOp":
        return cls(((1.0, term),), term.label())

    @property
    def is_single_pauli(self) -> bool:
        return len(self.terms) == 1 and self.terms[0][0] == 1.0

    @property
    def max_weight(self) -> int:
        return max(t.weight for _, t in self.terms)

    def matvec(self, state: np.ndarray) -> np.ndarray:
        out = np.zeros_like(state, dtype=complex)
        for c, t in self.terms:
            out += c * apply_pauli(state, t)
        return out

    def dense(self, n: int) -> np.ndarray:
        dim = 1 << n
        mat = np.zeros((dim, dim), dtype=complex)
        for c, t in self.terms:
            perm, phase = pauli_action(n, t.x_mask, t.z_mask)
            mat[np.arange(dim), perm] += c * phase
        return mat


def standard_mixer(n: int) -> MixerOp:
    return MixerOp(tuple((1.0, PauliTerm(1 << q, 0)) for q in range(n)), "sumX")


def num_qubits(state: np.ndarray) -> int:
    n = int(state.size).bit_length() - 1
    if state.ndim != 1 or (1 << n) != state.size:
        raise DimensionError(f"state length {state.size} is not a power of two")
    return n


def _check_dims(state, diag):
    if state.shape != diag.shape:
        raise DimensionError(f"state has {state.size} amplitudes, diagonal has {diag.size}")


def uniform_state(n: int) -> np.ndarray:
    if n < 1:
        raise ValueError("need at least one qubit")
    return np.full(1 << n, 2.0 ** (-n / 2), dtype=complex)


def basis_state(n: int, index: int) -> np.ndarray:
    s = np.zeros(1 << n, dtype=complex)
    s[index] = 1.0
    return s


def cost_diagonal(g: Graph) -> np.ndarray:
    """Diagonal of ``C = -1/2 sum w (I - Z_j Z_k)``, constant term included."""
    idx = np.arange(1 << g.n)
    vals = np.zeros(1 << g.n)
    for j, k, w in g.edges:
        vals -= w * (((idx >> j) ^ (idx >> k)) & 1)
    return vals


def apply_cost_phase(state: np.ndarray, gamma: float, diag: np.ndarray) -> np.ndarray:
    _check_dims(state, diag)
    return state * np.exp(-1j * gamma * diag)


def _single_qubit_groups(mixer):
    groups = {}
    for c, t in mixer.terms:
        if t.weight != 1:
            return None
        q = t.support.bit_length() - 1
        vec = groups.setdefault(q, np.zeros(3))
        xb, zb = (t.x_mask >> q) & 1, (t.z_mask >> q) & 1
        vec[0 if xb and not zb else 1 if xb else 2] += c
    return groups


def _apply_su2(state, n, q, mat):
    psi = state.reshape(1 << (n - 1 - q), 2, 1 << q)
    return np.einsum("ab,ibj->iaj", mat, psi).reshape(-1)


def _rotation(vec, beta):
    # exp(-i beta (a X + b Y + c Z))
    r = np.linalg.norm(vec)
    if r == 0.0:
        return np.eye(2, dtype=complex)
    a, b, c = vec / r
    s = np.sin(beta * r)
    return np.cos(beta * r) * np.eye(2) - 1j * s * np.array([[c, a - 1j * b], [a + 1j * b, -c]])


def _all_commute(terms):
    return all(t1.commutes(t2) for i, (_, t1) in enumerate(terms) for _, t2 in terms[i + 1:])


def apply_mixer_exp(state: np.ndarray, beta: float, mixer: MixerOp) -> np.ndarray:
    """Exact ``exp(-i beta mixer) |state>``.

    Pauli terms use ``cos(b) I - i sin(b) P``; sums of single-qubit terms are
    applied as per-qubit SU(2) rotations; other commuting sums factor term by
    term.  Anything else falls back to a sparse Krylov exponential.
    """
    n = num_qubits(state)
    if any(t.support >> n for _, t in mixer.terms):
        raise DimensionError(f"mixer {mixer.name} acts outside {n} qubits")
    out = np.asarray(state, dtype=complex)
    groups = _single_qubit_groups(mixer)
    if groups is not None:
        for q in sorted(groups):
            out = _apply_su2(out, n, q, _rotation(groups[q], beta))
        return out
    if _all_commute(mixer.terms):
        for c, t in mixer.terms:
            out = np.cos(beta * c) * out - 1j * np.sin(beta * c) * apply_pauli(out, t)
        return out
    return expm_multiply(-1j * beta * csr_matrix(mixer.dense(n)), out)


def expectation_cost(state: np.ndarray, diag: np.ndarray) -> float:
    _check_dims(state, diag)
    return float(np.dot(diag, np.abs(state) ** 2))


def ground_overlap(state: np.ndarray, cut: CutResult) -> float:
    """Norm of the projection onto the span of all optimal assignments."""
    idx = np.fromiter(cut.optimal_assignments, dtype=np.int64)
    return float(np.sqrt(np.sum(np.abs(state[idx]) ** 2)))


def dominant_is_ground(state: np.ndarray, cut: CutResult) -> bool:
    """Whether the largest-magnitude basis component is an optimal assignment."""
    return int(np.argmax(np.abs(state))) in set(cut.optimal_assignments)
