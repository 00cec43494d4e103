"""Classical warm start from a rank-3 Burer-Monteiro relaxation of MaxCut.

Each vertex gets a unit vector in R^3; the relaxed objective
``sum_{jk} w_jk v_j . v_k`` is minimised by projected gradient descent on the
product of spheres.  The vectors are then rotated so one of them sits at the
north pole and read as single-qubit Bloch vectors.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass

import numpy as np

from .graphs import CutResult, Graph, cut_value
from .paulisim import MixerOp, PauliTerm, cost_diagonal, expectation_cost

log = logging.getLogger(__name__)

POLE_EPS = 1e-12


@dataclass(frozen=True)
class BMConfig:
    step: float = 0.1
    max_iter: int = 10_000
    tol: float = 1e-6
    restarts: int = 5


@dataclass
class RelaxedSolution:
    vectors: np.ndarray  # shape (n, 3), unit rows
    objective: float
    converged: bool = True
    iterations: int = 0

    def to_json(self) -> str:
        return json.dumps({"vectors": self.vectors.tolist(), "objective": self.objective})

    @classmethod
    def from_json(cls, text: str) -> "RelaxedSolution":
        data = json.loads(text)
        vecs = np.asarray(data["vectors"], dtype=float)
        return cls(vecs, float(data["objective"]))


@dataclass
class BlochAngles:
    theta: np.ndarray
    phi: np.ndarray


@dataclass
class WarmStart:
    state: np.ndarray
    angles: BlochAngles
    pivot: int
    energy: float
    relaxed: RelaxedSolution


def relaxed_objective(g: Graph, vectors: np.ndarray) -> float:
    return float(sum(w * np.dot(vectors[j], vectors[k]) for j, k, w in g.edges))


def _descend(adj, v, cfg, history=None):
    for it in range(1, cfg.max_iter + 1):
        grad = adj @ v
        proj = grad - np.sum(grad * v, axis=1, keepdims=True) * v
        if np.max(np.linalg.norm(proj, axis=1)) < cfg.tol:
            return v, True, it
        v = v - cfg.step * proj
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        if history is not None:
            history.append(0.5 * float(np.sum(v * (adj @ v))))
    return v, False, cfg.max_iter


def solve_bm_rank3(g: Graph, config: BMConfig = BMConfig(), seed: int | None = 0,
                   history: list | None = None) -> RelaxedSolution:
    """Minimise the rank-3 relaxed MaxCut objective with random restarts.

    Every restart draws its own generator from ``(seed, restart)``; the best
    objective is kept.  Non-convergence is reported on the result, not raised.
    """
    adj = g.adjacency()
    best = None
    for r in range(config.restarts):
        rng = np.random.default_rng([seed if seed is not None else 0, r])
        v0 = rng.normal(size=(g.n, 3))
        v0 /= np.linalg.norm(v0, axis=1, keepdims=True)
        v, ok, iters = _descend(adj, v0, config, history if r == 0 else None)
        obj = relaxed_objective(g, v)
        if best is None or obj < best.objective:
            best = RelaxedSolution(v, obj, ok, iters)
    if not best.converged:
        log.warning("rank-3 relaxation hit max_iter=%d without meeting tol", config.max_iter)
    return best


def pole_rotation(v: np.ndarray) -> np.ndarray:
    """Rotation matrix sending unit vector ``v`` to +z along the shortest arc."""
    z = np.array([0.0, 0.0, 1.0])
    axis = np.cross(v, z)
    s = np.linalg.norm(axis)
    c = float(np.dot(v, z))
    if s < POLE_EPS:
        if c > 0:
            return np.eye(3)
        return np.diag([1.0, -1.0, -1.0])  # pi about x
    k = axis / s
    kx = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + s * kx + (1 - c) * (kx @ kx)


def rotate_to_pole(r: RelaxedSolution, pivot: int) -> RelaxedSolution:
    rot = pole_rotation(r.vectors[pivot])
    vecs = r.vectors @ rot.T
    return RelaxedSolution(vecs, r.objective, r.converged, r.iterations)


def bloch_angles(vectors: np.ndarray) -> BlochAngles:
    x, y, z = vectors[:, 0], vectors[:, 1], vectors[:, 2]
    theta = np.arccos(np.clip(z, -1.0, 1.0))
    phi = np.mod(np.arctan2(y, x), 2 * np.pi)
    phi = np.where(np.sin(theta) < POLE_EPS, 0.0, phi)
    return BlochAngles(theta, phi)


def product_state(angles: BlochAngles) -> np.ndarray:
    state = np.ones(1, dtype=complex)
    # qubit 0 is the least significant bit, so it goes rightmost in the kron
    for th, ph in zip(angles.theta, angles.phi):
        qubit = np.array([np.cos(th / 2), np.exp(1j * ph) * np.sin(th / 2)])
        state = np.kron(qubit, state)
    return state


def bloch_to_state(r: RelaxedSolution) -> tuple[np.ndarray, BlochAngles]:
    angles = bloch_angles(r.vectors)
    return product_state(angles), angles


def best_warm_state(g: Graph, r: RelaxedSolution) -> WarmStart:
    """Try every vertex as the north-pole pivot and keep the lowest energy.

    Ties go to the lowest pivot index.
    """
    diag = cost_diagonal(g)
    best = None
    for pivot in range(g.n):
        state, angles = bloch_to_state(rotate_to_pole(r, pivot))
        energy = expectation_cost(state, diag)
        if best is None or energy < best.energy:
            best = WarmStart(state, angles, pivot, energy, r)
    return best


def warm_start(g: Graph, config: BMConfig = BMConfig(), seed: int | None = 0) -> WarmStart:
    return best_warm_state(g, solve_bm_rank3(g, config, seed))


def adjusted_mixer(angles: BlochAngles) -> MixerOp:
    """``-sum_j n_j . sigma_j`` with ``n_j`` the Bloch vector of qubit j.

    The warm product state is its ground state with eigenvalue ``-n``.
    """
    terms = []
    for q, (th, ph) in enumerate(zip(angles.theta, angles.phi)):
        coeffs = (np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th))
        for c, pauli in zip(coeffs, "XYZ"):
            if c != 0.0:
                terms.append((-float(c), PauliTerm.from_label({q: pauli})))
    return MixerOp(tuple(terms), "adjusted")


def hyperplane_round(g: Graph, r: RelaxedSolution, trials: int = 100, seed: int | None = 0) -> CutResult:
    """Best cut over random hyperplanes through the origin.

    Vertex j lands on the ``x = -1`` side when ``v_j . normal < 0``.  The
    result lists the best assignment and its global flip.
    """
    rng = np.random.default_rng(seed)
    full = (1 << g.n) - 1
    best_val, best_b = -np.inf, 0
    for _ in range(trials):
        normal = rng.normal(size=3)
        side = r.vectors @ normal < 0
        b = int(sum(1 << j for j in np.flatnonzero(side)))
        val = cut_value(g, b)
        if val > best_val:
            best_val, best_b = val, b
    return CutResult(best_val, tuple(sorted({best_b, best_b ^ full})), g.n)
