"""Operator pools, gradient-based mixer selection and the six QAOA variants."""

from __future__ import annotations

import logging
import re
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np

from .graphs import CutResult, Graph, brute_force_maxcut
from .optimizer import OptimizerError, SimplexConfig, minimize
from .paulisim import (
    MixerOp,
    PauliTerm,
    apply_cost_phase,
    apply_mixer_exp,
    cost_diagonal,
    expectation_cost,
    ground_overlap,
    num_qubits,
    standard_mixer,
    uniform_state,
    pauli_action,
)
from .warmstart import BMConfig, WarmStart, adjusted_mixer, warm_start

log = logging.getLogger(__name__)

VARIANTS = ("qaoa", "qaoa-warm", "qaoa-warm-am", "adapt", "adapt-warm", "adapt-warm-am")
WARM_VARIANTS = ("qaoa-warm", "qaoa-warm-am", "adapt-warm", "adapt-warm-am")
ADAPTIVE_VARIANTS = ("adapt", "adapt-warm", "adapt-warm-am")


def build_pool(n: int, adjusted: MixerOp | None = None) -> list[MixerOp]:
    """Candidate mixers in selection order.

    Global ``sum X``; ``X_i, Y_i`` by qubit; ``X_jY_k, X_jZ_k, Y_jZ_k`` over
    ordered pairs ``j != k``; ``X_jX_k, Y_jY_k, Z_jZ_k`` over ``j < k``; then
    the adjusted mixer if given.
    """
    if n < 2:
        raise ValueError("pool needs at least two qubits")
    single = PauliTerm.from_label
    pool = [standard_mixer(n)]
    for q in range(n):
        pool += [MixerOp.single(single({q: "X"})), MixerOp.single(single({q: "Y"}))]
    for j in range(n):
        for k in range(n):
            if j != k:
                for a, b in ("XY", "XZ", "YZ"):
                    pool.append(MixerOp.single(single({j: a, k: b})))
    for j in range(n):
        for k in range(j + 1, n):
            for a in "XYZ":
                pool.append(MixerOp.single(single({j: a, k: a})))
    if adjusted is not None:
        pool.append(adjusted)
    return pool


def mixer_gradient(state: np.ndarray, diag: np.ndarray, mixer: MixerOp, gamma0: float) -> float:
    """Energy gradient for appending a layer with ``mixer``.

    Equals ``<phi| i[C, A] |phi>`` with ``phi = exp(-i gamma0 C) state``,
    which is minus the slope of the energy in the new mixer angle at zero.
    """
    offdiag = _off_diagonal(mixer)
    if offdiag is None:
        return 0.0
    phi = apply_cost_phase(state, gamma0, diag)
    return float(-2.0 * np.imag(np.vdot(diag * phi, offdiag.matvec(phi))))


def _off_diagonal(mixer):
    # Z-only terms commute with the cost and contribute exactly nothing
    terms = tuple((c, t) for c, t in mixer.terms if t.x_mask)
    if not terms:
        return None
    return mixer if len(terms) == len(mixer.terms) else MixerOp(terms, mixer.name)


@lru_cache(maxsize=64)
def _stacked_actions(n, terms):
    perms = np.empty((len(terms), 1 << n), dtype=np.int64)
    phases = np.empty((len(terms), 1 << n), dtype=complex)
    for i, t in enumerate(terms):
        perms[i], phases[i] = pauli_action(n, t.x_mask, t.z_mask)
    return perms, phases


def pool_gradients(state: np.ndarray, diag: np.ndarray, pool: list[MixerOp], gamma0: float) -> np.ndarray:
    """``mixer_gradient`` for every pool member, vectorised over Pauli strings."""
    n = num_qubits(state)
    phi = apply_cost_phase(state, gamma0, diag)
    c_phi = diag * phi
    grads = np.zeros(len(pool))
    idx = [i for i, m in enumerate(pool) if m.is_single_pauli and m.terms[0][1].x_mask]
    if idx:
        perms, phases = _stacked_actions(n, tuple(pool[i].terms[0][1] for i in idx))
        inner = (phases * phi[perms]) @ np.conj(c_phi)
        grads[idx] = -2.0 * np.imag(inner)
    for i, m in enumerate(pool):
        if not m.is_single_pauli:
            offdiag = _off_diagonal(m)
            if offdiag is not None:
                grads[i] = -2.0 * np.imag(np.vdot(c_phi, offdiag.matvec(phi)))
    return grads


def select_mixer(state: np.ndarray, diag: np.ndarray, pool: list[MixerOp],
                 gamma0: float) -> tuple[MixerOp, float, int]:
    """Pool member with the largest gradient magnitude; ties to the lowest index."""
    if not pool:
        raise ValueError("empty operator pool")
    grads = pool_gradients(state, diag, pool, gamma0)
    i = int(np.argmax(np.abs(grads)))
    return pool[i], float(grads[i]), i


@dataclass
class AnsatzLayer:
    mixer: MixerOp
    gamma: float = 0.0
    beta: float = 0.0


def evaluate_ansatz(init: np.ndarray, diag: np.ndarray, mixers: list[MixerOp],
                    params) -> np.ndarray:
    """Apply ``exp(-i beta_i A_i) exp(-i gamma_i C)`` for each layer in order.

    ``params`` is flat: ``[gamma_1, beta_1, gamma_2, beta_2, ...]``.
    """
    params = np.asarray(params, dtype=float)
    if params.size != 2 * len(mixers):
        raise ValueError(f"expected {2 * len(mixers)} parameters, got {params.size}")
    state = init
    for mixer, gamma, beta in zip(mixers, params[0::2], params[1::2]):
        state = apply_cost_phase(state, gamma, diag)
        state = apply_mixer_exp(state, beta, mixer)
    return state


def evaluate_layers(init: np.ndarray, diag: np.ndarray, layers: list[AnsatzLayer]) -> np.ndarray:
    params = [x for layer in layers for x in (layer.gamma, layer.beta)]
    return evaluate_ansatz(init, diag, [layer.mixer for layer in layers], params)


def energy_error(energy: float, c_min: float) -> float:
    """``(energy - c_min) / |c_min|``; roundoff below ``c_min`` is clipped to 0."""
    if c_min == 0:
        raise ValueError("ground energy is zero; energy error is undefined")
    err = (energy - c_min) / abs(c_min)
    return 0.0 if -1e-12 < err < 0 else err


@dataclass
class RunConfig:
    max_layers: int = 15
    gamma0: float = 0.01
    threshold: float = 0.01
    seed: int = 0
    simplex: SimplexConfig = field(default_factory=SimplexConfig)
    bm: BMConfig = field(default_factory=BMConfig)


@dataclass
class LayerRecord:
    layer: int
    mixer: str
    gamma: list[float]
    beta: list[float]
    energy: float
    energy_error: float
    cnots: int
    ground_overlap: float
    gradient: float | None = None
    pool_index: int | None = None
    evals: int = 0
    converged: bool = True
    flag: str | None = None


@dataclass
class RunRecord:
    algorithm: str
    graph_hash: str
    seed: int
    n: int
    n_edges: int
    c_min: float
    threshold: float
    layers: list[LayerRecord]
    warm: dict | None = None
    instance: int | None = None

    @property
    def energies(self) -> list[float]:
        return [entry.energy for entry in self.layers]

    @property
    def errors(self) -> list[float]:
        return [entry.energy_error for entry in self.layers]

    def layers_to_threshold(self) -> int | None:
        for entry in self.layers:
            if entry.energy_error <= self.threshold:
                return entry.layer
        return None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "RunRecord":
        data = dict(data)
        data["layers"] = [LayerRecord(**entry) for entry in data["layers"]]
        return cls(**data)


def initial_state(tag: str, g: Graph, warm: WarmStart | None) -> np.ndarray:
    if tag in WARM_VARIANTS:
        return warm.state
    return uniform_state(g.n)


def run_algorithm(tag: str, g: Graph, cfg: RunConfig = RunConfig(), *,
                  warm: WarmStart | None = None, cut: CutResult | None = None) -> RunRecord:
    """Grow an ansatz layer by layer and re-optimise all angles each time.

    ``warm`` and ``cut`` may be passed in to share the warm start and the
    exact solution between variants of the same instance.
    """
    if tag not in VARIANTS:
        raise ValueError(f"unknown algorithm {tag!r}; expected one of {VARIANTS}")
    cut = cut or brute_force_maxcut(g)
    c_min = -cut.value
    diag = cost_diagonal(g)
    if tag in WARM_VARIANTS and warm is None:
        warm = warm_start(g, cfg.bm, cfg.seed)

    adjusted = adjusted_mixer(warm.angles) if warm is not None and tag.endswith("-am") else None
    if tag in ADAPTIVE_VARIANTS:
        pool = build_pool(g.n, adjusted)
        fixed = None
    else:
        pool = None
        fixed = adjusted if adjusted is not None else standard_mixer(g.n)

    init = initial_state(tag, g, warm)
    energy = expectation_cost(init, diag)
    layers = [LayerRecord(0, "", [], [], energy, energy_error(energy, c_min), 0,
                          ground_overlap(init, cut))]
    mixers: list[MixerOp] = []
    params = np.zeros(0)
    state = init
    cnots = 0

    def objective(x):
        return expectation_cost(evaluate_ansatz(init, diag, mixers, x), diag)

    for k in range(1, cfg.max_layers + 1):
        grad = index = None
        if pool is not None:
            mixer, grad, index = select_mixer(state, diag, pool, cfg.gamma0)
        else:
            mixer = fixed
        mixers.append(mixer)
        start = np.concatenate([params, [cfg.gamma0, 0.0]])
        flag = None
        try:
            res = minimize(objective, start, cfg.simplex)
            evals, converged = res.evals, res.converged
        except OptimizerError as exc:
            log.warning("%s layer %d: %s", tag, k, exc)
            res, evals, converged, flag = None, 0, False, "optimizer_failed"
        # The start point reproduces the previous energy exactly in exact
        # arithmetic, so keeping it preserves monotonicity.
        if res is not None and res.fun < energy:
            params, energy = res.x, res.fun
        else:
            params = start
        state = evaluate_ansatz(init, diag, mixers, params)
        cnots += layer_cnots(mixer, g)
        layers.append(LayerRecord(
            k, mixer.name, params[0::2].tolist(), params[1::2].tolist(), float(energy),
            energy_error(energy, c_min), cnots, ground_overlap(state, cut),
            grad, index, evals, converged, flag,
        ))

    warm_meta = None
    if warm is not None:
        warm_meta = {
            "pivot": warm.pivot,
            "energy": warm.energy,
            "relaxed_objective": warm.relaxed.objective,
            "relaxed_converged": warm.relaxed.converged,
            "theta": warm.angles.theta.tolist(),
            "phi": warm.angles.phi.tolist(),
        }
    return RunRecord(tag, g.digest(), cfg.seed, g.n, g.n_edges, c_min, cfg.threshold, layers, warm_meta)


def layer_cnots(mixer: MixerOp, g: Graph) -> int:
    """Two CNOTs per cost edge, plus two when the mixer is a two-qubit Pauli."""
    return 2 * g.n_edges + (2 if mixer.is_single_pauli and mixer.max_weight == 2 else 0)


_PAULI_TOKEN = re.compile(r"[XYZ]\d+")


def mixer_weight(name: str) -> int:
    """Qubit count of a single Pauli mixer label; 0 for ``sumX``/``adjusted``."""
    if name in ("sumX", "adjusted", ""):
        return 0
    return len(_PAULI_TOKEN.findall(name))


def cnot_count(record: RunRecord, g: Graph) -> list[int]:
    """Cumulative CNOT upper bound per layer, recomputed from mixer labels."""
    counts = [0]
    for entry in record.layers[1:]:
        counts.append(counts[-1] + 2 * g.n_edges + (2 if mixer_weight(entry.mixer) == 2 else 0))
    return counts
