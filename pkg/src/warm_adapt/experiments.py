"""Batch drivers, summary metrics, landscape scans and first-layer analytics.

Summary tables are CSV; every float is written with ``repr`` so values read
back are bit-identical to the ones computed here.
"""

from __future__ import annotations

import csv
import json
import logging
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .ansatz import (
    ADAPTIVE_VARIANTS,
    VARIANTS,
    WARM_VARIANTS,
    RunConfig,
    RunRecord,
    build_pool,
    energy_error,
    evaluate_ansatz,
    initial_state,
    run_algorithm,
    select_mixer,
)
from .graphs import Graph, brute_force_maxcut, random_regular, total_weight
from .optimizer import SimplexConfig
from .paulisim import cost_diagonal, dominant_is_ground, expectation_cost, standard_mixer
from .warmstart import adjusted_mixer, warm_start

log = logging.getLogger(__name__)

__all__ = [
    "energy_error", "energy_reduction", "threshold_fraction", "landscape_scan",
    "first_layer_reference", "first_layer_empirical", "ExperimentSpec", "run_batch",
]


def energy_reduction(record: RunRecord) -> float:
    """``1 - (E_final - C_min) / (E_0 - C_min)``.

    A reference state that already sits at ``C_min`` counts as full
    reduction (1.0); see :func:`reduction_degenerate`.
    """
    e0, ef = record.layers[0].energy, record.layers[-1].energy
    if reduction_degenerate(record):
        return 1.0
    return 1.0 - (ef - record.c_min) / (e0 - record.c_min)


def reduction_degenerate(record: RunRecord, atol: float = 1e-12) -> bool:
    return abs(record.layers[0].energy - record.c_min) <= atol


def threshold_fraction(records: list[RunRecord], threshold: float, max_layers: int) -> float:
    if not records:
        raise ValueError("no records")
    hit = sum(
        1 for r in records
        if min(e.energy_error for e in r.layers if e.layer <= max_layers) <= threshold
    )
    return hit / len(records)


def cnots_to_threshold(record: RunRecord, threshold: float) -> int | None:
    for entry in record.layers:
        if entry.energy_error <= threshold:
            return entry.cnots
    return None


# --- landscapes -----------------------------------------------------------

@dataclass
class LandscapeGrid:
    gammas: np.ndarray
    betas: np.ndarray
    errors: np.ndarray  # shape (len(gammas), len(betas))
    mixer: str
    constant_dropped: bool

    @property
    def min(self) -> float:
        return float(self.errors.min())

    @property
    def max(self) -> float:
        return float(self.errors.max())

    @property
    def mean(self) -> float:
        return float(self.errors.mean())

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["gamma", "beta", "energy_error"])
            for i, gam in enumerate(self.gammas):
                for j, bet in enumerate(self.betas):
                    w.writerow([repr(float(gam)), repr(float(bet)), repr(float(self.errors[i, j]))])


def first_layer_mixer(tag: str, g: Graph, cfg: RunConfig, warm=None):
    """Mixer the variant would put in layer 1, plus its initial state."""
    if tag in WARM_VARIANTS and warm is None:
        warm = warm_start(g, cfg.bm, cfg.seed)
    init = initial_state(tag, g, warm)
    adjusted = adjusted_mixer(warm.angles) if tag.endswith("-am") else None
    if tag in ADAPTIVE_VARIANTS:
        mixer, _, _ = select_mixer(init, cost_diagonal(g), build_pool(g.n, adjusted), cfg.gamma0)
    else:
        mixer = adjusted if adjusted is not None else standard_mixer(g.n)
    return mixer, init


def landscape_scan(g: Graph, tag: str, gamma_range=(-2.0, 2.0, 81), beta_range=(-2.0, 2.0, 81),
                   cfg: RunConfig = RunConfig(), drop_constant: bool = True) -> LandscapeGrid:
    """Energy error of the one-layer ansatz on a (gamma, beta) grid.

    With ``drop_constant`` the identity part of the cost is removed before
    normalising, so the uniform state has error exactly 1.
    """
    if tag not in VARIANTS:
        raise ValueError(f"unknown algorithm {tag!r}")
    diag = cost_diagonal(g)
    c_min = float(diag.min())
    shift = total_weight(g) / 2 if drop_constant else 0.0
    mixer, init = first_layer_mixer(tag, g, cfg)
    gammas = np.linspace(*gamma_range[:2], int(gamma_range[2]))
    betas = np.linspace(*beta_range[:2], int(beta_range[2]))
    errors = np.empty((gammas.size, betas.size))
    for i, gam in enumerate(gammas):
        for j, bet in enumerate(betas):
            e = expectation_cost(evaluate_ansatz(init, diag, [mixer], [gam, bet]), diag)
            errors[i, j] = energy_error(e + shift, c_min + shift)
    # rounding can dip a hair below zero at the exact optimum
    np.maximum(errors, 0.0, out=errors)
    return LandscapeGrid(gammas, betas, errors, mixer.name, drop_constant)


# --- first-layer analytics ------------------------------------------------

@dataclass
class FirstLayerReference:
    adapt_cut: float
    adapt_ratio_3reg: float | None = None
    ring_qaoa_cut: float | None = None
    ring_adapt_cut: float | None = None


def first_layer_reference(n: int, degree: int) -> FirstLayerReference:
    """Closed-form one-layer cuts for unweighted ``degree``-regular graphs."""
    if (n * degree) % 2:
        raise ValueError("n * degree must be even")
    ref = FirstLayerReference((n * degree + 2) / 4)
    if degree == 2:
        ref.ring_adapt_cut = (n + 1) / 2
        ref.ring_qaoa_cut = 3 * n / 4
    if degree == 3:
        ref.adapt_ratio_3reg = (3 * n + 2) / (6 * n)
    return ref


def first_layer_empirical(n: int, degree: int, instances: int, seed: int = 0,
                          variants=("adapt", "adapt-warm"), gamma0: float = 0.01) -> dict:
    """Min/median/max one-layer cut per variant over random unweighted instances."""
    cuts = {v: [] for v in variants}
    best = []
    for i in range(instances):
        g = random_regular(n, degree, weighted=False, seed=instance_seed(seed, i))
        cut = brute_force_maxcut(g)
        best.append(cut.value)
        cfg = RunConfig(max_layers=1, gamma0=gamma0, seed=instance_seed(seed, i))
        warm = warm_start(g, cfg.bm, cfg.seed) if any(v in WARM_VARIANTS for v in variants) else None
        for v in variants:
            rec = run_algorithm(v, g, cfg, warm=warm, cut=cut)
            cuts[v].append(-rec.layers[1].energy)
    out = {v: {"min": min(c), "median": statistics.median(c), "max": max(c)} for v, c in cuts.items()}
    out["max_cut"] = {"min": min(best), "median": statistics.median(best), "max": max(best)}
    return out


# --- batches --------------------------------------------------------------

def instance_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


@dataclass
class ExperimentSpec:
    variants: list[str] = field(default_factory=lambda: list(VARIANTS))
    n: int = 8
    degree: int = 5
    weighted: bool = True
    instances: int = 20
    max_layers: int = 15
    threshold: float = 0.01
    gamma0: float = 0.01
    seed: int = 0
    workers: int = 1
    output: str | None = None

    def __post_init__(self):
        bad = [v for v in self.variants if v not in VARIANTS]
        if bad:
            raise ValueError(f"unknown variants {bad}")
        if self.n > 14:
            raise ValueError("n > 14 is beyond dense statevector reach")
        if self.instances < 1:
            raise ValueError("need at least one instance")

    @classmethod
    def from_json(cls, text: str) -> "ExperimentSpec":
        return cls(**json.loads(text))


@dataclass
class BatchResult:
    spec: ExperimentSpec
    graphs: list[Graph]
    records: list[RunRecord]  # instance-major, variant order from ExperimentSpec.variants
    failures: list[dict]
    tables: dict[str, list[dict]]
    summary: dict


def _run_instance(args):
    spec, index = args
    s = instance_seed(spec.seed, index)
    g = random_regular(spec.n, spec.degree, spec.weighted, seed=s)
    cut = brute_force_maxcut(g)
    cfg = RunConfig(spec.max_layers, spec.gamma0, spec.threshold, s, SimplexConfig())
    warm = warm_start(g, cfg.bm, s) if any(v in WARM_VARIANTS for v in spec.variants) else None
    records, failures = [], []
    for v in spec.variants:
        try:
            rec = run_algorithm(v, g, cfg, warm=warm, cut=cut)
            rec.instance = index
            records.append(rec)
        except Exception as exc:  # noqa: BLE001 - one bad instance must not stop the batch
            log.exception("instance %d variant %s failed", index, v)
            failures.append({"instance": index, "variant": v, "error": repr(exc)})
    dominant = bool(dominant_is_ground(warm.state, cut)) if warm is not None else None
    return index, g, records, failures, dominant


def run_batch(spec: ExperimentSpec, out_dir=None) -> BatchResult:
    jobs = [(spec, i) for i in range(spec.instances)]
    if spec.workers > 1:
        with ProcessPoolExecutor(spec.workers) as pool:
            results = list(pool.map(_run_instance, jobs))
    else:
        results = [_run_instance(job) for job in jobs]
    results.sort(key=lambda r: r[0])
    graphs = [r[1] for r in results]
    records = [rec for r in results for rec in r[2]]
    failures = [f for r in results for f in r[3]]
    dominant = [r[4] for r in results]
    tables = summarize(spec, graphs, records, dominant)
    summary = _summary_json(spec, graphs, records, failures, dominant)
    batch = BatchResult(spec, graphs, records, failures, tables, summary)
    out = out_dir or spec.output
    if out is not None:
        write_batch(batch, out)
    return batch


def _by_variant(spec, records):
    return {v: [r for r in records if r.algorithm == v] for v in spec.variants}


def summarize(spec, graphs, records, dominant=None) -> dict[str, list[dict]]:
    groups = _by_variant(spec, records)
    weights = [total_weight(g) for g in graphs]
    tables = {k: [] for k in ("energy_error_by_layer", "threshold_fraction", "energy_reduction",
                              "cnots_to_threshold", "overlap_vs_reduction", "first_layer")}
    for v, recs in groups.items():
        if not recs:
            continue
        for layer in range(spec.max_layers + 1):
            errs = [r.layers[layer].energy_error for r in recs]
            tables["energy_error_by_layer"].append({
                "variant": v, "layer": layer, "mean_energy_error": float(np.mean(errs)),
                "min_energy_error": min(errs), "max_energy_error": max(errs), "count": len(errs)})
        tables["threshold_fraction"].append({
            "variant": v, "threshold": spec.threshold, "max_layers": spec.max_layers,
            "fraction": threshold_fraction(recs, spec.threshold, spec.max_layers)})
        reductions = [energy_reduction(r) for r in recs]
        tables["energy_reduction"].append({
            "variant": v, "mean_energy_reduction": float(np.mean(reductions)),
            "degenerate": sum(reduction_degenerate(r) for r in recs), "count": len(recs)})
        counts = [cnots_to_threshold(r, spec.threshold) for r in recs]
        reached = [c for c in counts if c is not None]
        tables["cnots_to_threshold"].append({
            "variant": v, "mean_cnots": float(np.mean(reached)) if reached else float("nan"),
            "converged": len(reached), "not_converged": len(counts) - len(reached)})
        for r, red in zip(recs, reductions):
            i = r.instance
            tables["overlap_vs_reduction"].append({
                "instance": i, "variant": v, "initial_overlap": r.layers[0].ground_overlap,
                "energy_reduction": red,
                "dominant_ground": dominant[i] if dominant is not None and v in WARM_VARIANTS else ""})
        if spec.max_layers >= 1:
            # constant -W/2 dropped, same scale as landscape_scan
            e1 = [r.layers[1].energy + weights[r.instance] / 2 for r in recs]
            ground = [r.c_min + weights[r.instance] / 2 for r in recs]
            tables["first_layer"].append({
                "variant": v, "min_energy": min(e1), "median_energy": statistics.median(e1),
                "max_energy": max(e1), "median_ground_energy": statistics.median(ground)})
    return tables


def _summary_json(spec, graphs, records, failures, dominant):
    # worker count and output path do not affect results, so keep them out
    spec_dict = {k: v for k, v in asdict(spec).items() if k not in ("workers", "output")}
    out = {"spec": spec_dict, "instances": len(graphs), "failures": failures}
    warm_recs = [r for r in records if r.algorithm in WARM_VARIANTS]
    if warm_recs:
        first = {}
        for r in warm_recs:
            first.setdefault(r.instance, r)
        below = [r.layers[0].energy < -total_weight(graphs[i]) / 2 for i, r in first.items()]
        out["warm_below_uniform_fraction"] = sum(below) / len(below)
        flags = [d for d in dominant if d is not None]
        out["warm_dominant_ground_fraction"] = sum(flags) / len(flags)
    return out


CSV_FILES = {
    "energy_error_by_layer": "energy_error_by_layer.csv",
    "threshold_fraction": "threshold_fraction.csv",
    "energy_reduction": "energy_reduction.csv",
    "cnots_to_threshold": "cnots_to_threshold.csv",
    "overlap_vs_reduction": "overlap_vs_reduction.csv",
    "first_layer": "first_layer.csv",
}


def _fmt(x):
    return repr(float(x)) if isinstance(x, (float, np.floating)) else x


def write_table(rows: list[dict], path) -> None:
    with open(path, "w", newline="") as fh:
        if not rows:
            return
        w = csv.DictWriter(fh, fieldnames=list(rows[0]))
        w.writeheader()
        for row in rows:
            w.writerow({k: _fmt(v) for k, v in row.items()})


def write_batch(batch: BatchResult, out_dir) -> None:
    out = Path(out_dir)
    (out / "graphs").mkdir(parents=True, exist_ok=True)
    (out / "records").mkdir(exist_ok=True)
    for i, g in enumerate(batch.graphs):
        (out / "graphs" / f"{i:03d}.json").write_text(g.to_json() + "\n")
    for r in batch.records:
        path = out / "records" / f"{r.instance:03d}_{r.algorithm}.json"
        path.write_text(json.dumps(r.to_dict(), indent=1) + "\n")
    for key, name in CSV_FILES.items():
        write_table(batch.tables[key], out / name)
    (out / "summary.json").write_text(json.dumps(batch.summary, indent=1, sort_keys=True) + "\n")


def load_records(out_dir) -> list[RunRecord]:
    paths = sorted(Path(out_dir, "records").glob("*.json"))
    return [RunRecord.from_dict(json.loads(p.read_text())) for p in paths]
