import json

import numpy as np
import pytest
from scipy.linalg import expm

from conftest import dense_cost, random_state
from warm_adapt.ansatz import (
    VARIANTS,
    AnsatzLayer,
    RunConfig,
    RunRecord,
    build_pool,
    cnot_count,
    evaluate_ansatz,
    evaluate_layers,
    mixer_gradient,
    pool_gradients,
    run_algorithm,
    select_mixer,
)
from warm_adapt.graphs import Graph, brute_force_maxcut, random_regular, ring, total_weight
from warm_adapt.paulisim import (
    MixerOp,
    PauliTerm,
    apply_cost_phase,
    apply_mixer_exp,
    basis_state,
    cost_diagonal,
    expectation_cost,
    standard_mixer,
    uniform_state,
)
from warm_adapt.warmstart import adjusted_mixer, warm_start

UNIT_EDGE = Graph(2, ((0, 1, 1.0),))


def _fd_slope(state, diag, mixer, gamma0, h=1e-5):
    phi = apply_cost_phase(state, gamma0, diag)

    def e(beta):
        return expectation_cost(apply_mixer_exp(phi, beta, mixer), diag)

    return (e(h) - e(-h)) / (2 * h)


def test_pool_size_n2():
    pool = build_pool(2)
    assert len(pool) == 14
    names = [m.name for m in pool]
    assert names[:5] == ["sumX", "X0", "Y0", "X1", "Y1"]
    assert len(set(names)) == 14
    adj = adjusted_mixer(warm_start(UNIT_EDGE, seed=0).angles)
    assert len(build_pool(2, adj)) == 15
    assert build_pool(2, adj)[-1].name == "adjusted"


@pytest.mark.parametrize("n", [2, 3, 5, 8])
def test_pool_size_formula_and_uniqueness(n):
    pool = build_pool(n)
    assert len(pool) == 1 + 2 * n + 3 * n * (n - 1) + 3 * n * (n - 1) // 2
    terms = [m.terms[0][1] for m in pool[1:]]
    assert len(set(terms)) == len(terms)


def test_zz_gradients_vanish(rng):
    g = random_regular(6, 3, weighted=True, seed=1)
    d = cost_diagonal(g)
    s = random_state(rng, 6)
    pool = build_pool(6)
    grads = pool_gradients(s, d, pool, 0.01)
    for m, gr in zip(pool, grads):
        if m.name.count("Z") == 2:
            assert gr == 0.0
            assert mixer_gradient(s, d, m, 0.01) == 0.0


def test_yz_gradient_equals_edge_weight():
    g = random_regular(6, 3, weighted=True, seed=7)
    d = cost_diagonal(g)
    plus = uniform_state(6)
    for j, k, w in g.edges:
        m = MixerOp.single(PauliTerm.from_label({j: "Y", k: "Z"}))
        assert mixer_gradient(plus, d, m, 0.0) == pytest.approx(w, abs=1e-12)


def test_gradient_matches_finite_difference(rng):
    g = random_regular(4, 3, weighted=True, seed=3)
    d = cost_diagonal(g)
    adj = adjusted_mixer(warm_start(g, seed=3).angles)
    pool = build_pool(4, adj)
    for _ in range(3):
        s = random_state(rng, 4)
        grads = pool_gradients(s, d, pool, 0.01)
        for m, gr in zip(pool, grads):
            assert gr == pytest.approx(mixer_gradient(s, d, m, 0.01), abs=1e-12)
            assert gr == pytest.approx(-_fd_slope(s, d, m, 0.01), abs=1e-6)


def test_gradient_against_dense_commutator(rng):
    g = random_regular(4, 3, weighted=True, seed=9)
    d = cost_diagonal(g)
    c = dense_cost(g.edges, 4)
    s = random_state(rng, 4)
    phi = expm(-0.01j * c) @ s
    for m in build_pool(4)[::7]:
        a = m.dense(4)
        expected = np.real(np.conj(phi) @ (1j * (c @ a - a @ c)) @ phi)
        assert mixer_gradient(s, d, m, 0.01) == pytest.approx(expected, abs=1e-10)


def test_select_max_weight_yz_on_plus_state():
    for seed in range(5):
        g = random_regular(8, 3, weighted=True, seed=seed)
        j, k, w = max(g.edges, key=lambda e: e[2])
        mixer, grad, _ = select_mixer(uniform_state(8), cost_diagonal(g), build_pool(8), 0.01)
        assert mixer.name in (f"Y{j}Z{k}", f"Z{j}Y{k}")
        assert abs(grad) == pytest.approx(w, rel=1e-2)


def test_select_single_and_tie_break():
    g = random_regular(4, 3, seed=0)
    d = cost_diagonal(g)
    m = MixerOp.single(PauliTerm.from_label({0: "X"}))
    assert select_mixer(uniform_state(4), d, [m], 0.01)[0] is m
    zz = [op for op in build_pool(4) if op.name.count("Z") == 2]
    mixer, grad, idx = select_mixer(basis_state(4, 3), d, zz, 0.0)
    assert idx == 0 and grad == 0.0 and mixer is zz[0]


def test_evaluate_ansatz_trivial(rng):
    g = random_regular(6, 3, seed=0)
    d = cost_diagonal(g)
    s = random_state(rng, 6)
    np.testing.assert_array_equal(evaluate_ansatz(s, d, [], []), s)
    mixers = build_pool(6)[:3]
    np.testing.assert_allclose(evaluate_ansatz(s, d, mixers, np.zeros(6)), s)
    with pytest.raises(ValueError):
        evaluate_ansatz(s, d, mixers, np.zeros(5))


def test_layer_ordering_cost_then_mixer(rng):
    g = random_regular(4, 3, weighted=True, seed=2)
    d = cost_diagonal(g)
    c = dense_cost(g.edges, 4)
    m = build_pool(4)[10]
    s = random_state(rng, 4)
    expected = expm(-0.4j * m.dense(4)) @ expm(-0.7j * c) @ s
    np.testing.assert_allclose(evaluate_layers(s, d, [AnsatzLayer(m, 0.7, 0.4)]), expected, atol=1e-10)


def test_single_edge_p1_qaoa_reaches_one():
    d = cost_diagonal(UNIT_EDGE)
    best = max(-expectation_cost(evaluate_ansatz(uniform_state(2), d, [standard_mixer(2)], [a, b]), d)
               for a in np.linspace(-np.pi, np.pi, 101) for b in np.linspace(-np.pi / 2, np.pi / 2, 101))
    assert best == pytest.approx(1, abs=1e-3)
    rec = run_algorithm("qaoa", UNIT_EDGE, RunConfig(max_layers=1))
    assert -rec.layers[1].energy == pytest.approx(1, abs=1e-6)


@pytest.mark.parametrize("n,d", [(6, 3), (8, 3), (8, 5), (10, 3)])
def test_adapt_first_layer_closed_form(n, d):
    g = random_regular(n, d, seed=n * d)
    rec = run_algorithm("adapt", g, RunConfig(max_layers=1))
    assert -rec.layers[1].energy == pytest.approx((n * d + 2) / 4, abs=1e-3)
    assert rec.layers[1].beta[0] == pytest.approx(np.pi / 4, abs=1e-2)


@pytest.mark.parametrize("n", [6, 8])
def test_ring_first_layer(n):
    cfg = RunConfig(max_layers=1)
    assert -run_algorithm("adapt", ring(n), cfg).layers[1].energy == pytest.approx((n + 1) / 2, abs=1e-3)
    assert -run_algorithm("qaoa", ring(n), cfg).layers[1].energy == pytest.approx(3 * n / 4, abs=1e-3)


def test_p0_energies_per_variant():
    g = random_regular(6, 3, weighted=True, seed=5)
    cfg = RunConfig(max_layers=0, seed=5)
    warm = warm_start(g, cfg.bm, cfg.seed)
    for tag in VARIANTS:
        rec = run_algorithm(tag, g, cfg)
        expected = -total_weight(g) / 2 if tag in ("qaoa", "adapt") else warm.energy
        assert rec.layers[0].energy == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("tag", VARIANTS)
def test_run_record_invariants(tag):
    g = random_regular(6, 3, weighted=True, seed=11)
    rec = run_algorithm(tag, g, RunConfig(max_layers=4, seed=11))
    assert len(rec.layers) == 5
    assert all(b <= a for a, b in zip(rec.energies, rec.energies[1:]))
    assert all(e >= 0 for e in rec.errors)
    c_min = -brute_force_maxcut(g).value
    for entry in rec.layers:
        assert entry.energy_error == pytest.approx((entry.energy - c_min) / abs(c_min))
        assert 0 <= entry.ground_overlap <= 1 + 1e-12
    assert cnot_count(rec, g) == [entry.cnots for entry in rec.layers]
    if tag.startswith("qaoa"):
        expected = "adjusted" if tag.endswith("-am") else "sumX"
        assert all(entry.mixer == expected for entry in rec.layers[1:])
    assert (rec.warm is None) == (tag in ("qaoa", "adapt"))


def test_recorded_energies_match_replayed_parameters():
    g = random_regular(6, 3, weighted=True, seed=3)
    rec = run_algorithm("adapt-warm", g, RunConfig(max_layers=3, seed=3))
    warm = warm_start(g, seed=3)
    pool = {m.name: m for m in build_pool(6)}
    d = cost_diagonal(g)
    mixers = []
    for entry in rec.layers[1:]:
        mixers.append(pool[entry.mixer])
        params = np.ravel(np.column_stack([entry.gamma, entry.beta]))
        e = expectation_cost(evaluate_ansatz(warm.state, d, mixers, params), d)
        assert e == pytest.approx(entry.energy, abs=1e-10)


def test_qaoa_matches_direct_evaluation():
    g = random_regular(6, 3, weighted=True, seed=4)
    rec = run_algorithm("qaoa", g, RunConfig(max_layers=3))
    d = cost_diagonal(g)
    c = dense_cost(g.edges, 6)
    m = sum(np.kron(np.kron(np.eye(2 ** (5 - q)), [[0, 1], [1, 0]]), np.eye(2 ** q)) for q in range(6))
    last = rec.layers[-1]
    s = uniform_state(6)
    for gam, bet in zip(last.gamma, last.beta):
        s = expm(-1j * bet * m) @ (expm(-1j * gam * c) @ s)
    assert expectation_cost(s, d) == pytest.approx(last.energy, abs=1e-10)


def test_cnot_counts():
    g = random_regular(6, 3, seed=0)
    rec = run_algorithm("qaoa", g, RunConfig(max_layers=3))
    assert cnot_count(rec, g) == [0, 18, 36, 54]
    rec = run_algorithm("adapt", g, RunConfig(max_layers=1))
    assert rec.layers[1].mixer.count("Y") == 1 and rec.layers[1].mixer.count("Z") == 1
    assert cnot_count(rec, g) == [0, 20]


def test_record_json_round_trip():
    g = random_regular(6, 3, weighted=True, seed=1)
    rec = run_algorithm("adapt-warm-am", g, RunConfig(max_layers=2))
    text = json.dumps(rec.to_dict())
    back = RunRecord.from_dict(json.loads(text))
    assert back == rec
    layer = json.loads(text)["layers"][1]
    for key in ("layer", "mixer", "gamma", "beta", "energy", "energy_error", "cnots", "ground_overlap"):
        assert key in layer


def test_unknown_variant():
    with pytest.raises(ValueError):
        run_algorithm("vqe", UNIT_EDGE)
