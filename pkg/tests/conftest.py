"""Independent dense-matrix oracles shared by the test modules.

Nothing here imports the simulator kernels; operators are built from explicit
Kronecker products of 2x2 Pauli matrices.
"""

import itertools
from functools import reduce

import numpy as np
import pytest

I2 = np.eye(2, dtype=complex)
PAULI = {
    "I": I2,
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def dense_pauli(n, ops):
    """Matrix of a Pauli string given as {qubit: 'X'|'Y'|'Z'}; qubit 0 is the
    least significant bit, so it is the rightmost Kronecker factor."""
    return reduce(np.kron, [PAULI[ops.get(q, "I")] for q in reversed(range(n))])


def dense_cost(edges, n):
    """C = -1/2 sum w (I - Z_j Z_k) as a dense matrix."""
    dim = 1 << n
    c = np.zeros((dim, dim), dtype=complex)
    for j, k, w in edges:
        c -= 0.5 * w * (np.eye(dim) - dense_pauli(n, {j: "Z", k: "Z"}))
    return c


def eq1_cut(edges, xs):
    """F = 1/2 sum w (1 - x_j x_k) with x in {+1, -1}^n."""
    return 0.5 * sum(w * (1 - xs[j] * xs[k]) for j, k, w in edges)


def enumerate_maxcut(n, edges):
    """Plain itertools scan, indices built with x_j = -1 <-> bit j set."""
    best, arg = -np.inf, []
    for xs in itertools.product((1, -1), repeat=n):
        val = eq1_cut(edges, xs)
        b = sum(1 << j for j, x in enumerate(xs) if x == -1)
        if val > best + 1e-12:
            best, arg = val, [b]
        elif abs(val - best) <= 1e-12:
            arg.append(b)
    return best, sorted(arg)


def random_state(rng, n):
    s = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return s / np.linalg.norm(s)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# verdict lines from test_acceptance.py, echoed at the end of the run
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
