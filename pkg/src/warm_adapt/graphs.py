"""Weighted MaxCut instances, random regular generation and exact enumeration."""

from __future__ import annotations

import hashlib
import json
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np


class GraphError(ValueError):
    """Raised for invalid graph parameters or malformed graph data."""


@dataclass(frozen=True)
class Graph:
    """Undirected weighted graph on vertices ``0..n-1``.

    ``edges`` holds ``(j, k, w)`` triples with ``j < k``, sorted by ``(j, k)``.
    """

    n: int
    edges: tuple[tuple[int, int, float], ...]

    def __post_init__(self):
        edges = tuple(sorted((int(j), int(k), float(w)) for j, k, w in self.edges))
        object.__setattr__(self, "edges", edges)
        _validate(self.n, edges)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, _, w in self.edges], dtype=float)

    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for j, k, _ in self.edges:
            deg[j] += 1
            deg[k] += 1
        return deg

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        for j, k, w in self.edges:
            a[j, k] = a[k, j] = w
        return a

    def to_dict(self) -> dict:
        return {"n": self.n, "edges": [[j, k, w] for j, k, w in self.edges]}

    @classmethod
    def from_dict(cls, data: dict) -> "Graph":
        try:
            n = data["n"]
            raw = data["edges"]
        except (KeyError, TypeError) as exc:
            raise GraphError(f"graph data missing field: {exc}") from None
        if not isinstance(n, int) or isinstance(n, bool):
            raise GraphError("n must be an integer")
        edges = []
        for item in raw:
            if len(item) != 3:
                raise GraphError(f"edge entries must be [j, k, w], got {item!r}")
            j, k, w = item
            if not (isinstance(j, int) and isinstance(k, int)):
                raise GraphError(f"edge endpoints must be integers, got {item!r}")
            edges.append((j, k, float(w)))
        listed = [(j, k) for j, k, _ in edges]
        if listed != sorted(listed):
            raise GraphError("edges must be sorted by (j, k)")
        return cls(n, tuple(edges))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "Graph":
        return cls.from_dict(json.loads(text))

    def digest(self) -> str:
        """Short content hash used to tag run records."""
        blob = json.dumps(self.to_dict(), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def _validate(n, edges):
    if n < 1:
        raise GraphError(f"need at least one vertex, got n={n}")
    seen = set()
    for j, k, w in edges:
        if not 0 <= j < k < n:
            raise GraphError(f"edge ({j}, {k}) violates 0 <= j < k < n={n}")
        if (j, k) in seen:
            raise GraphError(f"duplicate edge ({j}, {k})")
        if not math.isfinite(w):
            raise GraphError(f"edge ({j}, {k}) has non-finite weight {w}")
        seen.add((j, k))


@dataclass(frozen=True)
class CutResult:
    """Best cut value and every assignment attaining it.

    Assignments are basis indices: bit ``j`` set means vertex ``j`` is on the
    ``x_j = -1`` side.
    """

    value: float
    optimal_assignments: tuple[int, ...] = field(default=())
    n: int = 0

    def bitstrings(self) -> list[str]:
        """Assignments as strings whose ``j``-th character is vertex ``j``."""
        return ["".join("1" if (b >> j) & 1 else "0" for j in range(self.n))
                for b in self.optimal_assignments]


def total_weight(g: Graph) -> float:
    return float(sum(w for _, _, w in g.edges))


def cut_value(g: Graph, assignment: int) -> float:
    """Objective ``F = 1/2 sum w (1 - x_j x_k)`` for one assignment."""
    total = 0.0
    for j, k, w in g.edges:
        if ((assignment >> j) ^ (assignment >> k)) & 1:
            total += w
    return total


def cut_values(g: Graph) -> np.ndarray:
    """Cut value of every basis index ``0..2**n - 1``."""
    idx = np.arange(1 << g.n)
    vals = np.zeros(1 << g.n)
    for j, k, w in g.edges:
        vals += w * (((idx >> j) ^ (idx >> k)) & 1)
    return vals


def brute_force_maxcut(g: Graph) -> CutResult:
    """Exact MaxCut by enumeration.

    Only assignments with vertex 0 on the ``x = +1`` side are scanned; the
    flipped partners are added afterwards.
    """
    n = g.n
    half = np.arange(1 << (n - 1), dtype=np.int64) << 1
    vals = np.zeros(half.size)
    for j, k, w in g.edges:
        vals += w * (((half >> j) ^ (half >> k)) & 1)
    best = vals.max()
    full = (1 << n) - 1
    winners = [int(b) for b in half[vals == best]]
    winners += [b ^ full for b in winners]
    return CutResult(float(best), tuple(sorted(winners)), n)


def _pair_stubs(n, degree, rng):
    # Pairing model; conflicting pairs are re-paired among themselves and the
    # attempt is abandoned when no valid pair can remain.
    edges = set()
    stubs = [v for v in range(n) for _ in range(degree)]
    while stubs:
        leftover = Counter()
        it = iter([stubs[i] for i in rng.permutation(len(stubs))])
        for a, b in zip(it, it):
            a, b = min(a, b), max(a, b)
            if a != b and (a, b) not in edges:
                edges.add((a, b))
            else:
                leftover[a] += 1
                leftover[b] += 1
        if leftover:
            nodes = sorted(leftover)
            if not any(a < b and (a, b) not in edges for a in nodes for b in nodes):
                return None
        stubs = [v for v in sorted(leftover) for _ in range(leftover[v])]
    return edges


def random_regular(n: int, degree: int, weighted: bool = False, seed: int | None = None) -> Graph:
    """Random ``degree``-regular graph on ``n`` vertices.

    Weights are i.i.d. uniform on the open interval (0, 1) when ``weighted``;
    otherwise every weight is 1.
    """
    if degree < 0 or degree >= n:
        raise GraphError(f"need 0 <= degree < n, got degree={degree}, n={n}")
    if (n * degree) % 2:
        raise GraphError(f"n * degree must be even, got {n} * {degree}")
    rng = np.random.default_rng(seed)
    edges = None
    while edges is None:
        edges = _pair_stubs(n, degree, rng)
    pairs = sorted(edges)
    if weighted:
        w = rng.uniform(0.0, 1.0, size=len(pairs))
        # uniform() is [0, 1); redraw the measure-zero exact zero
        while np.any(w == 0.0):
            w[w == 0.0] = rng.uniform(0.0, 1.0, size=int(np.sum(w == 0.0)))
    else:
        w = np.ones(len(pairs))
    return Graph(n, tuple((j, k, float(x)) for (j, k), x in zip(pairs, w)))


def ring(n: int) -> Graph:
    """Unweighted cycle on ``n`` vertices."""
    return Graph(n, tuple((min(i, (i + 1) % n), max(i, (i + 1) % n), 1.0) for i in range(n)))


def is_bipartite(g: Graph) -> bool:
    color = [-1] * g.n
    nbrs = [[] for _ in range(g.n)]
    for j, k, _ in g.edges:
        nbrs[j].append(k)
        nbrs[k].append(j)
    for start in range(g.n):
        if color[start] >= 0:
            continue
        color[start] = 0
        stack = [start]
        while stack:
            v = stack.pop()
            for u in nbrs[v]:
                if color[u] < 0:
                    color[u] = 1 - color[v]
                    stack.append(u)
                elif color[u] == color[v]:
                    return False
    return True
