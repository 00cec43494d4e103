"""Deterministic Nelder-Mead simplex minimiser."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np


class OptimizerError(RuntimeError):
    pass


@dataclass(frozen=True)
class SimplexConfig:
    reflection: float = 1.0
    expansion: float = 2.0
    contraction: float = 0.5
    shrink: float = 0.5
    max_evals: int | None = None  # None means 200 * dimension
    f_tolerance: float = 1e-8
    x_tolerance: float = 1e-6
    initial_step: float = 0.1

    def __post_init__(self):
        if not (self.reflection > 0 and self.expansion > 1 > self.contraction > 0 and 0 < self.shrink < 1):
            raise ValueError("need reflection > 0, expansion > 1 > contraction > 0, 0 < shrink < 1")


@dataclass
class MinimizeResult:
    x: np.ndarray
    fun: float
    evals: int
    converged: bool


def minimize(f: Callable[[np.ndarray], float], x0: Sequence[float],
             cfg: SimplexConfig = SimplexConfig()) -> MinimizeResult:
    """Minimise ``f`` from ``x0``.

    The starting simplex is ``x0`` plus one coordinate step per dimension.
    Iteration stops, reported as converged, once the spread of function
    values over the simplex is below ``f_tolerance`` and every vertex lies
    within ``x_tolerance`` of the best one; otherwise it stops when
    ``max_evals`` is spent.  The returned point is never worse than ``x0``.
    """
    x0 = np.asarray(x0, dtype=float).ravel()
    m = x0.size
    if m < 1:
        raise ValueError("need at least one parameter")
    max_evals = cfg.max_evals if cfg.max_evals is not None else 200 * m
    evals = 0

    def call(x):
        nonlocal evals
        evals += 1
        val = float(f(x))
        if not math.isfinite(val):
            raise OptimizerError(f"objective returned {val} at x={x.tolist()}")
        return val

    simplex = np.vstack([x0] + [x0 + cfg.initial_step * e for e in np.eye(m)])
    fvals = np.array([call(x) for x in simplex])
    converged = False

    while True:
        order = np.argsort(fvals, kind="stable")
        simplex, fvals = simplex[order], fvals[order]
        if (fvals[-1] - fvals[0] < cfg.f_tolerance
                and np.max(np.abs(simplex[1:] - simplex[0])) < cfg.x_tolerance):
            converged = True
            break
        if evals >= max_evals:
            break

        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]
        xr = centroid + cfg.reflection * (centroid - worst)
        fr = call(xr)
        if fr < fvals[0]:
            xe = centroid + cfg.expansion * (xr - centroid)
            fe = call(xe)
            if fe < fr:
                simplex[-1], fvals[-1] = xe, fe
            else:
                simplex[-1], fvals[-1] = xr, fr
            continue
        if fr < fvals[-2]:
            simplex[-1], fvals[-1] = xr, fr
            continue
        if fr < fvals[-1]:
            xc = centroid + cfg.contraction * (xr - centroid)
            fc = call(xc)
            if fc <= fr:
                simplex[-1], fvals[-1] = xc, fc
                continue
        else:
            xc = centroid + cfg.contraction * (worst - centroid)
            fc = call(xc)
            if fc < fvals[-1]:
                simplex[-1], fvals[-1] = xc, fc
                continue
        best = simplex[0]
        for i in range(1, m + 1):
            simplex[i] = best + cfg.shrink * (simplex[i] - best)
            fvals[i] = call(simplex[i])

    i = int(np.argmin(fvals))
    # simplex[0] started as x0, so the best vertex is never worse than f(x0)
    return MinimizeResult(simplex[i].copy(), float(fvals[i]), evals, converged)
