"""Numerical maximization of end-to-end throughput.

Three knobs can be tuned: the forwarding probability delta (for any relay
count), the channel load g, and the relay count k itself.  Throughput as
a function of delta is a degree-k polynomial, and as a function of g it
shows a single dominant peak but unimodality is unproven, so both scalar
searches go coarse-grid-first and only then refine the best bracket by
golden section.  All searches are deterministic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .kernels import HCache
from .model import (
    SystemParams,
    delta_star_k2,
    peak_load,
    throughput,
)

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0

DELTA_GRID_POINTS = 101
LOAD_GRID_POINTS = 400
DEFAULT_ARG_TOL = 1e-6
DEFAULT_G_MAX = 8.0
DEFAULT_K_MAX = 32


@dataclass(frozen=True)
class OptimizationResult:
    """Optimizer output.

    ``arg_star`` is the optimal delta or g (float) or relay count (int);
    ``value_star`` is the throughput there, evaluated through the
    analytic model.  ``per_k`` carries the per-relay-count optima when
    the search was over k, so each entry can be reproduced individually.
    """

    arg_star: float | int
    value_star: float
    method: str  # "closed_form_k2" | "grid_golden" | "exhaustive_k"
    evaluations: int
    arg_tol: float
    per_k: tuple[float, ...] | None = None


def _golden_max(
    f: Callable[[float], float], lo: float, hi: float, xtol: float
) -> tuple[float, float, int]:
    """Golden-section maximization of f on [lo, hi] to width xtol."""
    a, b = lo, hi
    x1 = b - _INVPHI * (b - a)
    x2 = a + _INVPHI * (b - a)
    f1, f2 = f(x1), f(x2)
    evals = 2
    while b - a > xtol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INVPHI * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INVPHI * (b - a)
            f1 = f(x1)
        evals += 1
    xm = 0.5 * (a + b)
    return xm, f(xm), evals + 1


def _grid_then_golden(
    f: Callable[[float], float], grid: list[float], xtol: float
) -> tuple[float, float, int]:
    """Evaluate f on a grid, then refine around the best point.

    The returned value is never below the best grid value, whatever the
    refinement does inside the bracket.
    """
    vals = [f(x) for x in grid]
    best = max(range(len(grid)), key=lambda i: vals[i])
    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, len(grid) - 1)]
    evals = len(grid)
    x_star, v_star = grid[best], vals[best]
    if hi - lo > xtol:
        xg, vg, used = _golden_max(f, lo, hi, xtol)
        evals += used
        if vg > v_star:
            x_star, v_star = xg, vg
    return x_star, v_star, evals


def optimize_delta(
    g: float,
    k: int,
    eps_u: float,
    eps_d: float,
    arg_tol: float = DEFAULT_ARG_TOL,
    cache: HCache | None = None,
    use_k2_shortcut: bool = True,
) -> OptimizationResult:
    """Maximize throughput over the forwarding probability delta in [0, 1].

    For two relays at peak load the stationary point is known in closed
    form and is used directly (unless ``use_k2_shortcut`` is off, which
    forces the generic search; the two agree within ``arg_tol``).
    """
    if not (0.0 < arg_tol <= 0.1):
        raise ValueError(f"arg_tol must be in (0, 0.1], got {arg_tol}")
    if (
        use_k2_shortcut
        and k == 2
        and eps_d < 1.0
        and 0.0 <= eps_u < 1.0
        and math.isclose(g, peak_load(eps_u), rel_tol=1e-12)
    ):
        ds = delta_star_k2(eps_u, eps_d)
        value = throughput(SystemParams(g, k, eps_u, eps_d, ds), cache).value
        return OptimizationResult(ds, value, "closed_form_k2", 1, arg_tol)

    def objective(d: float) -> float:
        return throughput(SystemParams(g, k, eps_u, eps_d, d), cache).value

    grid = [i / (DELTA_GRID_POINTS - 1) for i in range(DELTA_GRID_POINTS)]
    d_star, v_star, evals = _grid_then_golden(objective, grid, arg_tol)
    return OptimizationResult(d_star, v_star, "grid_golden", evals, arg_tol)


def optimize_load(
    k: int,
    eps_u: float,
    eps_d: float,
    delta: float,
    g_max: float = DEFAULT_G_MAX,
    arg_tol: float = DEFAULT_ARG_TOL,
    cache: HCache | None = None,
) -> OptimizationResult:
    """Maximize throughput over the channel load g in (0, g_max].

    Hybrid grid: geometric spacing resolves the small-g region where the
    curve rises steeply, linear spacing covers the rest.
    """
    if not (g_max > 0.0):
        raise ValueError(f"g_max must be positive, got {g_max}")
    if not (0.0 < arg_tol <= 0.1):
        raise ValueError(f"arg_tol must be in (0, 0.1], got {arg_tol}")
    half = LOAD_GRID_POINTS // 2
    geo = np.geomspace(g_max * 1e-4, g_max, half)
    lin = np.linspace(g_max / half, g_max, half)
    grid = [float(x) for x in np.unique(np.concatenate([geo, lin]))]

    def objective(g: float) -> float:
        return throughput(SystemParams(g, k, eps_u, eps_d, delta), cache).value

    g_star, v_star, evals = _grid_then_golden(objective, grid, arg_tol)
    return OptimizationResult(g_star, v_star, "grid_golden", evals, arg_tol)


def optimize_k(
    eps_u: float,
    eps_d: float,
    k_max: int = DEFAULT_K_MAX,
    arg_tol: float = DEFAULT_ARG_TOL,
    g: float | None = None,
    cache: HCache | None = None,
) -> OptimizationResult:
    """Find the relay count whose delta-optimized throughput is largest.

    ``g=None`` applies the peak-load rule g = 1/(1-eps_u); a float fixes
    the load for every k.  Ties break toward fewer relays.
    """
    if k_max < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")
    g_eff = peak_load(eps_u) if g is None else g
    if not (g_eff > 0.0):
        raise ValueError(f"load must be positive, got {g_eff}")
    cache = cache if cache is not None else HCache()
    per_k: list[float] = []
    evals = 0
    best_k = 1
    best_v = -math.inf
    for k in range(1, k_max + 1):
        r = optimize_delta(g_eff, k, eps_u, eps_d, arg_tol, cache)
        per_k.append(r.value_star)
        evals += r.evaluations
        if r.value_star > best_v:
            best_k, best_v = k, r.value_star
    return OptimizationResult(
        best_k, best_v, "exhaustive_k", evals, arg_tol, per_k=tuple(per_k)
    )
