"""Declarative parameter sweeps and canned figure datasets, CSV out.

A sweep varies one axis (load, forwarding probability, erasure rates, or
relay count) over an explicit value list while the remaining parameters
stay fixed, and evaluates any subset of the available outputs per point.
Output files are plain CSV with a header row, 10-significant-digit
numbers, ``\\n`` line endings and ``#`` provenance comments, and are
byte-identical across runs of the same request.

``reproduce_figure`` emits four frozen diagnostic datasets:

* fig2: throughput and its upper bound vs load, two relays, always
  forwarding, symmetric erasures in {0.1, 0.3, 0.5};
* fig3: optimal two-relay operation vs symmetric erasure rate at peak
  load, with the single-relay baseline for comparison;
* fig4: optimal two-relay throughput over the full (eps_u, eps_d) grid
  at peak load;
* fig5: delta-optimized throughput and upper bound vs relay count at
  peak load, symmetric erasures in {0.1, 0.3, 0.5}.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, replace
from typing import IO, Iterable

from . import __version__
from .kernels import HCache, NonConvergenceError
from .model import (
    SystemParams,
    bound,
    delta_star_k2,
    peak_load,
    s_star_k2,
    throughput,
    throughput_closed,
    throughput_series,
)
from .optimize import optimize_delta
from .simulate import RNG_ALGORITHM, MODE_FULL, SimConfig, simulate

AXES = ("g", "delta", "eps", "eps_u", "eps_d", "k")
OUTPUTS = ("analytic", "closed", "series", "bound", "simulated",
           "delta_star", "s_star")

# A sweep row is one CSV record: parameter cells, one value and one error
# cell per requested output, and an ``error`` cell for per-row failures.
ResultRow = dict[str, object]


@dataclass(frozen=True)
class SimOverrides:
    """Simulation settings for sweeps that request the simulated output."""

    n_slots: int = 100_000
    warmup_slots: int = 1000
    seed: int = 0


@dataclass(frozen=True)
class SweepSpec:
    """One sweep request.

    ``values`` must be strictly increasing.  The ``eps`` axis sets the
    uplink and downlink erasure rates jointly.  The ``delta_star`` and
    ``s_star`` outputs optimize the forwarding probability at each row's
    own load and relay count (the row's ``delta`` field is ignored for
    those two columns).
    """

    axis: str
    values: tuple[float, ...]
    fixed: SystemParams
    outputs: tuple[str, ...] = ("analytic",)
    sim: SimOverrides | None = None

    def __post_init__(self) -> None:
        if self.axis not in AXES:
            raise ValueError(f"axis must be one of {AXES}, got {self.axis!r}")
        if not self.values:
            raise ValueError("values must be non-empty")
        if any(b <= a for a, b in zip(self.values, self.values[1:])):
            raise ValueError("values must be strictly increasing")
        if not self.outputs:
            raise ValueError("outputs must be non-empty")
        for out in self.outputs:
            if out not in OUTPUTS:
                raise ValueError(
                    f"unknown output {out!r}; choices: {OUTPUTS}"
                )


def columns_for(spec: SweepSpec) -> list[str]:
    """CSV column set for a sweep; a pure function of the spec."""
    cols = ["g", "k", "eps_u", "eps_d", "delta"]
    for out in spec.outputs:
        cols += [out, f"{out}_err"]
    if "simulated" in spec.outputs:
        cols += ["seed", "n_slots"]
    cols.append("error")
    return cols


def _params_at(spec: SweepSpec, value: float) -> SystemParams:
    if spec.axis == "eps":
        return replace(spec.fixed, eps_u=value, eps_d=value)
    if spec.axis == "k":
        return replace(spec.fixed, k=int(value))
    return replace(spec.fixed, **{spec.axis: value})


def run_sweep(spec: SweepSpec, cache: HCache | None = None) -> list[ResultRow]:
    """Evaluate every requested output at every axis value.

    Rows are independent and the result is deterministic, including the
    simulation stream: row i uses stream id i of the sweep seed.  A
    failing output leaves its cells empty and records the reason in the
    row's ``error`` cell instead of aborting the sweep.
    """
    cache = cache if cache is not None else HCache()
    sim = spec.sim if spec.sim is not None else SimOverrides()
    rows: list[ResultRow] = []
    for i, value in enumerate(spec.values):
        row: ResultRow = {"error": ""}
        errors: list[str] = []
        try:
            pt = _params_at(spec, value)
        except ValueError as exc:
            pt = None
            errors.append(str(exc))
        if pt is not None:
            row.update(
                g=pt.g, k=pt.k, eps_u=pt.eps_u, eps_d=pt.eps_d, delta=pt.delta
            )
            for out in spec.outputs:
                try:
                    val, err = _evaluate(out, pt, cache, sim, stream_id=i)
                except (ValueError, NonConvergenceError) as exc:
                    row[out] = ""
                    row[f"{out}_err"] = ""
                    errors.append(f"{out}: {exc}")
                else:
                    row[out] = val
                    row[f"{out}_err"] = err
            if "simulated" in spec.outputs:
                row["seed"] = sim.seed
                row["n_slots"] = sim.n_slots
        row["error"] = "; ".join(errors)
        rows.append(row)
    return rows


def _evaluate(
    out: str,
    pt: SystemParams,
    cache: HCache,
    sim: SimOverrides,
    stream_id: int,
) -> tuple[float, float]:
    if out == "analytic":
        r = throughput(pt, cache)
        return r.value, r.est_abs_error
    if out == "closed":
        r = throughput_closed(pt, cache)
        return r.value, r.est_abs_error
    if out == "series":
        r = throughput_series(pt)
        return r.value, r.est_abs_error
    if out == "bound":
        r = bound(pt.g, pt.k, pt.eps_u, cache)
        return r.value, r.est_abs_error
    if out == "simulated":
        stats = simulate(
            SimConfig(
                params=pt,
                n_slots=sim.n_slots,
                warmup_slots=sim.warmup_slots,
                seed=sim.seed,
                stream_id=stream_id,
                mode=MODE_FULL,
            )
        )
        return stats.throughput_estimate, stats.ci95_halfwidth
    if out == "delta_star":
        return float(optimize_delta(pt.g, pt.k, pt.eps_u, pt.eps_d,
                                    cache=cache).arg_star), 0.0
    if out == "s_star":
        return optimize_delta(pt.g, pt.k, pt.eps_u, pt.eps_d,
                              cache=cache).value_star, 0.0
    raise ValueError(f"unknown output {out!r}")


# --------------------------------------------------------------------------
# CSV writing


def format_cell(v: object) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return f"{v:.10g}"
    return str(v)


def write_csv(
    f: IO[str],
    columns: list[str],
    rows: Iterable[ResultRow],
    comments: Iterable[str] = (),
) -> None:
    """Write rows in the package CSV dialect (see module docstring)."""
    for c in comments:
        f.write(f"# {c}\n")
    f.write(",".join(columns) + "\n")
    for row in rows:
        f.write(",".join(format_cell(row.get(c, "")) for c in columns) + "\n")


def sweep_comments(spec: SweepSpec) -> list[str]:
    comments = [
        f"relay-aloha {__version__}",
        f"sweep axis={spec.axis} outputs={','.join(spec.outputs)}",
    ]
    if "simulated" in spec.outputs:
        sim = spec.sim if spec.sim is not None else SimOverrides()
        comments.append(
            f"simulation seed={sim.seed} n_slots={sim.n_slots} "
            f"warmup={sim.warmup_slots} rng={RNG_ALGORITHM}"
        )
    return comments


# --------------------------------------------------------------------------
# Frozen figure datasets

FIGURE_IDS = ("fig2", "fig3", "fig4", "fig5")

_FIG_EPS_SET = (0.1, 0.3, 0.5)
_FIG2_G_STEPS = 100   # g = 0 .. 5 in steps of 0.05
_FIG3_EPS_STEPS = 98  # eps = 0 .. 0.98 in steps of 0.01
_FIG4_EPS_STEPS = 19  # eps = 0 .. 0.95 in steps of 0.05
_FIG5_K_MAX = 32


def figure_table(
    fig_id: str, cache: HCache | None = None
) -> tuple[list[str], list[str], list[ResultRow]]:
    """(comments, columns, rows) for one frozen figure dataset."""
    cache = cache if cache is not None else HCache()
    if fig_id == "fig2":
        rows = [
            {
                "eps": eps,
                "g": (g := i * 0.05),
                "s": throughput(SystemParams(g, 2, eps, eps, 1.0), cache).value,
                "s_bound": bound(g, 2, eps, cache).value,
            }
            for eps in _FIG_EPS_SET
            for i in range(_FIG2_G_STEPS + 1)
        ]
        columns = ["eps", "g", "s", "s_bound"]
        what = "throughput and upper bound vs load; k=2 delta=1 eps_u=eps_d"
    elif fig_id == "fig3":
        rows = []
        for j in range(_FIG3_EPS_STEPS + 1):
            eps = j * 0.01
            g = peak_load(eps)
            rows.append(
                {
                    "eps": eps,
                    "g": g,
                    "delta_star": delta_star_k2(eps, eps),
                    "s_star": s_star_k2(eps, eps),
                    "s_bound": bound(g, 2, eps, cache).value,
                    "s_single_relay": (1.0 - eps) * math.exp(-1.0),
                }
            )
        columns = ["eps", "g", "delta_star", "s_star", "s_bound",
                   "s_single_relay"]
        what = ("optimal k=2 operation vs symmetric erasure rate at "
                "peak load g=1/(1-eps)")
    elif fig_id == "fig4":
        rows = [
            {
                "eps_u": (eu := iu * 0.05),
                "eps_d": (ed := id_ * 0.05),
                "delta_star": delta_star_k2(eu, ed),
                "s_star": s_star_k2(eu, ed),
            }
            for iu in range(_FIG4_EPS_STEPS + 1)
            for id_ in range(_FIG4_EPS_STEPS + 1)
        ]
        columns = ["eps_u", "eps_d", "delta_star", "s_star"]
        what = "optimal k=2 throughput over (eps_u, eps_d); g=1/(1-eps_u)"
    elif fig_id == "fig5":
        rows = []
        for eps in _FIG_EPS_SET:
            g = peak_load(eps)
            for k in range(1, _FIG5_K_MAX + 1):
                r = optimize_delta(g, k, eps, eps, cache=cache)
                rows.append(
                    {
                        "eps": eps,
                        "k": k,
                        "delta_star": float(r.arg_star),
                        "s_star": r.value_star,
                        "s_bound": bound(g, k, eps, cache).value,
                    }
                )
        columns = ["eps", "k", "delta_star", "s_star", "s_bound"]
        what = ("delta-optimized throughput and upper bound vs relay "
                "count at peak load; eps_u=eps_d")
    else:
        raise ValueError(
            f"unknown figure id {fig_id!r}; choices: {FIGURE_IDS}"
        )
    comments = [f"relay-aloha {__version__}", f"figure: {fig_id}, {what}"]
    return comments, columns, rows


def reproduce_figure(fig_id: str, out_path: str | None = None) -> None:
    """Write one figure dataset as CSV to ``out_path`` (stdout if None)."""
    comments, columns, rows = figure_table(fig_id)
    if out_path is None:
        write_csv(sys.stdout, columns, rows, comments)
        return
    with open(out_path, "w", encoding="utf-8", newline="") as f:
        write_csv(f, columns, rows, comments)
