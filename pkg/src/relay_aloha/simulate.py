"""Seeded slot-level Monte Carlo simulation of the two-tier protocol.

This is the independent oracle for the analytic model: it plays the
protocol move by move rather than evaluating any formula.  Per slot, a
Poisson number of users transmit; each relay sees an independently
erased copy of that batch and decodes iff exactly one packet survives;
decoding relays forward with probability delta into the next slot, where
the sink decodes iff exactly one forwarded packet survives the downlink.
Relays never buffer: a packet is forwarded immediately or never.

Two sampling routes, identical in law:

* the estimation route draws one uniform per (relay, slot) and compares
  it against nested thresholds p_n >= p_n*delta >= p_n*delta*(1-eps_d),
  which reproduces the joint law of the decode/forward/arrival chain
  with a fifth of the random numbers of per-event coins;
* the trace route (``simulate_trace``) materializes per-relay survivor
  counts via binomial thinning of the offered batch, so slot-by-slot
  records carry the actual arrival counts.

Both are deterministic given (seed, stream_id); the bit generator
identity is recorded in the returned stats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import SystemParams

MODE_FULL = "full_system"
MODE_BOUND = "bound_uplink_only"

RNG_ALGORITHM = "philox4x64"

_MASK64 = (1 << 64) - 1
_CI_BATCHES = 100
_Z95 = 1.959963984540054  # two-sided 95% normal quantile


@dataclass(frozen=True)
class SimConfig:
    """One simulation run: system parameters plus execution knobs.

    ``warmup_slots`` must be at least 1 in the full-system mode so the
    first measured slot can receive forwards from its predecessor.  In
    bound mode only the uplink is played and delta/eps_d are ignored.
    """

    params: SystemParams
    n_slots: int
    warmup_slots: int = 1000
    seed: int = 0
    stream_id: int = 0
    mode: str = MODE_FULL

    def __post_init__(self) -> None:
        if self.n_slots < 1:
            raise ValueError(f"n_slots must be >= 1, got {self.n_slots}")
        if self.warmup_slots < 0:
            raise ValueError(
                f"warmup_slots must be >= 0, got {self.warmup_slots}"
            )
        if self.mode == MODE_FULL and self.warmup_slots < 1:
            raise ValueError(
                "full_system mode needs warmup_slots >= 1: the first "
                "measured slot must have a predecessor to forward from"
            )
        if self.mode not in (MODE_FULL, MODE_BOUND):
            raise ValueError(f"unknown mode {self.mode!r}")
        if not (0 <= self.seed <= _MASK64):
            raise ValueError("seed must fit in 64 unsigned bits")
        if not (0 <= self.stream_id <= _MASK64):
            raise ValueError("stream_id must fit in 64 unsigned bits")


@dataclass(frozen=True)
class SlotOutcome:
    """Everything that happened in one slot (trace route only).

    ``per_relay_arrivals`` counts unerased uplink packets per relay;
    ``sink_arrivals`` counts downlink packets surviving erasure, which
    originate from the previous slot's forwards.
    """

    n_tx: int
    per_relay_arrivals: tuple[int, ...]
    relays_decoded: tuple[bool, ...]
    relays_forwarding: tuple[bool, ...]
    sink_arrivals: int
    sink_decoded: bool


@dataclass(frozen=True)
class SimStats:
    """Estimates and counters from one run.

    ``throughput_estimate`` is delivered_packets / measured_slots; in
    bound mode "delivered" means a slot in which at least one relay
    decoded.  ``ci95_halfwidth`` comes from batch means over the
    measurement window.  Totals count over every simulated slot
    (including warmup) and satisfy
    delivered <= sink arrivals <= forwards <= decodes.
    """

    delivered_packets: int
    measured_slots: int
    throughput_estimate: float
    ci95_halfwidth: float
    relay_decode_rate: tuple[float, ...]
    uplink_union_rate: float
    sink_collision_rate: float
    total_decodes: int
    total_forwards: int
    total_sink_arrivals: int
    seed: int
    stream_id: int
    mode: str
    rng_algorithm: str = RNG_ALGORITHM


def rng_substream(seed: int, stream_id: int = 0) -> np.random.Generator:
    """Independent reproducible generator for (seed, stream_id).

    The pair forms the 128-bit Philox key, so distinct stream ids are
    distinct counter-based generators rather than offsets of one stream.
    """
    if not (0 <= seed <= _MASK64) or not (0 <= stream_id <= _MASK64):
        raise ValueError("seed and stream_id must fit in 64 unsigned bits")
    key = np.array([seed, stream_id], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _decode_prob_table(n_max: int, eps_u: float) -> np.ndarray:
    """p_n = n (1-eps_u) eps_u^(n-1) for n = 0..n_max (0^0 = 1)."""
    tab = np.zeros(n_max + 1)
    if n_max >= 1:
        ns = np.arange(1, n_max + 1, dtype=np.float64)
        tab[1:] = ns * (1.0 - eps_u) * eps_u ** (ns - 1.0)
    return tab


def _batch_ci95(window: np.ndarray) -> float:
    """95% half-width from batch means of a per-slot success vector."""
    n = window.shape[0]
    b = min(_CI_BATCHES, n)
    if b < 2:
        return 0.0
    means = np.array([c.mean() for c in np.array_split(window, b)])
    return _Z95 * means.std(ddof=1) / math.sqrt(b)


def simulate(config: SimConfig) -> SimStats:
    """Run the protocol and estimate throughput (estimation route)."""
    stats, _ = _run(config, trace=False)
    return stats


def simulate_trace(config: SimConfig) -> tuple[SimStats, list[SlotOutcome]]:
    """Run the protocol keeping a full slot-by-slot record (trace route).

    Draws survivor counts explicitly, so the random stream differs from
    :func:`simulate` at equal seeds even though the law is the same.
    Intended for small runs; memory grows with k * total slots.
    """
    return _run(config, trace=True)


def _run(config: SimConfig, trace: bool) -> tuple[SimStats, list[SlotOutcome]]:
    p = config.params
    k = p.k
    total_slots = config.warmup_slots + config.n_slots
    w = config.warmup_slots
    full = config.mode == MODE_FULL
    rng = rng_substream(config.seed, config.stream_id)

    n_tx = rng.poisson(p.g, total_slots)
    p_dec = _decode_prob_table(int(n_tx.max(initial=0)), p.eps_u)[n_tx]

    if trace:
        # Survivor counts per relay: binomial thinning of the offered batch.
        arrivals = rng.binomial(n_tx, 1.0 - p.eps_u, size=(k, total_slots))
        decoded = arrivals == 1
        if full:
            u = rng.random((k, total_slots))
            forwarding = decoded & (u < p.delta)
            arriving = forwarding & (u < p.delta * (1.0 - p.eps_d))
        else:
            forwarding = np.zeros_like(decoded)
            arriving = forwarding
        sink_in = arriving.sum(axis=0)
        decode_window_hits = decoded[:, w:].sum(axis=1)
        union = decoded.any(axis=0)
        total_decodes = int(decoded.sum())
        total_forwards = int(forwarding.sum())
    else:
        thr_dec = p_dec.astype(np.float32)
        thr_fwd = (p_dec * p.delta).astype(np.float32)
        thr_arr = (p_dec * (p.delta * (1.0 - p.eps_d))).astype(np.float32)
        sink_in = np.zeros(total_slots, dtype=np.int16)
        union = np.zeros(total_slots, dtype=bool)
        decode_window_hits = np.empty(k, dtype=np.int64)
        total_decodes = 0
        total_forwards = 0
        for i in range(k):
            u = rng.random(total_slots, dtype=np.float32)
            dec_i = u < thr_dec
            union |= dec_i
            decode_window_hits[i] = int(dec_i[w:].sum())
            total_decodes += int(dec_i.sum())
            if full:
                total_forwards += int((u < thr_fwd).sum())
                sink_in += u < thr_arr

    if full:
        # Forwards land in the next slot; slot 0 has no predecessor.
        sink_arrivals = np.zeros(total_slots, dtype=sink_in.dtype)
        sink_arrivals[1:] = sink_in[:-1]
        sink_decoded = sink_arrivals == 1
        success = sink_decoded
        total_sink_arrivals = int(sink_arrivals.sum())
        collision_rate = float((sink_arrivals[w:] >= 2).mean())
    else:
        sink_arrivals = np.zeros(total_slots, dtype=np.int16)
        sink_decoded = np.zeros(total_slots, dtype=bool)
        success = union
        total_sink_arrivals = 0
        collision_rate = 0.0

    window = success[w:]
    delivered = int(window.sum())
    stats = SimStats(
        delivered_packets=delivered,
        measured_slots=config.n_slots,
        throughput_estimate=delivered / config.n_slots,
        ci95_halfwidth=_batch_ci95(window.astype(np.float64)),
        relay_decode_rate=tuple(decode_window_hits / config.n_slots),
        uplink_union_rate=float(union[w:].mean()),
        sink_collision_rate=collision_rate,
        total_decodes=total_decodes,
        total_forwards=total_forwards,
        total_sink_arrivals=total_sink_arrivals,
        seed=config.seed,
        stream_id=config.stream_id,
        mode=config.mode,
    )

    outcomes: list[SlotOutcome] = []
    if trace:
        for t in range(total_slots):
            outcomes.append(
                SlotOutcome(
                    n_tx=int(n_tx[t]),
                    per_relay_arrivals=tuple(int(a) for a in arrivals[:, t]),
                    relays_decoded=tuple(bool(d) for d in decoded[:, t]),
                    relays_forwarding=tuple(
                        bool(f) for f in forwarding[:, t]
                    ),
                    sink_arrivals=int(sink_arrivals[t]),
                    sink_decoded=bool(sink_decoded[t]),
                )
            )
    return stats, outcomes
