"""Monte-Carlo sweeps over offered load.

Every frame gets its own seed derived from ``(master_seed, load index,
frame index)``, so results do not depend on how frames are distributed
over worker processes. CRA and ECRA requested together share placements
and the first decoding step; ECRA simply continues from the CRA state.
"""

from __future__ import annotations

import dataclasses
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from ecrasim.decoder import DecodeModel
from ecrasim.frame import Protocol, SystemParams, effective_load, users_for_load
from ecrasim.placement import place_cra, place_crdsa
from ecrasim.sic import DecodingState, combine_rounds, final_ratios, sic_rounds

SWEEP_HEADER = "protocol,model,R,snr_db,G_nominal,G_effective,N_u,N_f,P_err,per,per_ci95,throughput"
HISTOGRAM_HEADER = "bin_lo_db,bin_hi_db,density_cra,density_ecra"
BLOCK_FRAMES = 50


class FrameOutcome(NamedTuple):
    n_users: int
    n_decoded: int


@dataclass(frozen=True)
class SweepStats:
    protocol: str
    model: str
    rate: float
    snr_db: float
    g_nominal: float
    g_effective: float
    n_users: int
    n_frames: int
    packets_lost: int
    per: float
    per_ci95: float
    throughput: float

    @property
    def per_floor(self) -> float:
        """Smallest non-zero PER resolvable with this many packets."""
        total = self.n_users * self.n_frames
        return 1.0 / total if total else math.nan

    def per_label(self) -> str:
        if self.per == 0 and self.n_users:
            return f"<{self.per_floor:.1e}"
        return f"{self.per:.3e}"

    def csv_row(self) -> str:
        return (
            f"{self.protocol},{self.model},{self.rate:g},{self.snr_db:g},{self.g_nominal:.6g},"
            f"{self.g_effective:.6g},{self.n_users},{self.n_frames},{self.packets_lost},"
            f"{self.per:.6e},{self.per_ci95:.6e},{self.throughput:.6f}"
        )


@dataclass(frozen=True)
class SnirHistogram:
    edges: np.ndarray  # dB, len(density) + 1
    density_cra: np.ndarray
    density_ecra: np.ndarray

    def cdf(self, which: str) -> np.ndarray:
        density = self.density_cra if which == "cra" else self.density_ecra
        return np.cumsum(density * np.diff(self.edges))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(HISTOGRAM_HEADER + "\n")
        for lo, hi, c, e in zip(self.edges[:-1], self.edges[1:], self.density_cra, self.density_ecra):
            buf.write(f"{lo:.4f},{hi:.4f},{c:.6e},{e:.6e}\n")
        return buf.getvalue()


def frame_seed(master_seed: int, load_index: int, frame_index: int) -> int:
    seq = np.random.SeedSequence([master_seed, load_index, frame_index])
    return int(seq.generate_state(1, np.uint64)[0])


def _decoded_counts(params: SystemParams, n_users: int, seed: int, protocols: Sequence[Protocol]) -> dict:
    model = DecodeModel.for_params(params)
    imax = params.max_iterations
    counts = {}
    if Protocol.CRA in protocols or Protocol.ECRA in protocols:
        frame = place_cra(dataclasses.replace(params, protocol=Protocol.CRA), n_users, seed)
        state = sic_rounds(DecodingState(frame), model, imax)
        counts[Protocol.CRA] = state.n_decoded
        if Protocol.ECRA in protocols:
            counts[Protocol.ECRA] = combine_rounds(state, model, imax).n_decoded
    if Protocol.CRDSA in protocols:
        frame = place_crdsa(dataclasses.replace(params, protocol=Protocol.CRDSA), n_users, seed)
        counts[Protocol.CRDSA] = sic_rounds(DecodingState(frame), model, imax).n_decoded
    return counts


def simulate_frame(params: SystemParams, load: float, seed: int) -> FrameOutcome:
    """Decode one random frame of ``params.protocol`` at offered load ``load``."""
    n_users = users_for_load(params, load)
    counts = _decoded_counts(params, n_users, seed, [params.protocol])
    return FrameOutcome(n_users, counts[params.protocol])


def _run_block(params, protocols, n_users, seeds) -> np.ndarray:
    out = np.zeros((len(protocols), len(seeds)), dtype=np.int64)
    for j, seed in enumerate(seeds):
        counts = _decoded_counts(params, n_users, seed, protocols)
        for i, p in enumerate(protocols):
            out[i, j] = counts[p]
    return out


def _map_blocks(fn, tasks, jobs: int):
    if jobs <= 1:
        return [fn(*t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(fn, *t) for t in tasks]
        return [f.result() for f in futures]


def _blocks(n_frames: int):
    return [range(lo, min(lo + BLOCK_FRAMES, n_frames)) for lo in range(0, n_frames, BLOCK_FRAMES)]


def sweep(
    params: SystemParams,
    loads: Sequence[float],
    n_frames: int,
    master_seed: int = 0,
    protocols: Sequence[Protocol | str] | None = None,
    jobs: int = 1,
) -> list[SweepStats]:
    """Throughput and PER of every protocol at every load, ``n_frames`` frames each.

    Results are ordered protocol-major, in the order given.
    """
    if n_frames < 1:
        raise ValueError("n_frames must be >= 1")
    protocols = [Protocol(p) for p in (protocols or [params.protocol])]
    tasks, where = [], []
    for gi, load in enumerate(loads):
        n_users = users_for_load(params, load)
        for block in _blocks(n_frames):
            tasks.append((params, protocols, n_users, [frame_seed(master_seed, gi, f) for f in block]))
            where.append(gi)
    results = _map_blocks(_run_block, tasks, jobs)

    decoded = {gi: [] for gi in range(len(loads))}
    for gi, res in zip(where, results):
        decoded[gi].append(res)

    stats = []
    for i, proto in enumerate(protocols):
        for gi, load in enumerate(loads):
            n_users = users_for_load(params, load)
            per_frame = np.concatenate([r[i] for r in decoded[gi]])
            stats.append(_aggregate(params, proto, load, n_users, per_frame))
    return stats


def _aggregate(params, proto, load, n_users, decoded_per_frame) -> SweepStats:
    n_frames = len(decoded_per_frame)
    lost = int(n_users * n_frames - decoded_per_frame.sum())
    g_eff = effective_load(params, n_users)
    if n_users:
        per = lost / (n_users * n_frames)
        frame_per = 1.0 - decoded_per_frame / n_users
        ci = 1.96 * frame_per.std(ddof=1) / math.sqrt(n_frames) if n_frames > 1 else 0.0
    else:
        per, ci = 0.0, 0.0
    return SweepStats(
        protocol=proto.value,
        model=params.decode_model.value,
        rate=params.rate,
        snr_db=params.snr_db,
        g_nominal=float(load),
        g_effective=g_eff,
        n_users=n_users,
        n_frames=n_frames,
        packets_lost=lost,
        per=per,
        per_ci95=float(ci),
        throughput=(1.0 - per) * g_eff,
    )


def sweep_csv(stats: Sequence[SweepStats]) -> str:
    return SWEEP_HEADER + "\n" + "".join(s.csv_row() + "\n" for s in stats)


def _histogram_block(params, n_users, seeds):
    model = DecodeModel.for_params(params)
    imax = params.max_iterations
    cra, ecra = [], []
    for seed in seeds:
        frame = place_cra(dataclasses.replace(params, protocol=Protocol.CRA), n_users, seed)
        state = sic_rounds(DecodingState(frame), model, imax)
        cra.append(final_ratios(state, combined=False))
        combine_rounds(state, model, imax)
        ecra.append(final_ratios(state, combined=True))
    return np.concatenate(cra or [[]]), np.concatenate(ecra or [[]])


def snir_histogram(
    params: SystemParams,
    load: float,
    n_frames: int,
    master_seed: int = 0,
    bin_width: float = 0.25,
    jobs: int = 1,
) -> SnirHistogram:
    """Densities (per dB) of the SNIR each packet last presented to the decoder, CRA vs ECRA.

    CRA and ECRA are run on the same frames. A packet decoded along the way
    contributes the SNIR it was decoded at, a lost packet the SNIR it still
    sees at the end (best replica for CRA, combined packet for ECRA).
    The top bin starts exactly at the nominal SNR.
    """
    n_users = users_for_load(params, load)
    tasks = [(params, n_users, [frame_seed(master_seed, 0, f) for f in block]) for block in _blocks(n_frames)]
    parts = _map_blocks(_histogram_block, tasks, jobs)
    snr = params.channel.snr
    x_cra = np.concatenate([p[0] for p in parts])
    x_ecra = np.concatenate([p[1] for p in parts])
    db_cra = params.snr_db - 10 * np.log10(1 + x_cra * snr)
    db_ecra = params.snr_db - 10 * np.log10(1 + x_ecra * snr)

    lowest = min(db_cra.min(initial=params.snr_db), db_ecra.min(initial=params.snr_db))
    n_below = max(1, math.ceil((params.snr_db - lowest) / bin_width))
    edges = params.snr_db + bin_width * np.arange(-n_below, 2)

    def density(values):
        counts, _ = np.histogram(values, edges)
        total = counts.sum()
        return counts / (total * bin_width) if total else counts.astype(float)

    return SnirHistogram(edges, density(db_cra), density(db_ecra))


def summary_table(stats: Sequence[SweepStats]) -> str:
    lines = [f"{'protocol':<8} {'model':<5} {'G':>6} {'T':>8} {'PER':>11}"]
    for s in stats:
        lines.append(f"{s.protocol:<8} {s.model:<5} {s.g_effective:>6.3f} {s.throughput:>8.4f} {s.per_label():>11}")
    return "\n".join(lines)
