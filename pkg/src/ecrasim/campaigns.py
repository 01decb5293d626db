"""Reference simulation campaigns and helpers to summarize them."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ecrasim.frame import SystemParams
from ecrasim.harness import SweepStats, sweep


def _grid(lo, hi, step=0.05):
    return [round(g, 4) for g in np.arange(lo, hi + step / 2, step)]


@dataclass(frozen=True)
class Campaign:
    name: str
    params: SystemParams
    protocols: tuple
    loads: tuple

    def run(self, n_frames: int = 1000, master_seed: int = 1, jobs: int = 1) -> list[SweepStats]:
        return sweep(self.params, self.loads, n_frames, master_seed, self.protocols, jobs)


CAMPAIGNS = {
    c.name: c
    for c in [
        Campaign("rate2_snr10_sb", SystemParams(rate=2, snr_db=10), ("CRA", "ECRA", "CRDSA"),
                 tuple([0.1] + _grid(0.2, 0.8))),
        Campaign("rate1_snr10_sb", SystemParams(rate=1, snr_db=10), ("CRA", "ECRA", "CRDSA"),
                 tuple(_grid(0.5, 1.5))),
        Campaign("rate1_snr10_rcb", SystemParams(rate=1, snr_db=10, decode_model="RCB"), ("CRA", "ECRA"),
                 tuple(_grid(0.7, 1.4))),
        Campaign("rate1_snr2_sb", SystemParams(rate=1, snr_db=2), ("CRA", "ECRA", "CRDSA"),
                 tuple(_grid(0.3, 0.9))),
    ]
}


def by_protocol(stats, protocol: str) -> list[SweepStats]:
    return [s for s in stats if s.protocol == protocol]


def peak(stats, protocol: str) -> SweepStats:
    """Load point of maximum throughput."""
    return max(by_protocol(stats, protocol), key=lambda s: s.throughput)


def at_load(stats, protocol: str, load: float) -> SweepStats:
    for s in by_protocol(stats, protocol):
        if abs(s.g_nominal - load) < 1e-9:
            return s
    raise KeyError(f"{protocol} has no point at G={load}")


def relative_gain(stats, better: str = "ECRA", baseline: str = "CRA") -> float:
    """Relative increase of peak throughput."""
    return peak(stats, better).throughput / peak(stats, baseline).throughput - 1.0
