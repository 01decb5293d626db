"""Per-symbol interference counts, interference ratios and SNIR.

An interference profile is a length-``t_s`` integer array whose entry ``s``
counts the foreign replica symbols lying on symbol ``s`` of a replica.
Every interfering symbol carries the same power as the wanted signal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ecrasim.frame import ChannelModel


@dataclass(frozen=True)
class SnirReport:
    x: float  # mean interfering replicas per symbol
    snir: float  # linear

    @property
    def snir_db(self) -> float:
        return 10 * math.log10(self.snir)


def build_occupancy(frame, active=None) -> np.ndarray:
    """Number of active replica symbols on every frame symbol.

    ``active`` is a boolean mask (or iterable of user ids) selecting the
    users still present in the frame; ``None`` means all users.
    """
    F, t_s = frame.frame_symbols, frame.packet_symbols
    starts = frame.starts
    if active is not None:
        mask = np.asarray(active)
        if mask.dtype != bool:
            user_mask = np.zeros(frame.n_users, dtype=bool)
            user_mask[mask.astype(np.int64)] = True
            mask = user_mask
        starts = starts[mask]
    flat = starts.ravel()
    marks = np.bincount(flat, minlength=F + 1) - np.bincount(flat + t_s, minlength=F + 1)
    return np.cumsum(marks[:F]).astype(np.int32)


def replica_profile(frame, occupancy: np.ndarray, user: int, replica: int) -> np.ndarray:
    start = frame.starts[user, replica]
    return occupancy[start : start + frame.packet_symbols] - 1


def interference_ratio(profile: np.ndarray) -> float:
    return float(np.mean(profile)) if len(profile) else 0.0


def snir_from_ratio(x: float, channel: ChannelModel) -> float:
    return channel.signal_power / (x * channel.signal_power + channel.noise_power)


def snir_of(profile: np.ndarray, channel: ChannelModel) -> SnirReport:
    x = interference_ratio(profile)
    return SnirReport(x, snir_from_ratio(x, channel))


def combined_profile(profiles) -> np.ndarray:
    """Least-interfered symbol across all replicas, symbol by symbol."""
    return np.min(np.stack(profiles), axis=0)


def combined_source(profiles) -> np.ndarray:
    """Replica index picked for every symbol of the combined packet (lowest index on ties)."""
    return np.argmin(np.stack(profiles), axis=0)


def user_profiles(frame, occupancy: np.ndarray, user: int) -> list[np.ndarray]:
    return [replica_profile(frame, occupancy, user, r) for r in range(frame.params.degree)]
