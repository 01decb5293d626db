"""Random replica placement for one frame.

Unslotted (CRA/ECRA) replicas start on any symbol of ``[0, F - t_s]`` with
the only constraint that replicas of one user never overlap; no packet
wraps around the frame edge. Slotted (CRDSA) replicas occupy distinct
slots of length ``t_s``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ecrasim.frame import Protocol, SystemParams


class PlacementError(RuntimeError):
    pass


@dataclass(frozen=True)
class ReplicaPlacement:
    user_id: int
    starts: tuple[int, ...]  # symbols (unslotted) or slot indices (CRDSA)


@dataclass
class FrameInstance:
    """One generated frame.

    ``starts`` holds the start symbol of every replica, shape
    ``(n_users, degree)``; the slotted layout is stored in symbols too
    (slot index times ``t_s``). ``decode_draws`` holds one uniform value per
    user, consumed only by the random-coding-bound decoder.
    """

    params: SystemParams
    starts: np.ndarray
    decode_draws: np.ndarray
    rng_seed: int | None = None
    geometry: object = field(init=False, repr=False)

    def __post_init__(self):
        self.starts = np.asarray(self.starts, dtype=np.int64).reshape(-1, self.params.degree)
        self.decode_draws = np.asarray(self.decode_draws, dtype=float)
        self.geometry = self.params.geometry
        if len(self.decode_draws) != self.n_users:
            raise ValueError("need exactly one decode draw per user")
        t_s, F = self.packet_symbols, self.frame_symbols
        if self.n_users and (self.starts.min() < 0 or self.starts.max() > F - t_s):
            raise ValueError("replica crosses the frame boundary")
        gaps = np.diff(np.sort(self.starts, axis=1), axis=1)
        if (gaps < t_s).any():
            raise ValueError("replicas of one user overlap")

    @property
    def n_users(self) -> int:
        return self.starts.shape[0]

    @property
    def frame_symbols(self) -> int:
        return self.geometry.frame_symbols

    @property
    def packet_symbols(self) -> int:
        return self.geometry.packet_symbols

    @property
    def placements(self) -> list[ReplicaPlacement]:
        scale = self.packet_symbols if self.params.protocol.slotted else 1
        return [
            ReplicaPlacement(u, tuple(int(s) // scale for s in row))
            for u, row in enumerate(self.starts)
        ]

    @classmethod
    def from_starts(cls, params: SystemParams, starts, decode_draws=None) -> "FrameInstance":
        """Build a hand-made frame; draws default to 0.5 for every user."""
        starts = np.asarray(starts, dtype=np.int64).reshape(-1, params.degree)
        if decode_draws is None:
            decode_draws = np.full(len(starts), 0.5)
        return cls(params, starts, decode_draws)


def place_cra(params: SystemParams, n_users: int, seed: int) -> FrameInstance:
    """Unslotted placement, uniform over all layouts without self-overlap.

    Sorted starts ``s_0 < ... < s_{d-1}`` with gaps of at least ``t_s`` map
    one-to-one onto ``d``-subsets ``c`` of ``{0, ..., F - d*t_s + d - 1}``
    via ``s_k = c_k + k*(t_s - 1)``; a uniform subset in random replica
    order is therefore the same law as drawing iid uniform starts and
    rejecting self-overlapping ones, without the rejection.
    """
    geom = params.geometry
    t_s, d = geom.packet_symbols, params.degree
    rng = np.random.default_rng(seed)
    pool = geom.frame_symbols - d * t_s + d
    subsets = np.sort(rng.integers(0, pool, size=(n_users, d)), axis=1)
    for u in np.flatnonzero((np.diff(subsets, axis=1) == 0).any(axis=1)):
        subsets[u] = np.sort(rng.choice(pool, size=d, replace=False))
    starts = rng.permuted(subsets + np.arange(d) * (t_s - 1), axis=1)
    draws = rng.random(n_users)
    return FrameInstance(params, starts, draws, seed)


def place_crdsa(params: SystemParams, n_users: int, seed: int) -> FrameInstance:
    """Slotted placement: ``degree`` distinct slots per user, uniformly."""
    geom = params.geometry
    d = params.degree
    if geom.n_slots < d:
        raise PlacementError(f"{geom.n_slots} slots cannot hold {d} distinct replicas")
    rng = np.random.default_rng(seed)
    # first d columns of a random permutation = uniform d-subset without replacement
    slots = np.argsort(rng.random((n_users, geom.n_slots)), axis=1)[:, :d]
    draws = rng.random(n_users)
    return FrameInstance(params, slots * geom.packet_symbols, draws, seed)


def place_frame(params: SystemParams, n_users: int, seed: int) -> FrameInstance:
    if params.protocol is Protocol.CRDSA:
        return place_crdsa(params, n_users, seed)
    return place_cra(params, n_users, seed)


def format_placements(frame: FrameInstance) -> str:
    """One line per replica: ``user replica start``."""
    lines = ["# user replica start"]
    for p in frame.placements:
        lines.extend(f"{p.user_id} {r} {s}" for r, s in enumerate(p.starts))
    return "\n".join(lines) + "\n"
