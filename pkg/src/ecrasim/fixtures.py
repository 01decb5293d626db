"""Hand-built frames showing the two smallest SIC loops.

Both use the baseline system (rate 2, 10 dB, 500-symbol packets, two
replicas) so that a replica half covered by one foreign replica (x = 0.5)
sits well below the 4.77 dB decoding threshold.
"""

from __future__ import annotations

import dataclasses

from ecrasim.frame import Protocol, SystemParams
from ecrasim.placement import FrameInstance


def slotted_loop(params: SystemParams | None = None) -> FrameInstance:
    """Two users transmitting in the same two slots: each replica fully collides."""
    params = dataclasses.replace(params or SystemParams(), protocol=Protocol.CRDSA)
    t_s = params.geometry.packet_symbols
    return FrameInstance.from_starts(params, [[10 * t_s, 50 * t_s], [10 * t_s, 50 * t_s]])


def unslotted_loop(params: SystemParams | None = None, protocol: Protocol = Protocol.ECRA) -> FrameInstance:
    """Two users whose replicas half-overlap in complementary halves.

    User 0's first replica is hit on its second half and its second replica
    on its first half, so the least interfered halves form a clean packet.
    User 1 is in the mirrored situation.
    """
    params = dataclasses.replace(params or SystemParams(), protocol=protocol)
    t_s = params.geometry.packet_symbols
    half = t_s // 2
    a1, a2 = 2 * t_s, 20 * t_s
    return FrameInstance.from_starts(params, [[a1, a2], [a1 + half, a2 - half]])


FIXTURES = {
    "slotted-loop": slotted_loop,
    "unslotted-loop": unslotted_loop,
}
