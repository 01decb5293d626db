"""Experiment parameters, frame geometry and load <-> user-count conversion."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass


class Protocol(str, enum.Enum):
    CRA = "CRA"
    ECRA = "ECRA"
    CRDSA = "CRDSA"

    @property
    def slotted(self) -> bool:
        return self is Protocol.CRDSA


class DecodeKind(str, enum.Enum):
    SHANNON = "SB"
    RCB = "RCB"

    @classmethod
    def parse(cls, name: "str | DecodeKind") -> "DecodeKind":
        if isinstance(name, cls):
            return name
        aliases = {
            "SB": cls.SHANNON,
            "SHANNON": cls.SHANNON,
            "SHANNONBOUND": cls.SHANNON,
            "RCB": cls.RCB,
            "RANDOMCODINGBOUND": cls.RCB,
        }
        key = name.strip().upper().replace("_", "").replace("-", "")
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown decode model {name!r}") from None


class ParameterError(ValueError):
    """Invalid experiment parameter; ``field`` names the offending parameter."""

    def __init__(self, field: str, reason: str):
        super().__init__(f"{field}: {reason}")
        self.field = field
        self.reason = reason


@dataclass(frozen=True)
class FrameGeometry:
    frame_symbols: int
    packet_symbols: int
    n_slots: int


@dataclass(frozen=True)
class SystemParams:
    """Full configuration of one simulated system.

    Defaults are the baseline campaign: rate 2 bit/symbol, 10 dB SNR,
    100 ms frames of 1 us symbols, 1000-bit packets, two replicas and
    at most ten cancellation rounds.
    """

    rate: float = 2.0
    snr_db: float = 10.0
    frame_duration: float = 100e-3  # s
    symbol_duration: float = 1e-6  # s
    packet_bits: int = 1000
    degree: int = 2
    max_iterations: int = 10
    protocol: Protocol = Protocol.ECRA
    decode_model: DecodeKind = DecodeKind.SHANNON

    def __post_init__(self):
        object.__setattr__(self, "protocol", Protocol(self.protocol))
        object.__setattr__(self, "decode_model", DecodeKind.parse(self.decode_model))
        if not self.rate > 0:
            raise ParameterError("rate", "must be > 0")
        if not (self.frame_duration > 0 and self.symbol_duration > 0):
            raise ParameterError("frame_duration", "frame and symbol durations must be > 0")
        if self.packet_bits <= 0:
            raise ParameterError("packet_bits", "must be > 0")
        if int(self.degree) != self.degree or self.degree < 2:
            raise ParameterError("degree", "must be an integer >= 2")
        if int(self.max_iterations) != self.max_iterations or self.max_iterations < 1:
            raise ParameterError("max_iterations", "must be an integer >= 1")
        derive_geometry(self)

    @property
    def channel(self) -> "ChannelModel":
        return ChannelModel.from_snr_db(self.snr_db)

    @property
    def geometry(self) -> FrameGeometry:
        return derive_geometry(self)


@dataclass(frozen=True)
class ChannelModel:
    """Equal-power AWGN channel: unit signal power, noise set by the SNR."""

    signal_power: float = 1.0
    noise_power: float = 0.1

    def __post_init__(self):
        if not self.noise_power > 0:
            raise ValueError("noise power must be > 0")

    @classmethod
    def from_snr_db(cls, snr_db: float) -> "ChannelModel":
        return cls(1.0, 1.0 / 10 ** (snr_db / 10))

    @property
    def snr(self) -> float:
        return self.signal_power / self.noise_power


def derive_geometry(params: SystemParams) -> FrameGeometry:
    """Frame length F, packet length t_s (both in symbols) and slot count."""
    packet = params.packet_bits / params.rate
    t_s = round(packet)
    if t_s < 1 or not math.isclose(packet, t_s, rel_tol=0, abs_tol=1e-9):
        raise ParameterError("rate", f"packet length {params.packet_bits}/{params.rate} is not a whole number of symbols")
    frame_symbols = round(params.frame_duration / params.symbol_duration)
    if frame_symbols < params.degree * t_s:
        raise ParameterError(
            "frame_duration",
            f"frame of {frame_symbols} symbols cannot hold {params.degree} replicas of {t_s} symbols",
        )
    n_slots = frame_symbols // t_s
    # F >= d * t_s already guarantees n_slots >= d for the slotted layout
    return FrameGeometry(frame_symbols, t_s, n_slots)


def users_for_load(params: SystemParams, load: float) -> int:
    """Number of users that offer normalized load ``load`` (Erlang)."""
    if load < 0:
        raise ValueError("load must be >= 0")
    return round(load * params.frame_duration * params.rate / (params.packet_bits * params.symbol_duration))


def effective_load(params: SystemParams, n_users: int) -> float:
    """Normalized load actually offered by ``n_users`` users."""
    return n_users * params.packet_bits * params.symbol_duration / (params.frame_duration * params.rate)
