"""Packet decode decisions under the Shannon bound or the random coding bound."""

from __future__ import annotations

import functools
import io
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from ecrasim.frame import DecodeKind

# relative slack on the Shannon threshold so that SNIRs landing exactly on
# it are not rejected by float rounding
_THRESHOLD_RTOL = 1e-12


@dataclass(frozen=True)
class DecodeModel:
    kind: DecodeKind
    rate: float
    block_symbols: int = 1

    def __post_init__(self):
        object.__setattr__(self, "kind", DecodeKind.parse(self.kind))
        if not self.rate > 0:
            raise ValueError("rate must be > 0")
        if self.block_symbols < 1:
            raise ValueError("block_symbols must be >= 1")

    @classmethod
    def for_params(cls, params) -> "DecodeModel":
        return cls(params.decode_model, params.rate, params.geometry.packet_symbols)


def shannon_threshold(rate: float) -> float:
    """Smallest SNIR whose capacity log2(1 + SNIR) reaches ``rate``."""
    return 2.0**rate - 1.0


def gallager_e0(rho, snir: float):
    """Gaussian-input Gallager function for the complex AWGN channel, bits/symbol."""
    return rho * np.log2(1.0 + snir / (1.0 + rho))


def error_exponent(snir: float, rate: float) -> float:
    """Random coding exponent max over 0 <= rho <= 1 of E0(rho) - rho * rate."""
    if snir <= 0 or math.log2(1.0 + snir) <= rate:
        return 0.0

    def neg(rho):
        return -(gallager_e0(rho, snir) - rho * rate)

    res = minimize_scalar(neg, bounds=(0.0, 1.0), method="bounded", options={"xatol": 1e-10})
    # the bounded search never evaluates the endpoints themselves
    return max(0.0, -float(res.fun), -float(neg(1.0)))


def rcb_per(snir: float, rate: float, n: int) -> float:
    """Random-coding upper bound on block error probability, capped at 1."""
    return _rcb_per_cached(round(float(snir), 6), float(rate), int(n))


@functools.lru_cache(maxsize=65536)
def _rcb_per_cached(snir: float, rate: float, n: int) -> float:
    exponent = error_exponent(snir, rate)
    return min(1.0, 2.0 ** (-n * exponent))


def decide(model: DecodeModel, snir: float, draw: float) -> bool:
    """True if the packet is decoded.

    ``draw`` is the user's uniform decode-luck value fixed at frame creation;
    the Shannon bound ignores it.
    """
    if model.kind is DecodeKind.SHANNON:
        return snir >= shannon_threshold(model.rate) * (1.0 - _THRESHOLD_RTOL)
    return draw >= rcb_per(snir, model.rate, model.block_symbols)


def per_curve(model: DecodeModel, snr_db) -> np.ndarray:
    """PER of ``model`` at each SNIR (dB) in ``snr_db``; the Shannon bound gives a 0/1 step."""
    out = []
    for db in np.atleast_1d(snr_db):
        s = 10 ** (db / 10)
        if model.kind is DecodeKind.SHANNON:
            out.append(0.0 if decide(model, s, 0.0) else 1.0)
        else:
            out.append(rcb_per(s, model.rate, model.block_symbols))
    return np.asarray(out)


def per_curve_csv(model: DecodeModel, snr_db) -> str:
    buf = io.StringIO()
    buf.write("snir_db,snir_linear,per\n")
    for db, per in zip(np.atleast_1d(snr_db), per_curve(model, snr_db)):
        buf.write(f"{db:.4f},{10 ** (db / 10):.6g},{per:.6e}\n")
    return buf.getvalue()
