"""Successive interference cancellation and the ECRA combining stage.

Step 1 (shared by CRA, ECRA and CRDSA) scans the undecoded replicas in
order of start symbol, tries to decode each one against the live
interference and cancels every replica of a decoded user at once. Step 2
(ECRA only) builds for each remaining user a packet from the least
interfered symbols of its replicas and tries to decode that.

Cancellation is ideal. Each invocation of a step is capped at
``max_iterations`` passes; ECRA alternates a combining sweep with a fresh
round of step 1 until nothing more decodes or its sweep cap is reached.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ecrasim.decoder import DecodeModel, decide
from ecrasim.interference import build_occupancy, combined_profile, user_profiles


@dataclass
class TraceEvent:
    iteration: int
    step: str  # "sic" or "combine"
    user: int
    replica: int  # -1 for a combined packet
    x: float
    snir_db: float
    decoded: bool


class DecodingState:
    """Mutable decoding state of one frame.

    ``occupancy`` counts the replica symbols of undecoded users on every
    frame symbol; ``loads`` holds, per replica (row-major ``user * d + r``),
    the total number of foreign symbols currently overlapping it, so that
    ``loads / t_s`` is the interference ratio.
    """

    def __init__(self, frame, trace: bool = False):
        self.frame = frame
        self.channel = frame.params.channel
        self.t_s = frame.packet_symbols
        self.degree = frame.params.degree
        n = frame.n_users
        self.decoded = np.zeros(n, dtype=bool)
        self.decode_x = np.full(n, np.nan)
        self.iteration = 0
        self.trace: list[TraceEvent] | None = [] if trace else None

        self.occupancy = build_occupancy(frame)
        flat = frame.starts.ravel()
        cum = np.concatenate(([0], np.cumsum(self.occupancy, dtype=np.int64)))
        self.loads = cum[flat + self.t_s] - cum[flat] - self.t_s
        # scan order: by start symbol, ties broken by user then replica index
        self._order = np.argsort(flat, kind="stable")
        self._sorted_starts = flat[self._order]
        # replicas overlapping replica i sit at sorted positions [_lo[i], _hi[i])
        self._lo = np.searchsorted(self._sorted_starts, flat - self.t_s, side="right")
        self._hi = np.searchsorted(self._sorted_starts, flat + self.t_s, side="left")
        self._scan = [(int(i) // self.degree, int(i)) for i in self._order]

    @property
    def n_decoded(self) -> int:
        return int(self.decoded.sum())

    @property
    def done(self) -> bool:
        return bool(self.decoded.all())

    def replica_x(self, index: int) -> float:
        return self.loads[index] / self.t_s

    def snir(self, x: float) -> float:
        p = self.channel.signal_power
        return p / (x * p + self.channel.noise_power)

    def cancel(self, user: int, x: float):
        """Remove every replica of ``user`` (decoded at ratio ``x``) from the frame."""
        self.decoded[user] = True
        self.decode_x[user] = x
        t_s = self.t_s
        for index in range(user * self.degree, (user + 1) * self.degree):
            start = self.frame.starts.flat[index]
            self.occupancy[start : start + t_s] -= 1
            lo, hi = self._lo[index], self._hi[index]
            self.loads[self._order[lo:hi]] -= t_s - np.abs(self._sorted_starts[lo:hi] - start)

    def _record(self, step, user, replica, x, snir, ok):
        if self.trace is not None:
            self.trace.append(TraceEvent(self.iteration, step, user, replica, x, 10 * np.log10(snir), ok))


def sic_pass(state: DecodingState, model: DecodeModel) -> bool:
    """One scan over the frame; returns True if any user was decoded."""
    state.iteration += 1
    draws = state.frame.decode_draws
    progressed = False
    for user, index in state._scan:
        if state.decoded[user]:
            continue
        x = state.replica_x(index)
        snir = state.snir(x)
        ok = decide(model, snir, draws[user])
        state._record("sic", user, index % state.degree, x, snir, ok)
        if ok:
            state.cancel(user, x)
            progressed = True
    return progressed


def combine_pass(state: DecodingState, model: DecodeModel) -> bool:
    """One ECRA combining sweep over the remaining users."""
    state.iteration += 1
    draws = state.frame.decode_draws
    first_start = state.frame.starts.min(axis=1)
    progressed = False
    for user in sorted(np.flatnonzero(~state.decoded), key=lambda u: (first_start[u], u)):
        profile = combined_profile(user_profiles(state.frame, state.occupancy, user))
        x = float(profile.mean())
        snir = state.snir(x)
        ok = decide(model, snir, draws[user])
        state._record("combine", int(user), -1, x, snir, ok)
        if ok:
            state.cancel(int(user), x)
            progressed = True
    return progressed


def sic_rounds(state: DecodingState, model: DecodeModel, max_iterations: int) -> DecodingState:
    """Repeat :func:`sic_pass` until done, stalled or ``max_iterations`` passes."""
    for _ in range(max_iterations):
        if state.done or not sic_pass(state, model):
            break
    return state


def combine_rounds(state: DecodingState, model: DecodeModel, max_iterations: int) -> DecodingState:
    """ECRA step 2 on a state already processed by step 1."""
    for _ in range(max_iterations):
        if state.done or not combine_pass(state, model):
            break
        sic_rounds(state, model, max_iterations)
    return state


def run_sic(frame, model: DecodeModel | None = None, max_iterations: int | None = None, trace: bool = False) -> DecodingState:
    model = model or DecodeModel.for_params(frame.params)
    max_iterations = max_iterations or frame.params.max_iterations
    return sic_rounds(DecodingState(frame, trace), model, max_iterations)


def run_ecra(frame, model: DecodeModel | None = None, max_iterations: int | None = None, trace: bool = False) -> DecodingState:
    model = model or DecodeModel.for_params(frame.params)
    max_iterations = max_iterations or frame.params.max_iterations
    state = run_sic(frame, model, max_iterations, trace)
    return combine_rounds(state, model, max_iterations)


def final_ratios(state: DecodingState, combined: bool) -> np.ndarray:
    """Per-user interference ratio last presented to the decoder.

    Decoded users keep the ratio they were decoded at. Undecoded users get
    their least interfered single replica (``combined=False``) or their
    combined packet (``combined=True``) against the final residual frame.
    """
    out = state.decode_x.copy()
    t_s, d = state.t_s, state.degree
    for user in np.flatnonzero(~state.decoded):
        if combined:
            profile = combined_profile(user_profiles(state.frame, state.occupancy, user))
            x = float(profile.mean())
        else:
            x = state.loads[user * d : (user + 1) * d].min() / t_s
        out[user] = x
    return out


def final_snirs(state: DecodingState, combined: bool) -> np.ndarray:
    p, n = state.channel.signal_power, state.channel.noise_power
    return p / (final_ratios(state, combined) * p + n)


def format_trace(state: DecodingState) -> str:
    lines = ["iteration step user replica x snir_db decision"]
    for ev in state.trace or []:
        rep = "*" if ev.replica < 0 else str(ev.replica)
        verdict = "decoded" if ev.decoded else "failed"
        lines.append(f"{ev.iteration} {ev.step} {ev.user} {rep} {ev.x:.4f} {ev.snir_db:.3f} {verdict}")
        if ev.decoded:
            starts = " ".join(str(int(s)) for s in state.frame.starts[ev.user])
            lines.append(f"  cancel user {ev.user} at {starts}")
    lines.append(f"decoded {state.n_decoded}/{state.frame.n_users}")
    return "\n".join(lines) + "\n"
