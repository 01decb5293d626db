"""Command-line front end.

Configuration is layered: built-in defaults, then a flat ``key = value``
file (``--config``), then ``ECRASIM_<KEY>`` environment variables, then
command-line flags.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
import tempfile
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from ecrasim.decoder import DecodeModel
from ecrasim.fixtures import FIXTURES
from ecrasim.frame import DecodeKind, ParameterError, Protocol, SystemParams, users_for_load
from ecrasim.harness import frame_seed, snir_histogram, summary_table, sweep, sweep_csv
from ecrasim.placement import place_frame
from ecrasim.sic import DecodingState, combine_rounds, format_trace, sic_rounds

ENV_PREFIX = "ECRASIM_"
MODES = ("sweep", "histogram", "trace")

# config key -> SystemParams field, for error reporting
_PARAM_KEYS = {
    "rate": "rate",
    "snr_db": "snr_db",
    "frame_duration": "frame_ms",
    "symbol_duration": "symbol_us",
    "packet_bits": "packet_bits",
    "degree": "degree",
    "max_iterations": "imax",
}


class ConfigError(ValueError):
    def __init__(self, key: str, reason: str):
        super().__init__(f"{key}: {reason}")
        self.key = key


@dataclass(frozen=True)
class ExperimentConfig:
    protocol: tuple = ("CRA", "ECRA", "CRDSA")
    model: tuple = ("SB",)
    rate: float = 2.0
    snr_db: float = 10.0
    frame_ms: float = 100.0
    symbol_us: float = 1.0
    packet_bits: int = 1000
    degree: int = 2
    imax: int = 10
    g_min: float = 0.05
    g_max: float = 1.0
    g_step: float = 0.05
    g_list: tuple = ()
    frames: int = 1000
    seed: int = 0
    out: str = "results.csv"
    mode: str = "sweep"
    jobs: int = 1
    fixture: str = ""

    def loads(self) -> list[float]:
        if self.g_list:
            return list(self.g_list)
        n = int(np.floor((self.g_max - self.g_min) / self.g_step + 1e-9)) + 1
        return [round(self.g_min + i * self.g_step, 10) for i in range(n)]

    def params(self, protocol: str | None = None, model: str | None = None) -> SystemParams:
        return SystemParams(
            rate=self.rate,
            snr_db=self.snr_db,
            frame_duration=self.frame_ms * 1e-3,
            symbol_duration=self.symbol_us * 1e-6,
            packet_bits=self.packet_bits,
            degree=self.degree,
            max_iterations=self.imax,
            protocol=protocol or self.protocol[0],
            decode_model=model or self.model[0],
        )


def _convert(key: str, raw):
    kind = {f.name: f.type for f in fields(ExperimentConfig)}[key]
    try:
        if kind == "tuple":
            if isinstance(raw, (tuple, list)):
                items = list(raw)
            else:
                items = [s.strip() for s in str(raw).split(",") if s.strip()]
            if key == "g_list":
                return tuple(float(v) for v in items)
            if key == "protocol":
                return tuple(Protocol(str(v).upper()).value for v in items)
            return tuple(DecodeKind.parse(str(v)).value for v in items)
        if kind == "float":
            return float(raw)
        if kind == "int":
            value = float(raw)
            if value != int(value):
                raise ValueError("not an integer")
            return int(value)
        return str(raw)
    except ValueError as exc:
        raise ConfigError(key, f"invalid value {raw!r} ({exc})") from None


def _normalize_key(key: str) -> str:
    return key.strip().lower().replace("-", "_")


def parse_config_text(text: str) -> dict:
    known = {f.name for f in fields(ExperimentConfig)}
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", "expected key = value")
        key, value = line.split("=", 1)
        key = _normalize_key(key)
        if key not in known:
            raise ConfigError(key, "unknown key")
        values[key] = value.strip()
    return values


def format_config(config: ExperimentConfig) -> str:
    lines = []
    for f in fields(ExperimentConfig):
        value = getattr(config, f.name)
        if isinstance(value, tuple):
            value = ",".join(repr(v) if isinstance(v, float) else str(v) for v in value)
        elif isinstance(value, float):
            value = repr(value)
        lines.append(f"{f.name} = {value}")
    return "\n".join(lines) + "\n"


def validate(config: ExperimentConfig) -> ExperimentConfig:
    if config.mode not in MODES:
        raise ConfigError("mode", f"must be one of {', '.join(MODES)}")
    if not config.protocol:
        raise ConfigError("protocol", "at least one protocol required")
    if not config.model:
        raise ConfigError("model", "at least one decode model required")
    if config.g_step <= 0:
        raise ConfigError("g_step", "must be > 0")
    if config.g_min < 0 or config.g_max < config.g_min:
        raise ConfigError("g_min", "need 0 <= g_min <= g_max")
    if any(g < 0 for g in config.g_list):
        raise ConfigError("g_list", "loads must be >= 0")
    if config.frames < 1:
        raise ConfigError("frames", "must be >= 1")
    if config.jobs < 1:
        raise ConfigError("jobs", "must be >= 1")
    if config.fixture and config.fixture not in FIXTURES:
        raise ConfigError("fixture", f"must be one of {', '.join(FIXTURES)}")
    if config.out != "-":
        parent = Path(config.out).resolve().parent
        if not parent.is_dir() or not os.access(parent, os.W_OK):
            raise ConfigError("out", f"directory {parent} is not writable")
    for proto in config.protocol:
        for model in config.model:
            try:
                config.params(proto, model)
            except ParameterError as exc:
                raise ConfigError(_PARAM_KEYS.get(exc.field, exc.field), exc.reason) from None
    return config


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ecrasim", description="Monte-Carlo simulation of CRA, ECRA and CRDSA.")
    p.add_argument("--config", help="flat key = value configuration file")
    p.add_argument("--protocol", help="comma list of CRA, ECRA, CRDSA")
    p.add_argument("--model", help="comma list of SB, RCB")
    p.add_argument("--rate", help="bits per symbol")
    p.add_argument("--snr-db", help="per-user SNR in dB")
    p.add_argument("--frame-ms", help="frame duration in ms")
    p.add_argument("--symbol-us", help="symbol duration in us")
    p.add_argument("--packet-bits", help="bits per packet")
    p.add_argument("--degree", help="replicas per user")
    p.add_argument("--imax", help="cancellation passes per decoding step")
    p.add_argument("--g-min", help="first offered load (Erlang)")
    p.add_argument("--g-max", help="last offered load (Erlang)")
    p.add_argument("--g-step", help="load step")
    p.add_argument("--g-list", help="explicit comma list of loads (overrides min/max/step)")
    p.add_argument("--frames", help="frames per load point")
    p.add_argument("--seed", help="master seed")
    p.add_argument("--out", help="output file, '-' for stdout")
    p.add_argument("--mode", help="sweep, histogram or trace")
    p.add_argument("--jobs", help="worker processes")
    p.add_argument("--fixture", help="trace mode: slotted-loop or unslotted-loop instead of a random frame")
    return p


def parse_config(argv=None, environ=None) -> ExperimentConfig:
    """Merge defaults, config file, environment and flags into a validated config."""
    environ = os.environ if environ is None else environ
    args = build_parser().parse_args(argv)
    raw = {}
    if args.config:
        try:
            raw.update(parse_config_text(Path(args.config).read_text()))
        except OSError as exc:
            raise ConfigError("config", str(exc)) from None
    known = {f.name for f in fields(ExperimentConfig)}
    for name, value in environ.items():
        if name.startswith(ENV_PREFIX):
            key = _normalize_key(name[len(ENV_PREFIX) :])
            if key not in known:
                raise ConfigError(name, "unknown key")
            raw[key] = value
    for key, value in vars(args).items():
        if key != "config" and value is not None:
            raw[key] = value
    values = {key: _convert(key, value) for key, value in raw.items()}
    return validate(ExperimentConfig(**values))


def _write_atomic(path: str, text: str):
    if path == "-":
        sys.stdout.write(text)
        return
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.resolve().parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def _run_sweep(config: ExperimentConfig) -> str:
    stats = []
    for model in config.model:
        params = config.params(model=model)
        stats += sweep(params, config.loads(), config.frames, config.seed, config.protocol, config.jobs)
    print(summary_table(stats))
    return sweep_csv(stats)


def _run_histogram(config: ExperimentConfig) -> str:
    params = config.params(protocol="ECRA")
    load = config.loads()[0]
    hist = snir_histogram(params, load, config.frames, config.seed, jobs=config.jobs)
    top = len(hist.edges) - 2
    print(f"G={load:g}  peak bin CRA {hist.edges[np.argmax(hist.density_cra)]:.2f} dB, "
          f"ECRA {hist.edges[np.argmax(hist.density_ecra)]:.2f} dB, nominal bin {hist.edges[top]:.2f} dB")
    return hist.to_csv()


def _run_trace(config: ExperimentConfig) -> str:
    chunks = []
    for proto in config.protocol:
        params = config.params(protocol=proto)
        if config.fixture:
            frame = FIXTURES[config.fixture](params)
            if frame.params.protocol.slotted != Protocol(proto).slotted:
                chunks.append(f"# {proto}: fixture {config.fixture} does not apply\n")
                continue
            frame = dataclasses.replace(frame, params=dataclasses.replace(frame.params, protocol=Protocol(proto)))
        else:
            n_users = users_for_load(params, config.loads()[0])
            frame = place_frame(params, n_users, frame_seed(config.seed, 0, 0))
        model = DecodeModel.for_params(params)
        state = sic_rounds(DecodingState(frame, trace=True), model, params.max_iterations)
        if proto == "ECRA":
            combine_rounds(state, model, params.max_iterations)
        chunks.append(f"# {proto} {params.decode_model.value}\n{format_trace(state)}")
        print(f"{proto}: decoded {state.n_decoded}/{frame.n_users}")
    return "".join(chunks)


def run(config: ExperimentConfig) -> int:
    runner = {"sweep": _run_sweep, "histogram": _run_histogram, "trace": _run_trace}[config.mode]
    text = runner(config)
    try:
        _write_atomic(config.out, text)
    except OSError as exc:
        print(f"error: cannot write {config.out}: {exc}", file=sys.stderr)
        return 1
    return 0


def main(argv=None) -> int:
    try:
        config = parse_config(argv)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
