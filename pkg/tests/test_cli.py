import csv

import pytest
from hypothesis import given, settings, strategies as st

from ecrasim.cli import ConfigError, ExperimentConfig, format_config, main, parse_config, run


def parse(argv, env=None):
    return parse_config(argv, environ=env or {})


def test_defaults_are_baseline_campaign():
    cfg = parse([])
    assert cfg == ExperimentConfig()
    p = cfg.params()
    assert (p.rate, p.snr_db, p.packet_bits, p.degree, p.max_iterations) == (2.0, 10.0, 1000, 2, 10)
    assert p.frame_duration == pytest.approx(0.1) and p.symbol_duration == pytest.approx(1e-6)
    assert cfg.frames == 1000


def test_low_snr_campaign_flags():
    cfg = parse(["--rate", "1", "--snr-db", "2"])
    assert cfg.rate == 1.0 and cfg.snr_db == 2.0
    assert cfg.params().geometry.packet_symbols == 1000


def test_degree_one_rejected(capsys):
    with pytest.raises(ConfigError) as err:
        parse(["--degree", "1"])
    assert err.value.key == "degree"
    assert main(["--degree", "1"]) == 2
    assert "degree" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv, key",
    [
        (["--g-step", "0"], "g_step"),
        (["--mode", "plot"], "mode"),
        (["--protocol", "IRSA"], "protocol"),
        (["--frames", "0"], "frames"),
        (["--rate", "3"], "rate"),
        (["--frame-ms", "1", "--rate", "1"], "frame_ms"),
        (["--out", "/nonexistent/dir/x.csv"], "out"),
        (["--fixture", "nope"], "fixture"),
    ],
)
def test_invalid_values_name_the_key(argv, key):
    with pytest.raises(ConfigError) as err:
        parse(argv)
    assert err.value.key == key


def test_file_env_flag_layering(tmp_path):
    conf = tmp_path / "exp.conf"
    conf.write_text("# campaign\nrate = 1\nsnr-db = 2\nframes = 50\nprotocol = CRA, ECRA\n")
    cfg = parse(["--config", str(conf), "--frames", "7"], env={"ECRASIM_SNR_DB": "4"})
    assert cfg.rate == 1.0
    assert cfg.snr_db == 4.0
    assert cfg.frames == 7
    assert cfg.protocol == ("CRA", "ECRA")


def test_unknown_keys(tmp_path):
    conf = tmp_path / "exp.conf"
    conf.write_text("bogus = 1\n")
    with pytest.raises(ConfigError, match="bogus"):
        parse(["--config", str(conf)])
    with pytest.raises(ConfigError):
        parse([], env={"ECRASIM_BOGUS": "1"})


def test_load_grid():
    assert parse(["--g-min", "0.1", "--g-max", "0.3", "--g-step", "0.1"]).loads() == [0.1, 0.2, 0.3]
    assert parse(["--g-list", "0.5,1.0"]).loads() == [0.5, 1.0]


@settings(max_examples=40, deadline=None)
@given(
    rate=st.sampled_from([1.0, 2.0, 4.0]),
    snr=st.floats(-5, 30, allow_nan=False),
    protocols=st.lists(st.sampled_from(["CRA", "ECRA", "CRDSA"]), min_size=1, max_size=3, unique=True),
    models=st.lists(st.sampled_from(["SB", "RCB"]), min_size=1, max_size=2, unique=True),
    loads=st.lists(st.floats(0, 3, allow_nan=False), max_size=4),
    frames=st.integers(1, 5000),
    seed=st.integers(0, 2**31),
)
def test_config_round_trip(tmp_path_factory, rate, snr, protocols, models, loads, frames, seed):
    cfg = ExperimentConfig(protocol=tuple(protocols), model=tuple(models), rate=rate, snr_db=snr,
                           g_list=tuple(loads), frames=frames, seed=seed)
    path = tmp_path_factory.mktemp("cfg") / "c.conf"
    path.write_text(format_config(cfg))
    assert parse(["--config", str(path)]) == cfg


def test_sweep_mode_writes_csv(tmp_path, capsys):
    out = tmp_path / "sweep.csv"
    code = main(["--frame-ms", "5", "--g-list", "0.2,0.5", "--frames", "5", "--out", str(out), "--model", "SB,RCB"])
    assert code == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 2 * 3 * 2
    assert {r["protocol"] for r in rows} == {"CRA", "ECRA", "CRDSA"}
    assert {r["model"] for r in rows} == {"SB", "RCB"}
    assert "throughput" in rows[0]
    assert "PER" in capsys.readouterr().out
    assert [p.name for p in tmp_path.iterdir()] == ["sweep.csv"]


def test_histogram_mode(tmp_path):
    out = tmp_path / "hist.csv"
    assert main(["--mode", "histogram", "--frame-ms", "5", "--g-list", "1", "--frames", "5", "--out", str(out)]) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["bin_lo_db", "bin_hi_db", "density_cra", "density_ecra"]
    assert float(rows[-1][0]) == 10.0


def test_trace_mode_fixture(tmp_path):
    out = tmp_path / "trace.txt"
    assert main(["--mode", "trace", "--fixture", "unslotted-loop", "--protocol", "CRA,ECRA", "--out", str(out)]) == 0
    text = out.read_text()
    assert "# CRA SB" in text and "# ECRA SB" in text
    assert "decoded 0/2" in text and "decoded 2/2" in text


def test_trace_mode_random_frame(tmp_path):
    out = tmp_path / "trace.txt"
    assert main(["--mode", "trace", "--g-list", "0.3", "--frame-ms", "5", "--out", str(out)]) == 0
    assert out.read_text().count("decoded ") >= 3


def test_write_failure_exit_code(tmp_path):
    target = tmp_path / "adir"
    target.mkdir()
    cfg = parse(["--frame-ms", "5", "--g-list", "0.2", "--frames", "2", "--out", str(target)])
    assert run(cfg) == 1
