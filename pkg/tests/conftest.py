import pytest

from ecrasim import Protocol, SystemParams

ACCEPTANCE_LINES = []


def make_params(frame_symbols=2000, packet_symbols=100, degree=2, protocol="CRA", snr_db=10.0, rate=2.0, model="SB", imax=10):
    """Params with the given geometry in symbols (1 us symbols)."""
    return SystemParams(
        rate=rate,
        snr_db=snr_db,
        frame_duration=frame_symbols * 1e-6,
        symbol_duration=1e-6,
        packet_bits=int(rate * packet_symbols),
        degree=degree,
        max_iterations=imax,
        protocol=Protocol(protocol),
        decode_model=model,
    )


@pytest.fixture
def small_params():
    return make_params()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
