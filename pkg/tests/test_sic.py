import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ecrasim import DecodeModel, FrameInstance, SystemParams, place_cra, place_crdsa, run_ecra, run_sic, sic_pass
from ecrasim.fixtures import slotted_loop, unslotted_loop
from ecrasim.interference import build_occupancy
from ecrasim.sic import DecodingState, final_ratios, format_trace

from conftest import make_params
from oracles import sb_closure

SB = DecodeModel("SB", 2.0)

# t_s = 100, rate 2, 10 dB: decodable iff x <= 7/30.
# User 0 (A) has a clean replica at the end of the frame and its other
# replica blocks B; B's first replica blocks both replicas of C. In scan
# order C and B come first, so each pass frees exactly one more user.
CHAIN = [[1500, 520], [100, 500], [30, 170]]


def chain_frame(**kw):
    return FrameInstance.from_starts(make_params(2000, 100, **kw), CHAIN)


def decoded_set(state):
    return set(np.flatnonzero(state.decoded).tolist())


def test_single_user_first_pass():
    frame = FrameInstance.from_starts(SystemParams(protocol="CRA"), [[100, 50_000]])
    state = DecodingState(frame)
    assert sic_pass(state, SB)
    assert state.decoded.all() and state.iteration == 1


def test_slotted_loop_stalls():
    state = DecodingState(slotted_loop())
    assert not sic_pass(state, SB)
    assert state.n_decoded == 0
    assert run_sic(slotted_loop(), SB, 10).n_decoded == 0


def test_unslotted_loop_cra_stuck():
    state = run_sic(unslotted_loop(protocol="CRA"), SB, 10)
    assert state.n_decoded == 0
    assert state.replica_x(0) == 0.5


def test_unslotted_loop_ecra_resolves():
    state = run_ecra(unslotted_loop(), SB, 10)
    assert state.n_decoded == 2
    assert state.decode_x[0] == 0.0


def test_mirrored_loop_ecra_resolves():
    frame = FrameInstance.from_starts(SystemParams(), [[1000, 10000], [750, 10250]])
    assert run_sic(frame, SB, 10).n_decoded == 0
    assert run_ecra(frame, SB, 10).n_decoded == 2


def test_same_parts_interfered_stays_stuck():
    frame = FrameInstance.from_starts(make_params(2000, 100), [[0, 1000], [50, 1050]])
    state = run_ecra(frame, SB, 10)
    assert state.n_decoded == 0


@pytest.mark.parametrize("imax, expected", [(1, {0}), (2, {0, 1}), (3, {0, 1, 2}), (10, {0, 1, 2})])
def test_chain(imax, expected):
    assert decoded_set(run_sic(chain_frame(), SB, imax)) == expected


def test_chain_matches_closure():
    frame = chain_frame()
    assert decoded_set(run_sic(frame, SB, 10)) == sb_closure(frame, combine=False) == {0, 1, 2}


def test_empty_frame():
    frame = place_cra(SystemParams(), 0, 1)
    for runner in (run_sic, run_ecra):
        state = runner(frame, SB, 10)
        assert state.n_decoded == 0 and state.iteration == 0


def test_step_two_noop_when_step_one_finishes():
    frame = chain_frame()
    assert run_ecra(frame, SB, 10).iteration == run_sic(frame, SB, 10).iteration


def test_trace_text():
    state = run_ecra(unslotted_loop(), SB, 10, trace=True)
    text = format_trace(state)
    assert "combine 0 * 0.0000 10.000 decoded" in text
    assert "cancel user 1 at" in text
    assert text.strip().endswith("decoded 2/2")


frame_args = dict(
    seed=st.integers(0, 2**32 - 1),
    n=st.integers(0, 14),
    t_s=st.integers(4, 30),
    slack=st.integers(0, 300),
    snr_db=st.sampled_from([2.0, 10.0, 20.0]),
    rate=st.sampled_from([1.0, 2.0]),
)


def random_frame(seed, n, t_s, slack, snr_db, rate, model="SB", slotted=False):
    params = make_params(2 * t_s + slack, t_s, snr_db=snr_db, rate=rate, model=model,
                         protocol="CRDSA" if slotted else "CRA")
    return (place_crdsa if slotted else place_cra)(params, n, seed)


@settings(max_examples=120, deadline=None)
@given(**frame_args)
def test_sic_reaches_closure(**kw):
    frame = random_frame(**kw)
    model = DecodeModel.for_params(frame.params)
    assert decoded_set(run_sic(frame, model, 10_000)) == sb_closure(frame, combine=False)
    assert decoded_set(run_ecra(frame, model, 10_000)) == sb_closure(frame, combine=True)


@settings(max_examples=150, deadline=None)
@given(model=st.sampled_from(["SB", "RCB"]), **frame_args)
def test_ecra_superset_of_cra(model, **kw):
    frame = random_frame(model=model, **kw)
    dm = DecodeModel.for_params(frame.params)
    cra, ecra = run_sic(frame, dm, 10), run_ecra(frame, dm, 10)
    assert decoded_set(cra) <= decoded_set(ecra)
    # the SNIR a user last presents to the decoder never gets worse under ECRA
    assert (final_ratios(ecra, combined=True) <= final_ratios(cra, combined=False) + 1e-12).all()


@settings(max_examples=150, deadline=None)
@given(model=st.sampled_from(["SB", "RCB"]), slotted=st.booleans(), imax=st.integers(1, 5), **frame_args)
def test_cancellation_soundness(model, slotted, imax, **kw):
    frame = random_frame(model=model, slotted=slotted, **kw)
    dm = DecodeModel.for_params(frame.params)
    state = (run_sic if slotted else run_ecra)(frame, dm, imax)
    undecoded = np.flatnonzero(~state.decoded)
    occ = build_occupancy(frame, undecoded)
    np.testing.assert_array_equal(state.occupancy, occ)
    t_s = frame.packet_symbols
    for u in undecoded:
        for r, s in enumerate(frame.starts[u]):
            assert state.loads[u * frame.params.degree + r] == occ[s : s + t_s].sum() - t_s


@settings(max_examples=60, deadline=None)
@given(model=st.sampled_from(["SB", "RCB"]), **frame_args)
def test_idempotent_and_deterministic(model, **kw):
    frame = random_frame(model=model, **kw)
    dm = DecodeModel.for_params(frame.params)
    state = run_ecra(frame, dm, 10_000)
    before = state.decoded.copy()
    sic_pass(state, dm)
    np.testing.assert_array_equal(state.decoded, before)
    again = run_ecra(random_frame(model=model, **kw), dm, 10_000)
    np.testing.assert_array_equal(again.decoded, before)


def test_slotted_collisions_are_all_or_nothing():
    params = SystemParams(protocol="CRDSA")
    frame = place_crdsa(params, 150, seed=5)
    state = DecodingState(frame)
    assert set(np.unique(state.loads % 500)) == {0}
