"""Frame-level Monte-Carlo simulator for CRA, ECRA and CRDSA random access."""

from ecrasim.frame import (
    ChannelModel,
    DecodeKind,
    FrameGeometry,
    ParameterError,
    Protocol,
    SystemParams,
    derive_geometry,
    effective_load,
    users_for_load,
)
from ecrasim.placement import FrameInstance, ReplicaPlacement, place_cra, place_crdsa, place_frame
from ecrasim.decoder import DecodeModel, decide, rcb_per, shannon_threshold
from ecrasim.sic import DecodingState, run_ecra, run_sic, sic_pass
from ecrasim.harness import SweepStats, simulate_frame, snir_histogram, sweep

__version__ = "0.1.0"
