"""Pytest configuration and fixtures."""

import math
from collections.abc import Callable

import pytest

from config import settings
from data.factories import ImpairmentFactory
from dsp.impair import apply_rx_iq
from dsp.tfit import build_frame
from harness.pipeline import frame_power, hub_transmit, propagate, slot_traces
from models.estimate import GodardConfig, SlotTrace
from models.experiment import ExperimentConfig, FrameLocation
from models.impairment import ImpairmentSet
from models.link import ChannelConfig
from models.signal import DualPolFrame
from models.tfit import Polarization, TfitPlan
from utils.logger import get_logger

logger = get_logger(__name__, settings.log_level)

SlotBuilder = Callable[[ImpairmentSet, ChannelConfig], dict[Polarization, list[SlotTrace]]]


@pytest.fixture(scope="session")
def plan_2sps() -> TfitPlan:
    """Training frame generated directly at 2 samples/symbol around DC."""
    return TfitPlan(sc_center_hz=0.0, samples_per_symbol_gen=2)


@pytest.fixture(scope="session")
def godard_cfg(plan_2sps: TfitPlan) -> GodardConfig:
    """Detector settings matching one slot of the 2 samples/symbol frame."""
    return GodardConfig.from_plan(plan_2sps)


@pytest.fixture(scope="session")
def rotating_channel() -> ChannelConfig:
    """Noiseless channel with a 100 MHz frequency offset and no phase noise."""
    return ChannelConfig(freq_offset_hz=100e6, linewidth_hz=0.0, osnr_db=math.inf)


@pytest.fixture(scope="function")
def experiment_cfg() -> ExperimentConfig:
    """Default full-chain experiment with a single trial per point."""
    return ExperimentConfig(trials_per_point=1)


@pytest.fixture(scope="function")
def seeded_factories() -> None:
    """Reproducible random impairments for the duration of a test."""
    ImpairmentFactory.seed(1234)


@pytest.fixture(scope="session")
def make_slots(plan_2sps: TfitPlan) -> SlotBuilder:
    """Build impaired slot traces of the 2 samples/symbol frame.

    Tx impairments, laser offset and noise, then Rx impairments are applied
    to the whole frame before it is cut into slots at known positions.
    """

    def _build(impairments: ImpairmentSet, channel: ChannelConfig) -> dict[Polarization, list[SlotTrace]]:
        frame = build_frame(plan_2sps)
        power = frame_power(frame)
        frame = hub_transmit(frame, impairments)
        frame = propagate(frame, channel, plan_2sps.baud_rate_hz, power)
        frame = DualPolFrame(
            **{pol.value: apply_rx_iq(getattr(frame, pol.value), impairments.rx(pol)) for pol in Polarization}
        )
        location = FrameLocation(start=0, slot_len=plan_2sps.slot_len_samples(), n_blocks=plan_2sps.n_blocks)
        logger.info(f"Built slots for {impairments.model_dump()}")
        return slot_traces(frame, location, plan_2sps)

    return _build
