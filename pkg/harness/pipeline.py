"""End-to-end hub -> channel -> leaf chain and the leaf-side estimation sequence."""

import logging

import numpy as np

from dsp.compensate import Side, compensate_rx, precompensate_tx, spec_from_estimates
from dsp.estimate import estimate_rx_quadrature, rx_intermediates, tx_intermediates
from dsp.impair import apply_rx_iq, apply_tx_iq
from dsp.link import add_osnr_noise, apply_cd, apply_device_response, apply_laser, select_subcarrier
from dsp.payload import demodulate, generate_payload, merge_ber
from dsp.tfit import build_dscm_frame
from harness.detect import frame_detect
from models.compensation import CompensationSpec
from models.error import DetectionError
from models.estimate import EstimateReport, GodardConfig, PolarizationEstimate, SlotTrace, mean_db, mean_tau
from models.experiment import EstimatorOptions, ExperimentConfig, FrameLocation
from models.impairment import ImpairmentSet
from models.link import ChannelConfig
from models.payload import BerResult
from models.signal import DualPolFrame, RngStream, SampleTrace
from models.tfit import Polarization, SlotId, TfitPlan
from utils.logger import Logger

LEAF_SAMPLES_PER_SYMBOL = 2
MIN_ROTATION_TURNS = 4.0

TRAINING_NOISE_STREAMS = (0, 1)
PAYLOAD_NOISE_STREAMS = (2, 3)


def pad_guard(frame: DualPolFrame, guard_samples: int) -> DualPolFrame:
    """Zero guard interval before and after both polarizations."""
    if guard_samples == 0:
        return frame
    return frame.map(lambda t: t.with_samples(np.pad(t.samples, guard_samples)))


def frame_power(frame: DualPolFrame) -> float:
    """Mean power summed over both polarizations.

    For a training frame only one polarization is active at a time, so this is
    the power of the active polarization.
    """
    return frame.x.power() + frame.y.power()


def rotation_turns(channel: ChannelConfig, plan: TfitPlan) -> float:
    """Frequency-offset turns within one slot."""
    return abs(channel.freq_offset_hz) * plan.slot_duration_s


def check_rotation(channel: ChannelConfig, plan: TfitPlan) -> None:
    turns = rotation_turns(channel, plan)
    if turns < MIN_ROTATION_TURNS:
        Logger.log(
            f"Frequency offset gives only {turns:.2f} turns per slot; Rx power ratios depend on carrier phase",
            level=logging.WARNING,
        )


def hub_transmit(
    frame: DualPolFrame, impairments: ImpairmentSet, tx_specs: dict[Polarization, CompensationSpec] | None = None
) -> DualPolFrame:
    """Optional Tx pre-compensation followed by the hub's Tx IQ impairments."""
    traces = {}
    for pol in Polarization:
        trace = getattr(frame, pol.value)
        if tx_specs is not None:
            trace = precompensate_tx(trace, tx_specs[pol])
        traces[pol.value] = apply_tx_iq(trace, impairments.tx(pol))
    return DualPolFrame(**traces)


def propagate(
    frame: DualPolFrame,
    channel: ChannelConfig,
    signal_band_hz: float,
    pol_power: float,
    noise_streams: tuple[int, int] = TRAINING_NOISE_STREAMS,
) -> DualPolFrame:
    """Fiber CD, device response, laser offset and phase noise, then ASE noise per polarization.

    ``pol_power`` is the power of one polarization while it carries signal;
    the single-polarization OSNR refers to it.
    """
    frame = frame.map(lambda t: apply_laser(apply_device_response(apply_cd(t, channel), channel), channel))
    x = add_osnr_noise(frame.x, channel, signal_band_hz, pol_power, stream=noise_streams[0])
    y = add_osnr_noise(frame.y, channel, signal_band_hz, pol_power, stream=noise_streams[1])
    Logger.add_stage("channel", x.samples, x.sample_rate_hz, osnr_db=channel.osnr_db)
    return DualPolFrame(x=x, y=y)


def leaf_receive(
    frame: DualPolFrame,
    cfg: ExperimentConfig,
    sc_index: int,
    impairments: ImpairmentSet,
    rx_specs: dict[Polarization, CompensationSpec] | None = None,
) -> DualPolFrame:
    """LO selection of one subcarrier, the leaf's Rx IQ impairments and optional Rx compensation."""
    traces = {}
    for pol in Polarization:
        trace = select_subcarrier(getattr(frame, pol.value), cfg.subcarriers, sc_index, None, LEAF_SAMPLES_PER_SYMBOL)
        trace = apply_rx_iq(trace, impairments.rx(pol))
        if rx_specs is not None:
            trace = compensate_rx(trace, rx_specs[pol])
        traces[pol.value] = trace
    return DualPolFrame(**traces)


def training_capture(
    cfg: ExperimentConfig, impairments: ImpairmentSet, channel: ChannelConfig, sc_index: int
) -> DualPolFrame:
    """2 samples/symbol capture of the training frame at one leaf."""
    frame = build_dscm_frame(cfg.tfit, cfg.subcarriers.centers_hz)
    power = frame_power(frame)
    frame = pad_guard(frame, cfg.guard_symbols * cfg.tfit.samples_per_symbol_gen)
    frame = hub_transmit(frame, impairments)
    frame = propagate(frame, channel, cfg.subcarriers.occupied_bandwidth_hz, power, TRAINING_NOISE_STREAMS)
    return leaf_receive(frame, cfg, sc_index, impairments)


def slot_traces(
    capture: DualPolFrame, location: FrameLocation, plan: TfitPlan
) -> dict[Polarization, list[SlotTrace]]:
    """Cut the active slots of every block out of the capture, grouped by polarization."""
    grouped: dict[Polarization, list[SlotTrace]] = {pol: [] for pol in Polarization}
    for block in range(location.n_blocks):
        for slot in SlotId:
            start = location.slot_start(block, slot.index)
            if start + location.slot_len > len(capture):
                raise DetectionError(f"slot {slot.value} of block {block} runs past the end of the capture")
            source: SampleTrace = getattr(capture, slot.polarization.value)
            grouped[slot.polarization].append(
                SlotTrace(slot=slot, block=block, trace=source.window(start, location.slot_len))
            )
    return grouped


def estimate_polarization(
    pol: Polarization, slots: list[SlotTrace], godard: GodardConfig, apply_gsop: bool
) -> PolarizationEstimate:
    """Rx estimation, Rx compensation of the slots, then Tx estimation."""
    rx_timings, rx_ratios = rx_intermediates(slots, godard)
    joined = SampleTrace(
        samples=np.concatenate([item.trace.samples for item in slots]),
        sample_rate_hz=slots[0].trace.sample_rate_hz,
    )
    quad = estimate_rx_quadrature(joined)
    rx_spec = CompensationSpec(
        tau_s=mean_tau(rx_timings),
        gain_correction=10 ** (mean_db(rx_ratios) / 20),
        apply_gsop_first=apply_gsop,
    )
    compensated = [
        SlotTrace(slot=item.slot, block=item.block, trace=compensate_rx(item.trace, rx_spec)) for item in slots
    ]
    tx_timings, tx_ratios = tx_intermediates(compensated, godard)
    return PolarizationEstimate(
        polarization=pol,
        rx_timings=rx_timings,
        rx_ratios=rx_ratios,
        tx_timings=tx_timings,
        tx_ratios=tx_ratios,
        quad_error_rx_rad=quad,
    )


def estimate_all(
    capture: DualPolFrame,
    location: FrameLocation,
    plan: TfitPlan,
    options: EstimatorOptions | None = None,
    sc_index: int = 1,
) -> EstimateReport:
    """Leaf estimation sequence: for each polarization Rx first, compensate, then Tx."""
    options = options or EstimatorOptions()
    godard = GodardConfig.from_plan(
        plan,
        LEAF_SAMPLES_PER_SYMBOL,
        n_avg_bins=options.n_avg_bins,
        min_tone_snr_db=options.min_tone_snr_db,
        taper=options.taper,
    )
    grouped = slot_traces(capture, location, plan)
    estimates = {pol: estimate_polarization(pol, grouped[pol], godard, options.gsop) for pol in Polarization}
    report = EstimateReport(
        sc_index=sc_index,
        n_blocks_used=location.n_blocks,
        x=estimates[Polarization.X],
        y=estimates[Polarization.Y],
    )
    Logger.add_report(report, label=f"SC-{sc_index}")
    if report.out_of_range:
        Logger.log(
            f"SC-{sc_index}: a timing estimate is near its phase-wrap limit, skew may be aliased",
            level=logging.WARNING,
        )
    return report


def estimate_leaf(
    cfg: ExperimentConfig, impairments: ImpairmentSet, channel: ChannelConfig, sc_index: int | None = None
) -> EstimateReport:
    """Simulate, detect and estimate at one leaf."""
    sc_index = sc_index or cfg.sc_index
    check_rotation(channel, cfg.tfit)
    capture = training_capture(cfg, impairments, channel, sc_index)
    location = frame_detect(capture, cfg.tfit, LEAF_SAMPLES_PER_SYMBOL)
    return estimate_all(capture, location, cfg.tfit, cfg.estimator, sc_index)


def leaf_rx_specs(report: EstimateReport, apply_gsop: bool = False) -> dict[Polarization, CompensationSpec]:
    return {pol: spec_from_estimates(report, Side.RX, pol, apply_gsop) for pol in Polarization}


def payload_ber(
    cfg: ExperimentConfig,
    impairments: ImpairmentSet,
    channel: ChannelConfig,
    rng: RngStream,
    tx_specs: dict[Polarization, CompensationSpec] | None = None,
    rx_specs: dict[int, dict[Polarization, CompensationSpec]] | None = None,
) -> dict[int, BerResult]:
    """BER of every subcarrier in ``cfg.ber_subcarriers`` over one payload capture.

    ``rx_specs`` maps a subcarrier index to the Rx compensation of that leaf.
    """
    sps = cfg.tfit.samples_per_symbol_gen
    frames_x, composite_x = generate_payload(cfg.payload_symbols, cfg.subcarriers, rng.child(0), sps)
    frames_y, composite_y = generate_payload(cfg.payload_symbols, cfg.subcarriers, rng.child(1), sps)
    frame = DualPolFrame(x=composite_x, y=composite_y)
    power = frame_power(frame) / 2
    frame = hub_transmit(frame, impairments, tx_specs)
    frame = propagate(frame, channel, cfg.subcarriers.occupied_bandwidth_hz, power, PAYLOAD_NOISE_STREAMS)

    results: dict[int, BerResult] = {}
    for sc_index in cfg.ber_subcarriers:
        leaf_specs = rx_specs.get(sc_index) if rx_specs is not None else None
        received = leaf_receive(frame, cfg, sc_index, impairments, leaf_specs)
        per_pol = [
            demodulate(received.x, frames_x[sc_index - 1], channel, LEAF_SAMPLES_PER_SYMBOL),
            demodulate(received.y, frames_y[sc_index - 1], channel, LEAF_SAMPLES_PER_SYMBOL),
        ]
        results[sc_index] = merge_ber(per_pol)
        Logger.log(f"SC-{sc_index} BER {results[sc_index].ber:.3e}", level=logging.DEBUG)
    return results
