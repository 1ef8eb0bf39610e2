"""DSCM multiplexing, optical channel and LO subcarrier selection."""

import logging
import math
from collections.abc import Callable

import numpy as np

from dsp.core import apply_frequency_response, frequency_axis, gaussian_noise, resample
from models.error import ConfigurationError, SpectralFitError
from models.link import (
    CARRIER_WAVELENGTH_M,
    OSNR_REFERENCE_BANDWIDTH_HZ,
    SPEED_OF_LIGHT_M_S,
    ChannelConfig,
    SubcarrierPlan,
)
from models.signal import SampleTrace
from utils.logger import Logger

LASER_STREAM = 1
NOISE_STREAM = 2


def rrc_response(freqs_hz: np.ndarray, baud_hz: float, rolloff: float) -> np.ndarray:
    """Root-raised-cosine amplitude response with unit passband gain."""
    f = np.abs(freqs_hz) / baud_hz
    low = (1 - rolloff) / 2
    high = (1 + rolloff) / 2
    response = np.zeros_like(f)
    response[f <= low] = 1.0
    if rolloff > 0:
        edge = (f > low) & (f <= high)
        response[edge] = np.sqrt(0.5 * (1 + np.cos(np.pi / rolloff * (f[edge] - low))))
    return response


def mux_subcarriers(baseband_signals: list[SampleTrace], plan: SubcarrierPlan) -> SampleTrace:
    """Sum of subcarrier basebands shifted to their centre frequencies."""
    if len(baseband_signals) != plan.n_sc:
        raise ConfigurationError(f"expected {plan.n_sc} subcarrier signals, got {len(baseband_signals)}")
    first = baseband_signals[0]
    for trace in baseband_signals[1:]:
        if len(trace) != len(first) or trace.sample_rate_hz != first.sample_rate_hz:
            raise ConfigurationError("subcarrier signals must share length and sample rate")
    if plan.max_abs_frequency_hz >= first.sample_rate_hz / 2:
        raise SpectralFitError(
            f"DSCM band edge {plan.max_abs_frequency_hz / 1e9:.2f} GHz exceeds Nyquist "
            f"{first.sample_rate_hz / 2e9:.2f} GHz"
        )

    t = first.time_axis()
    composite = np.zeros(len(first), dtype=np.complex128)
    for trace, center in zip(baseband_signals, plan.centers_hz, strict=True):
        composite += trace.samples * np.exp(2j * np.pi * center * t)
    return first.with_samples(composite)


def laser_phase(n: int, sample_rate_hz: float, cfg: ChannelConfig) -> np.ndarray:
    """Wiener phase noise with increment variance 2*pi*linewidth/sample_rate."""
    if cfg.linewidth_hz == 0:
        return np.zeros(n)
    generator = cfg.seed.child(LASER_STREAM).generator()
    increments = generator.standard_normal(n) * math.sqrt(2 * math.pi * cfg.linewidth_hz / sample_rate_hz)
    return np.cumsum(increments)


def _laser_rotation(trace: SampleTrace, cfg: ChannelConfig) -> np.ndarray:
    phase = 2 * np.pi * cfg.freq_offset_hz * trace.time_axis() + laser_phase(len(trace), trace.sample_rate_hz, cfg)
    phase += cfg.carrier_phase_rad
    return np.exp(1j * phase)


def apply_laser(trace: SampleTrace, cfg: ChannelConfig) -> SampleTrace:
    """Frequency offset, phase noise and carrier phase of the Tx/LO laser pair."""
    if cfg.laser_free:
        return trace
    return trace.with_samples(trace.samples * _laser_rotation(trace, cfg))


def noise_variance(signal_power: float, sample_rate_hz: float, osnr_db: float) -> float:
    """Per-sample noise variance giving ``osnr_db`` in the 12.5 GHz reference band."""
    osnr = 10 ** (osnr_db / 10)
    return signal_power * sample_rate_hz / (osnr * OSNR_REFERENCE_BANDWIDTH_HZ)


def in_band_snr_db(osnr_db: float, signal_band_hz: float) -> float:
    return osnr_db + 10 * math.log10(OSNR_REFERENCE_BANDWIDTH_HZ / signal_band_hz)


def add_osnr_noise(
    trace: SampleTrace,
    cfg: ChannelConfig,
    signal_band_hz: float,
    signal_power: float | None = None,
    stream: int = 0,
) -> SampleTrace:
    """Add white circular Gaussian noise at the configured OSNR.

    ``signal_power`` defaults to the trace's mean power; ``stream`` separates
    noise draws of different polarizations or captures.
    """
    if signal_band_hz <= 0:
        raise ConfigurationError(f"signal band must be positive, got {signal_band_hz}")
    if cfg.noiseless:
        return trace
    power = trace.power() if signal_power is None else signal_power
    variance = noise_variance(power, trace.sample_rate_hz, cfg.osnr_db)
    noise = gaussian_noise(len(trace), variance, cfg.seed.child(NOISE_STREAM).child(stream), trace.sample_rate_hz)
    in_band_noise = variance * signal_band_hz / trace.sample_rate_hz
    mean_power = trace.power()
    applied = 10 * math.log10(mean_power / in_band_noise) if mean_power > 0 else -math.inf
    Logger.log(
        f"OSNR {cfg.osnr_db:.1f} dB over {signal_band_hz / 1e9:.2f} GHz: in-band SNR "
        f"{in_band_snr_db(cfg.osnr_db, signal_band_hz):.2f} dB on the reference power {power:.3e}, "
        f"{applied:.2f} dB on the trace mean power {mean_power:.3e}",
        level=logging.DEBUG,
    )
    return trace.with_samples(trace.samples + noise.samples)


def cd_beta_s2(cfg: ChannelConfig) -> float:
    """lambda^2 * D * L / c in s^2 (zero when CD is disabled)."""
    return CARRIER_WAVELENGTH_M**2 * cfg.accumulated_dispersion_s_per_m / SPEED_OF_LIGHT_M_S


def channel_phase(freq_hz: np.ndarray | float, cfg: ChannelConfig) -> np.ndarray | float:
    """Phase Theta(f) of the all-pass channel H(f) = exp(j Theta(f)): CD plus device response."""
    omega = 2 * np.pi * np.asarray(freq_hz)
    cubic = cfg.device_cubic_ps3 * 1e-36
    return -np.pi * cd_beta_s2(cfg) * np.asarray(freq_hz) ** 2 - cubic * omega**3 / 6


def apply_cd(trace: SampleTrace, cfg: ChannelConfig) -> SampleTrace:
    """Chromatic dispersion all-pass H(f) = exp(-j pi lambda^2 D L f^2 / c)."""
    beta = cd_beta_s2(cfg)
    if beta == 0:
        return trace
    freqs = frequency_axis(len(trace), trace.sample_rate_hz)
    return apply_frequency_response(trace, np.exp(-1j * np.pi * beta * freqs**2))


def apply_device_response(trace: SampleTrace, cfg: ChannelConfig) -> SampleTrace:
    """Cubic all-pass phase exp(-j b3 (2 pi f)^3 / 6) of the transceiver front end."""
    if cfg.device_cubic_ps3 == 0:
        return trace
    omega = 2 * np.pi * frequency_axis(len(trace), trace.sample_rate_hz)
    return apply_frequency_response(trace, np.exp(-1j * cfg.device_cubic_ps3 * 1e-36 * omega**3 / 6))


def cd_group_delay_s(freq_hz: float, cfg: ChannelConfig) -> float:
    """CD group delay at ``freq_hz`` relative to the optical carrier."""
    return cd_beta_s2(cfg) * freq_hz


def tone_timing_offset_s(phase_fn: Callable[[float], float], center_hz: float, tone_hz: float) -> float:
    """Timing advance a clock tone at center +/- tone picks up from an all-pass phase.

    Equals what the Godard detector reads: [Theta(fc + f) - Theta(fc - f)] / (4 pi f).
    """
    return float((phase_fn(center_hz + tone_hz) - phase_fn(center_hz - tone_hz)) / (4 * np.pi * tone_hz))


def select_subcarrier(
    trace: SampleTrace,
    plan: SubcarrierPlan,
    sc_index: int,
    cfg: ChannelConfig | None = None,
    samples_per_symbol: int = 2,
) -> SampleTrace:
    """Tune the LO to one subcarrier, filter it and resample to ``samples_per_symbol``.

    Without ``cfg`` the LO sits at the nominal centre, so the laser offset and
    phase noise stay on the baseband. With ``cfg`` the LO also tracks the
    configured laser offset and phase-noise realization.
    """
    center = plan.center_hz(sc_index)
    mixer = np.exp(-2j * np.pi * center * trace.time_axis())
    if cfg is not None and not cfg.laser_free:
        mixer = mixer * np.conj(_laser_rotation(trace, cfg))
    mixed = trace.with_samples(trace.samples * mixer)

    freqs = frequency_axis(len(trace), trace.sample_rate_hz)
    filtered = apply_frequency_response(mixed, rrc_response(freqs, plan.per_sc_baud_hz, plan.rrc_rolloff))
    Logger.add_stage(f"select SC-{sc_index}", filtered.samples, filtered.sample_rate_hz)
    return resample(filtered, samples_per_symbol * plan.per_sc_baud_hz)
