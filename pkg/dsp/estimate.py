"""Far-end IQ skew and power-imbalance estimators on received TFIT slots.

Timing is read with a spectral Godard detector: for a clock tone at +/-f the
bins around +f are correlated with the bins 2f below them, and the argument of
the sum divided by 4*pi*f is the tone's timing advance. Rx estimates compare
the I and Q tributaries of one slot; Tx estimates compare the two tones on the
complex trace, and the interleaved slot pair cancels the channel's
frequency-dependent timing.
"""

import logging
import math
from typing import NamedTuple

import numpy as np
from scipy.signal import windows

from dsp.core import forward_transform
from models.error import EstimationError, LowConfidenceError
from models.estimate import GodardConfig, PowerRatio, SlotTrace, TimingEstimate, Tributary, mean_db, mean_tau
from models.signal import SampleTrace, Spectrum
from models.tfit import SlotId
from utils.logger import Logger


class ToneMeasurement(NamedTuple):
    """Godard sum and tone power over one window."""

    correlation: complex
    power: float
    snr_db: float


def slot_spectrum(samples: np.ndarray, sample_rate_hz: float, cfg: GodardConfig) -> Spectrum:
    """Tapered spectrum of one slot tributary or complex trace."""
    if samples.size != cfg.fft_len:
        raise EstimationError(f"slot holds {samples.size} samples, detector expects {cfg.fft_len}")
    if cfg.taper:
        samples = samples * windows.hann(samples.size, sym=False)
    return forward_transform(SampleTrace(samples=samples, sample_rate_hz=sample_rate_hz))


def _nominal_bin(spec: Spectrum, tone_hz: float) -> int:
    k = int(round(tone_hz / spec.bin_spacing_hz))
    if not 0 < 2 * k <= len(spec):
        raise EstimationError(f"tone {tone_hz} Hz outside the spectrum of {spec.sample_rate_hz} Hz")
    return k


def tone_window(spectra: list[Spectrum], tone_hz: float, cfg: GodardConfig) -> np.ndarray:
    """Bins around +tone_hz, widened by the coarse peak-search residual."""
    n = len(spectra[0])
    k = _nominal_bin(spectra[0], tone_hz)
    span = cfg.search_span_bins
    candidates = np.arange(k - span, k + span + 1)
    metric = np.zeros(candidates.size)
    for spec in spectra:
        metric += np.abs(spec.bins[candidates % n]) * np.abs(spec.bins[(candidates - 2 * k) % n])
    residual = int(candidates[int(np.argmax(metric))] - k)
    low = k + min(0, residual) - cfg.n_avg_bins
    high = k + max(0, residual) + cfg.n_avg_bins
    return np.arange(low, high + 1)


def _noise_per_bin(spec: Spectrum, window: np.ndarray, k: int, cfg: GodardConfig) -> float:
    n = len(spec)
    guard = 2 * cfg.n_avg_bins
    ring = np.arange(window[0] - guard - 4 * cfg.n_avg_bins, window[-1] + guard + 4 * cfg.n_avg_bins + 1)
    ring = ring[(ring < window[0] - guard) | (ring > window[-1] + guard)]
    values = np.concatenate([np.abs(spec.bins[ring % n]) ** 2, np.abs(spec.bins[(ring - 2 * k) % n]) ** 2])
    # median of an exponential variable is ln(2) times its mean
    return float(np.median(values)) / math.log(2)


def measure_tone(spec: Spectrum, tone_hz: float, cfg: GodardConfig, window: np.ndarray | None = None) -> ToneMeasurement:
    """Godard correlation, window power and tone SNR for one tone."""
    n = len(spec)
    k = _nominal_bin(spec, tone_hz)
    if window is None:
        window = tone_window([spec], tone_hz, cfg)
    upper = spec.bins[window % n]
    lower = spec.bins[(window - 2 * k) % n]
    correlation = complex(np.sum(upper * np.conj(lower)))
    power = float(np.sum(np.abs(upper) ** 2) + np.sum(np.abs(lower) ** 2))

    noise = _noise_per_bin(spec, window, k, cfg) * 2 * window.size
    if noise <= 0:
        snr_db = math.inf
    else:
        excess = power / noise - 1
        snr_db = 10 * math.log10(excess) if excess > 0 else -math.inf
    if snr_db < cfg.min_tone_snr_db:
        raise LowConfidenceError(tone_hz, snr_db, cfg.min_tone_snr_db)
    return ToneMeasurement(correlation=correlation, power=power, snr_db=snr_db)


def godard_tau(spec: Spectrum, tone_hz: float, cfg: GodardConfig) -> TimingEstimate:
    """Timing advance of the clock tone at +/-tone_hz in ``spec``."""
    tone = measure_tone(spec, tone_hz, cfg)
    tau = np.angle(tone.correlation) / (4 * np.pi * tone_hz)
    return TimingEstimate(tau_s=float(tau), tone_hz=tone_hz, tone_snr_db=tone.snr_db)


def _tone_pair_difference(first: ToneMeasurement, second: ToneMeasurement, f_first: float, f_second: float) -> float:
    """Timing of the ``first`` tone minus the ``second`` tone.

    When one tone is an integer multiple of the other the difference is taken
    on the phases, so a common delay beyond the single-tone range cancels
    before any wrapping.
    """
    ratio = max(f_first, f_second) / min(f_first, f_second)
    multiple = round(ratio)
    if abs(ratio - multiple) < 1e-9:
        if f_first < f_second:
            phase = np.angle(first.correlation**multiple * np.conj(second.correlation))
            return float(phase / (4 * np.pi * f_second))
        phase = np.angle(first.correlation * np.conj(second.correlation**multiple))
        return float(phase / (4 * np.pi * f_first))
    tau_first = np.angle(first.correlation) / (4 * np.pi * f_first)
    tau_second = np.angle(second.correlation) / (4 * np.pi * f_second)
    return float(tau_first - tau_second)


def _tones(cfg: GodardConfig) -> tuple[float, float]:
    return cfg.tone_f1_hz, cfg.tone_f2_hz


def rx_intermediates(
    slot_traces: list[SlotTrace], cfg: GodardConfig
) -> tuple[list[TimingEstimate], list[PowerRatio]]:
    """Per-slot, per-tone Rx skew (tau_Q - tau_I) and power ratio P_Q / P_I."""
    timings: list[TimingEstimate] = []
    ratios: list[PowerRatio] = []
    for item in slot_traces:
        rate = item.trace.sample_rate_hz
        spec_i = slot_spectrum(item.trace.samples.real, rate, cfg)
        spec_q = slot_spectrum(item.trace.samples.imag, rate, cfg)
        for tone_hz in _tones(cfg):
            window = tone_window([spec_i, spec_q], tone_hz, cfg)
            tone_i = measure_tone(spec_i, tone_hz, cfg, window)
            tone_q = measure_tone(spec_q, tone_hz, cfg, window)
            tau = np.angle(tone_q.correlation * np.conj(tone_i.correlation)) / (4 * np.pi * tone_hz)
            timings.append(
                TimingEstimate(
                    tau_s=float(tau),
                    tone_hz=tone_hz,
                    slot=item.slot,
                    tributary=Tributary.Q,
                    block=item.block,
                    tone_snr_db=min(tone_i.snr_db, tone_q.snr_db),
                )
            )
            ratios.append(
                PowerRatio(ratio=tone_q.power / tone_i.power, tone_hz=tone_hz, slot=item.slot, block=item.block)
            )
    return timings, ratios


def estimate_rx_skew(slot_traces: list[SlotTrace], cfg: GodardConfig) -> TimingEstimate:
    """Rx IQ skew averaged over both tones, both slots and all blocks."""
    timings, _ = rx_intermediates(slot_traces, cfg)
    return TimingEstimate(
        tau_s=mean_tau(timings),
        tone_hz=cfg.tone_f2_hz,
        tributary=Tributary.Q,
        tone_snr_db=min(t.tone_snr_db for t in timings),
    )


def estimate_rx_imbalance(slot_traces: list[SlotTrace], cfg: GodardConfig) -> float:
    """Rx IQ power imbalance in dB (mean of the per-tone dB ratios)."""
    _, ratios = rx_intermediates(slot_traces, cfg)
    return mean_db(ratios)


def _blocks(slot_traces: list[SlotTrace]) -> dict[int, dict[SlotId, SlotTrace]]:
    grouped: dict[int, dict[SlotId, SlotTrace]] = {}
    for item in slot_traces:
        grouped.setdefault(item.block, {})[item.slot] = item
    return grouped


def _complex_tones(item: SlotTrace, cfg: GodardConfig) -> dict[float, ToneMeasurement]:
    spec = slot_spectrum(item.trace.samples, item.trace.sample_rate_hz, cfg)
    return {tone_hz: measure_tone(spec, tone_hz, cfg) for tone_hz in _tones(cfg)}


def tx_intermediates(
    slot_traces: list[SlotTrace], cfg: GodardConfig
) -> tuple[list[TimingEstimate], list[PowerRatio]]:
    """Per-slot Tx skew and per-tone, per-block Tx power ratios.

    In a slot, the tone on the Q tributary carries the Tx skew, so
    tau_slot = tau(tone on Q) - tau(tone on I); the power ratio of a tone is its
    power where it rides on Q over its power where it rides on I.
    """
    f1, f2 = _tones(cfg)
    timings: list[TimingEstimate] = []
    ratios: list[PowerRatio] = []
    for block, slots in sorted(_blocks(slot_traces).items()):
        measured = {slot: _complex_tones(item, cfg) for slot, item in slots.items()}
        for slot, tones in measured.items():
            difference = _tone_pair_difference(tones[f1], tones[f2], f1, f2)
            tau = -difference if slot.interleaved else difference
            timings.append(
                TimingEstimate(
                    tau_s=tau,
                    tone_hz=f2,
                    slot=slot,
                    tributary=Tributary.COMPLEX,
                    block=block,
                    tone_snr_db=min(t.snr_db for t in tones.values()),
                )
            )
        pairs = [(s, o) for s, o in ((SlotId.T1, SlotId.T2), (SlotId.T3, SlotId.T4)) if s in measured and o in measured]
        for plain, interleaved in pairs:
            # f1 rides on Q in the plain slot, f2 rides on Q in the interleaved one
            ratios.append(
                PowerRatio(
                    ratio=measured[plain][f1].power / measured[interleaved][f1].power,
                    tone_hz=f1,
                    slot=plain,
                    block=block,
                )
            )
            ratios.append(
                PowerRatio(
                    ratio=measured[interleaved][f2].power / measured[plain][f2].power,
                    tone_hz=f2,
                    slot=interleaved,
                    block=block,
                )
            )
    if not ratios:
        Logger.log("No complete slot pair for Tx imbalance", level=logging.WARNING)
    return timings, ratios


def estimate_tx_skew(slot_traces: list[SlotTrace], cfg: GodardConfig) -> TimingEstimate:
    """Tx IQ skew: mean of the plain and interleaved slot estimates over all blocks."""
    timings, _ = tx_intermediates(slot_traces, cfg)
    return TimingEstimate(
        tau_s=mean_tau(timings),
        tone_hz=cfg.tone_f2_hz,
        tributary=Tributary.COMPLEX,
        tone_snr_db=min(t.tone_snr_db for t in timings),
    )


def estimate_tx_imbalance(slot_traces: list[SlotTrace], cfg: GodardConfig) -> float:
    """Tx IQ power imbalance in dB."""
    _, ratios = tx_intermediates(slot_traces, cfg)
    if not ratios:
        raise EstimationError("Tx imbalance needs both slots of a block")
    return mean_db(ratios)


def iq_correlation(trace: SampleTrace) -> float:
    """Normalized sample correlation of the I and Q tributaries."""
    i, q = trace.samples.real, trace.samples.imag
    p_i, p_q = float(np.mean(i**2)), float(np.mean(q**2))
    if p_i == 0 or p_q == 0:
        raise EstimationError("I or Q tributary carries no power")
    return float(np.mean(i * q)) / math.sqrt(p_i * p_q)


def estimate_rx_quadrature(trace: SampleTrace) -> float:
    """Quadrature error (radians) implied by the I/Q correlation, sin(theta) = -rho."""
    return math.asin(max(-1.0, min(1.0, -iq_correlation(trace))))


def gsop(trace: SampleTrace) -> SampleTrace:
    """Gram-Schmidt orthogonalization of Q against I.

    I is kept; Q loses its projection on I and is rescaled to its original
    power, so the total power is unchanged.
    """
    i, q = trace.samples.real, trace.samples.imag
    p_i, p_q = float(np.mean(i**2)), float(np.mean(q**2))
    if p_i == 0 or p_q == 0:
        raise EstimationError("GSOP needs power on both tributaries")
    q_orth = q - float(np.mean(i * q)) / p_i * i
    p_orth = float(np.mean(q_orth**2))
    if p_orth <= 1e-12 * p_q:
        raise EstimationError("Q tributary is collinear with I")
    return trace.with_samples(i + 1j * q_orth * math.sqrt(p_q / p_orth))
