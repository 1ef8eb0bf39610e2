"""Signal primitives: transforms, fractional delay, resampling and noise."""

import logging

import numpy as np
from scipy import signal

from models.error import ConfigurationError, SpectralFitError
from models.signal import RngStream, SampleTrace, Spectrum
from utils.logger import Logger

SPECTRAL_FIT_FLOOR = 1e-6


def _is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def frequency_axis(n: int, sample_rate_hz: float) -> np.ndarray:
    """Signed FFT bin frequencies in Hz."""
    return np.fft.fftfreq(n, d=1 / sample_rate_hz)


def forward_transform(trace: SampleTrace) -> Spectrum:
    """Unnormalized DFT of a power-of-two length trace."""
    n = len(trace)
    if not _is_power_of_two(n):
        raise ConfigurationError(f"transform length must be a power of two, got {n}")
    return Spectrum(bins=np.fft.fft(trace.samples), bin_spacing_hz=trace.sample_rate_hz / n)


def inverse_transform(spectrum: Spectrum) -> SampleTrace:
    """Inverse of ``forward_transform``."""
    return SampleTrace(samples=np.fft.ifft(spectrum.bins), sample_rate_hz=spectrum.sample_rate_hz)


def apply_frequency_response(trace: SampleTrace, response: np.ndarray) -> SampleTrace:
    """Multiply the trace spectrum by ``response`` sampled on ``frequency_axis``."""
    return trace.with_samples(np.fft.ifft(np.fft.fft(trace.samples) * response))


def fractional_delay(trace: SampleTrace, delay_s: float) -> SampleTrace:
    """Band-limited circular delay: y(t) = x(t - delay_s).

    Realized as the spectral phase ramp exp(-j*2*pi*f*delay_s). Negative delays advance.
    """
    if abs(delay_s) >= trace.duration_s / 4:
        raise ConfigurationError(f"delay {delay_s} s exceeds a quarter of the trace duration {trace.duration_s} s")
    if delay_s == 0:
        return trace
    freqs = frequency_axis(len(trace), trace.sample_rate_hz)
    return apply_frequency_response(trace, np.exp(-2j * np.pi * freqs * delay_s))


def out_of_band_fraction(trace: SampleTrace, band_edge_hz: float) -> float:
    """Share of trace energy at |f| > band_edge_hz."""
    spectrum = np.abs(np.fft.fft(trace.samples)) ** 2
    total = float(spectrum.sum())
    if total == 0:
        return 0.0
    freqs = frequency_axis(len(trace), trace.sample_rate_hz)
    return float(spectrum[np.abs(freqs) > band_edge_hz].sum()) / total


def resample(trace: SampleTrace, target_rate_hz: float) -> SampleTrace:
    """FFT-based rate conversion of a periodic, band-limited trace."""
    if target_rate_hz <= 0:
        raise ConfigurationError(f"target rate must be positive, got {target_rate_hz}")
    if target_rate_hz == trace.sample_rate_hz:
        return trace

    exact = len(trace) * target_rate_hz / trace.sample_rate_hz
    num = int(round(exact))
    if num < 1 or abs(num - exact) > 1e-6 * exact:
        raise ConfigurationError(
            f"{len(trace)} samples at {trace.sample_rate_hz} Hz do not map to a whole number at {target_rate_hz} Hz"
        )
    if target_rate_hz < trace.sample_rate_hz:
        leakage = out_of_band_fraction(trace, target_rate_hz / 2)
        if leakage > SPECTRAL_FIT_FLOOR:
            raise SpectralFitError(
                f"{leakage:.2e} of the energy lies beyond the target Nyquist frequency {target_rate_hz / 2:.4g} Hz"
            )

    Logger.log(f"Resampling {len(trace)} -> {num} samples", level=logging.DEBUG)
    return SampleTrace(samples=signal.resample(trace.samples, num), sample_rate_hz=target_rate_hz)


def gaussian_noise(length: int, variance: float, rng: RngStream, sample_rate_hz: float = 1.0) -> SampleTrace:
    """Circular complex white Gaussian noise with E|n|^2 = variance."""
    if variance < 0:
        raise ConfigurationError(f"noise variance must be non-negative, got {variance}")
    if variance == 0:
        return SampleTrace(samples=np.zeros(length, dtype=np.complex128), sample_rate_hz=sample_rate_hz)
    generator = rng.generator()
    scale = np.sqrt(variance / 2)
    samples = scale * (generator.standard_normal(length) + 1j * generator.standard_normal(length))
    return SampleTrace(samples=samples, sample_rate_hz=sample_rate_hz)
