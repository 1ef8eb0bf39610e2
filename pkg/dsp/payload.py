"""Gray-mapped 16QAM DSCM payload and a genie-aided demodulator."""

import logging
import math

import numpy as np
from scipy.special import erfc

from dsp.core import apply_frequency_response, frequency_axis
from dsp.link import mux_subcarriers, rrc_response
from models.error import ConfigurationError, EstimationError
from models.link import ChannelConfig, SubcarrierPlan
from models.payload import BerResult, QamFrame
from models.signal import RngStream, SampleTrace
from utils.logger import Logger

PAM4_LEVELS = np.array([-3.0, -1.0, 1.0, 3.0])
QAM16_SCALE = math.sqrt(10.0)
PAYLOAD_SC_POWER = 0.5
PILOT_BLOCK_SYMBOLS = 32


def _gray_pam4(msb: np.ndarray, lsb: np.ndarray) -> np.ndarray:
    return PAM4_LEVELS[2 * msb + (msb ^ lsb)]


def map_16qam(bits: np.ndarray) -> np.ndarray:
    """Gray 16QAM with unit average power; bits b0 b1 select I, b2 b3 select Q."""
    b = np.asarray(bits, dtype=np.uint8).reshape(-1, 4)
    i = _gray_pam4(b[:, 0], b[:, 1])
    q = _gray_pam4(b[:, 2], b[:, 3])
    return (i + 1j * q) / QAM16_SCALE


def _slice_pam4(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    index = np.clip(np.round((values * QAM16_SCALE + 3) / 2), 0, 3).astype(np.uint8)
    msb = index >> 1
    return msb, msb ^ (index & 1)


def demap_16qam(symbols: np.ndarray) -> np.ndarray:
    """Hard-decision inverse of ``map_16qam``."""
    b0, b1 = _slice_pam4(symbols.real)
    b2, b3 = _slice_pam4(symbols.imag)
    return np.stack([b0, b1, b2, b3], axis=1).reshape(-1)


def shape_rrc(symbols: np.ndarray, baud_hz: float, rolloff: float, samples_per_symbol: int) -> SampleTrace:
    """Circular RRC pulse shaping of a symbol block."""
    upsampled = np.zeros(symbols.size * samples_per_symbol, dtype=np.complex128)
    upsampled[::samples_per_symbol] = symbols
    rate = baud_hz * samples_per_symbol
    trace = SampleTrace(samples=upsampled, sample_rate_hz=rate)
    return apply_frequency_response(trace, rrc_response(frequency_axis(len(trace), rate), baud_hz, rolloff))


def generate_payload(
    n_symbols: int, plan: SubcarrierPlan, rng: RngStream, samples_per_symbol: int = 8
) -> tuple[list[QamFrame], SampleTrace]:
    """Random 16QAM frames on every subcarrier and their DSCM composite."""
    if n_symbols < 1:
        raise ConfigurationError(f"n_symbols must be positive, got {n_symbols}")
    frames: list[QamFrame] = []
    basebands: list[SampleTrace] = []
    for sc_index in range(1, plan.n_sc + 1):
        generator = rng.child(sc_index).generator()
        bits = generator.integers(0, 2, size=4 * n_symbols, dtype=np.uint8)
        symbols = map_16qam(bits)
        frames.append(QamFrame(symbols=symbols, bits=bits, sc_index=sc_index))
        shaped = shape_rrc(symbols, plan.per_sc_baud_hz, plan.rrc_rolloff, samples_per_symbol)
        basebands.append(shaped.with_samples(shaped.samples * math.sqrt(PAYLOAD_SC_POWER / shaped.power())))
    return frames, mux_subcarriers(basebands, plan)


def demodulate(
    trace: SampleTrace,
    frame: QamFrame,
    known_channel: ChannelConfig,
    samples_per_symbol: int = 2,
) -> BerResult:
    """Count bit errors of one selected subcarrier.

    ``trace`` is the output of ``select_subcarrier`` (already RRC matched
    filtered) with symbol k at sample k * samples_per_symbol. The known
    frequency offset is removed, then block-wise data-aided rotation takes out
    the carrier phase before hard decisions.
    """
    n = len(frame)
    if len(trace) < n * samples_per_symbol:
        raise EstimationError(f"trace holds {len(trace)} samples, frame needs {n * samples_per_symbol}")
    if known_channel.enable_cd and known_channel.fiber_km > 0:
        raise ConfigurationError("demodulator has no CD equalizer; disable CD for BER runs")

    derotated = trace.samples * np.exp(-2j * np.pi * known_channel.freq_offset_hz * trace.time_axis())
    received = derotated[: n * samples_per_symbol : samples_per_symbol]
    reference = frame.symbols

    equalized = np.empty(n, dtype=np.complex128)
    for start in range(0, n, PILOT_BLOCK_SYMBOLS):
        block = slice(start, min(start + PILOT_BLOCK_SYMBOLS, n))
        gain = np.vdot(reference[block], received[block]) / np.vdot(reference[block], reference[block])
        if gain == 0:
            raise EstimationError("received block carries no signal")
        equalized[block] = received[block] / gain

    error_power = float(np.mean(np.abs(equalized - reference) ** 2))
    snr_db = 10 * math.log10(float(np.mean(np.abs(reference) ** 2)) / error_power) if error_power > 0 else math.inf
    bit_errors = int(np.count_nonzero(demap_16qam(equalized) != frame.bits))
    Logger.log(f"SC-{frame.sc_index}: {bit_errors} errors / {frame.bits.size} bits, SNR {snr_db:.2f} dB", level=logging.DEBUG)
    return BerResult(
        sc_index=frame.sc_index,
        bit_errors=bit_errors,
        bits_total=int(frame.bits.size),
        snr_db=min(snr_db, 99.0),
    )


def merge_ber(results: list[BerResult]) -> BerResult:
    """Pool the counts of several polarizations of one subcarrier."""
    errors = sum(r.bit_errors for r in results)
    total = sum(r.bits_total for r in results)
    snr = 10 * math.log10(float(np.mean([10 ** (r.snr_db / 10) for r in results])))
    return BerResult(sc_index=results[0].sc_index, bit_errors=errors, bits_total=total, snr_db=snr)


def theory_ber_16qam(snr_db: float) -> float:
    """AWGN bit error ratio of Gray 16QAM at symbol SNR ``snr_db``."""
    snr = 10 ** (snr_db / 10)
    a = math.sqrt(snr / 10)
    # per-dimension Gray 4-PAM: [3 Q(d) + 2 Q(3d) - Q(5d)] / 4 with Q(d) = erfc(d / sqrt(2)) / 2
    return float((3 * erfc(a) + 2 * erfc(3 * a) - erfc(5 * a)) / 8)
