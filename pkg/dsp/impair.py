"""Transmitter and receiver IQ impairments."""

import numpy as np

from dsp.core import fractional_delay
from models.impairment import IqImpairment
from models.signal import SampleTrace


def advance_real(trace: SampleTrace, tributary: np.ndarray, tau_s: float) -> np.ndarray:
    """Real tributary taken at t + tau_s."""
    if tau_s == 0:
        return np.asarray(tributary, dtype=np.float64)
    return fractional_delay(trace.with_samples(tributary), -tau_s).samples.real


def apply_tx_iq(trace: SampleTrace, imp: IqImpairment) -> SampleTrace:
    """Transmitter skew, gain and quadrature error on the Q tributary.

    I_out = I - g sin(theta) Q(t+tau), Q_out = g cos(theta) Q(t+tau).
    """
    if imp.is_identity:
        return trace
    i = trace.samples.real
    q = imp.gain * advance_real(trace, trace.samples.imag, imp.skew_s)
    theta = imp.quad_error_rad
    return trace.with_samples((i - np.sin(theta) * q) + 1j * np.cos(theta) * q)


def apply_rx_iq(trace: SampleTrace, imp: IqImpairment) -> SampleTrace:
    """Receiver skew, gain and quadrature error.

    I_out = I, Q_out = g [cos(theta) Q(t+tau) - sin(theta) I(t+tau)].
    """
    if imp.is_identity:
        return trace
    i = trace.samples.real
    theta = imp.quad_error_rad
    rotated = np.cos(theta) * trace.samples.imag - np.sin(theta) * i
    q = imp.gain * advance_real(trace, rotated, imp.skew_s)
    return trace.with_samples(i + 1j * q)
