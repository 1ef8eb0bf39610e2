"""Leaf-side Rx compensation and hub-side Tx pre-compensation."""

from enum import Enum

import numpy as np

from dsp.estimate import gsop
from dsp.impair import advance_real
from models.compensation import CompensationSpec
from models.error import EstimationError
from models.estimate import EstimateReport
from models.signal import SampleTrace
from models.tfit import Polarization


class Side(str, Enum):
    TX = "tx"
    RX = "rx"


def _undo_q(trace: SampleTrace, spec: CompensationSpec) -> SampleTrace:
    q = advance_real(trace, trace.samples.imag, -spec.tau_s) / spec.gain_correction
    return trace.with_samples(trace.samples.real + 1j * q)


def compensate_rx(trace: SampleTrace, spec: CompensationSpec) -> SampleTrace:
    """Optional GSOP, then Q scaled by 1/g and shifted back by tau."""
    if spec.is_identity:
        return trace
    if spec.apply_gsop_first:
        trace = gsop(trace)
    return _undo_q(trace, spec)


def precompensate_tx(trace: SampleTrace, spec: CompensationSpec) -> SampleTrace:
    """Digital pre-distortion so that the Tx skew and gain cancel at the modulator."""
    if spec.is_identity:
        return trace
    return _undo_q(trace, spec)


def spec_from_estimates(
    report: EstimateReport, side: Side, pol: Polarization, apply_gsop_first: bool = False
) -> CompensationSpec:
    """Compensation for one side and polarization of a report."""
    est = report.for_pol(pol)
    if side == Side.RX:
        return CompensationSpec(
            tau_s=est.tau_rx_s,
            gain_correction=10 ** (est.imbalance_rx_db / 20),
            apply_gsop_first=apply_gsop_first,
        )
    return CompensationSpec(tau_s=est.tau_tx_s, gain_correction=10 ** (est.imbalance_tx_db / 20))


def average_tx_reports(reports: list[EstimateReport]) -> dict[Polarization, CompensationSpec]:
    """Hub view: Tx skew and imbalance averaged over the reports of several leaves."""
    if not reports:
        raise EstimationError("no leaf reports to average")
    specs = {}
    for pol in Polarization:
        taus = [r.for_pol(pol).tau_tx_s for r in reports]
        imbalances = [r.for_pol(pol).imbalance_tx_db for r in reports]
        specs[pol] = CompensationSpec(
            tau_s=float(np.mean(taus)),
            gain_correction=10 ** (float(np.mean(imbalances)) / 20),
        )
    return specs
