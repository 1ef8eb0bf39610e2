"""Time-and-frequency interleaving tones (TFIT) training frame."""

import logging

import numpy as np

from models.error import SpectralFitError
from models.signal import DualPolFrame, SampleTrace
from models.tfit import Polarization, SlotId, TfitPlan
from utils.logger import Logger


def slot_tones(plan: TfitPlan, slot: SlotId) -> tuple[float, float]:
    """(tone on I, tone on Q) for a slot."""
    if slot.interleaved:
        return plan.f1, plan.f2
    return plan.f2, plan.f1


def _check_band(plan: TfitPlan) -> None:
    edge = abs(plan.sc_center_hz) + plan.f2
    if edge >= plan.sample_rate_gen_hz / 2:
        raise SpectralFitError(
            f"tone at {edge / 1e9:.3f} GHz does not fit below {plan.sample_rate_gen_hz / 2e9:.3f} GHz Nyquist"
        )


def build_slot(plan: TfitPlan, slot: SlotId, block: int = 0) -> DualPolFrame:
    """One slot of the SC pair at +/-sc_center.

    Each tributary carries a clock tone on the carrier, I = 2A cos(2pi f_I t) cos(2pi fc t + psi)
    and likewise for Q, so the subcarrier at +fc sees A cos(2pi f t) e^{j psi} on I and
    j A cos(2pi f t) e^{j psi} on Q, and the one at -fc the Hermitian-conjugate pair.
    The inactive polarization is zero.
    """
    _check_band(plan)
    n = plan.slot_len_samples()
    rate = plan.sample_rate_gen_hz
    t0 = (4 * block + slot.index) * plan.slot_duration_s
    t = t0 + np.arange(n) / rate

    f_i, f_q = slot_tones(plan, slot)
    carrier = np.cos(2 * np.pi * plan.sc_center_hz * t + plan.tone_phase_rad)
    amplitude = 2 * plan.tone_amplitude
    active = amplitude * (np.cos(2 * np.pi * f_i * t) + 1j * np.cos(2 * np.pi * f_q * t)) * carrier
    silent = np.zeros(n, dtype=np.complex128)

    if slot.polarization == Polarization.X:
        x, y = active, silent
    else:
        x, y = silent, active
    return DualPolFrame(x=SampleTrace(samples=x, sample_rate_hz=rate), y=SampleTrace(samples=y, sample_rate_hz=rate))


def build_frame(plan: TfitPlan) -> DualPolFrame:
    """t1 | t2 | t3 | t4 repeated ``n_blocks`` times, with a continuous carrier."""
    slots = [build_slot(plan, slot, block) for block in range(plan.n_blocks) for slot in SlotId]
    rate = plan.sample_rate_gen_hz
    x = np.concatenate([s.x.samples for s in slots])
    y = np.concatenate([s.y.samples for s in slots])
    Logger.log(
        f"Built TFIT frame: {plan.n_blocks} blocks, fc={plan.sc_center_hz / 1e9:.2f} GHz, {x.size} samples/pol",
        level=logging.DEBUG,
    )
    return DualPolFrame(x=SampleTrace(samples=x, sample_rate_hz=rate), y=SampleTrace(samples=y, sample_rate_hz=rate))


def subcarrier_pair_plans(plan: TfitPlan, centers_hz: tuple[float, ...]) -> list[TfitPlan]:
    """One plan per symmetric subcarrier pair of a grid, centred on the positive member."""
    positive = sorted({abs(c) for c in centers_hz}, reverse=True)
    return [plan.model_copy(update={"sc_center_hz": center}) for center in positive]


def build_dscm_frame(plan: TfitPlan, centers_hz: tuple[float, ...]) -> DualPolFrame:
    """Training frames of every subcarrier pair, summed on a common time base."""
    frames = [build_frame(p) for p in subcarrier_pair_plans(plan, centers_hz)]
    x = np.sum([f.x.samples for f in frames], axis=0)
    y = np.sum([f.y.samples for f in frames], axis=0)
    rate = plan.sample_rate_gen_hz
    return DualPolFrame(x=SampleTrace(samples=x, sample_rate_hz=rate), y=SampleTrace(samples=y, sample_rate_hz=rate))
