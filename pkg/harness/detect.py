"""Training-frame detection on a dual-polarization capture."""

import logging

import numpy as np
from scipy.signal import fftconvolve

from models.error import ConfigurationError, DetectionError
from models.experiment import FrameLocation
from models.signal import DualPolFrame
from models.tfit import TfitPlan
from utils.logger import Logger

DETECTION_THRESHOLD = 0.5


def slot_signature(plan: TfitPlan, samples_per_symbol: int = 2) -> np.ndarray:
    """+1 where X is active (t1, t2), -1 where Y is active (t3, t4), over the whole frame."""
    slot_len = plan.slot_len_samples(samples_per_symbol)
    block = np.concatenate([np.ones(2 * slot_len), -np.ones(2 * slot_len)])
    return np.tile(block, plan.n_blocks)


def frame_detect(capture: DualPolFrame, plan: TfitPlan, samples_per_symbol: int = 2) -> FrameLocation:
    """Locate the first slot boundary of the training frame.

    The X-minus-Y power difference is correlated with the slot signature. The
    peak of the raw correlation gives the offset; the correlation normalized by
    the total power under the template must exceed ``DETECTION_THRESHOLD``.
    """
    expected_rate = plan.baud_rate_hz * samples_per_symbol
    if not np.isclose(capture.sample_rate_hz, expected_rate):
        raise ConfigurationError(
            f"capture at {capture.sample_rate_hz / 1e9:.3f} GSa/s, detector expects {expected_rate / 1e9:.3f} GSa/s"
        )
    template = slot_signature(plan, samples_per_symbol)
    if len(capture) < template.size:
        raise DetectionError(f"capture of {len(capture)} samples is shorter than one frame ({template.size})")

    p_x = np.abs(capture.x.samples) ** 2
    p_y = np.abs(capture.y.samples) ** 2
    correlation = fftconvolve(p_x - p_y, template[::-1], mode="valid")
    window_power = fftconvolve(p_x + p_y, np.ones(template.size), mode="valid")

    start = int(np.argmax(correlation))
    metric = float(correlation[start] / window_power[start]) if window_power[start] > 0 else 0.0
    Logger.log(f"Frame detection: offset {start}, metric {metric:.3f}", level=logging.DEBUG)
    if metric < DETECTION_THRESHOLD:
        raise DetectionError(f"no training frame above threshold {DETECTION_THRESHOLD} (best metric {metric:.3f})")
    return FrameLocation(
        start=start,
        slot_len=plan.slot_len_samples(samples_per_symbol),
        n_blocks=plan.n_blocks,
        metric=metric,
    )
