"""Training frame (TFIT) generator tests."""

import numpy as np
import pytest
from pydantic import ValidationError

from dsp.tfit import build_dscm_frame, build_frame, build_slot, slot_tones, subcarrier_pair_plans
from models.error import SpectralFitError
from models.tfit import SlotId, TfitPlan
from utils.assertions import assert_close


@pytest.mark.tfit
@pytest.mark.smoke
@pytest.mark.positive
class TestTfitPositive:
    """Slot layout, tone placement and frame assembly scenarios."""

    def test_slot_tone_assignment(self):
        """Test f2 rides on I in t1/t3 and f1 rides on I in t2/t4."""
        plan = TfitPlan()

        assert slot_tones(plan, SlotId.T1) == (4e9, 2e9), "t1 should carry f2 on I and f1 on Q"
        assert slot_tones(plan, SlotId.T2) == (2e9, 4e9), "t2 should interchange the tones"
        assert slot_tones(plan, SlotId.T3) == (4e9, 2e9), "t3 should match t1 on the Y polarization"
        assert slot_tones(plan, SlotId.T4) == (2e9, 4e9), "t4 should match t2 on the Y polarization"

    def test_slot_polarization_activity(self, plan_2sps: TfitPlan):
        """Test only the slot's polarization carries power."""
        t1 = build_slot(plan_2sps, SlotId.T1)
        t3 = build_slot(plan_2sps, SlotId.T3)

        assert t1.x.power() > 0.5, f"X should be active in t1, power {t1.x.power()}"
        assert t1.y.power() == 0, "Y should be silent in t1"
        assert t3.x.power() == 0, "X should be silent in t3"
        assert t3.y.power() > 0.5, f"Y should be active in t3, power {t3.y.power()}"

    def test_active_power_at_rf(self):
        """Test the active polarization power of an upconverted slot."""
        plan = TfitPlan()
        slot = build_slot(plan, SlotId.T2)

        assert_close(slot.x.power(), plan.active_power, 0.01)

    def test_baseband_tributaries_at_dc(self, plan_2sps: TfitPlan):
        """Test a DC-centred slot carries cos(f_I t) on I and cos(f_Q t) on Q."""
        slot = build_slot(plan_2sps, SlotId.T1)
        t = slot.x.time_axis()
        scale = 2 * plan_2sps.tone_amplitude * np.cos(plan_2sps.tone_phase_rad)

        assert np.allclose(slot.x.samples.real, scale * np.cos(2 * np.pi * plan_2sps.f2 * t), atol=1e-9)
        assert np.allclose(slot.x.samples.imag, scale * np.cos(2 * np.pi * plan_2sps.f1 * t), atol=1e-9)

    def test_slot_spectrum_lines(self):
        """Test a t1 slot shows lines at +/-fc +/- f1 and +/-fc +/- f2 and none at the carrier."""
        plan = TfitPlan()
        slot = build_slot(plan, SlotId.T1)
        magnitude = np.abs(np.fft.fft(slot.x.samples))
        spacing = plan.sample_rate_gen_hz / magnitude.size
        peak = magnitude.max()

        def at(freq_hz: float) -> float:
            return float(magnitude[int(round(freq_hz / spacing)) % magnitude.size])

        for sign in (1, -1):
            for tone in (plan.f1, plan.f2):
                for offset in (tone, -tone):
                    freq = sign * plan.sc_center_hz + offset
                    assert at(freq) > 0.5 * peak, f"Missing tone line at {freq / 1e9:.2f} GHz"
            assert at(sign * plan.sc_center_hz) < 0.01 * peak, "Carrier should be suppressed"

    def test_frame_layout_and_continuity(self, plan_2sps: TfitPlan):
        """Test the frame is t1..t4 per block with a continuous time base."""
        frame = build_frame(plan_2sps)
        slot_len = plan_2sps.slot_len_samples()
        later = build_slot(plan_2sps, SlotId.T2, block=1)
        start = (4 + 1) * slot_len

        assert len(frame) == plan_2sps.frame_len_samples(), f"Unexpected frame length {len(frame)}"
        assert np.allclose(frame.x.samples[start : start + slot_len], later.x.samples), "Slot should use frame time"

    def test_dscm_frame_sums_pairs(self):
        """Test the DSCM frame holds one training pair per symmetric subcarrier pair."""
        plan = TfitPlan()
        centers = (13.2e9, 4.4e9, -4.4e9, -13.2e9)

        pair_plans = subcarrier_pair_plans(plan, centers)
        combined = build_dscm_frame(plan, centers)
        expected = build_frame(pair_plans[0]).x.samples + build_frame(pair_plans[1]).x.samples

        assert [p.sc_center_hz for p in pair_plans] == [13.2e9, 4.4e9], "Pairs should be ordered outermost first"
        assert np.allclose(combined.x.samples, expected), "DSCM frame should be the sum of the pair frames"

    def test_default_tones(self):
        """Test tone defaults are a quarter and a half of the baud rate."""
        plan = TfitPlan(baud_rate_hz=16e9)

        assert (plan.f1, plan.f2) == (4e9, 8e9), f"Unexpected tones {plan.f1}, {plan.f2}"


@pytest.mark.tfit
@pytest.mark.regression
@pytest.mark.negative
class TestTfitNegative:
    """Invalid training frame plans."""

    def test_tone_above_nyquist(self):
        """Test an RF centre that does not fit at 2 samples/symbol."""
        plan = TfitPlan(samples_per_symbol_gen=2)

        with pytest.raises(SpectralFitError):
            build_slot(plan, SlotId.T1)

    def test_tone_order(self):
        """Test f1 must lie below f2."""
        with pytest.raises(ValidationError):
            TfitPlan(tone_f1_hz=5e9, tone_f2_hz=4e9)

    def test_non_integer_tone_periods(self):
        """Test a slot must hold a whole number of tone periods."""
        with pytest.raises(ValidationError):
            TfitPlan(slot_len_symbols=2047)
