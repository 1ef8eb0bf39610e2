"""Full hub -> channel -> leaf chain tests."""

import logging
import math

import numpy as np
import pytest

from config import settings
from dsp.link import channel_phase, in_band_snr_db, tone_timing_offset_s
from dsp.tfit import build_dscm_frame
from harness.pipeline import check_rotation, estimate_leaf, frame_power, propagate, rotation_turns, training_capture
from harness.sweeps import PANELS, SweepPanel, panel_config, run_estimation_sweep
from models.experiment import ExperimentConfig
from models.impairment import ImpairmentSet, IqImpairment
from models.link import ChannelConfig
from models.tfit import Polarization, SlotId
from utils.assertions import assert_close, assert_sweep_within

SKEW_TOL_PS = 0.5
IMBALANCE_TOL_DB = 0.2

NOISELESS = {"freq_offset_hz": 100e6, "linewidth_hz": 0.0, "osnr_db": math.inf}


def _half_split_ps(report_pol) -> float:
    plain = report_pol.tx_slot_tau_s(SlotId.T1 if report_pol.polarization == Polarization.X else SlotId.T3)
    interleaved = report_pol.tx_slot_tau_s(SlotId.T2 if report_pol.polarization == Polarization.X else SlotId.T4)
    return (plain - interleaved) / 2 * 1e12


@pytest.mark.harness
@pytest.mark.regression
@pytest.mark.positive
class TestPipelinePositive:
    """Leaf estimates over the simulated DSCM link."""

    def test_capture_shape(self, experiment_cfg: ExperimentConfig):
        """Test the leaf capture runs at 2 samples/symbol and holds the guarded frame."""
        capture = training_capture(experiment_cfg, ImpairmentSet(), experiment_cfg.channel, 1)
        plan = experiment_cfg.tfit

        assert capture.sample_rate_hz == 2 * plan.baud_rate_hz, f"Unexpected rate {capture.sample_rate_hz}"
        expected = plan.frame_len_samples(2) + 2 * 2 * experiment_cfg.guard_symbols
        assert len(capture) == expected, f"Expected {expected} samples, got {len(capture)}"

    @pytest.mark.slow
    @pytest.mark.parametrize("panel", [*PANELS["rx"], *PANELS["tx"]], ids=lambda panel: panel.name)
    def test_full_grid_accuracy(self, panel: SweepPanel):
        """Test 13-point skew and imbalance grids with 10 trials each at OSNR 17 dB stay within 0.5 ps and 0.2 dB."""
        cfg = panel_config(ExperimentConfig(trials_per_point=10), panel)

        rows = run_estimation_sweep(cfg, settings.parallel_workers)

        assert cfg.channel.osnr_db == 17.0, f"Unexpected OSNR {cfg.channel.osnr_db}"
        assert len(rows) == 13 * 10, f"Expected 13 points x 10 trials, got {len(rows)}"
        assert not any(row.out_of_range for row in rows), "No estimate should sit near its wrap limit"
        assert_sweep_within(rows, "tau", SKEW_TOL_PS)
        assert_sweep_within(rows, "imb", IMBALANCE_TOL_DB)

    @pytest.mark.slow
    def test_coexisting_impairments(self, experiment_cfg: ExperimentConfig):
        """Test Tx and Rx impairments are estimated together on both polarizations."""
        impairments = ImpairmentSet.uniform(
            tx=IqImpairment.from_db(skew_ps=5.0, imbalance_db=1.0),
            rx=IqImpairment.from_db(skew_ps=-5.0, imbalance_db=-1.0),
        )

        report = estimate_leaf(experiment_cfg, impairments, experiment_cfg.channel)
        finals = report.finals()

        for pol in Polarization:
            assert_close(finals[f"tau_rx_{pol.value}_ps"], -5.0, SKEW_TOL_PS)
            assert_close(finals[f"imb_rx_{pol.value}_db"], -1.0, IMBALANCE_TOL_DB)
            assert_close(finals[f"tau_tx_{pol.value}_ps"], 5.0, SKEW_TOL_PS)
            assert_close(finals[f"imb_tx_{pol.value}_db"], 1.0, IMBALANCE_TOL_DB)

    @pytest.mark.slow
    def test_dispersion_keeps_slots_consistent(self, experiment_cfg: ExperimentConfig):
        """Test 100 km of CD delays both tones alike, so plain and interleaved slots agree."""
        channel = ChannelConfig(enable_cd=True, fiber_km=100.0, **NOISELESS)
        impairments = ImpairmentSet.uniform(tx=IqImpairment.from_db(skew_ps=5.0))

        report = estimate_leaf(experiment_cfg, impairments, channel)

        for pol in Polarization:
            estimate = report.for_pol(pol)
            assert abs(_half_split_ps(estimate)) < 0.1, f"{pol.value}: split {_half_split_ps(estimate):.3f} ps"
            assert_close(estimate.tau_tx_s * 1e12, 5.0, 0.1)

    @pytest.mark.slow
    def test_cubic_response_splits_slots(self, experiment_cfg: ExperimentConfig):
        """Test a cubic device phase shows up as opposite offsets in plain and interleaved slots."""
        channel = ChannelConfig(device_cubic_ps3=2.5e4, **NOISELESS)
        impairments = ImpairmentSet.uniform(tx=IqImpairment.from_db(skew_ps=5.0))
        plan = experiment_cfg.tfit
        center = experiment_cfg.subcarriers.center_hz(experiment_cfg.sc_index)

        def phase(f: float) -> float:
            return channel_phase(f, channel)

        expected_ps = (
            tone_timing_offset_s(phase, center, plan.f1) - tone_timing_offset_s(phase, center, plan.f2)
        ) * 1e12
        report = estimate_leaf(experiment_cfg, impairments, channel)

        for pol in Polarization:
            estimate = report.for_pol(pol)
            assert_close(_half_split_ps(estimate), expected_ps, 0.2)
            assert_close(estimate.tau_tx_s * 1e12, 5.0, 0.2)

    def test_active_slot_snr_follows_osnr(self, experiment_cfg: ExperimentConfig, caplog):
        """Test the active training slot sees the single-polarization in-band SNR of the OSNR."""
        plan = experiment_cfg.tfit
        band = experiment_cfg.subcarriers.occupied_bandwidth_hz
        channel = ChannelConfig(freq_offset_hz=0.0, linewidth_hz=0.0, osnr_db=17.0)
        frame = build_dscm_frame(plan, experiment_cfg.subcarriers.centers_hz)

        with caplog.at_level(logging.DEBUG, logger="iq_skew_lab"):
            noisy = propagate(frame, channel, band, frame_power(frame))

        slot = slice(0, plan.slot_len_samples())
        clean = frame.x.samples[slot]
        noise = noisy.x.samples[slot] - clean
        noise_in_band = np.mean(np.abs(noise) ** 2) * band / frame.x.sample_rate_hz
        measured_db = 10 * np.log10(np.mean(np.abs(clean) ** 2) / noise_in_band)

        assert_close(measured_db, in_band_snr_db(17.0, band), 0.2, "t1 slot on X")
        assert any("on the trace mean power" in r.getMessage() for r in caplog.records), "Expected the SNR log line"

    def test_rotation_warning(self, experiment_cfg: ExperimentConfig, caplog):
        """Test a warning when the frequency offset barely rotates within a slot."""
        still = ChannelConfig(freq_offset_hz=0.0)

        with caplog.at_level(logging.WARNING):
            check_rotation(still, experiment_cfg.tfit)

        assert rotation_turns(still, experiment_cfg.tfit) == 0.0, "No offset means no rotation"
        assert any("turns per slot" in record.getMessage() for record in caplog.records), "Expected a warning"

    def test_no_warning_with_rotation(self, experiment_cfg: ExperimentConfig, caplog):
        """Test the default 100 MHz offset rotates enough."""
        with caplog.at_level(logging.WARNING):
            check_rotation(experiment_cfg.channel, experiment_cfg.tfit)

        assert rotation_turns(experiment_cfg.channel, experiment_cfg.tfit) > 4, "Expected several turns per slot"
        assert not any("turns per slot" in record.getMessage() for record in caplog.records), "Unexpected warning"
