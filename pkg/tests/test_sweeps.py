"""Monte-Carlo sweep orchestration tests."""

import math

import pytest

from harness.csv_io import write_estimation_csv
from harness.sweeps import PANELS, panel_config, pooled_ber, run_ber_sweep, run_estimation_sweep, trial_seed
from models.experiment import BerRow, ExperimentConfig, SweepAxis, SweepAxisName
from models.payload import BerResult
from models.tfit import Polarization
from utils.assertions import assert_close


def _ber_row(trial: int, sc_index: int, compensated: bool, errors: int | None) -> BerRow:
    result = BerResult(sc_index=sc_index, bit_errors=errors, bits_total=1000, snr_db=15.0) if errors is not None else None
    return BerRow(
        point=0,
        trial=trial,
        seed=trial,
        sc_index=sc_index,
        compensated=compensated,
        result=result,
        error=None if result else "EstimationError: failed",
    )


@pytest.fixture(scope="function")
def small_sweep(experiment_cfg: ExperimentConfig) -> ExperimentConfig:
    """Two-point Rx skew sweep with one trial per point."""
    axis = SweepAxis(name=SweepAxisName.RX_SKEW_PS, start=0.0, stop=5.0, step=5.0)
    return experiment_cfg.model_copy(update={"name": "small", "axes": [axis]})


@pytest.mark.harness
@pytest.mark.smoke
@pytest.mark.positive
class TestSweepBookkeeping:
    """Seeds, panels and BER pooling."""

    def test_trial_seed_is_deterministic(self):
        """Test the same (seed, point, trial) always gives the same trial seed."""
        assert trial_seed(7, 3, 1) == trial_seed(7, 3, 1), "Trial seed should be reproducible"

    def test_trial_seeds_are_distinct(self):
        """Test different points and trials draw different seeds."""
        seeds = {trial_seed(7, point, trial) for point in range(5) for trial in range(5)}

        assert len(seeds) == 25, f"Expected 25 distinct seeds, got {len(seeds)}"

    def test_panel_config_applies_fixed_impairments(self, experiment_cfg: ExperimentConfig):
        """Test a coexistence panel holds its other impairments fixed."""
        panel = PANELS["coexist"][0]

        cfg = panel_config(experiment_cfg, panel)

        assert cfg.name == f"{experiment_cfg.name}_{panel.name}", f"Unexpected name {cfg.name}"
        assert [a.name for a in cfg.axes] == [SweepAxisName.RX_SKEW_PS], "Panel axis should be Rx skew"
        assert len(cfg.axes[0].values()) == 13, "Skew axis should span -15..15 ps in 2.5 ps steps"
        for pol in Polarization:
            assert_close(cfg.impairments.tx(pol).skew_ps, 5.0, 1e-9)
            assert_close(cfg.impairments.tx(pol).imbalance_db, 1.0, 1e-9)
            assert_close(cfg.impairments.rx(pol).imbalance_db, -1.0, 1e-9)

    @pytest.mark.parametrize("group", ["rx", "tx", "coexist", "ber"])
    def test_panel_groups(self, group: str):
        """Test every panel group sweeps exactly one impairment axis."""
        for panel in PANELS[group]:
            assert len(panel.axes) == 1, f"{panel.name} should sweep one axis"

    def test_pooled_ber(self):
        """Test pooling skips failed trials and separates compensation states."""
        rows = [
            _ber_row(0, 1, False, 10),
            _ber_row(1, 1, False, 30),
            _ber_row(2, 1, False, None),
            _ber_row(0, 1, True, 2),
        ]

        assert_close(pooled_ber(rows, 1, compensated=False), 0.02, 1e-12)
        assert_close(pooled_ber(rows, 1, compensated=True), 0.002, 1e-12)
        assert math.isnan(pooled_ber(rows, 2, compensated=False)), "No rows should give NaN"


@pytest.mark.harness
@pytest.mark.regression
@pytest.mark.slow
class TestSweepRuns:
    """Sweeps over the full simulated chain."""

    def test_failed_point_becomes_error_row(self, experiment_cfg: ExperimentConfig):
        """Test a hopeless OSNR point is recorded as an error while the sweep continues."""
        axis = SweepAxis(name=SweepAxisName.OSNR_DB, start=-10.0, stop=30.0, step=40.0)
        cfg = experiment_cfg.model_copy(update={"axes": [axis]})

        rows = run_estimation_sweep(cfg)

        assert [r.point for r in rows] == [0, 1], f"Unexpected points {[r.point for r in rows]}"
        assert rows[0].error, "OSNR -10 dB should fail"
        assert not rows[0].estimate, "Failed rows carry no estimate"
        assert rows[1].error is None, f"OSNR 30 dB should succeed, got {rows[1].error}"
        assert rows[1].max_abs_error("tau") < 0.5, "OSNR 30 dB estimate should be accurate"

    def test_csv_is_reproducible(self, small_sweep: ExperimentConfig, tmp_path):
        """Test two runs with one seed write byte-identical CSVs."""
        first = write_estimation_csv(run_estimation_sweep(small_sweep), tmp_path / "first.csv")
        second = write_estimation_csv(run_estimation_sweep(small_sweep), tmp_path / "second.csv")

        assert first.read_bytes() == second.read_bytes(), "Reruns should be byte-identical"

    def test_workers_match_serial(self, small_sweep: ExperimentConfig):
        """Test a process pool returns the same rows in the same order as a serial run."""
        serial = run_estimation_sweep(small_sweep, workers=1)
        parallel = run_estimation_sweep(small_sweep, workers=2)

        assert serial == parallel, "Parallel rows should equal serial rows"

    def test_ber_sweep_rows(self, experiment_cfg: ExperimentConfig):
        """Test one BER point yields both compensation states for every subcarrier, in order."""
        cfg = experiment_cfg.model_copy(
            update={
                "payload_symbols": 2048,
                "channel": experiment_cfg.channel.model_copy(update={"osnr_db": 22.0}),
            }
        )

        rows = run_ber_sweep(cfg)

        assert [(r.compensated, r.sc_index) for r in rows] == [(False, 1), (False, 2), (True, 1), (True, 2)], (
            "Rows should be ordered by compensation state, then subcarrier"
        )
        assert all(r.result is not None for r in rows), f"Unexpected errors: {[r.error for r in rows]}"
