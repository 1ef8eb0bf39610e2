"""16QAM payload, genie demodulator and BER tests."""

import itertools
import math

import numpy as np
import pytest

from dsp.compensate import average_tx_reports
from dsp.link import select_subcarrier
from dsp.payload import (
    demap_16qam,
    demodulate,
    generate_payload,
    map_16qam,
    merge_ber,
    theory_ber_16qam,
)
from harness.pipeline import estimate_leaf, leaf_rx_specs, payload_ber
from models.error import ConfigurationError, EstimationError
from models.experiment import ExperimentConfig
from models.impairment import ImpairmentSet, IqImpairment
from models.link import ChannelConfig, SubcarrierPlan
from models.payload import BerResult
from models.signal import RngStream
from utils.assertions import assert_close

ALL_POINTS_BITS = np.array(list(itertools.product((0, 1), repeat=4)), dtype=np.uint8).reshape(-1)


@pytest.fixture(scope="module")
def ber_cfg() -> ExperimentConfig:
    """Payload of over 1e5 bits per subcarrier at OSNR 18 dB with an ideal laser pair."""
    return ExperimentConfig(
        payload_symbols=32768,
        channel=ChannelConfig(osnr_db=18.0, linewidth_hz=0.0),
        trials_per_point=1,
    )


@pytest.mark.payload
@pytest.mark.smoke
@pytest.mark.positive
class TestConstellation:
    """Gray 16QAM mapping."""

    def test_unit_average_power(self):
        """Test the 16 constellation points average to unit power."""
        symbols = map_16qam(ALL_POINTS_BITS)

        assert symbols.size == 16, f"Expected 16 symbols, got {symbols.size}"
        assert_close(float(np.mean(np.abs(symbols) ** 2)), 1.0, 1e-12)
        assert np.unique(np.round(symbols, 9)).size == 16, "Points should be distinct"

    def test_demap_inverts_map(self):
        """Test hard decisions on noiseless points return the source bits."""
        bits = RngStream(seed=3).generator().integers(0, 2, size=4000, dtype=np.uint8)

        assert np.array_equal(demap_16qam(map_16qam(bits)), bits), "Round trip should be lossless"

    def test_gray_neighbours_differ_in_one_bit(self):
        """Test nearest neighbours differ in exactly one bit."""
        symbols = map_16qam(ALL_POINTS_BITS)
        labels = ALL_POINTS_BITS.reshape(16, 4)
        spacing = 2 / math.sqrt(10)

        for a, b in itertools.combinations(range(16), 2):
            if math.isclose(abs(symbols[a] - symbols[b]), spacing, rel_tol=1e-9):
                differing = int(np.count_nonzero(labels[a] != labels[b]))
                assert differing == 1, f"Neighbours {labels[a]} and {labels[b]} differ in {differing} bits"


@pytest.mark.payload
@pytest.mark.smoke
@pytest.mark.positive
class TestPayloadPositive:
    """Payload generation, demodulation and BER accounting."""

    def test_generate_payload_layout(self):
        """Test one frame per subcarrier and the composite sample rate."""
        plan = SubcarrierPlan()
        frames, composite = generate_payload(512, plan, RngStream(seed=1))

        assert [f.sc_index for f in frames] == [1, 2, 3, 4], "Expected frames for SC-1..SC-4"
        assert all(len(f) == 512 for f in frames), "Every frame should hold 512 symbols"
        assert composite.sample_rate_hz == 64e9, f"Unexpected rate {composite.sample_rate_hz}"
        assert len(composite) == 512 * 8, f"Unexpected length {len(composite)}"

    def test_clean_loopback_has_no_errors(self):
        """Test every subcarrier demodulates without errors over an ideal channel."""
        plan = SubcarrierPlan()
        channel = ChannelConfig(freq_offset_hz=0.0, linewidth_hz=0.0, osnr_db=math.inf)
        frames, composite = generate_payload(1024, plan, RngStream(seed=2))

        for frame in frames:
            received = select_subcarrier(composite, plan, frame.sc_index)
            result = demodulate(received, frame, channel)
            assert result.bit_errors == 0, f"SC-{frame.sc_index} has {result.bit_errors} errors"
            assert result.snr_db > 40, f"SC-{frame.sc_index} SNR {result.snr_db:.1f} dB"

    def test_theory_curve(self):
        """Test the 16QAM AWGN BER curve at reference points."""
        assert 1.5e-4 < theory_ber_16qam(17.9) < 1.9e-4, f"Unexpected BER {theory_ber_16qam(17.9)}"
        assert_close(theory_ber_16qam(-100.0), 0.5, 1e-3)
        assert theory_ber_16qam(10.0) > theory_ber_16qam(14.0), "BER should fall with SNR"

    def test_merge_pools_counts(self):
        """Test pooling of per-polarization counts."""
        merged = merge_ber(
            [
                BerResult(sc_index=2, bit_errors=10, bits_total=1000, snr_db=15.0),
                BerResult(sc_index=2, bit_errors=30, bits_total=1000, snr_db=15.0),
            ]
        )

        assert (merged.bit_errors, merged.bits_total) == (40, 2000), "Counts should add up"
        assert_close(merged.ber, 0.02, 1e-12)
        assert_close(merged.snr_db, 15.0, 1e-9)

    @pytest.mark.slow
    def test_awgn_ber_matches_theory(self, ber_cfg: ExperimentConfig):
        """Test measured BER tracks the theory curve at the measured SNR."""
        results = payload_ber(ber_cfg, ImpairmentSet(), ber_cfg.channel, RngStream(seed=7))

        for result in results.values():
            assert result.bits_total >= 100_000, f"SC-{result.sc_index}: only {result.bits_total} bits"
            expected = theory_ber_16qam(result.snr_db)
            assert 0.7 * expected < result.ber < 1.5 * expected, (
                f"SC-{result.sc_index}: BER {result.ber:.3e} vs theory {expected:.3e} at {result.snr_db:.2f} dB"
            )

    @pytest.mark.slow
    def test_rx_imbalance_degrades_ber(self, ber_cfg: ExperimentConfig):
        """Test an uncompensated 3 dB Rx imbalance raises the BER."""
        rng = RngStream(seed=8)
        baseline = payload_ber(ber_cfg, ImpairmentSet(), ber_cfg.channel, rng)
        impaired = payload_ber(
            ber_cfg, ImpairmentSet.uniform(rx=IqImpairment.from_db(imbalance_db=3.0)), ber_cfg.channel, rng
        )

        for sc_index in ber_cfg.ber_subcarriers:
            assert impaired[sc_index].ber > baseline[sc_index].ber, f"SC-{sc_index} should degrade"

    @pytest.mark.slow
    def test_tx_skew_hurts_outer_subcarrier_most(self, ber_cfg: ExperimentConfig):
        """Test a 15 ps Tx skew costs SC-1 more than SC-2."""
        results = payload_ber(
            ber_cfg, ImpairmentSet.uniform(tx=IqImpairment.from_db(skew_ps=15.0)), ber_cfg.channel, RngStream(seed=9)
        )

        assert results[1].ber > results[2].ber, f"SC-1 BER {results[1].ber:.3e} <= SC-2 BER {results[2].ber:.3e}"

    @pytest.mark.slow
    @pytest.mark.parametrize(
        "side, quantity, values",
        [("rx", "imbalance_db", (0.0, 1.0, 2.0, 3.0)), ("tx", "skew_ps", (0.0, 5.0, 10.0, 15.0))],
        ids=["rx_imbalance", "tx_skew"],
    )
    def test_ber_grows_along_impairment_axis(
        self, ber_cfg: ExperimentConfig, side: str, quantity: str, values: tuple[float, ...]
    ):
        """Test the uncompensated BER never falls as an impairment grows."""
        bers = []
        for value in values:
            impairments = ImpairmentSet.uniform(**{side: IqImpairment.from_db(**{quantity: value})})
            results = payload_ber(ber_cfg, impairments, ber_cfg.channel, RngStream(seed=11))
            bers.append(merge_ber(list(results.values())).ber)

        assert all(a <= b for a, b in itertools.pairwise(bers)), f"BER along {side} {quantity}: {bers}"
        assert bers[-1] > bers[0], f"BER along {side} {quantity} should grow: {bers}"

    @pytest.mark.slow
    def test_compensation_recovers_ber(self, ber_cfg: ExperimentConfig):
        """Test estimated Tx and Rx compensation brings the BER back to the unimpaired level."""
        rng = RngStream(seed=10)
        impairments = ImpairmentSet.uniform(
            tx=IqImpairment.from_db(skew_ps=5.0, imbalance_db=3.0),
            rx=IqImpairment.from_db(skew_ps=-5.0, imbalance_db=-1.0),
        )
        baseline = payload_ber(ber_cfg, ImpairmentSet(), ber_cfg.channel, rng)

        reports = [estimate_leaf(ber_cfg, impairments, ber_cfg.channel, sc) for sc in ber_cfg.ber_subcarriers]
        tx_specs = average_tx_reports(reports)
        rx_specs = {r.sc_index: leaf_rx_specs(r, ber_cfg.estimator.gsop) for r in reports}
        compensated = payload_ber(ber_cfg, impairments, ber_cfg.channel, rng, tx_specs, rx_specs)

        for sc_index in ber_cfg.ber_subcarriers:
            assert compensated[sc_index].ber <= 1.2 * baseline[sc_index].ber, (
                f"SC-{sc_index}: compensated {compensated[sc_index].ber:.3e} vs "
                f"baseline {baseline[sc_index].ber:.3e}"
            )


@pytest.mark.payload
@pytest.mark.regression
@pytest.mark.negative
class TestPayloadNegative:
    """Invalid payload and demodulator requests."""

    def test_empty_payload(self):
        """Test a payload needs at least one symbol."""
        with pytest.raises(ConfigurationError):
            generate_payload(0, SubcarrierPlan(), RngStream(seed=1))

    def test_trace_shorter_than_frame(self):
        """Test the demodulator refuses a truncated capture."""
        plan = SubcarrierPlan()
        frames, composite = generate_payload(256, plan, RngStream(seed=1))
        received = select_subcarrier(composite, plan, 1)

        with pytest.raises(EstimationError):
            demodulate(received.window(0, 100), frames[0], ChannelConfig())

    def test_dispersion_without_equalizer(self):
        """Test the demodulator refuses channels with chromatic dispersion."""
        plan = SubcarrierPlan()
        frames, composite = generate_payload(256, plan, RngStream(seed=1))
        received = select_subcarrier(composite, plan, 1)

        with pytest.raises(ConfigurationError):
            demodulate(received, frames[0], ChannelConfig(enable_cd=True, fiber_km=100.0))
