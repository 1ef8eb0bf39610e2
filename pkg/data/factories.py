"""Test data factories using Faker."""

import numpy as np
from faker import Faker

from models.impairment import ImpairmentSet, IqImpairment
from models.signal import SampleTrace

fake = Faker()


class ImpairmentFactory:
    """Factory for generating randomized IQ impairments."""

    @staticmethod
    def seed(value: int) -> None:
        """Make subsequent draws reproducible."""
        Faker.seed(value)

    @staticmethod
    def generate_impairment(
        max_skew_ps: float = 15.0, max_imbalance_db: float = 3.0, max_quad_deg: float = 0.0
    ) -> IqImpairment:
        """
        Generate one random impairment within the given magnitudes.

        Args:
            max_skew_ps: Largest |skew|
            max_imbalance_db: Largest |imbalance|
            max_quad_deg: Largest |quadrature error|

        Returns:
            Random IqImpairment
        """
        return IqImpairment.from_db(
            skew_ps=fake.pyfloat(min_value=-max_skew_ps, max_value=max_skew_ps),
            imbalance_db=fake.pyfloat(min_value=-max_imbalance_db, max_value=max_imbalance_db),
            quad_error_deg=fake.pyfloat(min_value=-max_quad_deg, max_value=max_quad_deg) if max_quad_deg else 0.0,
        )

    @staticmethod
    def generate_impairment_set(tx: bool = True, rx: bool = True, **limits: float) -> ImpairmentSet:
        """Random impairments for every enabled side and polarization."""
        identity = IqImpairment()
        return ImpairmentSet(
            tx_x=ImpairmentFactory.generate_impairment(**limits) if tx else identity,
            tx_y=ImpairmentFactory.generate_impairment(**limits) if tx else identity,
            rx_x=ImpairmentFactory.generate_impairment(**limits) if rx else identity,
            rx_y=ImpairmentFactory.generate_impairment(**limits) if rx else identity,
        )


class TraceFactory:
    """Factory for band-limited test traces."""

    @staticmethod
    def generate_noise_trace(
        n: int, sample_rate_hz: float, bandwidth_fraction: float = 0.5, seed: int | None = None
    ) -> SampleTrace:
        """
        Generate complex Gaussian noise confined to a central fraction of the band.

        Args:
            n: Number of samples
            sample_rate_hz: Sample rate
            bandwidth_fraction: Occupied share of the sample rate
            seed: Generator seed (random when omitted)

        Returns:
            Unit-power band-limited trace
        """
        generator = np.random.default_rng(seed if seed is not None else fake.pyint(max_value=2**31))
        white = generator.standard_normal(n) + 1j * generator.standard_normal(n)
        spectrum = np.fft.fft(white)
        freqs = np.fft.fftfreq(n)
        spectrum[np.abs(freqs) > bandwidth_fraction / 2] = 0
        samples = np.fft.ifft(spectrum)
        samples /= np.sqrt(np.mean(np.abs(samples) ** 2))
        return SampleTrace(samples=samples, sample_rate_hz=sample_rate_hz)

    @staticmethod
    def generate_tone_trace(n: int, sample_rate_hz: float, tone_hz: float, phase_rad: float | None = None) -> SampleTrace:
        """Real clock tone cos(2 pi f t + phase) as a complex trace with random phase."""
        phase = fake.pyfloat(min_value=-np.pi, max_value=np.pi) if phase_rad is None else phase_rad
        t = np.arange(n) / sample_rate_hz
        return SampleTrace(samples=np.cos(2 * np.pi * tone_hz * t + phase), sample_rate_hz=sample_rate_hz)
