"""Single-qubit noise estimators: static polarization and periodogram."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, InputError


def single_qubit_probabilities(zeta_over_T):
    """Thermal probabilities of reading +1 and -1 for ``H = zeta * sigma_z``."""
    x = np.asarray(zeta_over_T, dtype=float)
    return 1.0 / (1.0 + np.exp(2.0 * x)), 1.0 / (1.0 + np.exp(-2.0 * x))


def thermal_polarization(zeta_over_T):
    """``<sigma_z> = P_+ - P_- = -tanh(zeta / T)``."""
    return -np.tanh(np.asarray(zeta_over_T, dtype=float))


def polarization_to_noise(polarizations, exact: bool = False) -> float:
    """RMS of ``zeta / T`` over uncoupled, unbiased qubits.

    Uses the linear inversion ``zeta / T = -<sigma_z>`` by default, accurate
    to ``O((zeta/T)^3)``; ``exact=True`` inverts the tanh.
    """
    m = np.asarray(polarizations, dtype=float).ravel()
    if m.size == 0:
        raise InputError("no polarizations given")
    if np.any(np.abs(m) >= 1):
        raise DomainError("polarizations must lie strictly inside (-1, 1)")
    est = -np.arctanh(m) if exact else -m
    return float(np.sqrt(np.mean(est**2)))


@dataclass
class Spectrum:
    frequencies: np.ndarray
    density: np.ndarray          # |s_k|^2 / (N f_s), units 1/Hz
    noise_density: np.ndarray    # T^2 * density
    rms_total: float             # T * sqrt(mean square of the series)
    rms_lag1: float              # T * sqrt(lag-one autocovariance), 0 if negative
    lag1_variance: float
    sampling_frequency: float
    nyquist_period: float

    def to_dict(self) -> dict:
        return {
            "frequencies_hz": self.frequencies.tolist(),
            "density_per_hz": self.density.tolist(),
            "noise_density": self.noise_density.tolist(),
            "rms_total": self.rms_total,
            "rms_lag1": self.rms_lag1,
            "lag1_variance": self.lag1_variance,
            "sampling_frequency_hz": self.sampling_frequency,
            "nyquist_period_s": self.nyquist_period,
        }


def lagged_noise_variance(series, temperature: float = 1.0, lag: int = 1) -> float:
    """``T^2 / N^2 * sum_k |s_k|^2 exp(-2 pi i lag k / N)``: the circular lag
    autocovariance of the series, computed from its spectrum.

    Lag zero gives the total mean square; lag one discards any component
    (such as shot noise) that is uncorrelated between neighbouring samples.
    """
    x = np.asarray(series, dtype=float)
    N = x.size
    s = np.fft.fft(x)
    k = np.arange(N)
    value = np.sum(np.abs(s) ** 2 * np.exp(-2j * np.pi * lag * k / N)) / N**2
    return float(temperature**2 * value.real)


def spectral_density(
    series,
    sampling_frequency: Optional[float] = None,
    temperature: float = 1.0,
    timestamps=None,
) -> Spectrum:
    """Plain periodogram ``S(f_k) = |s_k|^2 / (N f_s)`` of a polarization series.

    Pass either ``sampling_frequency`` or uniformly spaced ``timestamps``.
    """
    x = np.asarray(series, dtype=float).ravel()
    N = x.size
    if N < 2:
        raise InputError("need at least two samples")
    if timestamps is not None:
        t = np.asarray(timestamps, dtype=float).ravel()
        if t.size != N:
            raise InputError("timestamps and series differ in length")
        dt = np.diff(t)
        if np.any(dt <= 0) or not np.allclose(dt, dt[0], rtol=1e-6, atol=0):
            raise InputError("samples are not uniformly spaced")
        fs = 1.0 / dt[0]
        if sampling_frequency is not None and not np.isclose(fs, sampling_frequency, rtol=1e-6):
            raise InputError("sampling_frequency disagrees with timestamps")
    elif sampling_frequency is None:
        raise InputError("need sampling_frequency or timestamps")
    else:
        fs = float(sampling_frequency)
    if not fs > 0:
        raise InputError("sampling frequency must be positive")

    s = np.fft.fft(x)
    density = np.abs(s) ** 2 / (N * fs)
    lag0 = lagged_noise_variance(x, temperature, 0)
    lag1 = lagged_noise_variance(x, temperature, 1)
    return Spectrum(
        frequencies=np.fft.fftfreq(N, d=1.0 / fs),
        density=density,
        noise_density=temperature**2 * density,
        rms_total=float(np.sqrt(max(lag0, 0.0))),
        rms_lag1=float(np.sqrt(max(lag1, 0.0))),
        lag1_variance=lag1,
        sampling_frequency=fs,
        nyquist_period=2.0 / fs,
    )
