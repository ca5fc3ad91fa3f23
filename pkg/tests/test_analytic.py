import warnings

import numpy as np
import pytest

from domainwall.analytic import (
    HighTParams,
    ZeroTParams,
    exact_discrete_disorder_average,
    high_t_distribution,
    mean_field_finite_t,
    p_greater,
    parabola_fit,
    zero_t_distribution,
    zero_t_mean_energies,
    zero_t_mean_energy,
)
from domainwall.chain import ChainSpec
from domainwall.distribution import DomainWallDistribution
from domainwall.errors import CapacityError, ConvergenceError, DomainError
from domainwall.sampler import NoiseConfig, disorder_averaged_distribution

# Oracles below were evaluated once with exact rational or 30-digit arithmetic and frozen.
HIGH_T_D9 = [0.11170322906946724, 0.11125914060070015, 0.11094193455158079, 0.11075161092210917,
             0.1106881697122853, 0.11075161092210917, 0.11094193455158079, 0.11125914060070015,
             0.11170322906946724]
HIGH_T_D9_DEFICIT = 0.026998456790123457
ZERO_T_MEANS = [0.0, 0.28209479177387814, 0.44529751892865335, 0.55890227948674679,
                0.64534812482844957, 0.71473097350302416]
ZERO_T_D3 = [0.36188335697682639, 0.27623328604634722, 0.36188335697682639]
ZERO_T_D4 = [0.297664160763585, 0.202335839236415, 0.202335839236415, 0.297664160763585]
EXACT_Q4_SIGMA07 = [0.3554124207856607, 0.2891751584286786, 0.3554124207856607]


def test_high_t_zero_noise_is_uniform():
    d = high_t_distribution(HighTParams(9, 1.0, 0.0))
    np.testing.assert_allclose(d.probs, 1 / 9)


def test_high_t_frozen_values():
    d = high_t_distribution(HighTParams(9, 0.05, 1.0))
    np.testing.assert_allclose(d.probs, HIGH_T_D9, rtol=1e-13)
    assert d.diagnostics["normalization_deficit"] == pytest.approx(HIGH_T_D9_DEFICIT, rel=1e-12)


def test_high_t_depends_on_beta_squared_times_variance():
    a = high_t_distribution(HighTParams(7, 0.1, 0.25))
    b = high_t_distribution(HighTParams(7, 0.05, 1.0))
    np.testing.assert_allclose(a.probs, b.probs, rtol=1e-14)


def test_high_t_validity_warning():
    with pytest.warns(RuntimeWarning):
        high_t_distribution(HighTParams(9, 1.0, 0.2363**2))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        high_t_distribution(HighTParams(9, 0.05, 1.0))
    with pytest.raises(DomainError):
        high_t_distribution(HighTParams(1, 0.1, 1.0))
    with pytest.raises(DomainError):
        high_t_distribution(HighTParams(5, 0.1, -1.0))


def test_high_t_quadratic_coefficient_matches_monte_carlo():
    beta, sigma, D = 1.0, 0.05, 9
    mc = disorder_averaged_distribution(ChainSpec(D + 1), NoiseConfig(field_sigma=sigma), beta, 1_000_000, seed=21)
    c2 = parabola_fit(mc)["coefficients"][2]
    expected = 2 * beta**2 * sigma**2 / D**2
    assert abs(c2 - expected) < 0.1 * expected


def test_p_greater():
    assert p_greater(0.0, 1.0) == 0.5
    assert p_greater(10.0, 1.0) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        p_greater(0.0, 0.0)


def test_zero_t_recursion_frozen():
    np.testing.assert_allclose(zero_t_mean_energies(6, 1.0), ZERO_T_MEANS, rtol=1e-14)
    assert zero_t_mean_energy(3, 2.0) == pytest.approx(2.0 * ZERO_T_MEANS[3])
    with pytest.raises(DomainError):
        zero_t_mean_energy(-1, 1.0)
    with pytest.raises(DomainError):
        zero_t_mean_energies(3, 0.0)


def test_zero_t_recursion_is_increasing():
    E = zero_t_mean_energies(50, 1.0)
    assert np.all(np.diff(E) > 0)


def test_zero_t_frozen_distributions():
    np.testing.assert_allclose(zero_t_distribution(ZeroTParams(3)).probs, ZERO_T_D3, rtol=1e-13)
    np.testing.assert_allclose(zero_t_distribution(ZeroTParams(4)).probs, ZERO_T_D4, rtol=1e-13)


def test_zero_t_shape_independent_of_sigma():
    a = zero_t_distribution(ZeroTParams(9, 1.0)).probs
    b = zero_t_distribution(ZeroTParams(9, 0.01)).probs
    np.testing.assert_allclose(a, b, rtol=1e-12)
    with pytest.raises(DomainError):
        ZeroTParams(9, 0.0)
    with pytest.raises(DomainError):
        zero_t_distribution(ZeroTParams(1))


def test_zero_t_is_u_shaped():
    p = zero_t_distribution(ZeroTParams(11)).probs
    np.testing.assert_allclose(p, p[::-1], rtol=1e-13)
    assert np.argmin(p) == 5
    assert np.all(np.diff(p[:6]) < 0)


def test_exact_discrete_frozen():
    d = exact_discrete_disorder_average(ChainSpec(4), 0.7, 1.0)
    np.testing.assert_allclose(d.probs, EXACT_Q4_SIGMA07, rtol=1e-13)
    assert d.realizations == 16
    with pytest.raises(CapacityError):
        exact_discrete_disorder_average(ChainSpec(21), 0.1, 1.0)


def test_exact_discrete_agrees_with_binary_monte_carlo():
    spec = ChainSpec(8)
    exact = exact_discrete_disorder_average(spec, 0.4, 1.0)
    mc = disorder_averaged_distribution(spec, NoiseConfig(field_sigma=0.4, distribution="binary"), 1.0, 100_000, seed=6)
    assert np.all(np.abs(mc.probs - exact.probs) < 4 * mc.stderrs)


@pytest.mark.parametrize("sigma", [0.1, 0.3])
def test_mean_field_close_to_exact(sigma):
    spec = ChainSpec(8)
    mf = mean_field_finite_t(spec, sigma, 1.0)
    exact = exact_discrete_disorder_average(spec, sigma, 1.0)
    assert mf.max_abs_diff(exact) < 0.01
    assert mf.probs.sum() == pytest.approx(1.0)
    np.testing.assert_allclose(mf.probs, mf.probs[::-1], atol=1e-8)


def test_mean_field_trivial_and_failure():
    spec = ChainSpec(6)
    np.testing.assert_allclose(mean_field_finite_t(spec, 0.0, 1.0).probs, 1 / 5)
    with pytest.raises(ConvergenceError) as info:
        mean_field_finite_t(spec, 0.5, 1.0, max_iter=1)
    assert info.value.iterations == 1
    with pytest.raises(DomainError):
        mean_field_finite_t(spec, -0.1, 1.0)


def test_parabola_fit_exact_and_spike():
    n = np.arange(1, 10)
    p = 0.1 + 0.002 * (n - 5) ** 2
    p = p / p.sum()
    fit = parabola_fit(DomainWallDistribution(p, np.full(9, 1e-4)))
    assert fit["max_residual"] < 1e-8
    assert not fit["non_parabolic"]
    q = p.copy()
    q[4] += 1e-3
    assert parabola_fit(DomainWallDistribution(q, np.full(9, 1e-4)))["non_parabolic"]


def test_noise_far_below_temperature_is_not_the_zero_t_regime():
    # with sigma = 0.01 T the sampled distribution is uniform to 1e-4 while the
    # zero-temperature solver keeps its full U shape
    mc = disorder_averaged_distribution(ChainSpec(10), NoiseConfig(field_sigma=0.01), 1.0, 20_000, seed=0)
    zt = zero_t_distribution(ZeroTParams(9))
    assert np.max(np.abs(mc.probs - 1 / 9)) < 1e-4
    assert mc.max_abs_diff(zt) > 0.05
