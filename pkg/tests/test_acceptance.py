"""Exit criteria of the toolkit, each at its fixed tolerance and runtime budget.

Seeds are fixed here once and are not tuned. Every test prints a single
PASS/FAIL line that is repeated in the terminal summary.
"""

import time

import numpy as np
import pytest

from domainwall.analytic import (
    HighTParams,
    ZeroTParams,
    exact_discrete_disorder_average,
    high_t_distribution,
    mean_field_finite_t,
    parabola_fit,
    zero_t_distribution,
)
from domainwall.chain import ChainSpec, sector_energies
from domainwall.fitting import fit_sigma_over_T
from domainwall.hardware import apply_gauge, random_gauge, ungauge_samples
from domainwall.oracles import full_boltzmann_exact, quantum_boltzmann
from domainwall.chain import classify_records
from domainwall.sampler import (
    NoiseConfig,
    disorder_averaged_distribution,
    draw_disorder,
    metropolis_samples,
    sector_boltzmann,
    standard_field_draws,
)
from domainwall.spectral import spectral_density
from domainwall.susceptibility import SusceptibilityParams, wall_energy_shifts

pytestmark = pytest.mark.acceptance

SIGMA_OVER_T = 0.2363


def test_u_shape(criterion):
    t0 = time.perf_counter()
    d = disorder_averaged_distribution(ChainSpec(10), NoiseConfig(field_sigma=SIGMA_OVER_T), 1.0, 100_000, seed=0)
    elapsed = time.perf_counter() - t0
    p, se = d.probs, d.stderrs
    symmetric = bool(np.all(np.abs(p - p[::-1]) < 3 * np.hypot(se, se[::-1])))
    convex = bool(np.all(np.diff(p, 2) > 0))
    centre = int(np.argmin(p)) + 1
    ratio = d.edge_to_center()
    ok = symmetric and convex and centre == 5 and ratio > 1.3 and elapsed < 5
    criterion(1, "U-shape, Q=10, sigma/T=0.2363, M=1e5", ok,
              f"symmetric={symmetric} convex={convex} min_site={centre} "
              f"edge/center={ratio:.4f} (need >1.3) time={elapsed:.2f}s")
    assert ok


def test_high_t_formula(criterion):
    t0 = time.perf_counter()
    mc = disorder_averaged_distribution(ChainSpec(10), NoiseConfig(field_sigma=0.05), 1.0, 1_000_000, seed=0)
    ht = high_t_distribution(HighTParams(9, 1.0, 0.05**2))
    elapsed = time.perf_counter() - t0
    linf = mc.max_abs_diff(ht)
    ok = linf < 1e-3 and elapsed < 30
    criterion(2, "high-T expansion vs MC, D=9, beta*sigma=0.05, M=1e6", ok,
              f"Linf={linf:.2e} (need <1e-3) time={elapsed:.2f}s")
    assert ok


def test_parabolic_breakdown(criterion):
    t0 = time.perf_counter()
    noise = NoiseConfig(field_sigma=SIGMA_OVER_T)
    long_chain = parabola_fit(disorder_averaged_distribution(ChainSpec(50), noise, 1.0, 100_000, seed=0))
    short_chain = parabola_fit(disorder_averaged_distribution(ChainSpec(10), noise, 1.0, 100_000, seed=0))
    elapsed = time.perf_counter() - t0
    ok = long_chain["non_parabolic"] and not short_chain["non_parabolic"] and elapsed < 60
    criterion(3, "parabola breakdown, Q=50 flagged and Q=10 not, M=1e5", ok,
              f"Q=50 max residual={long_chain['max_residual']:.2f} stderr, "
              f"Q=10 max residual={short_chain['max_residual']:.2f} stderr (threshold 3) time={elapsed:.2f}s")
    assert ok


def test_coupler_error_null(criterion):
    t0 = time.perf_counter()
    spec = ChainSpec(10)
    sigma = 0.05
    beta = SIGMA_OVER_T / sigma  # the field-noise case sits at sigma/T = 0.2363
    only_j = disorder_averaged_distribution(spec, NoiseConfig(coupler_sigma=sigma), beta, 100_000, seed=0)
    dev = np.abs(only_j.probs - 1 / 9)
    null_ok = bool(np.all(dev < 3 * only_j.stderrs))
    fields = disorder_averaged_distribution(spec, NoiseConfig(field_sigma=sigma), beta, 100_000, seed=1)
    both = disorder_averaged_distribution(spec, NoiseConfig(field_sigma=sigma, coupler_sigma=sigma), beta,
                                          100_000, seed=2)
    combined = np.hypot(fields.stderrs, both.stderrs)
    change = np.abs(both.probs - fields.probs)
    add_ok = bool(np.all(change < 3 * combined))
    elapsed = time.perf_counter() - t0
    ok = null_ok and add_ok and elapsed < 10
    criterion(4, "coupler-error null, sigma_J=0.05J, M=1e5", ok,
              f"max |P-1/9|/stderr={np.max(dev / only_j.stderrs):.2f}, "
              f"max change with fields/combined stderr={np.max(change / combined):.2f} (need <3) "
              f"time={elapsed:.2f}s")
    assert ok


def test_zero_t_solver(criterion):
    # noise a hundred times the temperature, the low-temperature regime the solver targets
    t0 = time.perf_counter()
    mc = disorder_averaged_distribution(ChainSpec(10), NoiseConfig(field_sigma=1.0), 100.0, 100_000, seed=0)
    zt = zero_t_distribution(ZeroTParams(9))
    elapsed = time.perf_counter() - t0
    linf = mc.max_abs_diff(zt)
    ok = linf < 0.02 and elapsed < 30
    criterion(5, "zero-T solver vs MC, D=9, T=0.01 sigma", ok, f"Linf={linf:.4f} (need <0.02) time={elapsed:.2f}s")
    assert ok


def test_mean_field_vs_exact(criterion):
    t0 = time.perf_counter()
    spec = ChainSpec(10)
    exact = exact_discrete_disorder_average(spec, 0.2, 1.0)
    mf = mean_field_finite_t(spec, 0.2, 1.0)
    mc = disorder_averaged_distribution(spec, NoiseConfig(field_sigma=0.2, distribution="binary"), 1.0,
                                        100_000, seed=0)
    elapsed = time.perf_counter() - t0
    linf = mf.max_abs_diff(exact)
    z = np.max(np.abs(mc.probs - exact.probs) / mc.stderrs)
    ok = linf < 0.02 and z < 3 and elapsed < 60
    criterion(6, "mean-field and binary MC vs exhaustive sum, Q=10, sigma=0.2T", ok,
              f"mean-field Linf={linf:.4f} (need <0.02), MC max deviation={z:.2f} stderr (need <3) "
              f"time={elapsed:.2f}s")
    assert ok


def test_sector_restriction(criterion):
    t0 = time.perf_counter()
    spec = ChainSpec(8)
    noise = NoiseConfig(field_sigma=SIGMA_OVER_T, coupler_sigma=0.05)
    worst = 0.0
    for i in range(100):
        dis = draw_disorder(spec, noise, seed=0, index=i)
        _, cond = full_boltzmann_exact(spec, dis, 1.0)
        sector = sector_boltzmann(sector_energies(dis.field_errors, dis.coupler_errors), 1.0)
        worst = max(worst, cond.max_abs_diff(sector))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-12 and elapsed < 5
    criterion(7, "sector restriction exact, Q=8, 100 realizations", ok,
              f"max diff={worst:.1e} (need <1e-12) time={elapsed:.2f}s")
    assert ok


def test_quantum_limit(criterion):
    t0 = time.perf_counter()
    spec = ChainSpec(8)
    noise = NoiseConfig(field_sigma=SIGMA_OVER_T, coupler_sigma=0.05)
    worst = 0.0
    for i in range(10):
        dis = draw_disorder(spec, noise, seed=1, index=i)
        q = quantum_boltzmann(spec, dis, 1.0, 0.0)
        _, c = full_boltzmann_exact(spec, dis, 1.0)
        worst = max(worst, q.max_abs_diff(c),
                    abs(q.diagnostics["in_sector_weight"] - c.diagnostics["in_sector_weight"]))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-9 and elapsed < 60
    criterion(8, "quantum state at A=0 equals classical, Q=8, 10 realizations", ok,
              f"max diff={worst:.1e} (need <1e-9) time={elapsed:.2f}s")
    assert ok


def test_covariance_law(criterion):
    t0 = time.perf_counter()
    sigma, Q, M = 0.7, 10, 1_000_000
    E = sector_energies(sigma * standard_field_draws(Q, 0, 0, M))
    pick = np.random.default_rng(0)
    triples = [(3, 2, 4)]
    while len(triples) < 20:
        n, m, k = pick.integers(1, Q, size=3)
        if m != n and k != n:
            triples.append((int(n), int(m), int(k)))
    worst = 0.0
    theta_zero = 0
    for n, m, k in triples:
        x = (E[:, n - 1] - E[:, m - 1]) * (E[:, n - 1] - E[:, k - 1])
        same_side = (n - k) * (n - m) > 0
        theta_zero += not same_side
        expected = 4 * sigma**2 * min(abs(n - k), abs(n - m)) * same_side
        worst = max(worst, abs(x.mean() - expected) / (x.std() / np.sqrt(M)))
    elapsed = time.perf_counter() - t0
    ok = worst < 5 and theta_zero >= 1 and elapsed < 10
    criterion(9, "wall-energy covariance law, 1e6 draws, 20 triples", ok,
              f"max deviation={worst:.2f} stderr (need <5), Theta-zero triples={theta_zero} time={elapsed:.2f}s")
    assert ok


def test_fit_round_trip(criterion):
    t0 = time.perf_counter()
    spec = ChainSpec(10)
    found = {}
    for s in (0.10, 0.20, 0.30):
        # the target uses an independent stream from the one inside the fit
        target = disorder_averaged_distribution(spec, NoiseConfig(field_sigma=s), 1.0, 1_000_000, seed=1000)
        found[s] = fit_sigma_over_T(target, spec, realizations=1_000_000, seed=0).sigma_over_T
    elapsed = time.perf_counter() - t0
    worst = max(abs(v - s) for s, v in found.items())
    ok = worst < 0.01 and elapsed < 300
    criterion(10, "fit round trip at sigma/T 0.1, 0.2, 0.3, M=1e6", ok,
              ", ".join(f"{s:.2f}->{v:.4f}" for s, v in found.items()) + f" (need +-0.01) time={elapsed:.1f}s")
    assert ok


def test_gauge_invariance(criterion):
    t0 = time.perf_counter()
    identical = True
    trials = 0
    for trial, Q in enumerate((4, 5, 6, 7, 8, 9, 10, 10)):
        spec = ChainSpec(Q)
        dis = draw_disorder(spec, NoiseConfig(field_sigma=0.5, coupler_sigma=0.1), seed=7, index=trial)
        h = spec.fields() + dis.field_errors
        J = spec.couplers() + dis.coupler_errors
        init = np.where(np.random.default_rng(trial).random(Q) < 0.5, -1, 1)
        logical = metropolis_samples(h, J, 1.5, 2000, seed=trial, init=init)
        for k in range(3):
            g = random_gauge(Q, seed=trial, index=k)
            hg, Jg = apply_gauge(h, J, g)
            back = ungauge_samples(metropolis_samples(hg, Jg, 1.5, 2000, seed=trial, init=init * g), g)
            same_hist = np.array_equal(np.bincount(classify_records(back), minlength=Q),
                                       np.bincount(classify_records(logical), minlength=Q))
            identical &= bool(np.array_equal(back, logical)) and same_hist
            trials += 1
    elapsed = time.perf_counter() - t0
    ok = identical and elapsed < 5
    criterion(11, "gauge invariance of sampled statistics", ok,
              f"{trials} gauged runs bit-identical={identical} time={elapsed:.2f}s")
    assert ok


def test_susceptibility_structure(criterion):
    t0 = time.perf_counter()
    chi = 0.05
    scaled = []
    interior_spread = 0.0
    ends_equal = True
    for J, h in ((1.0, 2.0), (1.0, 1.5), (0.5, 1.0)):
        shifts = wall_energy_shifts(ChainSpec(10, J, h), SusceptibilityParams(chi))
        interior_spread = max(interior_spread, np.ptp(shifts[1:-1]))
        ends_equal &= bool(shifts[0] == shifts[-1]) and shifts[0] > 0
        scaled.append(float(shifts[0] / (chi * J * (h - J))))
    elapsed = time.perf_counter() - t0
    proportional = np.ptp(scaled) < 1e-9
    ok = ends_equal and interior_spread < 1e-15 and proportional and elapsed < 1
    criterion(12, "susceptibility raises both terminal sites by a multiple of J(h-J)", ok,
              f"ends equal={ends_equal}, interior spread={interior_spread:.1e}, "
              f"shift/(chi J (h-J))={[round(s, 12) for s in scaled]} time={elapsed:.3f}s")
    assert ok


def test_spectral_estimator(criterion):
    t0 = time.perf_counter()
    gen = np.random.default_rng(0)
    parseval = 0.0
    for n in (2, 17, 1000, 2**14):
        x = gen.normal(0.1, 0.4, n)
        s = spectral_density(x, 5600.0)
        parseval = max(parseval, abs(np.sum(s.density) * 5600.0 / n - np.mean(x**2)))
    sigma, T = 0.2363, 1.0
    s = spectral_density(gen.normal(0, sigma, 2**14), 5600.0, temperature=T)
    rel = abs(s.rms_total - sigma * T) / (sigma * T)
    elapsed = time.perf_counter() - t0
    ok = parseval < 1e-9 and rel < 0.05 and elapsed < 5
    criterion(13, "spectral estimator, Parseval and white-noise rms at N=2^14", ok,
              f"Parseval error={parseval:.1e} (need <1e-9), rms error={rel:.2%} (need <5%), "
              f"lag-1 rms={s.rms_lag1:.4f} time={elapsed:.2f}s")
    assert ok
