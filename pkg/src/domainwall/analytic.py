"""Closed-form and semi-analytic wall distributions.

* high temperature: second-order expansion, a parabola in the site index;
* zero temperature: recursive estimate of the probability that a site is the
  global energy minimum;
* finite temperature with binary disorder: exhaustive sum over all sign
  patterns (exact) and a single-field mean-field approximation.

Energies and ``sigma`` are in the same units; only ``beta * sigma`` matters
for the sector distributions.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import erf

from .chain import ChainSpec, sector_energies
from .distribution import DomainWallDistribution
from .errors import CapacityError, ConvergenceError, DomainError
from .sampler import boltzmann_rows

MAX_EXHAUSTIVE_QUBITS = 20
HIGH_T_VALIDITY = 0.3


@dataclass(frozen=True)
class HighTParams:
    sites: int
    beta: float
    zeta_sq: float

    @property
    def expansion_parameter(self) -> float:
        """``beta * sqrt(zeta_sq) * sqrt(D)``; the expansion needs this to be small."""
        return self.beta * math.sqrt(self.zeta_sq) * math.sqrt(self.sites)


@dataclass(frozen=True)
class ZeroTParams:
    sites: int
    sigma: float = 1.0
    max_distance: int = 0

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError("sigma must be positive")


def high_t_distribution(p: HighTParams) -> DomainWallDistribution:
    """``P_n = Pt + beta^2 zeta^2 (2/N^2) (n - (N+1)/2)^2`` with ``N`` the number of sites.

    The truncated expansion does not sum to one; the result is renormalised
    and the deficit kept in ``diagnostics['normalization_deficit']``.
    """
    if p.sites < 2:
        raise DomainError("need at least two sites")
    if p.zeta_sq < 0 or p.beta < 0:
        raise DomainError("beta and zeta_sq must be non-negative")
    if p.expansion_parameter > HIGH_T_VALIDITY:
        warnings.warn(
            f"beta*sigma*sqrt(D) = {p.expansion_parameter:.3g}; high-temperature expansion "
            "is outside its validity regime",
            RuntimeWarning,
            stacklevel=2,
        )
    N = float(p.sites)
    b2z = p.beta**2 * p.zeta_sq
    base = 1.0 / N - b2z / N**3 * (1.25 * N**3 + N**2 + N / 6.0 + 1.0)
    n = np.arange(1, p.sites + 1)
    raw = base + b2z * (2.0 / N**2) * (n - (N + 1) / 2.0) ** 2
    total = raw.sum()
    return DomainWallDistribution(
        raw / total,
        beta=p.beta,
        provenance="high-t",
        diagnostics={
            "normalization_deficit": float(1.0 - total),
            "quadratic_coefficient": float(2.0 * b2z / N**2 / total),
            "expansion_parameter": p.expansion_parameter,
        },
    )


def p_greater(mean_energy: float, sigma: float) -> float:
    """Probability that a site lies above the reference: ``(1 + erf(E/sigma)) / 2``."""
    if not sigma > 0:
        raise DomainError("sigma must be positive")
    return 0.5 * (1.0 + math.erf(mean_energy / sigma))


def zero_t_mean_energies(count: int, sigma: float) -> np.ndarray:
    """``[E_0, ..., E_{count-1}]`` of the conditioned mean-energy recursion, ``E_0 = 0``."""
    if not sigma > 0:
        raise DomainError("sigma must be positive")
    out = np.zeros(max(count, 1))
    for l in range(1, out.size):
        e = out[l - 1]
        out[l] = 0.5 * (e * (1.0 + math.erf(e / sigma)) + sigma / math.sqrt(math.pi) * math.exp(-((e / sigma) ** 2)))
    return out[:count]


def zero_t_mean_energy(distance: int, sigma: float) -> float:
    """Mean energy of a site ``distance`` steps away, given no nearer site undercuts
    the reference."""
    if int(distance) != distance or distance < 0:
        raise DomainError("distance must be a non-negative integer")
    return float(zero_t_mean_energies(int(distance) + 1, sigma)[-1])


def zero_t_distribution(p: ZeroTParams) -> DomainWallDistribution:
    """``P(n) ∝ prod_{m != n} p_greater(E_{|n-m|-1})``, normalised over sites."""
    D = p.sites
    if D < 2:
        raise DomainError("need at least two sites")
    depth = max(p.max_distance, D)
    Ebar = zero_t_mean_energies(depth, p.sigma)
    logp = np.log(0.5 * (1.0 + erf(Ebar / p.sigma)))
    n = np.arange(D)
    dist = np.abs(n[:, None] - n[None, :]) - 1
    mask = dist >= 0
    logw = np.where(mask, logp[np.clip(dist, 0, None)], 0.0).sum(axis=1)
    w = np.exp(logw - logw.max())
    return DomainWallDistribution(w / w.sum(), provenance="zero-t", diagnostics={"sigma": p.sigma})


def exact_discrete_disorder_average(spec: ChainSpec, sigma: float, beta: float) -> DomainWallDistribution:
    """Equal-weight average of the sector distribution over all ``2**Q`` patterns
    ``zeta_i = +-sigma``."""
    Q = spec.num_qubits
    if Q > MAX_EXHAUSTIVE_QUBITS:
        raise CapacityError(f"exhaustive disorder sum limited to Q <= {MAX_EXHAUSTIVE_QUBITS}")
    total = np.zeros(spec.num_sites)
    block = 1 << min(Q, 16)
    for start in range(0, 2**Q, block):
        idx = np.arange(start, start + block, dtype=np.int64)
        bits = (idx[:, None] >> np.arange(Q - 1, -1, -1)) & 1
        zeta = sigma * (1.0 - 2.0 * bits)
        total += boltzmann_rows(sector_energies(zeta), beta).sum(axis=0)
    return DomainWallDistribution(
        total / 2**Q, realizations=2**Q, beta=beta, provenance="exact-discrete"
    )


def mean_field_finite_t(
    spec: ChainSpec,
    sigma: float,
    beta: float,
    tol: float = 1e-10,
    max_iter: int = 10_000,
    damping: float = 0.5,
) -> DomainWallDistribution:
    """Mean-field wall distribution for binary disorder ``zeta_i = +-sigma``.

    For each wall site ``m`` the conditional field means ``<zeta_n>_m`` are
    found self-consistently: each field is averaged over its two values with
    the Boltzmann weight of site ``m`` while every other field sits at its
    current conditional mean. The site probabilities then follow from the
    requirement that the unconditional means vanish,
    ``sum_m P(m) <zeta_i>_m = 0`` for every ``i``, closed by ``sum_m P(m) = 1``
    and solved in the least-squares sense. Iteration starts from zero means
    (uniform ``P``) and stops when ``P`` changes by less than ``tol``.
    """
    if sigma < 0 or beta < 0:
        raise DomainError("sigma and beta must be non-negative")
    Q, D = spec.num_qubits, spec.num_sites
    if sigma == 0 or beta == 0:
        return DomainWallDistribution(np.full(D, 1.0 / D), beta=beta, provenance="mean-field",
                                      diagnostics={"iterations": 0, "residual": 0.0})

    # sign[k, n]: dE_k / dzeta_n
    k = np.arange(1, D + 1)[:, None]
    i = np.arange(1, Q + 1)[None, :]
    sign = np.where(i <= k, 1.0, -1.0)
    values = np.array([-sigma, sigma])
    rows = np.arange(D)

    A = np.ones((Q + 1, D))
    rhs = np.zeros(Q + 1)
    rhs[-1] = 1.0

    mu = np.zeros((D, Q))
    P = np.full(D, 1.0 / D)
    residual = np.inf
    for it in range(1, max_iter + 1):
        E_base = mu @ sign.T  # E_base[m, k] = E_k(mu_m)
        # E[m, n, s, k] with zeta_n of row m replaced by values[s]
        shift = (values[None, None, :] - mu[:, :, None])[..., None] * sign.T[None, :, None, :]
        E = E_base[:, None, None, :] + shift
        w = boltzmann_rows(E, beta)[rows, :, :, rows]  # weight of site m itself
        new_mu = (w * values).sum(axis=-1) / w.sum(axis=-1)
        mu = damping * mu + (1.0 - damping) * new_mu

        A[:Q] = mu.T
        P_new, *_ = np.linalg.lstsq(A, rhs, rcond=None)
        residual = float(np.max(np.abs(P_new - P)))
        P = P_new
        if it > 1 and residual < tol:
            break
    else:
        raise ConvergenceError(
            f"mean-field iteration did not converge in {max_iter} steps (last change {residual:.3g})",
            residual=residual,
            iterations=max_iter,
        )
    P = np.clip(P, 0.0, None)
    P /= P.sum()
    return DomainWallDistribution(
        P, beta=beta, provenance="mean-field",
        diagnostics={"iterations": it, "residual": residual, "conditional_means": mu},
    )


def parabola_fit(dist: DomainWallDistribution, threshold: float = 3.0):
    """Weighted least-squares quadratic in the site index.

    Returns the coefficients ``(c0, c1, c2)``, residuals in units of the
    per-site standard error, and whether any residual exceeds ``threshold``.
    Sites with zero standard error are weighted by the smallest positive one.
    """
    n = dist.sites.astype(float)
    se = dist.stderrs.copy()
    positive = se[se > 0]
    if positive.size:
        se[se <= 0] = positive.min()
    else:
        se[:] = 1.0
    X = np.vstack([np.ones_like(n), n, n**2]).T
    coef, *_ = np.linalg.lstsq(X / se[:, None], dist.probs / se, rcond=None)
    resid = (dist.probs - X @ coef) / se
    return {
        "coefficients": coef,
        "residuals": resid,
        "max_residual": float(np.max(np.abs(resid))),
        "non_parabolic": bool(np.any(np.abs(resid) > threshold)),
    }
