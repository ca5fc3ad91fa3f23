"""Least-squares estimate of the field-noise strength ``sigma_zeta / T``.

Candidates are compared against disorder-averaged sector distributions built
from one fixed set of unit-variance draws (common random numbers), so the
objective is a smooth function of the candidate and a bracketing search is
reliable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .chain import ChainSpec, sector_energies
from .distribution import DomainWallDistribution
from .errors import DimensionError, DomainError
from .sampler import GAUSSIAN, boltzmann_rows, standard_field_draws

DEFAULT_GRID = tuple(np.round(np.linspace(0.0, 0.6, 13), 10))
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_EVAL_CHUNK = 131072


@dataclass
class NoiseFitResult:
    sigma_over_T: float
    residual: float
    search_trace: List[Tuple[float, float]] = field(default_factory=list)
    mc_realizations: int = 0
    seed: int = 0
    non_convex: bool = False
    warnings: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "sigma_over_T": self.sigma_over_T,
            "residual": self.residual,
            "search_trace": [[float(a), float(b)] for a, b in self.search_trace],
            "mc_realizations": self.mc_realizations,
            "seed": self.seed,
            "non_convex": self.non_convex,
            "warnings": list(self.warnings),
        }


class SectorModel:
    """Disorder-averaged sector distribution as a function of ``sigma/T``,
    evaluated on a frozen set of draws."""

    def __init__(self, spec: ChainSpec, realizations: int, seed: int = 0,
                 distribution: str = GAUSSIAN, site_offsets=None):
        if realizations < 1:
            raise DomainError("need at least one realization")
        z = standard_field_draws(spec.num_qubits, seed, 0, realizations, distribution)
        self.unit_energies = sector_energies(z)
        self.offsets = None if site_offsets is None else np.asarray(site_offsets, dtype=float)
        self.realizations = realizations

    def __call__(self, sigma_over_T: float) -> np.ndarray:
        total = np.zeros(self.unit_energies.shape[1])
        for start in range(0, self.realizations, _EVAL_CHUNK):
            E = sigma_over_T * self.unit_energies[start : start + _EVAL_CHUNK]
            if self.offsets is not None:
                E = E + self.offsets
            total += boltzmann_rows(E, 1.0).sum(axis=0)
        return total / self.realizations


def fit_sigma_over_T(
    empirical: DomainWallDistribution,
    spec: ChainSpec,
    grid: Optional[Sequence[float]] = None,
    realizations: int = 100_000,
    seed: int = 0,
    distribution: str = GAUSSIAN,
    tol: float = 1e-4,
    site_offsets=None,
) -> NoiseFitResult:
    """Minimise the squared L2 distance between ``empirical`` and the simulated
    distribution over ``sigma/T``.

    A coarse grid locates the basin, then golden-section search refines it to
    ``tol``. If the grid residuals have more than one local minimum the result
    carries ``non_convex=True`` and a warning instead of failing.
    """
    if empirical.num_sites != spec.num_sites:
        raise DimensionError(f"empirical distribution has {empirical.num_sites} sites, chain has {spec.num_sites}")
    if abs(empirical.probs.sum() - 1.0) > 1e-6:
        raise DomainError("empirical distribution is not normalised")
    grid = np.asarray(DEFAULT_GRID if grid is None else grid, dtype=float)
    if grid.size == 0 or np.any(grid < 0) or not np.all(np.isfinite(grid)):
        raise DomainError("grid must be a non-empty set of non-negative values")
    grid = np.unique(grid)

    model = SectorModel(spec, realizations, seed, distribution, site_offsets)
    target = empirical.probs
    trace: List[Tuple[float, float]] = []

    def residual(s):
        r = float(np.sum((model(s) - target) ** 2))
        trace.append((float(s), r))
        return r

    values = np.array([residual(s) for s in grid])
    best = int(np.argmin(values))

    warnings: List[str] = []
    interior = values[1:-1]
    minima = np.sum((interior < values[:-2]) & (interior < values[2:]))
    minima += int(values.size > 1 and values[0] < values[1]) + int(values.size > 1 and values[-1] < values[-2])
    non_convex = bool(minima > 1)
    if non_convex:
        warnings.append(f"residual over the grid has {minima} local minima")
    if best == grid.size - 1 and grid.size > 1:
        warnings.append("minimum at the upper grid edge; extend the grid")

    lo = grid[max(best - 1, 0)]
    hi = grid[min(best + 1, grid.size - 1)]
    if hi > lo:
        a, b = lo, hi
        c = b - _INV_PHI * (b - a)
        d = a + _INV_PHI * (b - a)
        fc, fd = residual(c), residual(d)
        while b - a > tol:
            if fc < fd:
                b, d, fd = d, c, fc
                c = b - _INV_PHI * (b - a)
                fc = residual(c)
            else:
                a, c, fc = c, d, fd
                d = a + _INV_PHI * (b - a)
                fd = residual(d)

    s_best, r_best = min(trace, key=lambda t: (t[1], t[0]))
    return NoiseFitResult(
        sigma_over_T=s_best,
        residual=r_best,
        search_trace=trace,
        mc_realizations=realizations,
        seed=seed,
        non_convex=non_convex,
        warnings=warnings,
    )
