"""Disorder draws and disorder-averaged Boltzmann distributions over the wall sector."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import rng
from .chain import ChainSpec, DisorderRealization, sector_energies
from .distribution import DomainWallDistribution
from .errors import DomainError

# Fixed so that results never depend on how many threads share the work.
CHUNK_SIZE = 32768

GAUSSIAN = "gaussian"
BINARY = "binary"


@dataclass(frozen=True)
class NoiseConfig:
    """Control-error model.

    ``distribution`` applies to field errors: ``"gaussian"`` or ``"binary"``
    (values ``+-field_sigma`` with equal weight). Coupler errors are always
    Gaussian. ``cell_sigma`` is a common-mode field shared by all qubits of a
    hardware unit cell and ``ferro_scale`` multiplies the field noise of a qubit
    in proportion to how many of its couplers are ferromagnetic; both only
    matter for embedded-chain simulations.
    """

    field_sigma: float = 0.0
    coupler_sigma: float = 0.0
    distribution: str = GAUSSIAN
    cell_sigma: float = 0.0
    ferro_scale: float = 1.0

    def __post_init__(self):
        for name in ("field_sigma", "coupler_sigma", "cell_sigma"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise DomainError(f"{name} must be finite and non-negative, got {value!r}")
        if not (math.isfinite(self.ferro_scale) and self.ferro_scale > 0):
            raise DomainError("ferro_scale must be positive")
        if self.distribution not in (GAUSSIAN, BINARY):
            raise DomainError(f"unknown noise distribution {self.distribution!r}")


def standard_field_draws(num_qubits: int, seed: int, start: int, count: int, kind: str = GAUSSIAN):
    """Unit-scale field errors for realizations ``start..start+count-1``."""
    idx = np.arange(start, start + count, dtype=np.uint64)
    if kind == BINARY:
        return rng.random_signs(seed, idx, num_qubits, rng.FIELD_STREAM)
    return rng.standard_normals(seed, idx, num_qubits, rng.FIELD_STREAM)


def standard_coupler_draws(num_couplers: int, seed: int, start: int, count: int):
    idx = np.arange(start, start + count, dtype=np.uint64)
    return rng.standard_normals(seed, idx, num_couplers, rng.COUPLER_STREAM)


def draw_disorder(spec: ChainSpec, noise: NoiseConfig, seed: int, index: int) -> DisorderRealization:
    """Realization ``index`` of the stream identified by ``seed``.

    Identical to row ``index`` of the batches used by
    :func:`disorder_averaged_distribution` with the same seed.
    """
    Q = spec.num_qubits
    zeta = noise.field_sigma * standard_field_draws(Q, seed, index, 1, noise.distribution)[0]
    zj = noise.coupler_sigma * standard_coupler_draws(Q - 1, seed, index, 1)[0]
    return DisorderRealization(zeta, zj)


def boltzmann_rows(E: np.ndarray, beta: float) -> np.ndarray:
    """Row-wise ``exp(-beta E) / Z`` with max-subtraction."""
    x = -beta * np.asarray(E, dtype=float)
    x = x - x.max(axis=-1, keepdims=True)
    w = np.exp(x)
    return w / w.sum(axis=-1, keepdims=True)


def sector_boltzmann(E, beta: float) -> DomainWallDistribution:
    """Boltzmann distribution over single-wall states with energies ``E``."""
    E = np.asarray(E, dtype=float)
    if E.ndim != 1 or E.size == 0:
        raise DomainError("need a non-empty vector of wall energies")
    if not np.all(np.isfinite(E)):
        raise DomainError("wall energies must be finite")
    if not beta >= 0:
        raise DomainError(f"beta must be non-negative, got {beta!r}")
    return DomainWallDistribution(boltzmann_rows(E, beta), realizations=1, beta=beta, provenance="sector")


def average_rows(
    row_fn: Callable[[int, int], np.ndarray],
    total: int,
    threads: int = 1,
    chunk_size: int = CHUNK_SIZE,
):
    """Mean and standard error of the rows produced by ``row_fn(start, count)``.

    Chunks are fixed by ``chunk_size`` and merged in index order, so the
    result is bit-identical for any ``threads``.
    """
    if total < 1:
        raise DomainError("need at least one realization")
    bounds = [(s, min(chunk_size, total - s)) for s in range(0, total, chunk_size)]

    def stats(bound):
        rows = row_fn(*bound)
        mean = rows.mean(axis=0)
        dev = rows - mean
        return rows.shape[0], mean, np.einsum("ij,ij->j", dev, dev)

    if threads > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(stats, bounds))
    else:
        parts = [stats(b) for b in bounds]

    n, mean, m2 = parts[0]
    for nb, mb, m2b in parts[1:]:
        tot = n + nb
        delta = mb - mean
        mean = mean + delta * (nb / tot)
        m2 = m2 + m2b + delta * delta * (n * nb / tot)
        n = tot
    if n > 1:
        stderr = np.sqrt(np.maximum(m2, 0.0) / (n - 1) / n)
    else:
        stderr = np.zeros_like(mean)
    return mean, stderr


def disorder_averaged_distribution(
    spec: ChainSpec,
    noise: NoiseConfig,
    beta: float,
    realizations: int,
    seed: int = 0,
    threads: int = 1,
    site_offsets=None,
) -> DomainWallDistribution:
    """Average of the sector Boltzmann distribution over independent disorder draws.

    ``site_offsets`` adds a fixed energy to each wall site (for example the
    terminal shift from background susceptibility).
    """
    Q = spec.num_qubits
    offsets = None if site_offsets is None else np.asarray(site_offsets, dtype=float)
    if offsets is not None and offsets.shape != (spec.num_sites,):
        raise DomainError(f"site_offsets must have length {spec.num_sites}")
    if not beta >= 0:
        raise DomainError("beta must be non-negative")

    def rows(start, count):
        zeta = noise.field_sigma * standard_field_draws(Q, seed, start, count, noise.distribution)
        zj = None
        if noise.coupler_sigma > 0:
            zj = noise.coupler_sigma * standard_coupler_draws(Q - 1, seed, start, count)
        E = sector_energies(zeta, zj)
        if offsets is not None:
            E = E + offsets
        return boltzmann_rows(E, beta)

    mean, stderr = average_rows(rows, realizations, threads)
    return DomainWallDistribution(
        mean,
        stderr,
        realizations=realizations,
        beta=beta,
        provenance=f"sector-mc/{noise.distribution}",
        diagnostics={"seed": seed},
    )


def metropolis_samples(h, J, beta: float, num_samples: int, seed: int, sweeps: int = 20, init=None):
    """Single-spin-flip Metropolis samples of ``E = sum h s - sum J s s'`` on a chain.

    Runs ``num_samples`` independent replicas for ``sweeps`` sequential sweeps
    and returns the final configurations, shape ``(num_samples, Q)``. The
    acceptance test only involves products with +-1 gauge factors, so
    gauge-transformed problems reproduce the same trajectories exactly.
    """
    h = np.asarray(h, dtype=float)
    J = np.asarray(J, dtype=float)
    Q = h.size
    if J.size != Q - 1:
        raise DomainError("need Q-1 couplers")
    generator = np.random.default_rng(seed)
    if init is None:
        s = np.where(generator.random((num_samples, Q)) < 0.5, -1.0, 1.0)
    else:
        s = np.broadcast_to(np.asarray(init, dtype=float), (num_samples, Q)).copy()
    Jpad = np.concatenate([[0.0], J, [0.0]])
    for _ in range(sweeps):
        u = generator.random((Q, num_samples))
        for i in range(Q):
            left = s[:, i - 1] if i > 0 else 0.0
            right = s[:, i + 1] if i < Q - 1 else 0.0
            local = h[i] - Jpad[i] * left - Jpad[i + 1] * right
            dE = -2.0 * s[:, i] * local
            accept = u[i] < np.exp(-beta * np.maximum(dE, 0.0))
            s[:, i] = np.where(accept, -s[:, i], s[:, i])
    return s.astype(np.int8)
