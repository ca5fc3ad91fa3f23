"""Exhaustive classical and quantum thermal states for small chains.

These check that restricting to the single-wall sector is harmless; they are
not used by the sampling path itself.
"""

from __future__ import annotations

import math

import numpy as np

from .chain import ChainSpec, DisorderRealization, configuration_array, domain_wall_index, ising_energy
from .distribution import DomainWallDistribution
from .errors import CapacityError, DomainError

MAX_FULL_QUBITS = 20
MAX_QUANTUM_QUBITS = 12


def _problem(spec: ChainSpec, dis: DisorderRealization):
    h, J = spec.fields(), spec.couplers()
    if dis is not None:
        dis.check(spec)
        h = h + dis.field_errors
        J = J + dis.coupler_errors
    return h, J


def _conditional(spec, state_probs, beta, provenance):
    rows = [domain_wall_index(spec, n) for n in range(1, spec.num_sites + 1)]
    sector = state_probs[rows]
    weight = float(sector.sum())
    return DomainWallDistribution(
        sector / weight,
        realizations=1,
        beta=beta,
        provenance=provenance,
        diagnostics={"in_sector_weight": weight},
    )


def full_boltzmann_exact(spec: ChainSpec, dis: DisorderRealization, beta: float):
    """Boltzmann weights of all ``2**Q`` configurations and the wall-sector conditional.

    Rows are ordered as in :func:`domainwall.chain.configuration_array`.
    """
    if spec.num_qubits > MAX_FULL_QUBITS:
        raise CapacityError(f"full enumeration limited to Q <= {MAX_FULL_QUBITS}")
    if not beta >= 0:
        raise DomainError("beta must be non-negative")
    h, J = _problem(spec, dis)
    E = ising_energy(h, J, configuration_array(spec.num_qubits))
    x = -beta * (E - E.min())
    w = np.exp(x)
    probs = w / w.sum()
    return probs, _conditional(spec, probs, beta, "full-classical")


def _sigma_x_sum(num_qubits: int) -> np.ndarray:
    dim = 2**num_qubits
    X = np.zeros((dim, dim))
    idx = np.arange(dim)
    for bit in range(num_qubits):
        X[idx, idx ^ (1 << bit)] = 1.0
    return X


def quantum_boltzmann(
    spec: ChainSpec,
    dis: DisorderRealization,
    beta: float,
    transverse: float,
    scale: float = 1.0,
) -> DomainWallDistribution:
    """z-basis populations of ``exp(-beta H)`` for ``H = -A sum X_i + B H_problem``.

    ``transverse`` is ``A`` and ``scale`` is ``B``. Reports the conditional
    wall-sector distribution; ``diagnostics['in_sector_weight']`` shows how much
    of the thermal state lies outside the sector.
    """
    Q = spec.num_qubits
    if Q > MAX_QUANTUM_QUBITS:
        raise CapacityError(f"dense diagonalisation limited to Q <= {MAX_QUANTUM_QUBITS}")
    for name, value in (("beta", beta), ("transverse", transverse), ("scale", scale)):
        if not math.isfinite(value):
            raise DomainError(f"{name} must be finite")
    if beta < 0:
        raise DomainError("beta must be non-negative")
    h, J = _problem(spec, dis)
    diag = scale * ising_energy(h, J, configuration_array(Q))
    if transverse == 0:
        H = np.diag(diag)
    else:
        H = -transverse * _sigma_x_sum(Q)
        H[np.diag_indices_from(H)] = diag
    evals, evecs = np.linalg.eigh(H)
    w = np.exp(-beta * (evals - evals[0]))
    populations = (evecs**2) @ w
    populations /= populations.sum()
    out = _conditional(spec, populations, beta, "quantum")
    out.diagnostics.update({"transverse": transverse, "scale": scale})
    return out
