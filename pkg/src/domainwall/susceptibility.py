"""Background-susceptibility crosstalk and the linear terminal-site correction.

Crosstalk induces couplings and fields quadratic in the programmed ones,

    J'_ij = chi * sum_k J_ik J_jk,      h'_i = chi * sum_k J_ik h_k,

in the convention ``E = sum_i h_i s_i - sum_{i<j} J_ij s_i s_j`` with ``J`` the
symmetric coupling matrix. On the frustrated chain the induced terms raise
the two terminal wall sites by the same amount, ``2 chi J (h - J)``, and
leave all interior sites degenerate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chain import ChainSpec, domain_wall_state
from .distribution import DomainWallDistribution
from .errors import DimensionError, DomainError


@dataclass(frozen=True)
class SusceptibilityParams:
    """``chi`` is the crosstalk strength; ``schedule_ratio`` is ``B(t_freeze) / k_B T``
    in inverse units of the coupling."""

    chi: float = 0.0
    schedule_ratio: float = 1.0

    def __post_init__(self):
        if not (math.isfinite(self.chi) and math.isfinite(self.schedule_ratio)):
            raise DomainError("chi and schedule_ratio must be finite")


def coupling_matrix(J) -> np.ndarray:
    """Symmetric matrix of a chain's nearest-neighbour couplers."""
    J = np.asarray(J, dtype=float)
    M = np.zeros((J.size + 1, J.size + 1))
    i = np.arange(J.size)
    M[i, i + 1] = J
    M[i + 1, i] = J
    return M


def susceptibility_transform(h, J, params: SusceptibilityParams):
    """Induced fields ``h'`` and induced coupling matrix ``J'`` (zero diagonal).

    The programmed ``h`` and ``J`` are not modified; ``J`` may be a chain
    coupler vector or a full symmetric matrix.
    """
    h = np.asarray(h, dtype=float)
    Jm = np.asarray(J, dtype=float)
    if Jm.ndim == 1:
        Jm = coupling_matrix(Jm)
    if Jm.shape != (h.size, h.size):
        raise DimensionError(f"couplings {Jm.shape} do not match {h.size} fields")
    J_ind = params.chi * (Jm @ Jm)
    np.fill_diagonal(J_ind, 0.0)
    h_ind = params.chi * (Jm @ h)
    return h_ind, J_ind


def matrix_energy(h, Jm, spins) -> np.ndarray:
    """``sum h s - sum_{i<j} J_ij s_i s_j`` for one or many configurations."""
    s = np.asarray(spins, dtype=float)
    pair = 0.5 * np.einsum("...i,ij,...j->...", s, Jm, s)
    return s @ np.asarray(h, dtype=float) - pair


def wall_energy_shifts(spec: ChainSpec, params: SusceptibilityParams) -> np.ndarray:
    """Energy the induced terms add to each wall site, relative to site 2."""
    h_ind, J_ind = susceptibility_transform(spec.fields(), spec.couplers(), params)
    states = np.array([domain_wall_state(spec, n) for n in range(1, spec.num_sites + 1)])
    E = matrix_energy(h_ind, J_ind, states)
    return E - E[1] if E.size > 1 else E - E[0]


def terminal_shift(spec: ChainSpec, params: SusceptibilityParams) -> float:
    """Energy by which crosstalk raises a terminal wall site above the interior."""
    if spec.num_sites < 3:
        raise DomainError("terminal correction needs at least three wall sites")
    return float(wall_energy_shifts(spec, params)[0])


def susceptibility_correct(
    dist: DomainWallDistribution, params: SusceptibilityParams, spec: ChainSpec
) -> DomainWallDistribution:
    """Undo the terminal-site suppression to first order.

    Terminal probabilities are multiplied by ``1 + schedule_ratio * shift``
    with ``shift`` from :func:`terminal_shift`, then everything is
    renormalised.
    """
    if dist.num_sites != spec.num_sites:
        raise DimensionError(f"distribution has {dist.num_sites} sites, chain has {spec.num_sites}")
    factor = 1.0 + params.schedule_ratio * terminal_shift(spec, params)
    if factor <= 0:
        raise DomainError(f"correction factor {factor:.3g} is not positive; linearisation invalid")
    scale = np.ones(dist.num_sites)
    scale[[0, -1]] = factor
    raw = dist.probs * scale
    total = raw.sum()
    diagnostics = dict(dist.diagnostics)
    diagnostics.update({"susceptibility_factor": factor, "chi": params.chi, "schedule_ratio": params.schedule_ratio})
    return DomainWallDistribution(
        raw / total,
        dist.stderrs * scale / total,
        realizations=dist.realizations,
        beta=dist.beta,
        provenance=f"{dist.provenance}+susceptibility-corrected",
        diagnostics=diagnostics,
    )
