"""Frustrated Ising chain: geometry, classical energies and the domain-wall sector.

Conventions
-----------
Classical energies use the Ising form

    E(s) = sum_i h_i s_i - sum_i J_i s_i s_{i+1}

with ``J_i > 0`` ferromagnetic. The frustrated chain programs a uniform
coupling ``J`` and opposing end fields that pin the left spin to ``+1`` and the
right spin to ``-1``::

    h_1 = -h,   h_Q = +h

The opposite choice is a global spin flip and gives identical statistics.
With this orientation a domain wall at site ``n`` (on coupler ``(n, n+1)``)
picks up a field-error energy ``E_n = sum_i sign(n - i + 1/2) zeta_i``.

Coupler errors are modelled as perturbations of the programmed coupling,
``J_i -> J + zeta_i^(J)``, so breaking coupler ``n`` costs an extra
``2 zeta_n^(J)`` relative to the unperturbed chain.

Sites run ``1..D`` with ``D = Q - 1``; array positions are zero-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

import numpy as np

from .errors import CapacityError, DimensionError, DomainError

MAX_ENUMERATION_QUBITS = 24


@dataclass(frozen=True)
class ChainSpec:
    """Chain of ``num_qubits`` spins with uniform coupling and pinning end fields.

    Energies are in units of the coupling by default (``coupling=1``).
    """

    num_qubits: int
    coupling: float = 1.0
    boundary_field: float = 2.0

    def __post_init__(self):
        if int(self.num_qubits) != self.num_qubits or self.num_qubits < 3:
            raise DomainError(f"num_qubits must be an integer >= 3, got {self.num_qubits!r}")
        if not self.coupling > 0:
            raise DomainError(f"coupling must be positive, got {self.coupling!r}")
        if not self.boundary_field > self.coupling:
            raise DomainError(
                "boundary_field must exceed coupling for the single-wall states to be "
                f"the ground manifold (h={self.boundary_field!r}, J={self.coupling!r})"
            )

    @property
    def num_sites(self) -> int:
        """Number of domain-wall sites, ``D = Q - 1``."""
        return self.num_qubits - 1

    def fields(self) -> np.ndarray:
        h = np.zeros(self.num_qubits)
        h[0] = -self.boundary_field
        h[-1] = self.boundary_field
        return h

    def couplers(self) -> np.ndarray:
        return np.full(self.num_qubits - 1, float(self.coupling))


@dataclass(frozen=True)
class DisorderRealization:
    """One draw of per-qubit field errors and per-coupler errors."""

    field_errors: np.ndarray
    coupler_errors: np.ndarray = field(default=None)

    def __post_init__(self):
        zeta = np.asarray(self.field_errors, dtype=float)
        object.__setattr__(self, "field_errors", zeta)
        if self.coupler_errors is None:
            object.__setattr__(self, "coupler_errors", np.zeros(max(zeta.size - 1, 0)))
        else:
            object.__setattr__(self, "coupler_errors", np.asarray(self.coupler_errors, dtype=float))
        if zeta.ndim != 1 or self.coupler_errors.shape != (zeta.size - 1,):
            raise DimensionError(
                f"need Q field errors and Q-1 coupler errors, got {zeta.shape} and "
                f"{self.coupler_errors.shape}"
            )

    @classmethod
    def zero(cls, spec: ChainSpec) -> "DisorderRealization":
        return cls(np.zeros(spec.num_qubits), np.zeros(spec.num_sites))

    def check(self, spec: ChainSpec) -> None:
        if self.field_errors.size != spec.num_qubits:
            raise DimensionError(
                f"realization has {self.field_errors.size} field errors, chain has "
                f"{spec.num_qubits} qubits"
            )


def validate_spins(spins, num_qubits: Optional[int] = None) -> np.ndarray:
    """Return ``spins`` as an int8 array, checking every entry is +1 or -1."""
    s = np.asarray(spins)
    if num_qubits is not None and s.shape[-1] != num_qubits:
        raise DimensionError(f"expected {num_qubits} spins, got {s.shape[-1]}")
    if not np.all((s == 1) | (s == -1)):
        raise DomainError("spins must be +1 or -1")
    return s.astype(np.int8)


def ising_energy(h, J, spins) -> np.ndarray:
    """``sum h_i s_i - sum J_i s_i s_{i+1}`` for one configuration or a stack of them."""
    h = np.asarray(h, dtype=float)
    J = np.asarray(J, dtype=float)
    s = np.asarray(spins, dtype=float)
    if s.shape[-1] != h.size or J.size != h.size - 1:
        raise DimensionError(f"spins {s.shape}, fields {h.shape}, couplers {J.shape}")
    return s @ h - (s[..., :-1] * s[..., 1:]) @ J


def classical_energy(spec: ChainSpec, spins, dis: Optional[DisorderRealization] = None):
    """Exact energy of the programmed chain plus field and coupler errors."""
    s = validate_spins(spins, spec.num_qubits)
    h, J = spec.fields(), spec.couplers()
    if dis is not None:
        dis.check(spec)
        h = h + dis.field_errors
        J = J + dis.coupler_errors
    return ising_energy(h, J, s)


def domain_wall_state(spec: ChainSpec, site: int) -> np.ndarray:
    """Configuration with spins ``1..site`` up and ``site+1..Q`` down."""
    if not 1 <= site <= spec.num_sites:
        raise DomainError(f"site must be in 1..{spec.num_sites}, got {site}")
    s = -np.ones(spec.num_qubits, dtype=np.int8)
    s[:site] = 1
    return s


def domain_wall_field_energy(site: int, zeta) -> float:
    """Field-error energy ``E_n = sum_i sign(n - i + 0.5) zeta_i`` of a wall at ``site``."""
    zeta = np.asarray(zeta, dtype=float)
    if not 1 <= site <= zeta.size - 1:
        raise DomainError(f"site must be in 1..{zeta.size - 1}, got {site}")
    return float(zeta[:site].sum() - zeta[site:].sum())


def sector_energies(field_errors, coupler_errors=None) -> np.ndarray:
    """Energies of all single-wall states, up to a site-independent constant.

    Works on a single realization ``(Q,)`` or a batch ``(M, Q)``; returns
    ``(..., D)``. Field part is ``E_n``; coupler part is ``2 zeta_n^(J)``.
    """
    zeta = np.asarray(field_errors, dtype=float)
    partial = np.cumsum(zeta, axis=-1)
    E = 2.0 * partial[..., :-1] - partial[..., -1:]
    if coupler_errors is not None:
        E = E + 2.0 * np.asarray(coupler_errors, dtype=float)
    return E


def configuration_array(num_qubits: int) -> np.ndarray:
    """All ``2**Q`` configurations as an int8 array; row ``c`` has spin ``i`` down
    iff bit ``Q-1-i`` of ``c`` is set (row 0 is all up)."""
    if num_qubits > MAX_ENUMERATION_QUBITS:
        raise CapacityError(
            f"refusing to enumerate 2**{num_qubits} configurations "
            f"(limit Q <= {MAX_ENUMERATION_QUBITS})"
        )
    idx = np.arange(2**num_qubits, dtype=np.int64)
    shifts = np.arange(num_qubits - 1, -1, -1, dtype=np.int64)
    bits = (idx[:, None] >> shifts) & 1
    return (1 - 2 * bits).astype(np.int8)


def enumerate_configurations(spec: ChainSpec) -> Iterator[np.ndarray]:
    """Yield every spin configuration of the chain exactly once."""
    yield from configuration_array(spec.num_qubits)


def domain_wall_index(spec: ChainSpec, site: int) -> int:
    """Row of :func:`configuration_array` holding the wall at ``site``."""
    Q = spec.num_qubits
    return (1 << (Q - site)) - 1


def classify_single_domain_wall(spec: ChainSpec, spins) -> Optional[int]:
    """Wall site if ``spins`` is a pinned single-wall state, else ``None``."""
    s = np.asarray(spins)
    if s.shape != (spec.num_qubits,) or s[0] != 1 or s[-1] != -1:
        return None
    flips = np.flatnonzero(s[:-1] != s[1:])
    if flips.size != 1:
        return None
    return int(flips[0]) + 1


def classify_records(spins) -> np.ndarray:
    """Vectorised :func:`classify_single_domain_wall` over rows; 0 marks out-of-sector."""
    s = np.asarray(spins)
    down_step = (s[:, :-1] == 1) & (s[:, 1:] == -1)
    walls = (s[:, :-1] != s[:, 1:]).sum(axis=1)
    ok = (s[:, 0] == 1) & (s[:, -1] == -1) & (walls == 1)
    return np.where(ok, np.argmax(down_step, axis=1) + 1, 0)
