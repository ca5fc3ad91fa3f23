"""Domain-wall probability distributions and their JSON form."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np

from .errors import DomainError, InputError


@dataclass
class DomainWallDistribution:
    """Probability per domain-wall site (index 0 is site 1), with standard errors.

    ``stderrs`` are standard deviations of the mean for sampled estimates and
    zero for exact or analytic ones. ``beta`` is ``None`` where temperature
    does not enter (zero-temperature solver, empirical counts).
    """

    probs: np.ndarray
    stderrs: Optional[np.ndarray] = None
    realizations: int = 0
    beta: Optional[float] = None
    provenance: str = "unspecified"
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.probs = np.asarray(self.probs, dtype=float)
        if self.stderrs is None:
            self.stderrs = np.zeros_like(self.probs)
        self.stderrs = np.asarray(self.stderrs, dtype=float)
        if self.probs.ndim != 1 or self.probs.size < 1:
            raise DomainError("probs must be a non-empty vector")
        if self.stderrs.shape != self.probs.shape:
            raise DomainError("stderrs must match probs")

    @property
    def num_sites(self) -> int:
        return self.probs.size

    @property
    def sites(self) -> np.ndarray:
        return np.arange(1, self.num_sites + 1)

    def edge_to_center(self) -> float:
        """Mean of the two terminal probabilities over the central probability."""
        D = self.num_sites
        center = self.probs[(D - 1) // 2] if D % 2 else self.probs[D // 2 - 1 : D // 2 + 1].mean()
        return float(0.5 * (self.probs[0] + self.probs[-1]) / center)

    def max_abs_diff(self, other: "DomainWallDistribution") -> float:
        return float(np.max(np.abs(self.probs - np.asarray(other.probs))))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "sites": self.sites.tolist(),
            "probs": self.probs.tolist(),
            "stderrs": self.stderrs.tolist(),
            "realizations": int(self.realizations),
            "beta": self.beta,
            "provenance": self.provenance,
            "diagnostics": _jsonable(self.diagnostics),
        }

    @classmethod
    def from_dict(cls, doc: Dict[str, Any]) -> "DomainWallDistribution":
        try:
            probs = np.asarray(doc["probs"], dtype=float)
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"distribution document lacks a numeric 'probs' list: {exc}") from exc
        stderrs = doc.get("stderrs")
        return cls(
            probs=probs,
            stderrs=None if stderrs is None else np.asarray(stderrs, dtype=float),
            realizations=int(doc.get("realizations", 0) or 0),
            beta=doc.get("beta"),
            provenance=doc.get("provenance", "empirical"),
            diagnostics=dict(doc.get("diagnostics") or {}),
        )

    def to_tsv(self) -> str:
        lines = ["# site prob stderr"]
        for n, p, e in zip(self.sites, self.probs, self.stderrs):
            lines.append(f"{n}\t{p:.12g}\t{e:.6g}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_tsv(cls, text: str) -> "DomainWallDistribution":
        rows = []
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) < 2:
                raise InputError(f"malformed TSV row: {line!r}")
            try:
                rows.append([float(x) for x in parts[:3]] + ([0.0] if len(parts) == 2 else []))
            except ValueError as exc:
                raise InputError(f"malformed TSV row: {line!r}") from exc
        if not rows:
            raise InputError("no distribution rows found")
        arr = np.asarray(rows)
        return cls(probs=arr[:, 1], stderrs=arr[:, 2], provenance="empirical")


def uniform_distribution(num_sites: int, provenance: str = "uniform") -> DomainWallDistribution:
    return DomainWallDistribution(np.full(num_sites, 1.0 / num_sites), provenance=provenance)


def _jsonable(value):
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    return value
