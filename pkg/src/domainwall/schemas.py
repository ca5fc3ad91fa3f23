"""Run configurations and output documents.

All physical parameters are in units of the chain coupling ``J``; ``beta`` is
``J / k_B T``. Configs are validated before anything runs, and every JSON the
command line writes is an instance of one of the output models here.
"""

from __future__ import annotations

from typing import Any, Dict, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from . import __version__

ENERGY_UNITS = {"energy": "J (chain coupling)", "beta": "1/J", "time": "s", "frequency": "Hz"}


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ChainConfig(_Strict):
    num_qubits: int = Field(10, ge=3)
    coupling: float = Field(1.0, gt=0)
    boundary_field: float = 2.0

    @model_validator(mode="after")
    def _field_beats_coupling(self):
        if not self.boundary_field > self.coupling:
            raise ValueError("boundary_field must exceed coupling")
        return self


class NoiseSection(_Strict):
    field_sigma: float = Field(0.2363, ge=0)
    coupler_sigma: float = Field(0.0, ge=0)
    distribution: Literal["gaussian", "binary"] = "gaussian"
    cell_sigma: float = Field(0.0, ge=0)
    ferro_scale: float = Field(1.0, gt=0)


class GraphSection(_Strict):
    rows: int = Field(8, ge=1)
    cols: int = Field(8, ge=1)
    cell_size: int = Field(4, ge=1)
    broken: List[int] = Field(default_factory=list)


class HardwareSampling(GraphSection):
    density: Literal["high", "low"] = "high"
    gauge: Literal["random", "ferro", "antiferro"] = "random"
    max_per_cell: int = Field(2, ge=1)


class SampleConfig(_Strict):
    chain: ChainConfig = Field(default_factory=ChainConfig)
    noise: NoiseSection = Field(default_factory=NoiseSection)
    beta: float = Field(1.0, ge=0)
    realizations: int = Field(10_000, ge=1)
    seed: int = Field(0, ge=0)
    threads: int = Field(1, ge=1)
    parabola_threshold: float = Field(3.0, gt=0)
    hardware: Optional[HardwareSampling] = None


class AnalyticConfig(_Strict):
    method: Literal["high-t", "zero-t", "mean-field", "exact-discrete"] = "high-t"
    chain: ChainConfig = Field(default_factory=ChainConfig)
    sigma: float = Field(0.2363, ge=0)
    beta: float = Field(1.0, ge=0)
    zeta_sq: Optional[float] = Field(None, ge=0, description="defaults to sigma**2")
    max_distance: int = Field(0, ge=0)
    tol: float = Field(1e-10, gt=0)
    max_iter: int = Field(10_000, ge=1)
    damping: float = Field(0.5, ge=0, lt=1)


class FitConfig(_Strict):
    chain: ChainConfig = Field(default_factory=ChainConfig)
    empirical: Optional[str] = Field(None, description="distribution JSON or TSV")
    grid: Optional[List[float]] = None
    realizations: int = Field(100_000, ge=1)
    seed: int = Field(0, ge=0)
    distribution: Literal["gaussian", "binary"] = "gaussian"
    tol: float = Field(1e-4, gt=0)


class EmbedConfig(GraphSection):
    length: int = Field(10, ge=2)
    density: Literal["high", "low"] = "high"
    max_per_cell: int = Field(2, ge=1)
    seed: int = Field(0, ge=0)
    min_coverage: float = Field(0.95, ge=0, le=1)


class IngestConfig(_Strict):
    log: Optional[str] = None
    chain: Optional[ChainConfig] = Field(None, description="defaults to the log's chain length")
    bin_seconds: Optional[float] = Field(None, gt=0)
    shim_windows: Optional[List[int]] = None


class CorrectConfig(_Strict):
    chain: ChainConfig = Field(default_factory=ChainConfig)
    distribution: Optional[str] = None
    chi: float = 0.0
    schedule_ratio: float = 1.0


class SpectrumConfig(_Strict):
    log: Optional[str] = None
    qubit: int = Field(1, ge=1)
    temperature: float = Field(1.0, gt=0)
    exact_inversion: bool = False


CONFIG_MODELS = {
    "sample": SampleConfig,
    "analytic": AnalyticConfig,
    "fit": FitConfig,
    "embed": EmbedConfig,
    "ingest": IngestConfig,
    "correct": CorrectConfig,
    "spectrum": SpectrumConfig,
}


class _Document(BaseModel):
    model_config = ConfigDict(extra="forbid")
    version: str = __version__
    units: Dict[str, str] = Field(default_factory=lambda: dict(ENERGY_UNITS))
    config: Dict[str, Any] = Field(default_factory=dict)
    created: Optional[str] = None


class DistributionDocument(_Document):
    kind: Literal["domain_wall_distribution"] = "domain_wall_distribution"
    sites: List[int]
    probs: List[float]
    stderrs: List[float]
    realizations: int = Field(ge=0)
    beta: Optional[float] = None
    provenance: str
    diagnostics: Dict[str, Any] = Field(default_factory=dict)


class FitDocument(_Document):
    kind: Literal["noise_fit"] = "noise_fit"
    sigma_over_T: float = Field(ge=0)
    residual: float = Field(ge=0)
    search_trace: List[List[float]]
    mc_realizations: int
    seed: int
    non_convex: bool
    warnings: List[str]


class EmbeddingDocument(_Document):
    kind: Literal["embedding"] = "embedding"
    graph: Dict[str, Any]
    chains: List[List[int]]
    style: str
    cell_sharing: Dict[str, Any]


class IngestDocument(_Document):
    kind: Literal["ingest"] = "ingest"
    time_series: Dict[str, Any]
    shims: List[Dict[str, Any]]


class SpectrumDocument(_Document):
    kind: Literal["spectrum"] = "spectrum"
    qubit: int
    spectrum: Dict[str, Any]
    single_qubit_estimate: Optional[float] = None
    spectral_estimate: float


OUTPUT_MODELS = {
    "distribution": DistributionDocument,
    "fit-result": FitDocument,
    "embedding": EmbeddingDocument,
    "ingest-result": IngestDocument,
    "spectrum-result": SpectrumDocument,
}


def schema_for(name: str) -> dict:
    """JSON schema of a config (by subcommand name) or an output document."""
    models = {**CONFIG_MODELS, **OUTPUT_MODELS}
    if name not in models:
        raise KeyError(name)
    return models[name].model_json_schema()
