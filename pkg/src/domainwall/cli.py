"""Command-line front end: ``domainwall <command> [--config FILE] [options]``.

Exit codes: 0 success, 2 bad config or input, 3 capacity or embedding
failure, 4 solver did not converge.
"""

from __future__ import annotations

import argparse
import datetime
import json
import sys
import warnings
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np
import yaml
from pydantic import BaseModel, ValidationError

from . import analytic, hardware, logs, schemas, spectral
from .chain import ChainSpec
from .distribution import DomainWallDistribution, _jsonable
from .errors import CapacityError, ConvergenceError, DomainWallError, EmbeddingError
from .fitting import fit_sigma_over_T
from .sampler import NoiseConfig, disorder_averaged_distribution
from .susceptibility import SusceptibilityParams, susceptibility_correct

EXIT_OK, EXIT_CONFIG, EXIT_CAPACITY, EXIT_CONVERGENCE = 0, 2, 3, 4


class ConfigError(Exception):
    pass


def load_config(command: str, path: Optional[str], overrides: List[str], args) -> BaseModel:
    raw: Dict[str, Any] = {}
    if path:
        try:
            with open(path) as fh:
                raw = yaml.safe_load(fh) or {}
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError("config must be a mapping")
    for item in overrides:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        node = raw
        parts = key.split(".")
        for p in parts[:-1]:
            node = node.setdefault(p, {})
            if not isinstance(node, dict):
                raise ConfigError(f"cannot set {key}: {p} is not a mapping")
        node[parts[-1]] = yaml.safe_load(value)
    model = schemas.CONFIG_MODELS[command]
    for name in ("seed", "threads"):
        value = getattr(args, name, None)
        if value is not None and name in model.model_fields:
            raw[name] = value
    if getattr(args, "input", None):
        field = {"fit": "empirical", "ingest": "log", "correct": "distribution", "spectrum": "log"}.get(command)
        if field:
            raw[field] = args.input
    return model.model_validate(raw)


def chain_spec(cfg: schemas.ChainConfig) -> ChainSpec:
    return ChainSpec(cfg.num_qubits, cfg.coupling, cfg.boundary_field)


def read_distribution(path: str) -> DomainWallDistribution:
    text = Path(path).read_text()
    if path.endswith(".tsv"):
        return DomainWallDistribution.from_tsv(text)
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"{path} is not a distribution document")
    try:
        schemas.DistributionDocument.model_validate(doc)
    except ValidationError as exc:
        raise ConfigError(f"{path} is not a distribution document:\n{exc}") from exc
    return DomainWallDistribution.from_dict(doc)


def distribution_document(dist: DomainWallDistribution, cfg: BaseModel) -> schemas.DistributionDocument:
    d = dist.to_dict()
    return schemas.DistributionDocument(config=cfg.model_dump(mode="json"), **d)


class Writer:
    def __init__(self, out: str, fmt: str, canonical: bool):
        self.out = Path(out)
        self.fmt = fmt
        self.canonical = canonical
        self.written: List[Path] = []

    def _path(self, name):
        self.out.mkdir(parents=True, exist_ok=True)
        p = self.out / name
        self.written.append(p)
        return p

    def json(self, name: str, doc: BaseModel):
        if self.fmt == "tsv":
            return
        if not self.canonical:
            doc = doc.model_copy(update={"created": datetime.datetime.now(datetime.timezone.utc).isoformat()})
        payload = doc.model_dump(mode="json", exclude_none=True)
        self._path(name).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")

    def text(self, name: str, text: str):
        if self.fmt == "json":
            return
        self._path(name).write_text(text)


def cmd_sample(cfg: schemas.SampleConfig, w: Writer) -> str:
    spec = chain_spec(cfg.chain)
    noise = NoiseConfig(**cfg.noise.model_dump())
    if cfg.hardware is None:
        dist = disorder_averaged_distribution(spec, noise, cfg.beta, cfg.realizations, cfg.seed, cfg.threads)
    else:
        hw = cfg.hardware
        graph = hardware.build_chimera(hw.rows, hw.cols, hw.cell_size, hw.broken)
        if hw.density == "high":
            emb = hardware.high_density_embeddings(graph, spec.num_qubits, cfg.seed)
        else:
            emb, _ = hardware.low_density_embedding(graph, spec.num_qubits, cfg.seed, hw.max_per_cell)
        dist = hardware.embedded_chain_distribution(
            graph, emb, noise, cfg.beta, cfg.realizations, cfg.seed, hw.gauge, cfg.threads
        )
    fit = analytic.parabola_fit(dist, cfg.parabola_threshold)
    dist.diagnostics["parabola"] = {
        "coefficients": fit["coefficients"],
        "max_residual_stderr": fit["max_residual"],
        "non_parabolic": fit["non_parabolic"],
    }
    dist.diagnostics["edge_to_center"] = dist.edge_to_center()
    w.json("distribution.json", distribution_document(dist, cfg))
    w.text("distribution.tsv", dist.to_tsv())
    flag = " NON-PARABOLIC" if fit["non_parabolic"] else ""
    return f"sampled {dist.realizations} realizations; edge/center {dist.edge_to_center():.4f}{flag}"


def cmd_analytic(cfg: schemas.AnalyticConfig, w: Writer) -> str:
    spec = chain_spec(cfg.chain)
    if cfg.method == "high-t":
        zsq = cfg.sigma**2 if cfg.zeta_sq is None else cfg.zeta_sq
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            dist = analytic.high_t_distribution(analytic.HighTParams(spec.num_sites, cfg.beta, zsq))
        if caught:
            dist.diagnostics["warning"] = str(caught[0].message)
    elif cfg.method == "zero-t":
        dist = analytic.zero_t_distribution(analytic.ZeroTParams(spec.num_sites, 1.0, cfg.max_distance))
    elif cfg.method == "mean-field":
        dist = analytic.mean_field_finite_t(spec, cfg.sigma, cfg.beta, cfg.tol, cfg.max_iter, cfg.damping)
    else:
        dist = analytic.exact_discrete_disorder_average(spec, cfg.sigma, cfg.beta)
    w.json(f"analytic-{cfg.method}.json", distribution_document(dist, cfg))
    w.text(f"analytic-{cfg.method}.tsv", dist.to_tsv())
    return f"{cfg.method}: edge/center {dist.edge_to_center():.4f}"


def cmd_fit(cfg: schemas.FitConfig, w: Writer) -> str:
    if not cfg.empirical:
        raise ConfigError("fit needs an empirical distribution (positional INPUT or 'empirical')")
    spec = chain_spec(cfg.chain)
    emp = read_distribution(cfg.empirical)
    res = fit_sigma_over_T(emp, spec, cfg.grid, cfg.realizations, cfg.seed, cfg.distribution, cfg.tol)
    w.json("fit.json", schemas.FitDocument(config=cfg.model_dump(mode="json"), **res.to_dict()))
    note = " (non-convex residual)" if res.non_convex else ""
    return f"sigma/T = {res.sigma_over_T:.4f}, residual {res.residual:.3g}{note}"


def cmd_embed(cfg: schemas.EmbedConfig, w: Writer) -> str:
    graph = hardware.build_chimera(cfg.rows, cfg.cols, cfg.cell_size, cfg.broken)
    if cfg.density == "high":
        emb = hardware.high_density_embeddings(graph, cfg.length, cfg.seed, cfg.min_coverage)
        stats = hardware.cell_sharing(graph, emb)
    else:
        emb, stats = hardware.low_density_embedding(graph, cfg.length, cfg.seed, cfg.max_per_cell)
    hardware.validate_embeddings(graph, emb)
    doc = schemas.EmbeddingDocument(
        config=cfg.model_dump(mode="json"),
        graph=graph.to_dict(),
        chains=[list(e.qubit_path) for e in emb],
        style=cfg.density,
        cell_sharing=_jsonable(stats),
    )
    w.json("embedding.json", doc)
    w.text("embedding.dot", hardware.embeddings_to_dot(graph, emb))
    return f"{len(emb)} chains of length {cfg.length}"


def cmd_ingest(cfg: schemas.IngestConfig, w: Writer) -> str:
    if not cfg.log:
        raise ConfigError("ingest needs a sample log (positional INPUT or 'log')")
    log = logs.read_sample_log(cfg.log)
    spec = chain_spec(cfg.chain) if cfg.chain else ChainSpec(log.num_qubits)
    ts = logs.domain_wall_time_series(log, spec, cfg.bin_seconds)
    shims = logs.shim_statistics(log, cfg.shim_windows)
    doc = schemas.IngestDocument(
        config=cfg.model_dump(mode="json"),
        time_series=_jsonable(ts.to_dict()),
        shims=_jsonable(shims),
    )
    w.json("ingest.json", doc)
    if ts.distribution.realizations:
        w.text("distribution.tsv", ts.distribution.to_tsv())
    return f"{int(ts.samples.sum())} records in {ts.samples.size} bins, {int(ts.out_of_sector.sum())} out of sector"


def cmd_correct(cfg: schemas.CorrectConfig, w: Writer) -> str:
    if not cfg.distribution:
        raise ConfigError("correct needs a distribution (positional INPUT or 'distribution')")
    spec = chain_spec(cfg.chain)
    dist = read_distribution(cfg.distribution)
    out = susceptibility_correct(dist, SusceptibilityParams(cfg.chi, cfg.schedule_ratio), spec)
    w.json("corrected.json", distribution_document(out, cfg))
    w.text("corrected.tsv", out.to_tsv())
    return f"terminal factor {out.diagnostics['susceptibility_factor']:.6g}"


def cmd_spectrum(cfg: schemas.SpectrumConfig, w: Writer) -> str:
    if not cfg.log:
        raise ConfigError("spectrum needs a sample log (positional INPUT or 'log')")
    log = logs.read_sample_log(cfg.log)
    if cfg.qubit > log.num_qubits:
        raise ConfigError(f"qubit {cfg.qubit} not in a {log.num_qubits}-qubit log")
    times, pol, _ = logs.run_polarizations(log)
    series = pol[:, cfg.qubit - 1]
    spec_result = spectral.spectral_density(series, temperature=cfg.temperature, timestamps=times)
    mean_pol = log.records.mean(axis=0)
    # pinned or frozen qubits carry no thermal information
    static = None
    if np.all(np.abs(mean_pol) < 1):
        static = spectral.polarization_to_noise(mean_pol, exact=cfg.exact_inversion)
    doc = schemas.SpectrumDocument(
        config=cfg.model_dump(mode="json"),
        qubit=cfg.qubit,
        spectrum=_jsonable(spec_result.to_dict()),
        single_qubit_estimate=static,
        spectral_estimate=spec_result.rms_lag1 / cfg.temperature,
    )
    w.json("spectrum.json", doc)
    rows = ["# frequency_hz density_per_hz noise_density"]
    rows += [f"{f:.12g}\t{s:.12g}\t{z:.12g}" for f, s, z in
             zip(spec_result.frequencies, spec_result.density, spec_result.noise_density)]
    w.text("spectrum.tsv", "\n".join(rows) + "\n")
    static_text = "n/a" if static is None else f"{static:.4f}"
    return (f"static sigma/T {static_text}, spectral (lag 1) {doc.spectral_estimate:.4f}, "
            f"total rms {spec_result.rms_total:.4f}")


COMMANDS = {
    "sample": (cmd_sample, "disorder-averaged wall distribution by Monte Carlo"),
    "analytic": (cmd_analytic, "high-t, zero-t, mean-field or exact-discrete distribution"),
    "fit": (cmd_fit, "fit sigma/T to an empirical distribution"),
    "embed": (cmd_embed, "chain embeddings on a Chimera graph"),
    "ingest": (cmd_ingest, "time series and shim statistics of a sample log"),
    "correct": (cmd_correct, "undo background-susceptibility suppression of terminal sites"),
    "spectrum": (cmd_spectrum, "noise spectral density of one qubit in a sample log"),
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="domainwall", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        if name in ("fit", "ingest", "correct", "spectrum"):
            p.add_argument("input", nargs="?", help="input file (overrides the config entry)")
        p.add_argument("--config", help="JSON or YAML config file")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override a config entry, dotted keys allowed")
        p.add_argument("--seed", type=int)
        p.add_argument("--threads", type=int)
        p.add_argument("--format", choices=("json", "tsv", "both"), default="both")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--canonical", action="store_true",
                       help="omit creation timestamps so reruns are byte-identical")
    s = sub.add_parser("schema", help="print the JSON schema of a config or output document")
    s.add_argument("name", choices=sorted({**schemas.CONFIG_MODELS, **schemas.OUTPUT_MODELS}))
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "schema":
        print(json.dumps(schemas.schema_for(args.name), indent=2, sort_keys=True))
        return EXIT_OK
    func = COMMANDS[args.command][0]
    try:
        cfg = load_config(args.command, args.config, args.set, args)
        w = Writer(args.out, args.format, args.canonical)
        message = func(cfg, w)
    except ValidationError as exc:
        print(f"config error:\n{exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (CapacityError, EmbeddingError) as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except ConvergenceError as exc:
        print(f"convergence error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (ConfigError, DomainWallError, OSError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(message)
    for p in w.written:
        print(f"  wrote {p}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
