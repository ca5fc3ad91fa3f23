"""Sample logs from an annealer: CSV I/O, shim-window drift statistics and
per-bin domain-wall counts."""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Union

import numpy as np

from .chain import ChainSpec, classify_records
from .distribution import DomainWallDistribution
from .errors import DimensionError, InputError


@dataclass
class SampleLog:
    """One row per read-out. Rows sharing a timestamp belong to the same run.

    ``shim_ids`` labels the calibration window of each row; absent means the
    whole log is one window.
    """

    timestamps: np.ndarray
    records: np.ndarray
    shim_ids: Optional[np.ndarray] = None

    def __post_init__(self):
        self.timestamps = np.asarray(self.timestamps, dtype=float).ravel()
        self.records = np.asarray(self.records)
        if self.records.ndim != 2:
            raise DimensionError("records must be a 2-D array")
        if self.records.shape[0] != self.timestamps.size:
            raise DimensionError("one timestamp per record required")
        if not np.all(np.isin(self.records, (-1, 1))):
            raise InputError("spins must be +1 or -1")
        self.records = self.records.astype(np.int8)
        if np.any(np.diff(self.timestamps) < 0):
            raise InputError("timestamps must be non-decreasing")
        if self.shim_ids is not None:
            self.shim_ids = np.asarray(self.shim_ids, dtype=np.int64).ravel()
            if self.shim_ids.size != self.timestamps.size:
                raise DimensionError("one shim id per record required")

    @property
    def num_qubits(self) -> int:
        return self.records.shape[1]

    @classmethod
    def with_boundaries(cls, timestamps, records, shim_boundaries) -> "SampleLog":
        """Assign windows from boundary times: window ``w`` covers
        ``[b_{w-1}, b_w)`` with ``b_{-1} = -inf``."""
        ids = np.searchsorted(np.sort(np.asarray(shim_boundaries, dtype=float)), timestamps, side="right")
        return cls(timestamps, records, ids)


def read_sample_log(source: Union[str, Path, io.TextIOBase]) -> SampleLog:
    """Parse ``timestamp,spin_1,...,spin_Q[,shim]`` CSV from a path or text stream."""
    if isinstance(source, (str, Path)):
        with open(source, newline="") as fh:
            return read_sample_log(fh)
    reader = csv.reader(source)
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise InputError("sample log is empty") from None
    if not header or header[0] != "timestamp":
        raise InputError("first column must be 'timestamp'")
    has_shim = header[-1] == "shim"
    spin_cols = header[1:-1] if has_shim else header[1:]
    if not spin_cols or spin_cols != [f"spin_{i}" for i in range(1, len(spin_cols) + 1)]:
        raise InputError("spin columns must be spin_1 ... spin_Q")
    rows = [r for r in reader if r and any(x.strip() for x in r)]
    if not rows:
        raise InputError("sample log has no records")
    width = len(header)
    try:
        data = np.array([[float(x) for x in r] for r in rows])
    except ValueError as exc:
        raise InputError(f"non-numeric entry in sample log: {exc}") from exc
    if data.ndim != 2 or data.shape[1] != width:
        raise InputError(f"every row must have {width} columns")
    shim = data[:, -1].astype(np.int64) if has_shim else None
    return SampleLog(data[:, 0], data[:, 1 : 1 + len(spin_cols)].astype(int), shim)


def write_sample_log(log: SampleLog, target: Union[str, Path, io.TextIOBase]) -> None:
    if isinstance(target, (str, Path)):
        with open(target, "w", newline="") as fh:
            return write_sample_log(log, fh)
    w = csv.writer(target, lineterminator="\n")
    header = ["timestamp"] + [f"spin_{i}" for i in range(1, log.num_qubits + 1)]
    if log.shim_ids is not None:
        header.append("shim")
    w.writerow(header)
    for k in range(log.timestamps.size):
        row = [repr(float(log.timestamps[k]))] + [int(x) for x in log.records[k]]
        if log.shim_ids is not None:
            row.append(int(log.shim_ids[k]))
        w.writerow(row)


def run_polarizations(log: SampleLog):
    """Per-run mean spin of every qubit, grouped by timestamp.

    Returns ``(run_times, polarizations, run_shim)`` with polarizations of
    shape ``(runs, Q)``.
    """
    times, inverse, counts = np.unique(log.timestamps, return_inverse=True, return_counts=True)
    sums = np.zeros((times.size, log.num_qubits))
    np.add.at(sums, inverse, log.records.astype(float))
    shim = np.zeros(times.size, dtype=np.int64)
    if log.shim_ids is not None:
        shim[inverse] = log.shim_ids
    return times, sums / counts[:, None], shim


def shim_statistics(log: SampleLog, windows: Optional[List[int]] = None) -> List[dict]:
    """Window mean polarization and mean absolute run-to-window deviation per qubit.

    ``windows`` lists window ids expected in the log; any without records is
    skipped with a warning.
    """
    _, pol, shim = run_polarizations(log)
    present = np.unique(shim)
    ids = present if windows is None else np.asarray(windows, dtype=np.int64)
    out = []
    for w in ids:
        sel = shim == w
        if not np.any(sel):
            warnings.warn(f"shim window {int(w)} has no runs; skipped", RuntimeWarning, stacklevel=2)
            continue
        mean = pol[sel].mean(axis=0)
        out.append({
            "window": int(w),
            "runs": int(sel.sum()),
            "mean_polarization": mean,
            "mean_abs_deviation": np.abs(pol[sel] - mean).mean(axis=0),
        })
    return out


@dataclass
class TimeSeries:
    bin_starts: np.ndarray
    counts: np.ndarray               # (bins, D)
    out_of_sector: np.ndarray        # (bins,)
    samples: np.ndarray              # records per bin
    mean_polarization: np.ndarray    # mean chain polarization per bin
    polarization_std: float          # spread of the bin means
    expected_std: float              # spread expected from sampling alone
    distribution: DomainWallDistribution = field(repr=False)

    def to_dict(self) -> dict:
        return {
            "bin_starts_s": self.bin_starts.tolist(),
            "counts": self.counts.tolist(),
            "out_of_sector": self.out_of_sector.tolist(),
            "samples": self.samples.tolist(),
            "mean_polarization": self.mean_polarization.tolist(),
            "polarization_std": self.polarization_std,
            "expected_std": self.expected_std,
            "distribution": self.distribution.to_dict(),
        }


def domain_wall_time_series(log: SampleLog, spec: ChainSpec, bin_seconds: Optional[float] = None) -> TimeSeries:
    """Domain-wall counts per time bin; one bin per run unless ``bin_seconds`` is set.

    ``expected_std`` is the standard deviation of a bin's mean chain
    polarization if walls were uniformly distributed and bins differed only
    by finite sampling.
    """
    if log.num_qubits != spec.num_qubits:
        raise DimensionError(f"records have {log.num_qubits} spins, chain has {spec.num_qubits}")
    D = spec.num_sites
    if bin_seconds is None:
        starts, bins = np.unique(log.timestamps, return_inverse=True)
    else:
        if not bin_seconds > 0:
            raise InputError("bin width must be positive")
        t0 = log.timestamps[0]
        k = np.floor((log.timestamps - t0) / bin_seconds).astype(np.int64)
        uniq, bins = np.unique(k, return_inverse=True)
        starts = t0 + uniq * bin_seconds
    nb = starts.size
    site = classify_records(log.records)
    counts = np.zeros((nb, D + 1), dtype=np.int64)
    np.add.at(counts, (bins, site), 1)
    samples = np.bincount(bins, minlength=nb)
    chain_pol = log.records.mean(axis=1)
    pol_sum = np.bincount(bins, weights=chain_pol, minlength=nb)
    mean_pol = pol_sum / samples

    n = np.arange(1, D + 1)
    per_sample_var = np.var((2.0 * n - spec.num_qubits) / spec.num_qubits)
    expected = float(np.sqrt(per_sample_var / samples.mean()))

    total = counts[:, 1:].sum(axis=0)
    in_sector = total.sum()
    if in_sector:
        p = total / in_sector
        se = np.sqrt(p * (1 - p) / in_sector)
    else:
        p = np.full(D, np.nan)
        se = np.full(D, np.nan)
    dist = DomainWallDistribution(
        p, se, realizations=int(in_sector), provenance="empirical",
        diagnostics={"out_of_sector": int(counts[:, 0].sum()), "records": int(samples.sum())},
    )
    return TimeSeries(
        bin_starts=starts,
        counts=counts[:, 1:],
        out_of_sector=counts[:, 0],
        samples=samples,
        mean_polarization=mean_pol,
        polarization_std=float(mean_pol.std()),
        expected_std=expected,
        distribution=dist,
    )


def synthetic_sample_log(spec: ChainSpec, probs, runs: int, samples_per_run: int,
                         seed: int = 0, run_interval: float = 1.0) -> SampleLog:
    """Log of single-wall records with sites drawn from ``probs``."""
    probs = np.asarray(probs, dtype=float)
    if probs.shape != (spec.num_sites,):
        raise DimensionError("probs must have one entry per wall site")
    gen = np.random.default_rng(seed)
    n = gen.choice(np.arange(1, spec.num_sites + 1), size=runs * samples_per_run, p=probs / probs.sum())
    records = np.where(np.arange(1, spec.num_qubits + 1)[None, :] <= n[:, None], 1, -1)
    times = np.repeat(np.arange(runs) * run_interval, samples_per_run)
    return SampleLog(times, records)
