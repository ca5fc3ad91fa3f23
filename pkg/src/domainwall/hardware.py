"""Chimera hardware graphs, chain embeddings and Z2 gauge transformations.

Qubit ids follow the usual linear Chimera labelling::

    q = ((row * cols + col) * 2 + side) * k + index

``side == 0`` qubits couple vertically to the same index in the cells above
and below; ``side == 1`` qubits couple horizontally. Inside a cell the two
sides form a complete bipartite graph ``K_{k,k}``.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Sequence, Tuple

import numpy as np

from . import rng
from .chain import sector_energies
from .distribution import DomainWallDistribution
from .errors import DimensionError, DomainError, EmbeddingError
from .sampler import NoiseConfig, average_rows, boltzmann_rows

HIGH_DENSITY = "high_density"
LOW_DENSITY = "low_density"


@dataclass(frozen=True)
class HardwareGraph:
    rows: int
    cols: int
    cell_size: int
    adjacency: Dict[int, FrozenSet[int]] = field(repr=False)
    broken: FrozenSet[int] = frozenset()

    @property
    def num_ids(self) -> int:
        return self.rows * self.cols * 2 * self.cell_size

    @property
    def qubits(self) -> List[int]:
        return sorted(self.adjacency)

    def edges(self) -> List[Tuple[int, int]]:
        return sorted((a, b) for a, nbrs in self.adjacency.items() for b in nbrs if a < b)

    def coordinates(self, q: int) -> Tuple[int, int, int, int]:
        k = self.cell_size
        index = q % k
        side = (q // k) % 2
        cell = q // (2 * k)
        return cell // self.cols, cell % self.cols, side, index

    def cell_of(self, q: int) -> int:
        return q // (2 * self.cell_size)

    def to_dict(self) -> dict:
        return {
            "topology": "chimera",
            "rows": self.rows,
            "cols": self.cols,
            "cell_size": self.cell_size,
            "broken_qubits": sorted(self.broken),
            "num_qubits": len(self.adjacency),
            "edges": [list(e) for e in self.edges()],
        }


def build_chimera(rows: int, cols: int, cell_size: int = 4, broken: Iterable[int] = ()) -> HardwareGraph:
    """Chimera graph with the given grid of ``K_{k,k}`` cells, minus ``broken`` qubits."""
    if rows < 1 or cols < 1 or cell_size < 1:
        raise DomainError("rows, cols and cell_size must be >= 1")
    k = cell_size
    broken = frozenset(int(b) for b in broken)
    total = rows * cols * 2 * k
    bad = [b for b in broken if not 0 <= b < total]
    if bad:
        raise DomainError(f"broken qubit ids out of range: {bad}")

    def qid(r, c, side, i):
        return ((r * cols + c) * 2 + side) * k + i

    adj: Dict[int, set] = {q: set() for q in range(total) if q not in broken}

    def link(a, b):
        if a in adj and b in adj:
            adj[a].add(b)
            adj[b].add(a)

    for r in range(rows):
        for c in range(cols):
            for i in range(k):
                for j in range(k):
                    link(qid(r, c, 0, i), qid(r, c, 1, j))
                if r + 1 < rows:
                    link(qid(r, c, 0, i), qid(r + 1, c, 0, i))
                if c + 1 < cols:
                    link(qid(r, c, 1, i), qid(r, c + 1, 1, i))
    return HardwareGraph(rows, cols, k, {q: frozenset(n) for q, n in adj.items()}, broken)


def _largest_component(adj) -> List[int]:
    seen, best = set(), []
    for q in adj:
        if q in seen:
            continue
        comp, stack = [], [q]
        seen.add(q)
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(comp) > len(best):
            best = comp
    return sorted(best)


def _rotation_extension(adj, nodes, gen: random.Random, max_steps: int):
    """Randomised longest-cycle search by path extension and rotation.

    Returns the first Hamiltonian cycle over ``nodes`` it meets, otherwise the
    longest closed sub-path seen.
    """
    target = len(nodes)
    start = gen.choice(nodes)
    path, pos = [start], {start: 0}
    best: List[int] = []
    for _ in range(max_steps):
        end = path[-1]
        if len(path) == target and start in adj[end] and target > 2:
            return path
        free = [v for v in adj[end] if v not in pos]
        if free:
            v = gen.choice(free)
            pos[v] = len(path)
            path.append(v)
            continue
        if len(path) < 2:
            break
        # stuck: record the best cycle closable from here, then rotate
        back = [pos[v] for v in adj[end] if v != path[-2]]
        if back:
            first = min(back)
            if len(path) - first > len(best) and len(path) - first > 2:
                best = path[first:]
        candidates = [v for v in adj[end] if v != path[-2]]
        if not candidates:
            break
        i = pos[gen.choice(candidates)]
        path[i + 1 :] = path[:i:-1]
        for j in range(i + 1, len(path)):
            pos[path[j]] = j
    return best


def generate_master_chain(
    graph: HardwareGraph,
    seed: int,
    min_coverage: float = 0.95,
    attempts: int = 8,
) -> List[int]:
    """Closed chain of distinct, consecutively coupled qubits spanning the graph.

    The last element couples back to the first. Bond choices are randomised by
    ``seed``. On graphs with broken qubits the longest cycle found is returned
    provided it covers at least ``min_coverage`` of the working qubits.
    """
    available = len(graph.adjacency)
    if available < 4:
        raise EmbeddingError("graph too small for a cycle", coverage=0.0)
    nodes = _largest_component(graph.adjacency)
    # Chimera is bipartite, so no cycle can exceed twice the smaller colour class
    colour = Counter((side + row + col) % 2 for row, col, side, _ in map(graph.coordinates, nodes))
    bound = 2 * min(colour[0], colour[1])
    gen = random.Random(seed)
    best: List[int] = []
    for _ in range(attempts):
        cycle = _rotation_extension(graph.adjacency, nodes, gen, max_steps=100 * len(nodes))
        if len(cycle) > len(best):
            best = cycle
        if len(best) >= bound:
            break
    coverage = len(best) / available
    if coverage < min_coverage:
        raise EmbeddingError(
            f"master chain covers {len(best)} of {available} working qubits ({coverage:.1%})",
            coverage=coverage,
        )
    return list(best)


@dataclass(frozen=True)
class Embedding:
    qubit_path: Tuple[int, ...]
    style: str = HIGH_DENSITY

    def __len__(self):
        return len(self.qubit_path)

    def to_dict(self) -> dict:
        return {"qubit_path": list(self.qubit_path), "style": self.style}


def cut_chains(master: Sequence[int], length: int, offset: int = 0, style: str = HIGH_DENSITY) -> List[Embedding]:
    """As many disjoint length-``length`` chains as fit, starting at ``offset``."""
    n = len(master)
    if not 1 <= length <= n:
        raise DomainError(f"chain length must be in 1..{n}, got {length}")
    offset %= n
    ring = list(master[offset:]) + list(master[:offset])
    return [Embedding(tuple(ring[s : s + length]), style) for s in range(0, n - length + 1, length)]


def high_density_embeddings(graph: HardwareGraph, length: int, seed: int,
                            min_coverage: float = 0.95) -> List[Embedding]:
    """Random master cycle cut into chains from a random starting point."""
    master = generate_master_chain(graph, seed, min_coverage)
    offset = random.Random(seed + 1).randrange(len(master))
    return cut_chains(master, length, offset)


def low_density_embedding(graph: HardwareGraph, length: int, seed: int, max_per_cell: int = 2):
    """Greedy chains that spread over unit cells.

    Each chain takes at most ``max_per_cell`` qubits from any one cell, and
    steps preferentially leave the current cell and enter lightly used cells.
    Returns ``(embeddings, cell_sharing_stats)``.
    """
    if length < 1:
        raise DomainError("chain length must be positive")
    gen = random.Random(seed)
    adj = graph.adjacency
    used: set = set()
    load: Counter = Counter()
    out: List[Embedding] = []
    starts = graph.qubits
    gen.shuffle(starts)
    for q in starts:
        if q in used:
            continue
        path = [q]
        members = {q}
        counts = Counter({graph.cell_of(q): 1})
        while len(path) < length:
            end = path[-1]
            options = [
                v for v in adj[end]
                if v not in used and v not in members and counts[graph.cell_of(v)] < max_per_cell
            ]
            if not options:
                break
            gen.shuffle(options)
            v = min(options, key=lambda v: (counts[graph.cell_of(v)], load[graph.cell_of(v)]))
            path.append(v)
            members.add(v)
            counts[graph.cell_of(v)] += 1
        if len(path) == length:
            out.append(Embedding(tuple(path), LOW_DENSITY))
            used |= members
            load.update(counts)
    if not out:
        raise EmbeddingError(f"no chain of length {length} fits the cell-spreading constraint")
    return out, cell_sharing(graph, out)


def cell_sharing(graph: HardwareGraph, embeddings: Sequence[Embedding]) -> dict:
    """How concentrated chains are within unit cells."""
    per_chain = []
    worst = 0
    for emb in embeddings:
        counts = Counter(graph.cell_of(q) for q in emb.qubit_path)
        per_chain.append(len(emb) / len(counts))
        worst = max(worst, max(counts.values()))
    return {
        "chains": len(embeddings),
        "mean_qubits_per_cell": float(np.mean(per_chain)) if per_chain else 0.0,
        "max_qubits_per_cell": int(worst),
    }


def validate_embeddings(graph: HardwareGraph, embeddings: Sequence[Embedding]) -> None:
    """Raise :class:`EmbeddingError` unless every chain is a coupled path of
    distinct working qubits and chains are pairwise disjoint."""
    seen = set()
    for n, emb in enumerate(embeddings):
        path = emb.qubit_path
        if len(set(path)) != len(path):
            raise EmbeddingError(f"chain {n} repeats a qubit")
        for a, b in zip(path, path[1:]):
            if a not in graph.adjacency or b not in graph.adjacency[a]:
                raise EmbeddingError(f"chain {n}: qubits {a} and {b} are not coupled")
        overlap = seen.intersection(path)
        if overlap:
            raise EmbeddingError(f"chain {n} reuses qubits {sorted(overlap)}")
        seen.update(path)


def embeddings_to_dot(graph: HardwareGraph, embeddings: Sequence[Embedding]) -> str:
    lines = ["graph chimera {", "  node [shape=point];"]
    on_chain = {}
    for n, emb in enumerate(embeddings):
        for a, b in zip(emb.qubit_path, emb.qubit_path[1:]):
            on_chain[(min(a, b), max(a, b))] = n
    for a, b in graph.edges():
        if (a, b) in on_chain:
            lines.append(f'  {a} -- {b} [penwidth=2, label="{on_chain[(a, b)]}"];')
        else:
            lines.append(f"  {a} -- {b} [style=dotted];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def apply_gauge(h, J, gauge):
    """Flip each qubit with ``gauge_i = -1`` together with its field and couplers."""
    h = np.asarray(h, dtype=float)
    J = np.asarray(J, dtype=float)
    g = np.asarray(gauge)
    if g.shape != h.shape or J.shape != (h.size - 1,):
        raise DimensionError(f"gauge {g.shape}, fields {h.shape}, couplers {J.shape}")
    if not np.all((g == 1) | (g == -1)):
        raise DomainError("gauge entries must be +1 or -1")
    return g * h, g[:-1] * g[1:] * J


def ungauge_samples(samples, gauge) -> np.ndarray:
    """Map spin records read in the gauged frame back to the logical frame."""
    s = np.asarray(samples)
    g = np.asarray(gauge)
    if s.shape[-1] != g.size:
        raise DimensionError(f"records have {s.shape[-1]} spins, gauge has {g.size}")
    return (s * g).astype(s.dtype)


def random_gauge(num_qubits: int, seed: int, index: int = 0) -> np.ndarray:
    return rng.random_signs(seed, [index], num_qubits, rng.GAUGE_STREAM)[0].astype(np.int8)


def embedded_chain_distribution(
    graph: HardwareGraph,
    embeddings: Sequence[Embedding],
    noise: NoiseConfig,
    beta: float,
    draws: int,
    seed: int = 0,
    gauge: str = "random",
    threads: int = 1,
) -> DomainWallDistribution:
    """Wall distribution averaged over noise draws and over all embedded chains.

    Physical qubits carry independent field noise ``field_sigma`` plus a
    common-mode term ``cell_sigma`` shared within a unit cell. In the logical
    frame a qubit's noise is multiplied by its gauge sign. ``gauge`` is
    ``"random"`` (fresh gauge per draw and chain), ``"ferro"`` (identity, all
    physical couplers ferromagnetic) or ``"antiferro"`` (alternating signs).
    With ``ferro_scale != 1`` the field noise on a qubit grows with the fraction
    of its chain couplers that are physically ferromagnetic.
    """
    if gauge not in ("random", "ferro", "antiferro"):
        raise DomainError(f"unknown gauge mode {gauge!r}")
    paths = np.array([e.qubit_path for e in embeddings], dtype=np.int64)
    if paths.ndim != 2 or paths.shape[1] < 2:
        raise DomainError("need equal-length chains of at least two qubits")
    n_chains, L = paths.shape
    cells = paths // (2 * graph.cell_size)
    n_ids = graph.num_ids
    n_cells = graph.rows * graph.cols
    fixed = np.ones(L) if gauge == "ferro" else (-1.0) ** np.arange(L)

    def rows(start, count):
        idx = np.arange(start, start + count, dtype=np.uint64)
        z = noise.field_sigma * rng.standard_normals(seed, idx, n_ids, rng.FIELD_STREAM)[:, paths]
        if noise.cell_sigma > 0:
            c = rng.standard_normals(seed, idx, n_cells, rng.CELL_STREAM)
            z = z + noise.cell_sigma * c[:, cells]
        if gauge == "random":
            g = rng.random_signs(seed, idx, n_ids, rng.GAUGE_STREAM)[:, paths]
        else:
            g = np.broadcast_to(fixed, z.shape)
        if noise.ferro_scale != 1.0:
            ferro = (g[..., :-1] * g[..., 1:] > 0).astype(float)
            frac = np.empty_like(z)
            frac[..., 0] = ferro[..., 0]
            frac[..., -1] = ferro[..., -1]
            frac[..., 1:-1] = 0.5 * (ferro[..., :-1] + ferro[..., 1:])
            z = z * (1.0 + (noise.ferro_scale - 1.0) * frac)
        logical = (g * z).reshape(count * n_chains, L)
        return boltzmann_rows(sector_energies(logical), beta)

    mean, stderr = average_rows(rows, draws, threads, chunk_size=max(1, 32768 // n_chains))
    return DomainWallDistribution(
        mean,
        stderr,
        realizations=draws * n_chains,
        beta=beta,
        provenance=f"embedded/{gauge}",
        diagnostics={"chains": n_chains, "draws": draws, "seed": seed},
    )
