"""Generative temporal-network simulator with planted attachment kernels.

One node joins per tick and draws its targets without replacement from the
existing nodes, each with probability proportional to a kernel weight
evaluated on the pre-tick state: ``(k + offset)^alpha`` on degree,
``exp(beta * c)`` on coreness, or their product.  The emitted network is the
ground truth against which the measurement and fitting pipeline is checked.

Because every subgraph of a fixed-out-degree growth graph has a youngest
node with at most ``m`` internal edges, constant ``m`` collapses every
node's coreness to exactly ``m`` and leaves nothing for coreness estimators
to see.  ``out_degree`` therefore offers mean-``m`` variable draws alongside
the classic fixed arrival degree: homogeneous ones ("uniform", "geometric",
"spread") and a heavy-tailed one ("zipf") whose occasional high-out-degree
arrivals densify into deep cores, the regime where coreness estimators have
a wide abscissa to fit on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from ._peel import SimWorkspace, draw_targets
from .temporal import TemporalNetwork, from_edge_arrays

KERNEL_MODES = ("degree_only", "coreness_only", "hybrid")
OUT_DEGREE_MODES = ("fixed", "uniform", "geometric", "spread", "zipf")

_ZIPF_DMAX = 100


@dataclass(frozen=True)
class KernelSpec:
    """Attachment kernel: which node property drives attraction, and how hard.

    ``degree_offset`` regularizes the degree factor so weight stays positive
    at k = 0 (the pure power is undefined there); it is recorded in run
    metadata by the CLI.
    """

    mode: str = "hybrid"
    alpha: float = 0.0
    beta: float = 0.0
    degree_offset: float = 1.0

    def __post_init__(self):
        if self.mode not in KERNEL_MODES:
            raise ValueError(f"kernel mode must be one of {KERNEL_MODES}, got {self.mode!r}")
        if self.alpha < 0 or self.beta < 0:
            raise ValueError("kernel exponents alpha and beta must be non-negative")
        if self.degree_offset <= 0:
            raise ValueError("degree_offset must be positive")


@dataclass(frozen=True)
class SimConfig:
    """Run shape: final size, arrival out-degree, seed graph, and refresh cadence.

    ``m`` is the arrival out-degree: exact under ``out_degree="fixed"``,
    otherwise the mean of per-tick draws — "uniform" picks integers in
    ``1..2m-1``, "geometric" has success probability ``1/m``, "spread" mixes
    mass at 1 with a geometric tail of mean ``5m/3``, and "zipf" draws from
    a truncated power law on ``1..100`` whose exponent is solved so the mean
    is m.  Variable draws are capped at the current node count.
    ``coreness_refresh`` = r recomputes coreness from scratch every r ticks
    (1 = every step, the exact default); with r > 1 the weights see coreness
    up to r-1 ticks stale and nodes arriving between refreshes carry the
    lower bound ``min(arrival degree, min target coreness)``.  ``seed_graph``
    is an explicit (u, v) edge list, or None for a clique on ``m + 1`` nodes
    so every seed node starts with degree and coreness m.
    """

    n_final: int
    m: int
    rng_seed: int = 0
    seed_graph: Optional[Sequence[tuple[int, int]]] = None
    coreness_refresh: int = 1
    out_degree: str = "fixed"

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("m must be at least 1")
        if self.coreness_refresh < 1:
            raise ValueError("coreness_refresh must be a positive step count")
        if self.out_degree not in OUT_DEGREE_MODES:
            raise ValueError(f"out_degree must be one of {OUT_DEGREE_MODES}, got {self.out_degree!r}")
        seed_edges = self.seed_edges()
        n_seed = self.n_seed_nodes()
        if n_seed < self.m:
            raise ValueError(f"seed graph has {n_seed} nodes, fewer than m={self.m} targets per step")
        if self.n_final <= n_seed:
            raise ValueError(f"n_final={self.n_final} must exceed the seed size {n_seed}")
        seen = set()
        for u, v in seed_edges:
            if u == v:
                raise ValueError(f"seed graph contains self-loop ({u}, {v})")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValueError(f"seed graph contains duplicate edge ({u}, {v})")
            seen.add(key)
        ids = {u for e in seed_edges for u in e}
        if ids != set(range(len(ids))):
            raise ValueError("seed graph node ids must be contiguous from 0")

    def seed_edges(self) -> list[tuple[int, int]]:
        if self.seed_graph is not None:
            return [(int(u), int(v)) for u, v in self.seed_graph]
        s = self.m + 1
        return [(u, v) for u in range(s) for v in range(u + 1, s)]

    def n_seed_nodes(self) -> int:
        if self.seed_graph is None:
            return self.m + 1
        return max((max(u, v) for u, v in self.seed_graph), default=-1) + 1


def kernel_weight(kernel: KernelSpec, c, k):
    """Kernel weight for coreness ``c`` and degree ``k`` (scalars or arrays).

    Strictly positive, and non-decreasing in both arguments for
    non-negative exponents.
    """
    c = np.asarray(c, dtype=float)
    k = np.asarray(k, dtype=float)
    w = np.ones(np.broadcast(c, k).shape, dtype=float)
    if kernel.mode != "coreness_only":
        w = w * np.power(k + kernel.degree_offset, kernel.alpha)
    if kernel.mode != "degree_only":
        w = w * np.exp(kernel.beta * c)
    if w.ndim == 0:
        return float(w)
    return w


def zipf_exponent(mean: float, dmax: int = _ZIPF_DMAX) -> float:
    """Exponent s of P(d) ~ d^-s on 1..dmax whose mean matches ``mean``."""
    if not 1.0 < mean < (1 + dmax) / 2.0:
        raise ValueError(f"no truncated power law on 1..{dmax} has mean {mean}")
    d = np.arange(1, dmax + 1, dtype=float)
    lo, hi = 0.0, 20.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        w = d ** (-mid)
        if (d * w).sum() / w.sum() > mean:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


class _GrowthState:
    """Mutable simulation state; one instance per run, advanced tick by tick."""

    def __init__(self, cfg: SimConfig, kernel: KernelSpec):
        self.cfg = cfg
        self.kernel = kernel
        self.rng = np.random.default_rng(cfg.rng_seed)
        self.needs_coreness = kernel.mode != "degree_only"

        seed_edges = cfg.seed_edges()
        n_seed = cfg.n_seed_nodes()
        n_ticks = cfg.n_final - n_seed
        self.out_degrees = self._draw_out_degrees(n_ticks)

        e_max = len(seed_edges) + int(self.out_degrees.sum())
        self.e_src = np.empty(e_max, np.int32)
        self.e_dst = np.empty(e_max, np.int32)
        self.e_t = np.empty(e_max, np.int32)
        self.ne = 0

        n = cfg.n_final
        self.deg = np.zeros(n, np.int32)
        self.cor = np.zeros(n, np.int32)
        self.nv = n_seed
        self.tick = 0
        self.ticks_since_refresh = 0
        self.workspace = SimWorkspace(n, e_max) if self.needs_coreness else None

        self._max_deg = 0
        for u, v in seed_edges:
            self._add_edge(u, v, 0)
        if self.needs_coreness:
            self._refresh_coreness()

        # lazily grown per-value factor tables; their product == kernel_weight
        self._wdeg = np.empty(0)
        self._wcor = np.empty(0)
        self._wbuf = np.empty(n)
        self._targets = np.empty(int(self.out_degrees.max(initial=1)), np.int32)

    def _draw_out_degrees(self, n_ticks: int) -> np.ndarray:
        m = self.cfg.m
        mode = self.cfg.out_degree
        if mode == "fixed":
            return np.full(n_ticks, m, np.int64)
        if mode == "uniform":
            return self.rng.integers(1, 2 * m, size=n_ticks, dtype=np.int64)
        if mode == "geometric":
            return self.rng.geometric(1.0 / m, size=n_ticks).astype(np.int64)
        if mode == "spread":
            # mass at 1 plus a geometric tail of mean 5m/3, overall mean m
            tail_mean = 5.0 * m / 3.0
            q_one = (tail_mean - m) / (tail_mean - 1.0)
            tail = self.rng.geometric(1.0 / tail_mean, size=n_ticks).astype(np.int64)
            ones = self.rng.random(n_ticks) < q_one
            return np.where(ones, np.int64(1), tail)
        s = zipf_exponent(float(m))
        support = np.arange(1, _ZIPF_DMAX + 1)
        probs = support.astype(float) ** (-s)
        probs /= probs.sum()
        return self.rng.choice(support, size=n_ticks, p=probs).astype(np.int64)

    def _add_edge(self, u: int, v: int, t: int) -> None:
        i = self.ne
        self.e_src[i] = u
        self.e_dst[i] = v
        self.e_t[i] = t
        self.ne = i + 1
        du = self.deg[u] + 1
        dv = self.deg[v] + 1
        self.deg[u] = du
        self.deg[v] = dv
        if du > self._max_deg:
            self._max_deg = int(du)
        if dv > self._max_deg:
            self._max_deg = int(dv)

    def _refresh_coreness(self) -> None:
        core = self.workspace.peel_edges(self.nv, self.ne, self.e_src,
                                         self.e_dst, self.deg)
        self.cor[:self.nv] = core
        self.ticks_since_refresh = 0

    def _factor_tables(self, max_deg: int, max_cor: int):
        if self._wdeg.shape[0] <= max_deg:
            d = np.arange(max_deg + 64, dtype=float)
            if self.kernel.mode == "coreness_only":
                self._wdeg = np.ones_like(d)
            else:
                self._wdeg = np.power(d + self.kernel.degree_offset, self.kernel.alpha)
        if self._wcor.shape[0] <= max_cor:
            c = np.arange(max_cor + 64, dtype=float)
            if self.kernel.mode == "degree_only":
                self._wcor = np.ones_like(c)
            else:
                self._wcor = np.exp(self.kernel.beta * c)

    def weights(self) -> np.ndarray:
        """Kernel weight of every existing node on the pre-tick state."""
        nv = self.nv
        max_cor = int(self.cor[:nv].max()) if self.needs_coreness else 0
        self._factor_tables(self._max_deg, max_cor)
        return self._wdeg[self.deg[:nv]] * self._wcor[self.cor[:nv]]

    def step(self) -> None:
        """Add one node: draw targets sequentially with removal, wire edges, refresh."""
        new = self.nv
        t = self.tick + 1
        d = min(int(self.out_degrees[self.tick]), self.nv)
        max_cor = int(self.cor[:self.nv].max()) if self.needs_coreness else 0
        self._factor_tables(self._max_deg, max_cor)
        rands = self.rng.random(d)
        targets = self._targets[:d]
        draw_targets(self.nv, d, self.deg, self.cor, self._wdeg, self._wcor,
                     rands, targets, self._wbuf)
        self.nv += 1
        self.tick = t
        for v in targets:
            self._add_edge(new, int(v), t)
        if self.needs_coreness:
            self.ticks_since_refresh += 1
            if self.ticks_since_refresh >= self.cfg.coreness_refresh:
                self._refresh_coreness()
            else:
                self.cor[new] = min(d, int(self.cor[targets].min()))

    def network(self) -> TemporalNetwork:
        return from_edge_arrays(self.e_src[:self.ne], self.e_dst[:self.ne],
                                self.e_t[:self.ne], self.nv)


def simulate(cfg: SimConfig, kernel: KernelSpec) -> TemporalNetwork:
    """Grow a network to ``cfg.n_final`` nodes under the given kernel.

    Edge timestamps are tick indices (seed edges at 0, the i-th added node
    at i), so the output plugs straight into the snapshot and window
    machinery.  Identical config and seed reproduce the network exactly.
    """
    state = _GrowthState(cfg, kernel)
    while state.nv < cfg.n_final:
        state.step()
    return state.network()
