"""Bucketed min-degree peeling kernels, shared by the decomposition API and the simulator.

The kernels are plain functions over flat integer arrays so numba can
compile them when available; without numba the same code runs under the
interpreter (identical results, slower).  ``NUMBA_ENABLED`` reports which
path is active.  The simulator-facing entry points take caller-provided
workspace so a tick loop can peel every step without reallocating.
"""

from __future__ import annotations

import numpy as np


def _peel_into(n, indptr, indices, deg, core, pos, vert, bin_start):
    """Fill ``core[:n]`` with core numbers; ``pos``/``vert``/``bin_start`` are scratch.

    Classic bucket-queue peeling: nodes are counting-sorted by degree, then
    consumed in non-decreasing current-degree order; consuming a node fixes
    its core number and decrements the live degree of its not-yet-consumed
    neighbors, moving each one bucket down via an O(1) swap.  O(n + m).
    ``bin_start`` needs room for max-degree + 2 entries.
    """
    if n == 0:
        return
    md = 0
    for v in range(n):
        core[v] = deg[v]
        if deg[v] > md:
            md = deg[v]

    for d in range(md + 2):
        bin_start[d] = 0
    for v in range(n):
        bin_start[core[v] + 1] += 1
    for d in range(1, md + 2):
        bin_start[d] += bin_start[d - 1]

    for v in range(n):
        d = core[v]
        pos[v] = bin_start[d]
        vert[bin_start[d]] = v
        bin_start[d] += 1
    for d in range(md, 0, -1):
        bin_start[d] = bin_start[d - 1]
    bin_start[0] = 0

    for i in range(n):
        v = vert[i]
        dv = core[v]
        for j in range(indptr[v], indptr[v + 1]):
            u = indices[j]
            du = core[u]
            if du > dv:
                # swap u to the front of its bucket, then shrink the bucket
                pu = pos[u]
                pw = bin_start[du]
                w = vert[pw]
                if u != w:
                    vert[pu] = w
                    vert[pw] = u
                    pos[u] = pw
                    pos[w] = pu
                bin_start[du] += 1
                core[u] = du - 1


def _csr_from_edges(n, ne, e_src, e_dst, deg, indptr, indices, fill):
    """Counting-sort the first ``ne`` undirected edges into CSR arrays."""
    indptr[0] = 0
    for v in range(n):
        indptr[v + 1] = indptr[v] + deg[v]
        fill[v] = indptr[v]
    for i in range(ne):
        u = e_src[i]
        v = e_dst[i]
        indices[fill[u]] = v
        fill[u] += 1
        indices[fill[v]] = u
        fill[v] += 1


def _draw_targets(nv, d, deg, cor, wdeg, wcor, rands, targets, wbuf):
    """Sequential weighted draws without replacement into ``targets[:d]``.

    Weight of node v is ``wdeg[deg[v]] * wcor[cor[v]]``; each draw removes
    the picked node's weight.  A linear scan locates each pick, with a
    backward scan guarding the top boundary against float roundoff.
    """
    total = 0.0
    for v in range(nv):
        w = wdeg[deg[v]] * wcor[cor[v]]
        wbuf[v] = w
        total += w
    for j in range(d):
        r = rands[j] * total
        acc = 0.0
        pick = -1
        for v in range(nv):
            acc += wbuf[v]
            if acc > r:
                pick = v
                break
        if pick < 0:
            pick = nv - 1
            while pick > 0 and wbuf[pick] == 0.0:
                pick -= 1
        targets[j] = pick
        total -= wbuf[pick]
        wbuf[pick] = 0.0


try:  # pragma: no cover - exercised implicitly by every decomposition call
    import numba

    _peel_into_jit = numba.njit(cache=True, nogil=True)(_peel_into)
    _csr_from_edges_jit = numba.njit(cache=True, nogil=True)(_csr_from_edges)
    _draw_targets_jit = numba.njit(cache=True, nogil=True)(_draw_targets)
    NUMBA_ENABLED = True
except Exception:  # numba missing or incompatible: fall back to pure python
    _peel_into_jit = _peel_into
    _csr_from_edges_jit = _csr_from_edges
    _draw_targets_jit = _draw_targets
    NUMBA_ENABLED = False


class SimWorkspace:
    """Reusable int32 scratch for per-tick peels of a growing edge list."""

    def __init__(self, n_max: int, edge_max: int):
        self.core = np.empty(n_max, np.int32)
        self.pos = np.empty(n_max, np.int32)
        self.vert = np.empty(n_max, np.int32)
        self.bins = np.empty(n_max + 2, np.int32)
        self.fill = np.empty(n_max, np.int32)
        self.indptr = np.empty(n_max + 1, np.int32)
        self.indices = np.empty(2 * edge_max, np.int32)

    def peel_edges(self, n: int, ne: int, e_src, e_dst, deg) -> np.ndarray:
        """Core numbers of the first ``n`` nodes of the first ``ne`` edges."""
        _csr_from_edges_jit(n, ne, e_src, e_dst, deg,
                            self.indptr, self.indices, self.fill)
        _peel_into_jit(n, self.indptr, self.indices, deg,
                       self.core, self.pos, self.vert, self.bins)
        return self.core[:n]


def peel_csr(n: int, indptr: np.ndarray, indices: np.ndarray) -> np.ndarray:
    """Core numbers for a CSR graph with symmetric adjacency."""
    indptr = np.ascontiguousarray(indptr, np.int64)
    indices = np.ascontiguousarray(indices, np.int64)
    deg = np.diff(indptr)
    core = np.empty(n, np.int64)
    pos = np.empty(n, np.int64)
    vert = np.empty(n, np.int64)
    md = int(deg.max()) if n else 0
    bins = np.empty(md + 2, np.int64)
    _peel_into_jit(n, indptr, indices, deg, core, pos, vert, bins)
    return core


def draw_targets(nv: int, d: int, deg, cor, wdeg, wcor, rands, targets, wbuf) -> None:
    _draw_targets_jit(nv, d, deg, cor, wdeg, wcor, rands, targets, wbuf)
