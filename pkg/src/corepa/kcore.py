"""Core decomposition of a snapshot and per-shell degree statistics."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._peel import peel_csr
from .temporal import Snapshot


@dataclass(frozen=True)
class CorenessMap:
    """Node -> coreness assignment for one snapshot, with the shell index."""

    coreness: np.ndarray
    max_core: int

    @property
    def shells(self) -> dict[int, np.ndarray]:
        """Shell value -> member node ids (only non-empty shells)."""
        order = np.argsort(self.coreness, kind="stable")
        values, starts = np.unique(self.coreness[order], return_index=True)
        bounds = np.append(starts, order.shape[0])
        return {int(c): order[bounds[i]:bounds[i + 1]] for i, c in enumerate(values)}


@dataclass(frozen=True)
class ShellStats:
    """Per-shell size and degree summary; empty shells are omitted."""

    values: np.ndarray       # shell coreness values, ascending
    sizes: np.ndarray        # member counts
    mean_degree: np.ndarray
    min_degree: np.ndarray
    max_degree: np.ndarray


def core_decomposition(g: Snapshot) -> CorenessMap:
    """Coreness of every snapshot node via bucketed min-degree peeling.

    Equals the fixed point of repeatedly deleting nodes with degree below k,
    for every k; isolated nodes get coreness 0.  Runs in O(n + m).  Only the
    undirected view has the classic peeling semantics, so directed snapshots
    are rejected.
    """
    if g.degree_mode != "undirected":
        raise ValueError(
            f"core decomposition requires an undirected snapshot, got degree_mode={g.degree_mode!r}"
        )
    coreness = peel_csr(g.n_nodes, g.indptr, g.indices)
    max_core = int(coreness.max()) if g.n_nodes else 0
    return CorenessMap(coreness=coreness, max_core=max_core)


def shell_stats(g: Snapshot, cm: CorenessMap) -> ShellStats:
    """Size and degree summary (mean/min/max) of each non-empty shell."""
    if cm.coreness.shape[0] != g.n_nodes:
        raise ValueError("coreness map does not match snapshot node count")
    deg = g.degrees
    if g.n_nodes == 0:
        empty = np.empty(0, np.int64)
        return ShellStats(empty, empty, empty.astype(float), empty, empty)
    order = np.argsort(cm.coreness, kind="stable")
    sorted_c = cm.coreness[order]
    sorted_deg = deg[order]
    values, starts = np.unique(sorted_c, return_index=True)
    bounds = np.append(starts, order.shape[0])
    sizes = np.diff(bounds)
    sums = np.add.reduceat(sorted_deg, starts)
    mins = np.minimum.reduceat(sorted_deg, starts)
    maxs = np.maximum.reduceat(sorted_deg, starts)
    return ShellStats(values=values.astype(np.int64), sizes=sizes.astype(np.int64),
                      mean_degree=sums / sizes, min_degree=mins, max_degree=maxs)


def write_coreness_csv(g: Snapshot, cm: CorenessMap, path) -> None:
    """Export ``node,coreness,degree`` rows for one snapshot."""
    deg = g.degrees
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["node", "coreness", "degree"])
        for v in range(g.n_nodes):
            writer.writerow([v, int(cm.coreness[v]), int(deg[v])])


def write_shells_csv(s: ShellStats, path) -> None:
    """Export ``c,n,mean_degree,min_degree,max_degree`` rows."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["c", "n", "mean_degree", "min_degree", "max_degree"])
        for i in range(s.values.shape[0]):
            writer.writerow([int(s.values[i]), int(s.sizes[i]), repr(float(s.mean_degree[i])),
                             int(s.min_degree[i]), int(s.max_degree[i])])


def read_shells_csv(path) -> ShellStats:
    """Re-parse a table written by :func:`write_shells_csv` exactly."""
    values, sizes, mean_deg, min_deg, max_deg = [], [], [], [], []
    with Path(path).open("r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["c", "n", "mean_degree", "min_degree", "max_degree"]:
            raise ValueError(f"unexpected header in {path}: {header}")
        for row in reader:
            values.append(int(row[0]))
            sizes.append(int(row[1]))
            mean_deg.append(float(row[2]))
            min_deg.append(int(row[3]))
            max_deg.append(int(row[4]))
    return ShellStats(values=np.asarray(values, np.int64), sizes=np.asarray(sizes, np.int64),
                      mean_degree=np.asarray(mean_deg), min_degree=np.asarray(min_deg, np.int64),
                      max_degree=np.asarray(max_deg, np.int64))
