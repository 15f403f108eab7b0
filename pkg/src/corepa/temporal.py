"""Temporal edge-list data model: ingestion, snapshots, and window attachments.

A :class:`TemporalNetwork` is an immutable, time-sorted record of timestamped
edges plus each node's arrival time (the timestamp of its first incident
edge).  Node ids are remapped to dense integers ``0..N-1`` in order of first
appearance in the time-sorted edge list, so the node set of any snapshot is a
contiguous prefix of the id range.  Timestamps are integers: epoch days for
calendar data, abstract ticks otherwise.
"""

from __future__ import annotations

import datetime as _dt
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Optional

import numpy as np

_EPOCH = _dt.date(1970, 1, 1).toordinal()

DEGREE_MODES = ("undirected", "in", "out")


class ParseError(ValueError):
    """Malformed input line; carries the 1-based line number."""

    def __init__(self, path, lineno: int, message: str):
        self.path = str(path)
        self.lineno = lineno
        super().__init__(f"{path}:{lineno}: {message}")


@dataclass
class IngestReport:
    """Counters accumulated while reading and cleaning an edge stream."""

    n_nodes: int = 0
    n_edges: int = 0
    n_self_loops: int = 0
    n_duplicates: int = 0
    n_skipped_lines: int = 0      # comments and blank lines
    n_missing_dates: int = 0      # SNAP adapter: edges whose citing node has no date

    def as_dict(self) -> dict:
        return {
            "nodes": self.n_nodes,
            "edges": self.n_edges,
            "self_loops": self.n_self_loops,
            "duplicates": self.n_duplicates,
            "skipped_lines": self.n_skipped_lines,
            "missing_date_edges": self.n_missing_dates,
        }


@dataclass(frozen=True)
class TemporalNetwork:
    """Time-sorted edge arrays plus per-node arrival times.

    Immutable after construction; safe to share across workers.  ``src``,
    ``dst`` and ``t`` are parallel int64 arrays sorted by ``t`` (stable, so
    input order is preserved among ties).  ``arrival[v]`` is the smallest
    timestamp of any edge incident to ``v`` and is non-decreasing in ``v``
    because dense ids are assigned in time order.
    """

    src: np.ndarray
    dst: np.ndarray
    t: np.ndarray
    arrival: np.ndarray
    n_nodes: int
    external_ids: Optional[np.ndarray] = None  # dense id -> original label

    @property
    def n_edges(self) -> int:
        return int(self.t.shape[0])

    @property
    def t_min(self) -> int:
        return int(self.t[0]) if self.n_edges else 0

    @property
    def t_max(self) -> int:
        return int(self.t[-1]) if self.n_edges else 0


@dataclass(frozen=True)
class Snapshot:
    """Static view of the network built from all edges with ``t < cutoff``.

    Adjacency is CSR over dense node ids ``0..n_nodes-1``; ``n_nodes`` counts
    exactly the nodes whose arrival precedes the cutoff.  Under directed
    modes a node's neighbor list holds its in- (or out-) neighbors, so nodes
    with arrival < cutoff may legitimately have degree 0.
    """

    cutoff: int
    degree_mode: str
    n_nodes: int
    indptr: np.ndarray
    indices: np.ndarray

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def n_edges(self) -> int:
        half = int(self.indices.shape[0])
        return half // 2 if self.degree_mode == "undirected" else half

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]


@dataclass(frozen=True)
class WindowAttachments:
    """Attachment events of one observation window ``[t_start, t_start+dt)``.

    Each event pairs a node whose arrival falls inside the window with a
    target that arrived before the window.  Window edges joining two new or
    two old nodes are not events; they are tallied separately so that
    ``len(events) + n_new_new + n_old_old`` equals the window's edge count.
    """

    t_start: int
    dt: int
    new_nodes: np.ndarray
    targets: np.ndarray
    n_new_new: int
    n_old_old: int

    @property
    def n_events(self) -> int:
        return int(self.targets.shape[0])

    @property
    def n_window_edges(self) -> int:
        return self.n_events + self.n_new_new + self.n_old_old


def parse_timestamp(token: str) -> int:
    """Parse an ISO-8601 date (YYYY-MM-DD) into epoch days, or pass an integer through."""
    token = token.strip()
    try:
        return int(token)
    except ValueError:
        pass
    try:
        return _dt.date.fromisoformat(token).toordinal() - _EPOCH
    except ValueError:
        raise ValueError(f"unparseable timestamp {token!r}") from None


def days_to_date(days: int) -> _dt.date:
    return _dt.date.fromordinal(days + _EPOCH)


def read_generic_tsv(path, report: Optional[IngestReport] = None) -> Iterator[tuple[str, str, int]]:
    """Yield (src, dst, timestamp) triples from a generic tab-separated edge list.

    One edge per line, ``src<TAB>dst<TAB>timestamp`` with the timestamp
    either an ISO-8601 date or an integer.  Lines starting with ``#`` and
    blank lines are skipped (counted on the report); anything else malformed
    raises :class:`ParseError` with the offending line number.
    """
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                if report is not None:
                    report.n_skipped_lines += 1
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ParseError(path, lineno, f"expected 3 tab-separated fields, got {len(parts)}")
            try:
                ts = parse_timestamp(parts[2])
            except ValueError as exc:
                raise ParseError(path, lineno, str(exc)) from None
            yield parts[0], parts[1], ts


def _strip_cross_list_prefix(node_id: str) -> str:
    # SNAP citation dates files prefix cross-listed paper ids with "11";
    # native ids are at most 7 characters.
    if len(node_id) > 7 and node_id.startswith("11"):
        return node_id[2:]
    return node_id


def read_snap_citation(
    edges_path,
    dates_path,
    report: Optional[IngestReport] = None,
    strip_dates_prefix: bool = True,
) -> Iterator[tuple[str, str, int]]:
    """Yield triples from a SNAP citation dataset (edges file + dates file).

    The edges file holds ``FromNodeId<TAB>ToNodeId`` lines and the dates file
    ``NodeId<TAB>YYYY-MM-DD`` lines; each edge is stamped with the citing
    node's publication date.  Edges whose citing node has no date are skipped
    and counted.  ``strip_dates_prefix`` removes the documented "11" prefix
    from cross-listed ids in the dates file.
    """
    dates: dict[str, int] = {}
    dates_path = Path(dates_path)
    with dates_path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ParseError(dates_path, lineno, "expected NodeId<TAB>date")
            node_id = parts[0]
            if strip_dates_prefix:
                node_id = _strip_cross_list_prefix(node_id)
            try:
                dates[node_id] = parse_timestamp(parts[1])
            except ValueError as exc:
                raise ParseError(dates_path, lineno, str(exc)) from None

    edges_path = Path(edges_path)
    with edges_path.open("r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                if report is not None:
                    report.n_skipped_lines += 1
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ParseError(edges_path, lineno, "expected FromNodeId<TAB>ToNodeId")
            ts = dates.get(parts[0])
            if ts is None:
                if report is not None:
                    report.n_missing_dates += 1
                continue
            yield parts[0], parts[1], ts


def ingest(
    triples: Iterable[tuple[str, str, int]],
    report: Optional[IngestReport] = None,
) -> TemporalNetwork:
    """Build a dense-id :class:`TemporalNetwork` from (src, dst, timestamp) triples.

    Self-loops are rejected and duplicate (src, dst) pairs are kept once,
    first occurrence winning, both counted on the report.  Surviving edges
    are sorted by timestamp (stable) and ids remapped to ``0..N-1`` in order
    of first appearance in the sorted list.
    """
    if report is None:
        report = IngestReport()

    srcs: list[str] = []
    dsts: list[str] = []
    times: list[int] = []
    for s, d, ts in triples:
        if s == d:
            report.n_self_loops += 1
            continue
        srcs.append(s)
        dsts.append(d)
        times.append(int(ts))

    if not times:
        return TemporalNetwork(
            src=np.empty(0, np.int64), dst=np.empty(0, np.int64),
            t=np.empty(0, np.int64), arrival=np.empty(0, np.int64),
            n_nodes=0, external_ids=np.empty(0, object),
        )

    # Provisional ids in stream order, to dedupe pairs vectorized.
    tmp_ids: dict[str, int] = {}
    for label in srcs:
        if label not in tmp_ids:
            tmp_ids[label] = len(tmp_ids)
    for label in dsts:
        if label not in tmp_ids:
            tmp_ids[label] = len(tmp_ids)
    a = np.fromiter((tmp_ids[s] for s in srcs), np.int64, len(srcs))
    b = np.fromiter((tmp_ids[d] for d in dsts), np.int64, len(dsts))
    t = np.asarray(times, np.int64)

    key = a * len(tmp_ids) + b
    _, first_idx = np.unique(key, return_index=True)
    report.n_duplicates += int(key.shape[0] - first_idx.shape[0])
    keep = np.sort(first_idx)
    a, b, t = a[keep], b[keep], t[keep]

    order = np.argsort(t, kind="stable")
    a, b, t = a[order], b[order], t[order]

    # Dense ids by first appearance in time order (src of an edge before its dst).
    interleaved = np.empty(2 * a.shape[0], np.int64)
    interleaved[0::2] = a
    interleaved[1::2] = b
    uniq, first_pos = np.unique(interleaved, return_index=True)
    rank = np.argsort(np.argsort(first_pos))
    dense_of_tmp = np.empty(len(tmp_ids), np.int64)
    dense_of_tmp[uniq] = rank
    src = dense_of_tmp[a]
    dst = dense_of_tmp[b]
    n_nodes = int(uniq.shape[0])

    arrival = np.full(n_nodes, np.iinfo(np.int64).max, np.int64)
    np.minimum.at(arrival, src, t)
    np.minimum.at(arrival, dst, t)

    labels = np.empty(len(tmp_ids), object)
    for label, tid in tmp_ids.items():
        labels[tid] = label
    external_ids = np.empty(n_nodes, object)
    external_ids[dense_of_tmp[uniq]] = labels[uniq]

    report.n_nodes = n_nodes
    report.n_edges = int(t.shape[0])
    return TemporalNetwork(src=src, dst=dst, t=t, arrival=arrival,
                           n_nodes=n_nodes, external_ids=external_ids)


def ingest_path(path, fmt: str = "generic_tsv", dates_path=None,
                strip_dates_prefix: bool = True) -> tuple[TemporalNetwork, IngestReport]:
    """Read and ingest a dataset file, returning the network and its report."""
    report = IngestReport()
    if fmt == "generic_tsv":
        triples = read_generic_tsv(path, report)
    elif fmt == "snap_citation":
        if dates_path is None:
            raise ValueError("snap_citation format requires a dates file")
        triples = read_snap_citation(path, dates_path, report, strip_dates_prefix)
    else:
        raise ValueError(f"unknown input format {fmt!r}")
    net = ingest(triples, report)
    return net, report


def from_edge_arrays(src: np.ndarray, dst: np.ndarray, t: np.ndarray,
                     n_nodes: int) -> TemporalNetwork:
    """Wrap already clean, time-sorted, dense-id edge arrays (simulator output)."""
    src = np.asarray(src, np.int64)
    dst = np.asarray(dst, np.int64)
    t = np.asarray(t, np.int64)
    if np.any(np.diff(t) < 0):
        raise ValueError("edge timestamps must be non-decreasing")
    arrival = np.full(n_nodes, np.iinfo(np.int64).max, np.int64)
    np.minimum.at(arrival, src, t)
    np.minimum.at(arrival, dst, t)
    return TemporalNetwork(src=src, dst=dst, t=t, arrival=arrival, n_nodes=n_nodes)


def write_generic_tsv(net: TemporalNetwork, path, header: Optional[str] = None) -> None:
    """Write a network in the generic TSV format with dense integer ids."""
    with Path(path).open("w", encoding="utf-8") as fh:
        if header:
            fh.write(f"# {header}\n")
        for s, d, ts in zip(net.src.tolist(), net.dst.tolist(), net.t.tolist()):
            fh.write(f"{s}\t{d}\t{ts}\n")


def snapshot_at(net: TemporalNetwork, t: int, mode: str = "undirected") -> Snapshot:
    """Build the static graph of all edges strictly before ``t``.

    The node set is every node whose arrival precedes ``t``; adjacency
    follows ``mode``: ``undirected`` (both endpoints list each other),
    ``in`` (a node lists the sources pointing at it) or ``out``.
    """
    if mode not in DEGREE_MODES:
        raise ValueError(f"degree_mode must be one of {DEGREE_MODES}, got {mode!r}")
    t = int(t)
    ne = int(np.searchsorted(net.t, t, side="left"))
    n = int(np.searchsorted(net.arrival, t, side="left"))
    s, d = net.src[:ne], net.dst[:ne]
    if mode == "undirected":
        heads = np.concatenate([s, d])
        tails = np.concatenate([d, s])
    elif mode == "in":
        heads, tails = d, s
    else:
        heads, tails = s, d
    counts = np.bincount(heads, minlength=n)
    indptr = np.zeros(n + 1, np.int64)
    np.cumsum(counts, out=indptr[1:])
    order = np.argsort(heads, kind="stable")
    indices = tails[order]
    return Snapshot(cutoff=t, degree_mode=mode, n_nodes=n,
                    indptr=indptr, indices=np.ascontiguousarray(indices))


def window_attachments(net: TemporalNetwork, t: int, dt: int) -> WindowAttachments:
    """Collect new-node attachment events of the window ``[t, t+dt)``.

    An endpoint is "new" when its arrival lies inside the window and "old"
    when it arrived before ``t``.  Window edges pairing a new node with an
    old one become (new, old) events regardless of edge orientation; the
    remaining window edges are tallied as new-new or old-old.
    """
    if dt <= 0:
        raise ValueError("window length dt must be positive")
    t, dt = int(t), int(dt)
    lo = int(np.searchsorted(net.t, t, side="left"))
    hi = int(np.searchsorted(net.t, t + dt, side="left"))
    s, d = net.src[lo:hi], net.dst[lo:hi]
    s_new = net.arrival[s] >= t
    d_new = net.arrival[d] >= t
    # Arrivals cannot exceed the incident edge's time, so "not new" == "old".
    attach = s_new ^ d_new
    n_new_new = int(np.count_nonzero(s_new & d_new))
    n_old_old = int(np.count_nonzero(~s_new & ~d_new))
    new_nodes = np.where(s_new[attach], s[attach], d[attach])
    targets = np.where(s_new[attach], d[attach], s[attach])
    return WindowAttachments(t_start=t, dt=dt, new_nodes=new_nodes,
                             targets=targets, n_new_new=n_new_new,
                             n_old_old=n_old_old)
