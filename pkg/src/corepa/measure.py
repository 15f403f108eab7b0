"""Empirical attachment-rate estimators over degree, coreness, and joint classes.

For one observation window the estimators compare where new-node edges
landed against how many candidate nodes each class offered at the cutoff:

* ``T(v) = (A(v)/n_v) / sum_v' (A(v')/n_v')`` over degree or coreness
  classes, with ``A(v)`` the attachment-event count into class ``v`` and
  ``n_v`` the class size at the cutoff,
* the cumulative form ``kappa(v)``, a running sum of ``T`` over ascending
  class values (the smooth curve used for exponent fits),
* the joint table ``T(c, k)`` built from per-class rates
  ``A(c,k) * N / n_{c,k}`` and normalized to sum to one, and
* its localized cumulative curves: within one shell over degree, and across
  shells at one fixed degree.

Windows with no attachment events produce flagged tables (``has_events``
False, rates ``None``) rather than NaNs or exceptions.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .kcore import CorenessMap
from .temporal import Snapshot, WindowAttachments

NORMALIZATION_TOL = 1e-9


@dataclass(frozen=True)
class AttachmentStats:
    """Attachment table over one axis (degree or coreness) for one window.

    Arrays are aligned over ``values`` (ascending class values with at least
    one member at the cutoff).  ``T``/``kappa`` are None when the window had
    no events.
    """

    axis: str                    # "degree" | "coreness"
    window: tuple[int, int]      # (t_start, dt)
    values: np.ndarray
    A: np.ndarray
    n: np.ndarray
    T: Optional[np.ndarray]
    kappa: Optional[np.ndarray]

    @property
    def has_events(self) -> bool:
        return self.T is not None

    @property
    def n_events(self) -> int:
        return int(self.A.sum())


@dataclass(frozen=True)
class HybridStats:
    """Joint attachment table over (coreness, degree) classes for one window.

    ``raw`` holds the relative per-class rate ``A(c,k) * N / n_{c,k}`` and
    ``T`` its normalization; ``N`` is the snapshot node count.  Classes are
    listed in ascending (c, k) order and every listed class has ``n > 0``.
    """

    window: tuple[int, int]
    c: np.ndarray
    k: np.ndarray
    n: np.ndarray
    A: np.ndarray
    raw: Optional[np.ndarray]
    T: Optional[np.ndarray]
    N: int

    @property
    def has_events(self) -> bool:
        return self.T is not None

    @property
    def n_events(self) -> int:
        return int(self.A.sum())


@dataclass(frozen=True)
class LocalizedCurve:
    """Cumulative attachment curve with one axis held fixed.

    ``fixed_axis`` is ``("coreness", c0)`` for a within-shell curve over
    degree, or ``("degree", k0)`` for an among-shells curve over coreness.
    ``cumulative`` is non-decreasing over ``values``; ``n`` carries the
    class sizes for fit-range filtering.
    """

    fixed_axis: tuple[str, int]
    values: np.ndarray
    cumulative: np.ndarray
    n: np.ndarray


def _class_table(member_values: np.ndarray, target_values: np.ndarray,
                 axis: str, window: tuple[int, int]) -> AttachmentStats:
    minlength = int(member_values.max()) + 1 if member_values.size else 0
    n_all = np.bincount(member_values, minlength=minlength)
    A_all = np.bincount(target_values, minlength=minlength)
    present = np.flatnonzero(n_all)
    values = present.astype(np.int64)
    n = n_all[present].astype(np.int64)
    A = A_all[present].astype(np.int64)
    if A.sum() == 0:
        return AttachmentStats(axis=axis, window=window, values=values,
                               A=A, n=n, T=None, kappa=None)
    ratios = A / n
    T = ratios / ratios.sum()
    return AttachmentStats(axis=axis, window=window, values=values,
                           A=A, n=n, T=T, kappa=np.cumsum(T))


def measure_degree_pa(g: Snapshot, w: WindowAttachments) -> AttachmentStats:
    """Attachment table over degree classes of the cutoff snapshot."""
    deg = g.degrees
    if w.targets.size and int(w.targets.max()) >= g.n_nodes:
        raise ValueError("attachment targets are not all present in the snapshot")
    return _class_table(deg, deg[w.targets], "degree", (w.t_start, w.dt))


def measure_coreness_pa(g: Snapshot, cm: CorenessMap,
                        w: WindowAttachments) -> AttachmentStats:
    """Attachment table over coreness classes of the cutoff snapshot."""
    if cm.coreness.shape[0] != g.n_nodes:
        raise ValueError("coreness map does not match snapshot node count")
    if w.targets.size and int(w.targets.max()) >= g.n_nodes:
        raise ValueError("attachment targets are not all present in the snapshot")
    c = cm.coreness
    return _class_table(c, c[w.targets], "coreness", (w.t_start, w.dt))


def measure_hybrid(g: Snapshot, cm: CorenessMap,
                   w: WindowAttachments) -> HybridStats:
    """Joint attachment table over (coreness, degree) classes.

    Per-class rate is the event count into the class scaled by
    ``N / n_{c,k}``; classes that offered no nodes at the cutoff cannot
    receive events and are not listed.
    """
    if cm.coreness.shape[0] != g.n_nodes:
        raise ValueError("coreness map does not match snapshot node count")
    if w.targets.size and int(w.targets.max()) >= g.n_nodes:
        raise ValueError("attachment targets are not all present in the snapshot")
    deg = g.degrees
    c = cm.coreness
    window = (w.t_start, w.dt)
    if g.n_nodes == 0:
        empty = np.empty(0, np.int64)
        return HybridStats(window=window, c=empty, k=empty, n=empty, A=empty,
                           raw=None, T=None, N=0)
    kspan = int(deg.max()) + 1
    keys = c * kspan + deg
    n_all = np.bincount(keys)
    A_all = np.bincount(keys[w.targets], minlength=n_all.shape[0])
    present = np.flatnonzero(n_all)
    n = n_all[present].astype(np.int64)
    A = A_all[present].astype(np.int64)
    cc = (present // kspan).astype(np.int64)
    kk = (present % kspan).astype(np.int64)
    if A.sum() == 0:
        return HybridStats(window=window, c=cc, k=kk, n=n, A=A,
                           raw=None, T=None, N=g.n_nodes)
    raw = A * (g.n_nodes / n)
    T = raw / raw.sum()
    return HybridStats(window=window, c=cc, k=kk, n=n, A=A,
                       raw=raw, T=T, N=g.n_nodes)


def phi_within_shell(h: HybridStats, c0: int) -> LocalizedCurve:
    """Cumulative attachment probability over degree inside shell ``c0``."""
    if not h.has_events:
        raise ValueError("hybrid table has no attachment events")
    mask = h.c == c0
    if not mask.any():
        raise ValueError(f"no nodes with coreness {c0} in this window's snapshot")
    return LocalizedCurve(fixed_axis=("coreness", int(c0)),
                          values=h.k[mask],
                          cumulative=np.cumsum(h.T[mask]),
                          n=h.n[mask])


def pi_among_shells(h: HybridStats, k0: int) -> LocalizedCurve:
    """Cumulative attachment probability over coreness at fixed degree ``k0``."""
    if not h.has_events:
        raise ValueError("hybrid table has no attachment events")
    mask = h.k == k0
    if not mask.any():
        raise ValueError(f"no nodes with degree {k0} in this window's snapshot")
    order = np.argsort(h.c[mask], kind="stable")
    return LocalizedCurve(fixed_axis=("degree", int(k0)),
                          values=h.c[mask][order],
                          cumulative=np.cumsum(h.T[mask][order]),
                          n=h.n[mask][order])


def write_attachment_csv(stats: AttachmentStats, path) -> None:
    """Export ``axis_value,A,n,T,kappa`` rows; rate cells are empty when no events."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["axis_value", "A", "n", "T", "kappa"])
        for i in range(stats.values.shape[0]):
            if stats.has_events:
                writer.writerow([int(stats.values[i]), int(stats.A[i]), int(stats.n[i]),
                                 repr(float(stats.T[i])), repr(float(stats.kappa[i]))])
            else:
                writer.writerow([int(stats.values[i]), int(stats.A[i]), int(stats.n[i]), "", ""])


def read_attachment_csv(path, axis: str, window: tuple[int, int]) -> AttachmentStats:
    """Re-parse a table written by :func:`write_attachment_csv` exactly."""
    values, A, n, T, kappa = [], [], [], [], []
    with Path(path).open("r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["axis_value", "A", "n", "T", "kappa"]:
            raise ValueError(f"unexpected header in {path}: {header}")
        for row in reader:
            values.append(int(row[0]))
            A.append(int(row[1]))
            n.append(int(row[2]))
            if row[3] != "":
                T.append(float(row[3]))
                kappa.append(float(row[4]))
    has = len(T) == len(values) and len(values) > 0 and sum(A) > 0
    return AttachmentStats(
        axis=axis, window=window,
        values=np.asarray(values, np.int64), A=np.asarray(A, np.int64),
        n=np.asarray(n, np.int64),
        T=np.asarray(T) if has else None,
        kappa=np.asarray(kappa) if has else None,
    )


def write_hybrid_csv(h: HybridStats, path) -> None:
    """Export ``c,k,n,T`` rows of the joint table."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["c", "k", "n", "T"])
        for i in range(h.c.shape[0]):
            tcell = repr(float(h.T[i])) if h.has_events else ""
            writer.writerow([int(h.c[i]), int(h.k[i]), int(h.n[i]), tcell])


def read_hybrid_csv(path, window: tuple[int, int], n_snapshot: int) -> HybridStats:
    """Re-parse a table written by :func:`write_hybrid_csv`.

    The CSV carries the ``c,k,n,T`` columns only, which is all the localized
    curves and fits need; per-class event counts and raw rates are not
    recoverable, so ``A`` reads back as zeros and ``raw`` as None.
    """
    cs, ks, ns, Ts = [], [], [], []
    with Path(path).open("r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["c", "k", "n", "T"]:
            raise ValueError(f"unexpected header in {path}: {header}")
        for row in reader:
            cs.append(int(row[0]))
            ks.append(int(row[1]))
            ns.append(int(row[2]))
            if row[3] != "":
                Ts.append(float(row[3]))
    has = len(Ts) == len(cs) and len(cs) > 0
    return HybridStats(
        window=window,
        c=np.asarray(cs, np.int64), k=np.asarray(ks, np.int64),
        n=np.asarray(ns, np.int64), A=np.zeros(len(cs), np.int64),
        raw=None, T=np.asarray(Ts) if has else None, N=n_snapshot,
    )


def write_curve_csv(curve: LocalizedCurve, path) -> None:
    name = "phi" if curve.fixed_axis[0] == "coreness" else "pi"
    free = "k" if curve.fixed_axis[0] == "coreness" else "c"
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([free, name, "n"])
        for i in range(curve.values.shape[0]):
            writer.writerow([int(curve.values[i]), repr(float(curve.cumulative[i])),
                             int(curve.n[i])])
