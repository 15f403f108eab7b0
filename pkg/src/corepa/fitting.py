"""Exponent estimation for attachment curves, shell statistics, and their time series.

All fits are least squares on transformed axes: log-log for power laws and
semi-log for exponentials, matching how straight-line segments are read off
the measured curves.  Cumulative degree curves report the attachment
exponent as ``slope - 1`` because integrating ``v^a`` raises the power by
one; cumulative exponential curves keep their slope.

Points with too few class members or in the sparse top tail are excluded by
default (both thresholds configurable); a fit with fewer than three usable
points is marked insufficient instead of raising.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .kcore import CorenessMap, ShellStats, core_decomposition, shell_stats
from .measure import (
    AttachmentStats,
    HybridStats,
    measure_coreness_pa,
    measure_degree_pa,
    measure_hybrid,
    phi_within_shell,
    pi_among_shells,
)
from .temporal import TemporalNetwork, days_to_date, snapshot_at, window_attachments

POWER_LAW = "power_law"
EXPONENTIAL = "exponential"

SERIES_NAMES = ("alpha", "beta", "gamma", "alpha_within", "beta_among")


@dataclass(frozen=True)
class FitOptions:
    """Range and filtering controls shared by all fits.

    ``min_class_size`` drops points whose class has fewer member nodes;
    ``tail_trim`` drops the given top fraction of the abscissa (sparse-tail
    and innermost-shell saturation guard); ``x_min``/``x_max`` clamp the
    range explicitly.  Values at or below zero on a transformed axis are
    always excluded and counted.
    """

    min_class_size: int = 5
    tail_trim: float = 0.01
    x_min: Optional[float] = None
    x_max: Optional[float] = None
    min_points: int = 3


DEFAULT_FIT_OPTIONS = FitOptions()


@dataclass(frozen=True)
class FitResult:
    """One fitted exponent with its range, quality, and exclusion counts."""

    model: str
    exponent: float
    intercept: float
    fit_range: tuple[float, float]
    r_squared: float
    n_points: int
    n_excluded: int = 0
    sufficient: bool = True
    note: str = ""


def _insufficient(model: str, n_points: int, n_excluded: int, note: str) -> FitResult:
    return FitResult(model=model, exponent=math.nan, intercept=math.nan,
                     fit_range=(math.nan, math.nan), r_squared=math.nan,
                     n_points=n_points, n_excluded=n_excluded,
                     sufficient=False, note=note)


def _select_points(x, y, opts: FitOptions, class_sizes=None, require_x_positive=True):
    """Apply positivity, class-size, explicit-range, and tail-trim filters."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    keep = y > 0
    if require_x_positive:
        keep &= x > 0
    if class_sizes is not None:
        keep &= np.asarray(class_sizes) >= opts.min_class_size
    if opts.x_min is not None:
        keep &= x >= opts.x_min
    if opts.x_max is not None:
        keep &= x <= opts.x_max
    x, y = x[keep], y[keep]
    if opts.tail_trim > 0 and x.size:
        x_hi = np.quantile(x, 1.0 - opts.tail_trim)
        inside = x <= x_hi
        x, y = x[inside], y[inside]
    n_excluded = int(keep.shape[0] - x.shape[0])
    if x.size:
        # duplicate abscissa values are averaged before transforming
        ux, inverse = np.unique(x, return_inverse=True)
        if ux.shape[0] != x.shape[0]:
            sums = np.bincount(inverse, weights=y)
            counts = np.bincount(inverse)
            x, y = ux, sums / counts
    return x, y, n_excluded


def _line_fit(tx: np.ndarray, ty: np.ndarray) -> tuple[float, float, float]:
    """Least-squares line on transformed axes; returns slope, intercept, r^2."""
    mx, my = tx.mean(), ty.mean()
    dx, dy = tx - mx, ty - my
    denom = float(np.dot(dx, dx))
    slope = float(np.dot(dx, dy) / denom)
    intercept = float(my - slope * mx)
    ss_res = float(np.sum((ty - (slope * tx + intercept)) ** 2))
    ss_tot = float(np.dot(dy, dy))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return slope, intercept, r2


def fit_power_law(x, y, opts: FitOptions = DEFAULT_FIT_OPTIONS, *,
                  class_sizes=None, cumulative: bool = False) -> FitResult:
    """Fit ``y ~ C * x^e`` by least squares on (ln x, ln y).

    With ``cumulative=True`` the curve is a running sum of the quantity of
    interest, so the reported exponent is ``slope - 1``.
    """
    x, y, n_excluded = _select_points(x, y, opts, class_sizes, require_x_positive=True)
    if x.size < opts.min_points or np.unique(x).size < 2:
        return _insufficient(POWER_LAW, int(x.size), n_excluded, "fewer than min_points usable points")
    slope, intercept, r2 = _line_fit(np.log(x), np.log(y))
    exponent = slope - 1.0 if cumulative else slope
    return FitResult(model=POWER_LAW, exponent=exponent, intercept=intercept,
                     fit_range=(float(x.min()), float(x.max())), r_squared=r2,
                     n_points=int(x.size), n_excluded=n_excluded)


def fit_exponential(x, y, opts: FitOptions = DEFAULT_FIT_OPTIONS, *,
                    class_sizes=None) -> FitResult:
    """Fit ``y ~ C * exp(e * x)`` by least squares on (x, ln y).

    Summing an exponential leaves its rate unchanged, so cumulative curves
    report the slope as-is.
    """
    x, y, n_excluded = _select_points(x, y, opts, class_sizes, require_x_positive=False)
    if x.size < opts.min_points or np.unique(x).size < 2:
        return _insufficient(EXPONENTIAL, int(x.size), n_excluded, "fewer than min_points usable points")
    slope, intercept, r2 = _line_fit(x, np.log(y))
    return FitResult(model=EXPONENTIAL, exponent=slope, intercept=intercept,
                     fit_range=(float(x.min()), float(x.max())), r_squared=r2,
                     n_points=int(x.size), n_excluded=n_excluded)


def fit_attachment(stats: AttachmentStats,
                   opts: FitOptions = DEFAULT_FIT_OPTIONS) -> FitResult:
    """Fit the cumulative attachment curve of one window.

    Degree tables get a log-log power fit whose reported exponent subtracts
    one (cumulative); coreness tables get a semi-log exponential fit.  Zero
    classes are excluded by the positivity filter.  A no-event window yields
    an insufficient marker.
    """
    model = POWER_LAW if stats.axis == "degree" else EXPONENTIAL
    if not stats.has_events:
        return _insufficient(model, 0, 0, "window has no attachment events")
    x = stats.values.astype(float)
    if stats.axis == "degree":
        return fit_power_law(x, stats.kappa, opts, class_sizes=stats.n, cumulative=True)
    keep = stats.values > 0  # coreness-0 shell excluded from fits by default
    return fit_exponential(x[keep], stats.kappa[keep], opts, class_sizes=stats.n[keep])


def fit_shell_degree_relation(s: ShellStats,
                              opts: FitOptions = DEFAULT_FIT_OPTIONS) -> FitResult:
    """Power-law fit of mean shell degree against coreness.

    Shell 0 is excluded; the tail trim doubles as the innermost-shell
    saturation guard and ``min_class_size`` drops thin shells.  The curve is
    not cumulative, so the exponent is the raw slope.
    """
    keep = s.values > 0
    return fit_power_law(s.values[keep].astype(float), s.mean_degree[keep],
                         opts, class_sizes=s.sizes[keep], cumulative=False)


def localized_exponents(h: HybridStats, axis: str,
                        opts: FitOptions = DEFAULT_FIT_OPTIONS) -> dict[int, FitResult]:
    """Per-class fits of the localized cumulative curves.

    ``within_shell``: for each shell, log-log fit of its cumulative curve
    over degree (exponent reported minus one).  ``among_shells``: for each
    degree class, semi-log fit of its cumulative curve over coreness.
    """
    if axis not in ("within_shell", "among_shells"):
        raise ValueError(f"axis must be 'within_shell' or 'among_shells', got {axis!r}")
    if not h.has_events:
        return {}
    out: dict[int, FitResult] = {}
    if axis == "within_shell":
        for c0 in np.unique(h.c):
            if c0 <= 0:
                continue
            curve = phi_within_shell(h, int(c0))
            out[int(c0)] = fit_power_law(curve.values.astype(float), curve.cumulative,
                                         opts, class_sizes=curve.n, cumulative=True)
    else:
        for k0 in np.unique(h.k):
            if k0 <= 0:
                continue
            curve = pi_among_shells(h, int(k0))
            keep = curve.values > 0
            out[int(k0)] = fit_exponential(curve.values[keep].astype(float),
                                           curve.cumulative[keep], opts,
                                           class_sizes=curve.n[keep])
    return out


def averaged_localized_exponents(h: HybridStats, axis: str,
                                 opts: FitOptions = DEFAULT_FIT_OPTIONS) -> FitResult:
    """Average the localized exponents over classes with sufficient fits.

    ``n_points`` reports how many classes entered the average and
    ``r_squared`` is their mean fit quality; ``fit_range`` spans the
    fixed-axis values averaged.
    """
    fits = localized_exponents(h, axis, opts)
    model = POWER_LAW if axis == "within_shell" else EXPONENTIAL
    good = {v: f for v, f in fits.items() if f.sufficient}
    if not good:
        return _insufficient(model, 0, len(fits), "no class yielded a sufficient localized fit")
    exps = [f.exponent for f in good.values()]
    r2s = [f.r_squared for f in good.values()]
    return FitResult(model=model, exponent=float(np.mean(exps)), intercept=math.nan,
                     fit_range=(float(min(good)), float(max(good))),
                     r_squared=float(np.mean(r2s)), n_points=len(good),
                     n_excluded=len(fits) - len(good))


@dataclass(frozen=True)
class WindowSchedule:
    """Cutoff timestamps (strictly increasing) and a shared window length."""

    cutoffs: tuple[int, ...]
    dt: int

    def __post_init__(self):
        if not self.cutoffs:
            raise ValueError("schedule has no cutoffs")
        if self.dt <= 0:
            raise ValueError("window length dt must be positive")
        if any(b <= a for a, b in zip(self.cutoffs, self.cutoffs[1:])):
            raise ValueError("cutoffs must be strictly increasing")


def yearly_schedule(net: TemporalNetwork, dt: int = 365) -> WindowSchedule:
    """Calendar-year cutoffs: every January 1 after the first edge, up to the last edge."""
    if net.n_edges == 0:
        raise ValueError("network has no edges")
    first = days_to_date(net.t_min)
    cutoffs = []
    year = first.year + 1
    while True:
        import datetime as _dt
        day = _dt.date(year, 1, 1).toordinal() - _dt.date(1970, 1, 1).toordinal()
        if day > net.t_max:
            break
        cutoffs.append(day)
        year += 1
    if not cutoffs:
        raise ValueError("dataset spans less than one calendar year; supply an explicit schedule")
    return WindowSchedule(cutoffs=tuple(cutoffs), dt=dt)


def tick_schedule(start: int, stride: int, stop: int, dt: Optional[int] = None) -> WindowSchedule:
    """Evenly spaced cutoffs for abstract-tick data; dt defaults to the stride."""
    if stride <= 0:
        raise ValueError("stride must be positive")
    cutoffs = tuple(range(start, stop, stride))
    return WindowSchedule(cutoffs=cutoffs, dt=dt if dt is not None else stride)


@dataclass(frozen=True)
class WindowMeasurement:
    """Everything measured for one window: tables, shells, and event counts."""

    cutoff: int
    dt: int
    n_nodes: int
    n_events: int
    n_new_new: int
    n_old_old: int
    degree: AttachmentStats
    coreness: AttachmentStats
    hybrid: HybridStats
    shells: ShellStats
    coreness_map: CorenessMap


def measure_window(net: TemporalNetwork, cutoff: int, dt: int,
                   degree_mode: str = "undirected") -> WindowMeasurement:
    """Run the snapshot -> coreness -> estimators pipeline for one window.

    Degrees follow ``degree_mode``; coreness always comes from the
    undirected view of the same cutoff (the only view peeling is defined
    on), so directed modes mix directed degree classes with undirected
    coreness.
    """
    snap = snapshot_at(net, cutoff, degree_mode)
    snap_core = snap if degree_mode == "undirected" else snapshot_at(net, cutoff, "undirected")
    cm = core_decomposition(snap_core)
    w = window_attachments(net, cutoff, dt)
    return WindowMeasurement(
        cutoff=cutoff, dt=dt, n_nodes=snap.n_nodes, n_events=w.n_events,
        n_new_new=w.n_new_new, n_old_old=w.n_old_old,
        degree=measure_degree_pa(snap, w),
        coreness=measure_coreness_pa(snap, cm, w),
        hybrid=measure_hybrid(snap, cm, w),
        shells=shell_stats(snap_core, cm),
        coreness_map=cm,
    )


def fit_window(m: WindowMeasurement, which: str,
               opts: FitOptions = DEFAULT_FIT_OPTIONS) -> FitResult:
    """Fit one exponent from one window's measurements."""
    if which == "alpha":
        return fit_attachment(m.degree, opts)
    if which == "beta":
        return fit_attachment(m.coreness, opts)
    if which == "gamma":
        return fit_shell_degree_relation(m.shells, opts)
    if which == "alpha_within":
        return averaged_localized_exponents(m.hybrid, "within_shell", opts)
    if which == "beta_among":
        return averaged_localized_exponents(m.hybrid, "among_shells", opts)
    raise ValueError(f"unknown exponent selector {which!r}; expected one of {SERIES_NAMES}")


@dataclass(frozen=True)
class ExponentSeries:
    """Per-window fits of one exponent over a schedule."""

    which: str
    windows: tuple[int, ...]
    fits: tuple[FitResult, ...]

    def summary(self) -> dict:
        """Mean and standard deviation over windows with sufficient fits."""
        vals = [f.exponent for f in self.fits if f.sufficient]
        return {
            "exponent": self.which,
            "mean": float(np.mean(vals)) if vals else math.nan,
            "std": float(np.std(vals)) if vals else math.nan,
            "n_windows": len(vals),
            "n_insufficient": len(self.fits) - len(vals),
        }


def exponent_time_series(net: TemporalNetwork, schedule: WindowSchedule, which: str,
                         opts: FitOptions = DEFAULT_FIT_OPTIONS,
                         degree_mode: str = "undirected") -> ExponentSeries:
    """Measure and fit one exponent per scheduled window.

    Windows with no events or too few points carry insufficient markers, so
    the series always has one entry per cutoff.
    """
    if which not in SERIES_NAMES:
        raise ValueError(f"unknown exponent selector {which!r}; expected one of {SERIES_NAMES}")
    fits = []
    for cutoff in schedule.cutoffs:
        m = measure_window(net, cutoff, schedule.dt, degree_mode)
        fits.append(fit_window(m, which, opts))
    return ExponentSeries(which=which, windows=schedule.cutoffs, fits=tuple(fits))


def write_series_csv(series: ExponentSeries, path) -> None:
    """Export ``window_end,exponent,intercept,r2,n_points,model`` rows.

    ``window_end`` is the cutoff of the snapshot each fit is based on;
    insufficient fits leave the value cells empty.
    """
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["window_end", "exponent", "intercept", "r2", "n_points", "model"])
        for cutoff, fit in zip(series.windows, series.fits):
            if fit.sufficient:
                writer.writerow([cutoff, repr(fit.exponent), repr(fit.intercept),
                                 repr(fit.r_squared), fit.n_points, fit.model])
            else:
                writer.writerow([cutoff, "", "", "", fit.n_points, fit.model])


def read_series_csv(path, which: str) -> ExponentSeries:
    """Re-parse a series written by :func:`write_series_csv`."""
    windows, fits = [], []
    with Path(path).open("r", newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        next(reader)
        for row in reader:
            windows.append(int(row[0]))
            if row[1] == "":
                fits.append(_insufficient(row[5], int(row[4]), 0, "insufficient"))
            else:
                fits.append(FitResult(model=row[5], exponent=float(row[1]),
                                      intercept=float(row[2]), fit_range=(math.nan, math.nan),
                                      r_squared=float(row[3]), n_points=int(row[4])))
    return ExponentSeries(which=which, windows=tuple(windows), fits=tuple(fits))


def write_report_json(series_list: Sequence[ExponentSeries], path,
                      extra: Optional[dict] = None) -> None:
    """Bundle all series and their summaries into one JSON report."""
    doc = {"summaries": {s.which: s.summary() for s in series_list},
           "series": {}}
    for s in series_list:
        doc["series"][s.which] = [
            {"window_end": w,
             "exponent": (f.exponent if f.sufficient else None),
             "intercept": (f.intercept if f.sufficient else None),
             "r2": (f.r_squared if f.sufficient else None),
             "n_points": f.n_points,
             "model": f.model,
             "sufficient": f.sufficient}
            for w, f in zip(s.windows, s.fits)
        ]
    if extra:
        doc.update(extra)
    with Path(path).open("w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
