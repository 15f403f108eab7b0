import math

import numpy as np
import pytest

from corepa import (
    DEFAULT_FIT_OPTIONS,
    FitOptions,
    WindowSchedule,
    averaged_localized_exponents,
    exponent_time_series,
    fit_attachment,
    fit_exponential,
    fit_power_law,
    fit_shell_degree_relation,
    fit_window,
    localized_exponents,
    measure_window,
    tick_schedule,
    yearly_schedule,
)
from corepa.kcore import ShellStats
from corepa.measure import AttachmentStats, HybridStats
from corepa.fitting import read_series_csv, write_report_json, write_series_csv

from conftest import net_from_triples

EXACT = FitOptions(min_class_size=0, tail_trim=0.0)


def test_power_law_exact_square():
    x = np.arange(1.0, 11.0)
    r = fit_power_law(x, x ** 2, EXACT)
    assert r.sufficient
    assert r.exponent == pytest.approx(2.0, abs=1e-9)
    assert r.r_squared == pytest.approx(1.0, abs=1e-12)
    assert r.n_points == 10


def test_power_law_cumulative_reports_minus_one():
    k = np.arange(1.0, 15.0)
    r = fit_power_law(k, k ** 1.7, EXACT, cumulative=True)
    assert r.exponent == pytest.approx(0.7, abs=1e-9)


def test_exponential_exact():
    x = np.arange(1.0, 13.0)
    r = fit_exponential(x, np.exp(0.3 * x), EXACT)
    assert r.exponent == pytest.approx(0.3, abs=1e-9)
    assert r.r_squared == pytest.approx(1.0, abs=1e-12)


def test_exponential_constant_is_zero():
    x = np.arange(1.0, 9.0)
    r = fit_exponential(x, np.full(8, 4.2), EXACT)
    assert r.exponent == pytest.approx(0.0, abs=1e-9)
    assert r.r_squared == pytest.approx(1.0)


def test_insufficient_points_marker():
    r = fit_power_law([1.0, 2.0], [1.0, 4.0], EXACT)
    assert not r.sufficient
    assert math.isnan(r.exponent)
    r = fit_exponential([1.0, 1.0, 1.0], [1.0, 2.0, 3.0], EXACT)  # one unique x
    assert not r.sufficient


def test_nonpositive_values_excluded_and_counted():
    x = np.array([-1.0, 0.0, 1.0, 2.0, 3.0, 4.0])
    y = x ** 2
    r = fit_power_law(x, y, EXACT)
    assert r.sufficient
    assert r.n_excluded == 2  # x=-1 and x=0 fail the positivity filter
    assert r.n_points == 4
    assert r.exponent == pytest.approx(2.0, abs=1e-9)


def test_duplicate_x_averaged():
    x = np.array([1.0, 2.0, 2.0, 4.0])
    y = np.array([1.0, 3.0, 5.0, 16.0])   # duplicates at x=2 average to 4 = x^2
    r = fit_power_law(x, y, EXACT)
    assert r.exponent == pytest.approx(2.0, abs=1e-9)
    assert r.n_points == 3


def test_scale_equivariance():
    x = np.arange(1.0, 11.0)
    y = x ** 1.3
    base = fit_power_law(x, y, EXACT)
    scaled = fit_power_law(x, 1000.0 * y, EXACT)
    assert scaled.exponent == pytest.approx(base.exponent, abs=1e-9)
    assert scaled.intercept != pytest.approx(base.intercept)
    e_base = fit_exponential(x, np.exp(0.2 * x), EXACT)
    e_scaled = fit_exponential(x, 7.0 * np.exp(0.2 * x), EXACT)
    assert e_scaled.exponent == pytest.approx(e_base.exponent, abs=1e-9)


def test_x_rescale_and_shift_invariance():
    x = np.arange(1.0, 11.0)
    r1 = fit_power_law(x, x ** 1.5, EXACT)
    r2 = fit_power_law(3.0 * x, (3.0 * x) ** 1.5, EXACT)
    assert r2.exponent == pytest.approx(r1.exponent, abs=1e-9)
    e1 = fit_exponential(x, np.exp(0.4 * x), EXACT)
    e2 = fit_exponential(x + 100.0, np.exp(0.4 * (x + 100.0)), EXACT)
    assert e2.exponent == pytest.approx(e1.exponent, abs=1e-9)


def test_explicit_fit_range_respected():
    x = np.arange(1.0, 21.0)
    y = x ** 2
    y[15:] = 1e6   # garbage outside the range must not leak in
    r = fit_power_law(x, y, FitOptions(min_class_size=0, tail_trim=0.0, x_min=1, x_max=15))
    assert r.exponent == pytest.approx(2.0, abs=1e-9)
    assert r.fit_range[0] >= 1.0 and r.fit_range[1] <= 15.0
    assert r.n_excluded == 5


def test_tail_trim_drops_top_fraction():
    x = np.arange(1.0, 102.0)
    y = x ** 2
    r = fit_power_law(x, y, FitOptions(min_class_size=0, tail_trim=0.01))
    assert r.fit_range[1] < 101.0
    assert r.exponent == pytest.approx(2.0, abs=1e-9)


def test_min_class_size_filter():
    x = np.arange(1.0, 11.0)
    y = x ** 2
    sizes = np.array([9, 9, 9, 9, 9, 1, 9, 9, 9, 9])
    r = fit_power_law(x, y, FitOptions(min_class_size=5, tail_trim=0.0), class_sizes=sizes)
    assert r.n_points == 9
    assert r.exponent == pytest.approx(2.0, abs=1e-9)


def test_fit_attachment_routes_by_axis():
    k = np.arange(1, 13, dtype=np.int64)
    kappa = (k.astype(float)) ** 1.7
    st = AttachmentStats(axis="degree", window=(0, 1), values=k,
                         A=np.ones_like(k), n=np.full_like(k, 50),
                         T=kappa / kappa[-1], kappa=kappa)
    r = fit_attachment(st, EXACT)
    assert r.model == "power_law"
    assert r.exponent == pytest.approx(0.7, abs=1e-9)

    c = np.arange(0, 9, dtype=np.int64)   # includes shell 0, excluded from the fit
    kap = np.exp(0.25 * c.astype(float))
    st = AttachmentStats(axis="coreness", window=(0, 1), values=c,
                         A=np.ones_like(c), n=np.full_like(c, 50),
                         T=kap / kap[-1], kappa=kap)
    r = fit_attachment(st, EXACT)
    assert r.model == "exponential"
    assert r.exponent == pytest.approx(0.25, abs=1e-9)
    assert r.fit_range[0] >= 1.0


def test_fit_attachment_no_events_marker():
    st = AttachmentStats(axis="degree", window=(0, 1),
                         values=np.array([1, 2]), A=np.zeros(2, np.int64),
                         n=np.array([3, 3]), T=None, kappa=None)
    r = fit_attachment(st, EXACT)
    assert not r.sufficient
    assert "no attachment events" in r.note


def test_shell_degree_relation_exact():
    c = np.arange(1, 9, dtype=np.int64)
    stats = ShellStats(values=c, sizes=np.full_like(c, 40),
                       mean_degree=c.astype(float) ** 1.5,
                       min_degree=c, max_degree=c * 3)
    r = fit_shell_degree_relation(stats, EXACT)
    assert r.exponent == pytest.approx(1.5, abs=1e-9)


def test_shell_degree_relation_single_shell_insufficient():
    stats = ShellStats(values=np.array([3]), sizes=np.array([4]),
                       mean_degree=np.array([3.0]),
                       min_degree=np.array([3]), max_degree=np.array([3]))
    r = fit_shell_degree_relation(stats, EXACT)
    assert not r.sufficient


def exact_phi_hybrid(slopes_by_shell, n_k=6):
    """Hybrid table whose within-shell cumulative curves are exact power laws."""
    cs, ks, ns, Ts = [], [], [], []
    for c0, slope in slopes_by_shell.items():
        k = np.arange(1, n_k + 1, dtype=float)
        phi = k ** slope
        t = np.diff(np.concatenate([[0.0], phi]))
        for kk, tt in zip(k, t):
            cs.append(c0)
            ks.append(int(kk))
            ns.append(99)
            Ts.append(tt)
    T = np.asarray(Ts)
    T = T / T.sum()
    return HybridStats(window=(0, 1), c=np.asarray(cs, np.int64),
                       k=np.asarray(ks, np.int64), n=np.asarray(ns, np.int64),
                       A=np.ones(len(cs), np.int64), raw=T.copy(), T=T, N=100)


def test_averaged_within_shell_exponents():
    h = exact_phi_hybrid({1: 1.8, 2: 2.2})
    fits = localized_exponents(h, "within_shell", EXACT)
    assert fits[1].exponent == pytest.approx(0.8, abs=1e-9)
    assert fits[2].exponent == pytest.approx(1.2, abs=1e-9)
    avg = averaged_localized_exponents(h, "within_shell", EXACT)
    assert avg.exponent == pytest.approx(1.0, abs=1e-9)
    assert avg.n_points == 2


def test_averaged_single_class_equals_class_exponent():
    h = exact_phi_hybrid({3: 2.0})
    avg = averaged_localized_exponents(h, "within_shell", EXACT)
    assert avg.exponent == pytest.approx(1.0, abs=1e-9)
    assert avg.n_points == 1


def test_averaged_among_shells_exact():
    # curves over c at fixed k: build T so each Pi(c, k0) is exactly exp(b*c)
    cs, ks, Ts = [], [], []
    for k0, b in ((4, 0.3), (7, 0.3)):
        c = np.arange(1, 8, dtype=float)
        pi = np.exp(b * c)
        t = np.diff(np.concatenate([[0.0], pi]))
        cs += list(range(1, 8))
        ks += [k0] * 7
        Ts += list(t)
    order = np.lexsort((np.asarray(ks), np.asarray(cs)))
    T = np.asarray(Ts)[order]
    T = T / T.sum()
    h = HybridStats(window=(0, 1), c=np.asarray(cs, np.int64)[order],
                    k=np.asarray(ks, np.int64)[order],
                    n=np.full(len(cs), 99, np.int64),
                    A=np.ones(len(cs), np.int64), raw=T.copy(), T=T, N=700)
    avg = averaged_localized_exponents(h, "among_shells", EXACT)
    assert avg.model == "exponential"
    # cumulative of an exponential is exponential with the same rate only
    # asymptotically; over c=1..7 the discrete sum bends the low end, so the
    # per-curve fits sit near but not exactly at the planted rate
    assert avg.exponent == pytest.approx(0.3, abs=0.06)
    assert avg.n_points == 2


def test_averaged_no_sufficient_class():
    h = exact_phi_hybrid({1: 1.8}, n_k=2)   # two points per shell: insufficient
    avg = averaged_localized_exponents(h, "within_shell", EXACT)
    assert not avg.sufficient
    with pytest.raises(ValueError):
        localized_exponents(h, "diagonal")


def growth_fixture():
    triples = []
    for i in range(3, 40):
        triples.append((f"n{i}", f"n{i-1}", i))
        triples.append((f"n{i}", f"n{i-2}", i))
        if i % 3 == 0:
            triples.append((f"n{i}", f"n{i-3}", i))
    return net_from_triples(triples)


def test_single_window_series_equals_direct_fit():
    net = growth_fixture()
    sched = WindowSchedule(cutoffs=(20,), dt=10)
    series = exponent_time_series(net, sched, "alpha")
    direct = fit_window(measure_window(net, 20, 10), "alpha")
    assert len(series.fits) == 1
    if series.fits[0].sufficient:
        assert series.fits[0].exponent == pytest.approx(direct.exponent, abs=1e-12)
    else:
        assert not direct.sufficient


def test_series_insufficient_windows_marked():
    net = growth_fixture()
    sched = WindowSchedule(cutoffs=(2, 20), dt=5)
    series = exponent_time_series(net, sched, "beta")
    assert len(series.fits) == 2
    assert not series.fits[0].sufficient  # nothing before the first cutoff
    summ = series.summary()
    assert summ["n_insufficient"] >= 1


def test_schedule_validation():
    with pytest.raises(ValueError):
        WindowSchedule(cutoffs=(), dt=5)
    with pytest.raises(ValueError):
        WindowSchedule(cutoffs=(3, 3), dt=5)
    with pytest.raises(ValueError):
        WindowSchedule(cutoffs=(1, 2), dt=0)
    with pytest.raises(ValueError):
        tick_schedule(0, 0, 10)


def test_unknown_series_selector():
    net = growth_fixture()
    with pytest.raises(ValueError):
        exponent_time_series(net, WindowSchedule(cutoffs=(20,), dt=5), "delta")


def test_yearly_schedule_calendar_anchored():
    from corepa.temporal import days_to_date, parse_timestamp
    net = net_from_triples([
        ("a", "b", parse_timestamp("1994-06-15")),
        ("b", "c", parse_timestamp("1995-08-02")),
        ("c", "d", parse_timestamp("1997-03-01")),
    ])
    sched = yearly_schedule(net)
    dates = [days_to_date(c) for c in sched.cutoffs]
    assert [d.isoformat() for d in dates] == ["1995-01-01", "1996-01-01", "1997-01-01"]
    assert sched.dt == 365


def test_series_csv_roundtrip(tmp_path):
    net = growth_fixture()
    sched = WindowSchedule(cutoffs=(15, 25, 35), dt=5)
    series = exponent_time_series(net, sched, "gamma")
    p = tmp_path / "series_gamma.csv"
    write_series_csv(series, p)
    back = read_series_csv(p, "gamma")
    assert back.windows == series.windows
    for f1, f2 in zip(back.fits, series.fits):
        assert f1.sufficient == f2.sufficient
        if f1.sufficient:
            assert f1.exponent == f2.exponent
            assert f1.r_squared == f2.r_squared


def test_report_json(tmp_path):
    net = growth_fixture()
    sched = WindowSchedule(cutoffs=(15, 30), dt=8)
    series = [exponent_time_series(net, sched, w) for w in ("alpha", "beta")]
    p = tmp_path / "report.json"
    write_report_json(series, p)
    import json
    doc = json.loads(p.read_text())
    assert set(doc["series"]) == {"alpha", "beta"}
    assert "mean" in doc["summaries"]["alpha"]
