import numpy as np
import pytest

from corepa import (
    IngestReport,
    ParseError,
    ingest,
    ingest_path,
    read_generic_tsv,
    read_snap_citation,
    snapshot_at,
    window_attachments,
    write_generic_tsv,
)
from corepa.temporal import parse_timestamp

from conftest import net_from_triples, random_temporal_net


def test_ingest_three_triples_sorted():
    net = ingest(iter([("x", "y", 7), ("y", "z", 3), ("z", "x", 5)]))
    assert net.n_edges == 3
    assert net.t.tolist() == [3, 5, 7]
    assert net.n_nodes == 3


def test_ingest_rejects_self_loops():
    report = IngestReport()
    net = ingest(iter([("a", "b", 1), ("c", "c", 2), ("b", "c", 3), ("a", "c", 4)]),
                 report)
    assert net.n_edges == 3
    assert report.n_self_loops == 1


def test_ingest_duplicates_first_wins():
    report = IngestReport()
    net = ingest(iter([("a", "b", 5), ("b", "c", 1), ("a", "b", 9)]), report)
    assert report.n_duplicates == 1
    assert net.n_edges == 2
    # the surviving (a, b) edge keeps its first-seen timestamp
    pairs = {(net.external_ids[s], net.external_ids[d]): t
             for s, d, t in zip(net.src, net.dst, net.t)}
    assert pairs[("a", "b")] == 5


def test_ingest_dense_ids_and_arrival_sorted():
    net = ingest(iter([("n9", "n4", 10), ("n7", "n9", 2), ("n4", "n7", 30)]))
    assert sorted(np.concatenate([net.src, net.dst]).tolist()) == [0, 0, 1, 1, 2, 2]
    assert np.all(np.diff(net.arrival) >= 0)
    # arrival equals min incident timestamp
    for v in range(net.n_nodes):
        incident = [t for s, d, t in zip(net.src, net.dst, net.t) if v in (s, d)]
        assert net.arrival[v] == min(incident)


def test_parse_timestamp_iso_and_int():
    assert parse_timestamp("1970-01-01") == 0
    assert parse_timestamp("1970-02-01") == 31
    assert parse_timestamp("12345") == 12345
    with pytest.raises(ValueError):
        parse_timestamp("not-a-date")


def test_generic_tsv_malformed_line_number(tmp_path):
    p = tmp_path / "bad.tsv"
    p.write_text("# comment\n1\t2\t1999-01-01\n1\t2\n", encoding="utf-8")
    with pytest.raises(ParseError) as err:
        list(read_generic_tsv(p))
    assert err.value.lineno == 3


def test_generic_tsv_roundtrip(tmp_path):
    net = net_from_triples([("a", "b", 3), ("b", "c", 1)])
    p = tmp_path / "edges.tsv"
    write_generic_tsv(net, p)
    net2, report = ingest_path(p, "generic_tsv")
    assert net2.src.tolist() == net.src.tolist()
    assert net2.dst.tolist() == net.dst.tolist()
    assert net2.t.tolist() == net.t.tolist()
    assert report.n_edges == 2


def _write_snap_fixture(tmp_path):
    edges = tmp_path / "cit.txt"
    dates = tmp_path / "cit-dates.txt"
    edges.write_text(
        "# FromNodeId\tToNodeId\n"
        "9901001\t9802002\n"
        "9802002\t9701003\n"
        "5555555\t9901001\n"   # 5555555 has no date: skipped
        "9905009\t9802002\n",
        encoding="utf-8",
    )
    dates.write_text(
        "# NodeId\tDate\n"
        "9901001\t1999-01-15\n"
        "9802002\t1998-02-10\n"
        "9701003\t1997-01-05\n"
        "119905009\t1999-05-20\n",  # cross-listed id carries the documented prefix
        encoding="utf-8",
    )
    return edges, dates


def test_snap_adapter_dates_join_and_prefix(tmp_path):
    edges, dates = _write_snap_fixture(tmp_path)
    report = IngestReport()
    triples = list(read_snap_citation(edges, dates, report))
    assert report.n_missing_dates == 1
    assert len(triples) == 3
    by_src = {s: t for s, _, t in triples}
    assert by_src["9901001"] == parse_timestamp("1999-01-15")
    # prefix stripped, so the 9905009 edge found its date
    assert by_src["9905009"] == parse_timestamp("1999-05-20")


def test_snap_adapter_prefix_strip_disabled(tmp_path):
    edges, dates = _write_snap_fixture(tmp_path)
    report = IngestReport()
    triples = list(read_snap_citation(edges, dates, report, strip_dates_prefix=False))
    assert report.n_missing_dates == 2
    assert len(triples) == 2


def test_snapshot_strict_cutoff():
    net = net_from_triples([("a", "b", 5)])
    snap = snapshot_at(net, 5)
    assert snap.n_nodes == 0
    assert snap.indices.shape[0] == 0


def test_snapshot_hand_degrees():
    net = net_from_triples([("a", "b", 1), ("b", "c", 2)])
    snap = snapshot_at(net, 3)
    assert snap.degrees.tolist() == [1, 2, 1]


def test_snapshot_directed_modes():
    net = net_from_triples([("a", "b", 1), ("b", "c", 2)])
    snap_in = snapshot_at(net, 3, "in")
    # citation reading: in-degree counts edges pointing at the node
    assert snap_in.degrees.tolist() == [0, 1, 1]
    snap_out = snapshot_at(net, 3, "out")
    assert snap_out.degrees.tolist() == [1, 1, 0]
    with pytest.raises(ValueError):
        snapshot_at(net, 3, "sideways")


def test_snapshot_deterministic():
    rng = np.random.default_rng(11)
    net = random_temporal_net(rng)
    a = snapshot_at(net, 25)
    b = snapshot_at(net, 25)
    assert a.indptr.tolist() == b.indptr.tolist()
    assert a.indices.tolist() == b.indices.tolist()


def test_snapshot_monotone_in_time():
    rng = np.random.default_rng(7)
    for _ in range(5):
        net = random_temporal_net(rng)
        for t1, t2 in [(10, 20), (20, 40), (5, 45)]:
            s1, s2 = snapshot_at(net, t1), snapshot_at(net, t2)
            edges1 = {(min(u, v), max(u, v))
                      for u in range(s1.n_nodes) for v in s1.neighbors(u)}
            edges2 = {(min(u, v), max(u, v))
                      for u in range(s2.n_nodes) for v in s2.neighbors(u)}
            assert edges1 <= edges2


def test_window_empty():
    net = net_from_triples([("a", "b", 1)])
    w = window_attachments(net, 100, 10)
    assert w.n_events == 0 and w.n_new_new == 0 and w.n_old_old == 0


def test_window_hand_events():
    net = net_from_triples([("a", "b", 1), ("c", "a", 5), ("c", "b", 5)])
    w = window_attachments(net, 5, 3)
    assert w.n_events == 2
    assert sorted(zip(w.new_nodes.tolist(), w.targets.tolist())) == [(2, 0), (2, 1)]


def test_window_new_new_excluded():
    # nodes c and d both arrive inside the window; their edge is not an event
    net = net_from_triples([("a", "b", 1), ("c", "a", 5), ("c", "d", 6)])
    w = window_attachments(net, 5, 5)
    assert w.n_events == 1
    assert w.n_new_new == 1


def test_window_old_old_tallied():
    net = net_from_triples([("a", "b", 1), ("b", "c", 2), ("a", "c", 8)])
    w = window_attachments(net, 5, 5)
    assert w.n_events == 0
    assert w.n_old_old == 1


def test_window_conservation():
    rng = np.random.default_rng(13)
    for _ in range(5):
        net = random_temporal_net(rng)
        for t, dt in [(0, 10), (10, 15), (25, 30)]:
            w = window_attachments(net, t, dt)
            in_window = int(np.count_nonzero((net.t >= t) & (net.t < t + dt)))
            assert w.n_events + w.n_new_new + w.n_old_old == in_window
            # every target arrived before the window
            assert np.all(net.arrival[w.targets] < t) or w.n_events == 0


def test_window_requires_positive_dt():
    net = net_from_triples([("a", "b", 1)])
    with pytest.raises(ValueError):
        window_attachments(net, 0, 0)
