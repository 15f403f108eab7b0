"""Command-line orchestration: ingest, measure, fit, simulate, report.

Outputs are flat CSV tables plus JSON manifests so any plotting tool can
consume them.  All commands are deterministic for identical inputs and
options; manifests carry a ``generated_at`` stamp unless ``--no-timestamp``
is given.  Exit codes: 0 success, 1 usage or configuration error, 2 data
error, 3 insufficient-data outcome.
"""

from __future__ import annotations

import argparse
import dataclasses
import datetime
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .fitting import (
    SERIES_NAMES,
    DEFAULT_FIT_OPTIONS,
    ExponentSeries,
    FitOptions,
    FitResult,
    WindowSchedule,
    averaged_localized_exponents,
    fit_attachment,
    fit_shell_degree_relation,
    measure_window,
    write_report_json,
    write_series_csv,
    yearly_schedule,
)
from .kcore import read_shells_csv, write_coreness_csv, write_shells_csv
from .measure import (
    phi_within_shell,
    pi_among_shells,
    read_attachment_csv,
    read_hybrid_csv,
    write_attachment_csv,
    write_curve_csv,
    write_hybrid_csv,
)
from .simulate import KERNEL_MODES, OUT_DEGREE_MODES, KernelSpec, SimConfig, simulate
from .temporal import (
    DEGREE_MODES,
    ParseError,
    TemporalNetwork,
    ingest_path,
    write_generic_tsv,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INSUFFICIENT = 3


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; the contract here is 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        raise CliError(message, EXIT_USAGE)


def _read_config_file(path) -> dict[str, str]:
    """Parse ``key = value`` lines; ``#`` comments and blanks ignored."""
    values = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read config file {path}: {exc}", EXIT_USAGE)
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise CliError(f"{path}:{lineno}: expected 'key = value'", EXIT_USAGE)
        key, _, val = line.partition("=")
        values[key.strip().replace("-", "_")] = val.strip()
    return values


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    """Parse argv, letting a --config file supply defaults that flags override."""
    # locate the subcommand and any --config by scanning argv, so that
    # required flags may come from the file
    config_path = None
    command = None
    for i, tok in enumerate(argv):
        if tok == "--config" and i + 1 < len(argv):
            config_path = argv[i + 1]
        elif tok.startswith("--config="):
            config_path = tok.split("=", 1)[1]
        elif command is None and not tok.startswith("-"):
            command = tok
    if config_path is not None and command is not None:
        subactions = next(a for a in parser._actions
                          if isinstance(a, argparse._SubParsersAction))
        subparser = subactions.choices.get(command)
        if subparser is None:
            raise CliError(f"unknown command {command!r}", EXIT_USAGE)
        file_values = _read_config_file(config_path)
        known = {a.dest: a for a in subparser._actions}
        for key, val in file_values.items():
            if key not in known:
                raise CliError(f"unknown option {key!r} in config file {config_path}", EXIT_USAGE)
            action = known[key]
            if isinstance(action, (argparse._StoreTrueAction, argparse._StoreFalseAction)):
                if val.lower() not in ("true", "false", "1", "0", "yes", "no"):
                    raise CliError(f"config key {key!r} expects a boolean, got {val!r}", EXIT_USAGE)
                parsed = val.lower() in ("true", "1", "yes")
            elif action.type is not None:
                try:
                    parsed = action.type(val)
                except (TypeError, ValueError, argparse.ArgumentTypeError):
                    raise CliError(f"config key {key!r}: invalid value {val!r}", EXIT_USAGE)
            else:
                parsed = val
            if action.choices is not None and parsed not in action.choices:
                raise CliError(f"config key {key!r}: {parsed!r} not in {sorted(action.choices)}", EXIT_USAGE)
            subparser.set_defaults(**{key: parsed})
            action.required = False
    return parser.parse_args(argv)


def _now_stamp(enabled: bool):
    if not enabled:
        return None
    return datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")


def _write_json(doc: dict, path, stamp) -> None:
    if stamp is not None:
        doc = dict(doc, generated_at=stamp)
    with Path(path).open("w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _load_network(path) -> TemporalNetwork:
    try:
        net, _ = ingest_path(path, "generic_tsv")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}", EXIT_DATA)
    except (ParseError, ValueError) as exc:
        raise CliError(str(exc), EXIT_DATA)
    if net.n_edges == 0:
        raise CliError(f"{path} contains no edges", EXIT_DATA)
    return net


def _fit_options(args) -> FitOptions:
    if args.min_class_size < 0:
        raise CliError("--min-class-size must be non-negative", EXIT_USAGE)
    if not 0.0 <= args.tail_trim < 1.0:
        raise CliError("--tail-trim must lie in [0, 1)", EXIT_USAGE)
    return FitOptions(min_class_size=args.min_class_size, tail_trim=args.tail_trim)


def _validate_schedule_flags(args) -> None:
    """Reject inconsistent schedule options before any data is read."""
    if args.dt <= 0:
        raise CliError("--dt must be positive", EXIT_USAGE)
    if args.cutoffs is not None:
        if not args.cutoffs:
            raise CliError("--cutoffs must list at least one cutoff", EXIT_USAGE)
        if any(b <= a for a, b in zip(args.cutoffs, args.cutoffs[1:])):
            raise CliError("--cutoffs must be strictly increasing", EXIT_USAGE)
    elif args.start is not None and (args.stride is None or args.stride <= 0):
        raise CliError("--start requires a positive --stride", EXIT_USAGE)


def _schedule(args, net: TemporalNetwork) -> WindowSchedule:
    if args.cutoffs:
        return WindowSchedule(cutoffs=tuple(args.cutoffs), dt=args.dt)
    if args.start is not None:
        stop = args.stop if args.stop is not None else net.t_max + 1
        cutoffs = tuple(range(args.start, stop, args.stride))
        if not cutoffs:
            raise CliError("window schedule is empty; check --start/--stride/--stop", EXIT_USAGE)
        return WindowSchedule(cutoffs=cutoffs, dt=args.dt)
    try:
        return yearly_schedule(net, dt=args.dt)
    except ValueError as exc:
        raise CliError(f"{exc}", EXIT_INSUFFICIENT)


def cmd_ingest(args) -> int:
    stamp = _now_stamp(not args.no_timestamp)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    try:
        net, report = ingest_path(args.input, args.format, args.dates,
                                  strip_dates_prefix=not args.no_strip_dates_prefix)
    except OSError as exc:
        raise CliError(f"cannot read input: {exc}", EXIT_DATA)
    except (ParseError, ValueError) as exc:
        raise CliError(str(exc), EXIT_DATA)

    write_generic_tsv(net, out / "normalized.tsv")
    with (out / "nodes.tsv").open("w", encoding="utf-8") as fh:
        fh.write("dense_id\texternal_id\tarrival\n")
        for v in range(net.n_nodes):
            label = net.external_ids[v] if net.external_ids is not None else v
            fh.write(f"{v}\t{label}\t{int(net.arrival[v])}\n")
    _write_json({"input": str(args.input), "format": args.format, **report.as_dict()},
                out / "ingest_report.json", stamp)
    print(f"ingested {report.n_nodes} nodes, {report.n_edges} edges "
          f"({report.n_self_loops} self-loops, {report.n_duplicates} duplicates, "
          f"{report.n_skipped_lines} skipped lines, {report.n_missing_dates} missing-date edges)")
    return EXIT_OK


def _measure_one(net, cutoff, dt, degree_mode, mode_dir, c0s, k0s, export_nodes):
    m = measure_window(net, cutoff, dt, degree_mode)
    mode_dir.mkdir(parents=True, exist_ok=True)
    write_attachment_csv(m.degree, mode_dir / "degree.csv")
    write_attachment_csv(m.coreness, mode_dir / "coreness.csv")
    write_hybrid_csv(m.hybrid, mode_dir / "hybrid.csv")
    write_shells_csv(m.shells, mode_dir / "shells.csv")
    curves = {}
    if m.hybrid.has_events:
        for c0 in c0s:
            if np.any(m.hybrid.c == c0):
                write_curve_csv(phi_within_shell(m.hybrid, c0), mode_dir / f"phi_c{c0}.csv")
                curves[f"phi_c{c0}"] = True
            else:
                curves[f"phi_c{c0}"] = False
        for k0 in k0s:
            if np.any(m.hybrid.k == k0):
                write_curve_csv(pi_among_shells(m.hybrid, k0), mode_dir / f"pi_k{k0}.csv")
                curves[f"pi_k{k0}"] = True
            else:
                curves[f"pi_k{k0}"] = False
    if export_nodes:
        from .temporal import snapshot_at
        snap = snapshot_at(net, cutoff, "undirected")
        write_coreness_csv(snap, m.coreness_map, mode_dir / "nodes.csv")
    window_doc = {
        "cutoff": m.cutoff, "dt": m.dt, "n_nodes": m.n_nodes,
        "n_events": m.n_events, "n_new_new": m.n_new_new,
        "n_old_old": m.n_old_old, "has_events": m.degree.has_events,
        "curves": curves,
    }
    return window_doc


def cmd_measure(args) -> int:
    stamp = _now_stamp(not args.no_timestamp)
    _validate_schedule_flags(args)
    net = _load_network(args.input)
    schedule = _schedule(args, net)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    window_dirs = {c: out / f"window_{c:012d}" for c in schedule.cutoffs}
    jobs = max(1, args.jobs)
    results: dict[int, dict] = {}
    if jobs == 1:
        for cutoff in schedule.cutoffs:
            results[cutoff] = _measure_one(net, cutoff, schedule.dt, args.degree_mode,
                                           window_dirs[cutoff], args.c0, args.k0,
                                           args.export_nodes)
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = {cutoff: pool.submit(_measure_one, net, cutoff, schedule.dt,
                                           args.degree_mode, window_dirs[cutoff],
                                           args.c0, args.k0, args.export_nodes)
                       for cutoff in schedule.cutoffs}
            for cutoff, fut in futures.items():
                results[cutoff] = fut.result()

    windows = [dict(results[c], dir=window_dirs[c].name) for c in schedule.cutoffs]
    _write_json({
        "input": str(args.input),
        "degree_mode": args.degree_mode,
        "dt": schedule.dt,
        "cutoffs": list(schedule.cutoffs),
        "c0": args.c0, "k0": args.k0,
        "windows": windows,
    }, out / "manifest.json", stamp)

    n_with_events = sum(1 for w in windows if w["has_events"])
    print(f"measured {len(windows)} windows ({n_with_events} with events) into {out}")
    if n_with_events == 0:
        print("no window contains attachment events; adjust the schedule", file=sys.stderr)
        return EXIT_INSUFFICIENT
    return EXIT_OK


def _fit_from_bundle(measure_dir: Path, which: list[str], opts: FitOptions):
    manifest_path = measure_dir / "manifest.json"
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise CliError(f"cannot read {manifest_path}: {exc}", EXIT_DATA)
    except json.JSONDecodeError as exc:
        raise CliError(f"{manifest_path} is not valid JSON: {exc}", EXIT_DATA)

    series: dict[str, list[FitResult]] = {name: [] for name in which}
    cutoffs = []
    for w in manifest["windows"]:
        wd = measure_dir / w["dir"]
        cutoff, dt = int(w["cutoff"]), int(w["dt"])
        cutoffs.append(cutoff)
        window = (cutoff, dt)
        try:
            degree = read_attachment_csv(wd / "degree.csv", "degree", window)
            coreness = read_attachment_csv(wd / "coreness.csv", "coreness", window)
            hybrid = read_hybrid_csv(wd / "hybrid.csv", window, int(w["n_nodes"]))
            shells = read_shells_csv(wd / "shells.csv")
        except (OSError, ValueError) as exc:
            raise CliError(f"cannot read window bundle {wd}: {exc}", EXIT_DATA)
        for name in which:
            if name == "alpha":
                series[name].append(fit_attachment(degree, opts))
            elif name == "beta":
                series[name].append(fit_attachment(coreness, opts))
            elif name == "gamma":
                series[name].append(fit_shell_degree_relation(shells, opts))
            elif name == "alpha_within":
                series[name].append(averaged_localized_exponents(hybrid, "within_shell", opts))
            else:
                series[name].append(averaged_localized_exponents(hybrid, "among_shells", opts))
    return [ExponentSeries(which=name, windows=tuple(cutoffs), fits=tuple(series[name]))
            for name in which]


def cmd_fit(args) -> int:
    stamp = _now_stamp(not args.no_timestamp)
    which = [w.strip() for w in args.which.split(",") if w.strip()]
    for name in which:
        if name not in SERIES_NAMES:
            raise CliError(f"unknown exponent {name!r}; choose from {', '.join(SERIES_NAMES)}", EXIT_USAGE)
    opts = _fit_options(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    series_list = _fit_from_bundle(Path(args.measure_dir), which, opts)
    for s in series_list:
        write_series_csv(s, out / f"series_{s.which}.csv")
    write_report_json(series_list, out / "report.json",
                      extra={"measure_dir": str(args.measure_dir),
                             **({"generated_at": stamp} if stamp else {})})
    for s in series_list:
        summ = s.summary()
        if summ["n_windows"]:
            print(f"{s.which}: mean={summ['mean']:.4f} std={summ['std']:.4f} "
                  f"over {summ['n_windows']} windows ({summ['n_insufficient']} insufficient)")
        else:
            print(f"{s.which}: no sufficient window fits")
    if all(s.summary()["n_windows"] == 0 for s in series_list):
        print("every requested series is insufficient in every window", file=sys.stderr)
        return EXIT_INSUFFICIENT
    return EXIT_OK


def cmd_simulate(args) -> int:
    stamp = _now_stamp(not args.no_timestamp)
    try:
        kernel = KernelSpec(mode=args.kernel, alpha=args.alpha, beta=args.beta,
                            degree_offset=args.offset)
        cfg = SimConfig(n_final=args.n, m=args.m, rng_seed=args.seed,
                        coreness_refresh=args.refresh, out_degree=args.out_degree)
    except ValueError as exc:
        raise CliError(str(exc), EXIT_USAGE)
    net = simulate(cfg, kernel)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_generic_tsv(net, out / "edges.tsv")
    _write_json({
        "config": dataclasses.asdict(cfg),
        "kernel": dataclasses.asdict(kernel),
        "n_nodes": net.n_nodes,
        "n_edges": net.n_edges,
        "version": __version__,
    }, out / "metadata.json", stamp)
    print(f"simulated {net.n_nodes} nodes, {net.n_edges} edges into {out}")
    return EXIT_OK


def cmd_report(args) -> int:
    out = Path(args.out)
    measure_args = argparse.Namespace(**vars(args))
    measure_args.out = str(out / "measure")
    code = cmd_measure(measure_args)
    if code != EXIT_OK:
        return code
    fit_args = argparse.Namespace(**vars(args))
    fit_args.measure_dir = str(out / "measure")
    fit_args.out = str(out / "fit")
    return cmd_fit(fit_args)


def _add_fit_option_flags(p):
    p.add_argument("--min-class-size", type=int, default=DEFAULT_FIT_OPTIONS.min_class_size,
                   help="drop classes with fewer member nodes from fits")
    p.add_argument("--tail-trim", type=float, default=DEFAULT_FIT_OPTIONS.tail_trim,
                   help="drop this top fraction of the fit abscissa")


def _add_schedule_flags(p):
    p.add_argument("--dt", type=int, default=365, help="window length (days or ticks)")
    p.add_argument("--cutoffs", type=_int_list, default=None,
                   help="explicit comma-separated window cutoffs")
    p.add_argument("--start", type=int, default=None, help="first cutoff (with --stride)")
    p.add_argument("--stride", type=int, default=None, help="cutoff spacing")
    p.add_argument("--stop", type=int, default=None, help="exclusive last cutoff bound")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="corepa",
                     description="Degree- and coreness-based preferential-attachment "
                                 "measurement on temporal networks")
    parser.add_argument("--version", action="version", version=f"corepa {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ingest", help="normalize a dataset into the generic edge-list format")
    p.add_argument("--config", default=None, help="key = value file supplying option defaults")
    p.add_argument("--input", required=True, help="edges file")
    p.add_argument("--format", choices=("generic_tsv", "snap_citation"), default="generic_tsv")
    p.add_argument("--dates", default=None, help="dates file (snap_citation format)")
    p.add_argument("--no-strip-dates-prefix", action="store_true",
                   help="keep the documented '11' prefix on cross-listed ids")
    p.add_argument("--out", required=True)
    p.add_argument("--no-timestamp", action="store_true")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("measure", help="per-window attachment tables and curves")
    p.add_argument("--config", default=None)
    p.add_argument("--input", required=True, help="normalized edge list (generic TSV)")
    p.add_argument("--out", required=True)
    p.add_argument("--degree-mode", choices=DEGREE_MODES, default="undirected")
    _add_schedule_flags(p)
    p.add_argument("--c0", type=_int_list, default=[20],
                   help="shell values for within-shell cumulative curves")
    p.add_argument("--k0", type=_int_list, default=[20],
                   help="degree values for among-shell cumulative curves")
    p.add_argument("--export-nodes", action="store_true",
                   help="also write node,coreness,degree per window")
    p.add_argument("--jobs", type=int, default=1, help="parallel window workers")
    p.add_argument("--no-timestamp", action="store_true")
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("fit", help="exponent series and summaries from measurement bundles")
    p.add_argument("--config", default=None)
    p.add_argument("--measure-dir", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--which", default="alpha,beta,gamma",
                   help=f"comma-separated subset of {','.join(SERIES_NAMES)}")
    _add_fit_option_flags(p)
    p.add_argument("--no-timestamp", action="store_true")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("simulate", help="grow a synthetic network with a planted kernel")
    p.add_argument("--config", default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--n", type=int, required=True, help="final node count")
    p.add_argument("--m", type=int, required=True, help="edges per new node (mean if variable)")
    p.add_argument("--kernel", choices=KERNEL_MODES, default="hybrid")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--beta", type=float, default=0.0)
    p.add_argument("--offset", type=float, default=1.0, help="degree offset in the kernel")
    p.add_argument("--seed", type=int, default=0, help="rng seed")
    p.add_argument("--out-degree", choices=OUT_DEGREE_MODES, default="fixed")
    p.add_argument("--refresh", type=int, default=1, help="coreness refresh cadence in ticks")
    p.add_argument("--no-timestamp", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("report", help="measure and fit in one pass")
    p.add_argument("--config", default=None)
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--degree-mode", choices=DEGREE_MODES, default="undirected")
    _add_schedule_flags(p)
    p.add_argument("--c0", type=_int_list, default=[20])
    p.add_argument("--k0", type=_int_list, default=[20])
    p.add_argument("--export-nodes", action="store_true")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--which", default="alpha,beta,gamma")
    _add_fit_option_flags(p)
    p.add_argument("--no-timestamp", action="store_true")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except BrokenPipeError:
        return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
