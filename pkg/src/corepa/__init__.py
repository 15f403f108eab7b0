"""Preferential-attachment measurement on temporal networks.

Measures how strongly a node's degree, coreness, or both together predict
its chance of attracting newly arriving nodes, window by window; fits the
resulting curves (power laws over degree, exponentials over coreness); and
validates the whole pipeline against a growth simulator with planted
attachment kernels.
"""

from .temporal import (
    IngestReport,
    ParseError,
    Snapshot,
    TemporalNetwork,
    WindowAttachments,
    from_edge_arrays,
    ingest,
    ingest_path,
    read_generic_tsv,
    read_snap_citation,
    snapshot_at,
    window_attachments,
    write_generic_tsv,
)
from .kcore import CorenessMap, ShellStats, core_decomposition, shell_stats
from .measure import (
    AttachmentStats,
    HybridStats,
    LocalizedCurve,
    measure_coreness_pa,
    measure_degree_pa,
    measure_hybrid,
    phi_within_shell,
    pi_among_shells,
)
from .fitting import (
    DEFAULT_FIT_OPTIONS,
    ExponentSeries,
    FitOptions,
    FitResult,
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
from .simulate import KernelSpec, SimConfig, kernel_weight, simulate

__version__ = "0.1.0"

__all__ = [
    "AttachmentStats",
    "CorenessMap",
    "DEFAULT_FIT_OPTIONS",
    "ExponentSeries",
    "FitOptions",
    "FitResult",
    "HybridStats",
    "IngestReport",
    "KernelSpec",
    "LocalizedCurve",
    "ParseError",
    "ShellStats",
    "SimConfig",
    "Snapshot",
    "TemporalNetwork",
    "WindowAttachments",
    "WindowSchedule",
    "averaged_localized_exponents",
    "core_decomposition",
    "exponent_time_series",
    "fit_attachment",
    "fit_exponential",
    "fit_power_law",
    "fit_shell_degree_relation",
    "fit_window",
    "from_edge_arrays",
    "ingest",
    "ingest_path",
    "kernel_weight",
    "localized_exponents",
    "measure_coreness_pa",
    "measure_degree_pa",
    "measure_hybrid",
    "measure_window",
    "phi_within_shell",
    "pi_among_shells",
    "read_generic_tsv",
    "read_snap_citation",
    "shell_stats",
    "simulate",
    "snapshot_at",
    "tick_schedule",
    "window_attachments",
    "write_generic_tsv",
    "yearly_schedule",
]
