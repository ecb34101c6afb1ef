"""Figure rendering for noisac CSV results.

Reads the simulator's CSV files (standard column schema) and draws the
comparison, sweep, and trade-off figures.  Rendering never recomputes a
metric; whatever is in the CSV is what gets plotted.  All CRLB axes are
log scaled since the bounds span several decades across any sweep.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

REQUIRED_COLUMNS = (
    "seed", "snr_db", "n_t", "l_y", "l_z", "m_y", "m_z", "t_slots", "zeta", "b",
    "sigma_x2", "system", "crlb_x", "crlb_gamma", "crlb_phi", "crlb_angle",
    "crlb_isac_db", "mi_avg_bits", "ce_iterations", "objective",
)

SYSTEM_LABELS = {
    "no_isac": "joint communication and localization",
    "td_isac": "time-division baseline",
    "loc_only": "dedicated positioning pilots",
    "random_phase": "random phase shifts",
}

PARAM_LABELS = {
    "sigma_x2": "variance of the transmit symbol",
    "t_slots": "time slots per block",
    "l_total": "number of IRS elements",
    "snr_db": "received SNR (dB)",
    "zeta": "weight coefficient",
}


class SchemaError(ValueError):
    """Input CSV does not carry the expected column schema."""


class EmptyInputError(ValueError):
    """Input CSV has a header but no data rows."""


@dataclass(frozen=True)
class FigureSpec:
    """One figure to render: its id, input CSVs, and output image path."""

    figure_id: str
    inputs: tuple
    output: Path

    def __post_init__(self):
        if self.figure_id not in RENDERERS:
            known = ", ".join(sorted(RENDERERS))
            raise ValueError(f"unknown figure id {self.figure_id!r}; expected one of {known}")
        if not self.inputs:
            raise ValueError("at least one input CSV is required")


@dataclass
class Table:
    """Parsed CSV: list-of-dicts rows with numeric fields converted."""

    path: Path
    rows: list

    def filtered(self, system: str) -> list:
        return [r for r in self.rows if r["system"] == system]

    def value(self, column: str):
        values = {r[column] for r in self.rows}
        return values.pop() if len(values) == 1 else None


def load_table(path: str | Path) -> Table:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"input CSV not found: {path}")
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in REQUIRED_COLUMNS if c not in header]
        if missing:
            extra = [c for c in header if not c.endswith("_std") and c not in REQUIRED_COLUMNS]
            raise SchemaError(
                f"{path}: missing columns {missing}"
                + (f", unexpected columns {extra}" if extra else "")
            )
        rows = []
        for raw in reader:
            row = {}
            for key, value in raw.items():
                if key == "system":
                    row[key] = value
                else:
                    try:
                        row[key] = float(value)
                    except (TypeError, ValueError):
                        row[key] = float("nan")
            row["l_total"] = row["l_y"] * row["l_z"]
            rows.append(row)
    if not rows:
        raise EmptyInputError(f"{path}: no data rows")
    return Table(path=path, rows=rows)


def _series(table: Table, system: str, x_column: str, y_column: str):
    rows = sorted(table.filtered(system), key=lambda r: r[x_column])
    xs = [r[x_column] for r in rows]
    ys = [r[y_column] for r in rows]
    return xs, ys


def _plot_systems(ax, tables, systems, x_column, y_column, marker_cycle="osd^v"):
    for i, system in enumerate(systems):
        for table in tables:
            xs, ys = _series(table, system, x_column, y_column)
            if not xs:
                continue
            suffix = ""
            if len(tables) > 1:
                suffix = f" ({table.path.stem})"
            ax.plot(xs, ys, marker=marker_cycle[i % len(marker_cycle)],
                    label=SYSTEM_LABELS.get(system, system) + suffix)


def _comparison_figure(tables, x_column, y_column, y_label, log_y, systems):
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    _plot_systems(ax, tables, systems, x_column, y_column)
    ax.set_xlabel(PARAM_LABELS.get(x_column, x_column))
    ax.set_ylabel(y_label)
    if log_y:
        ax.set_yscale("log")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


def _f4(tables):
    # localization bound (log scale) and mutual information vs symbol variance
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    _plot_systems(ax, tables, ("no_isac", "loc_only"), "sigma_x2", "crlb_angle")
    ax.set_xlabel(PARAM_LABELS["sigma_x2"])
    ax.set_ylabel("CRLB for angle estimation")
    ax.set_yscale("log")
    ax.grid(True, which="both", alpha=0.3)
    twin = ax.twinx()
    for table in tables:
        xs, ys = _series(table, "no_isac", "sigma_x2", "mi_avg_bits")
        if xs:
            twin.plot(xs, ys, color="tab:green", linestyle="--", marker="x",
                      label="mutual information")
    twin.set_ylabel("mutual information (bits/symbol)")
    handles, labels = ax.get_legend_handles_labels()
    h2, l2 = twin.get_legend_handles_labels()
    ax.legend(handles + h2, labels + l2, fontsize=8)
    fig.tight_layout()
    return fig


def _frontier_figure(tables, label_column, label_format):
    fig, ax = plt.subplots(figsize=(6.0, 4.2))
    for table in tables:
        rows = sorted(table.filtered("no_isac"), key=lambda r: r["mi_avg_bits"])
        if not rows:
            continue
        value = table.value(label_column)
        label = label_format(value, table)
        ax.plot([r["mi_avg_bits"] for r in rows], [r["crlb_angle"] for r in rows],
                marker="o", label=label)
    ax.set_xlabel("mutual information (bits/symbol)")
    ax.set_ylabel("CRLB for angle estimation")
    ax.set_yscale("log")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


def _f11(tables):
    fig, axes = plt.subplots(1, 2, figsize=(9.0, 4.0))
    for ax, metric, title in ((axes[0], "crlb_x", "communication CRLB"),
                              (axes[1], "crlb_angle", "CRLB for angle estimation")):
        _plot_systems(ax, tables, ("no_isac", "random_phase"), "zeta", metric)
        ax.set_xlabel(PARAM_LABELS["zeta"])
        ax.set_ylabel(title)
        ax.set_yscale("log")
        ax.grid(True, which="both", alpha=0.3)
        ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


def _snr_label(value, table):
    return f"SNR = {value:g} dB" if value is not None else table.path.stem


def _elements_label(value, table):
    return f"L = {value:g}" if value is not None else table.path.stem


RENDERERS = {
    "f4": lambda t: _f4(t),
    "f5": lambda t: _comparison_figure(t, "t_slots", "crlb_angle",
                                       "CRLB for angle estimation", True,
                                       ("no_isac", "loc_only")),
    "f6": lambda t: _comparison_figure(t, "l_total", "crlb_angle",
                                       "CRLB for angle estimation", True,
                                       ("no_isac", "loc_only")),
    "f8c": lambda t: _comparison_figure(t, "snr_db", "mi_avg_bits",
                                        "mutual information (bits/symbol)", False,
                                        ("no_isac", "td_isac")),
    "f8l": lambda t: _comparison_figure(t, "snr_db", "crlb_angle",
                                        "CRLB for angle estimation", True,
                                        ("no_isac", "td_isac")),
    "f9c": lambda t: _comparison_figure(t, "t_slots", "mi_avg_bits",
                                        "mutual information (bits/symbol)", False,
                                        ("no_isac", "td_isac")),
    "f9l": lambda t: _comparison_figure(t, "t_slots", "crlb_angle",
                                        "CRLB for angle estimation", True,
                                        ("no_isac", "td_isac")),
    "f10c": lambda t: _comparison_figure(t, "l_total", "mi_avg_bits",
                                         "mutual information (bits/symbol)", False,
                                         ("no_isac", "td_isac")),
    "f10l": lambda t: _comparison_figure(t, "l_total", "crlb_angle",
                                         "CRLB for angle estimation", True,
                                         ("no_isac", "td_isac")),
    "f11": lambda t: _f11(t),
    "f12": lambda t: _frontier_figure(t, "snr_db", _snr_label),
    "f13": lambda t: _frontier_figure(t, "l_total", _elements_label),
}

FIGURE_IDS = tuple(sorted(RENDERERS))


def build_figure(spec: FigureSpec):
    """Load the inputs and build the matplotlib figure without saving."""
    tables = [load_table(p) for p in spec.inputs]
    return RENDERERS[spec.figure_id](tables)


def render(spec: FigureSpec) -> Path:
    """Render one figure to its output path.

    The inputs are validated before the output file is touched, so a schema
    mismatch or empty CSV never leaves a partial image behind.
    """
    fig = build_figure(spec)
    out = Path(spec.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    try:
        fig.savefig(out, dpi=150)
    finally:
        plt.close(fig)
    return out
