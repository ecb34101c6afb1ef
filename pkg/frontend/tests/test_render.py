"""Rendering behavior on synthetic schema-conformant CSVs."""

import itertools

import pytest

from noisac_plots import EmptyInputError, FigureSpec, SchemaError, build_figure, render
from noisac_plots.cli import main
from noisac_plots.render import REQUIRED_COLUMNS

STD_COLUMNS = tuple(f"{c}_std" for c in REQUIRED_COLUMNS[12:])
HEADER = REQUIRED_COLUMNS + STD_COLUMNS

DEFAULTS = {
    "seed": 1, "snr_db": 0.0, "n_t": 8, "l_y": 4, "l_z": 4, "m_y": 4, "m_z": 4,
    "t_slots": 2, "zeta": 0.5, "b": 2, "sigma_x2": 1.0, "system": "no_isac",
    "crlb_x": 2e-5, "crlb_gamma": 2e-6, "crlb_phi": 3e-6, "crlb_angle": 2.5e-6,
    "crlb_isac_db": -5.2, "mi_avg_bits": 7.8, "ce_iterations": 7, "objective": -4.3,
}


def write_csv(path, rows):
    lines = [",".join(HEADER)]
    for overrides in rows:
        row = dict(DEFAULTS, **overrides)
        for column in STD_COLUMNS:
            row.setdefault(column, 0.0)
        lines.append(",".join(str(row[c]) for c in HEADER))
    path.write_text("\n".join(lines) + "\n")
    return path


def grid_rows(param, values, systems, scale=1.0):
    rows = []
    for value, system in itertools.product(values, systems):
        extra = {param: value, "system": system}
        if param == "l_total":
            side = int(round(value ** 0.5))
            extra = {"l_y": side, "l_z": side, "system": system}
        # vary the metrics so every series has structure
        extra["crlb_angle"] = 2.5e-6 * scale / (1.0 + 0.1 * float(value))
        extra["crlb_x"] = 2e-5 * scale / (1.0 + 0.05 * float(value))
        extra["mi_avg_bits"] = 7.0 + 0.1 * float(value) * scale
        if system == "loc_only":
            extra["crlb_x"] = float("nan")
            extra["mi_avg_bits"] = float("nan")
        rows.append(extra)
    return rows


@pytest.fixture
def csvs(tmp_path):
    files = {
        "sigma": write_csv(tmp_path / "sigma.csv",
                           grid_rows("sigma_x2", (0.2, 0.6, 1.0), ("no_isac", "loc_only"))),
        "slots_loc": write_csv(tmp_path / "slots_loc.csv",
                               grid_rows("t_slots", (5, 10, 20), ("no_isac", "loc_only"))),
        "slots_td": write_csv(tmp_path / "slots_td.csv",
                              grid_rows("t_slots", (5, 10, 20), ("no_isac", "td_isac"))),
        "elements_loc": write_csv(tmp_path / "elements_loc.csv",
                                  grid_rows("l_total", (4, 16, 36), ("no_isac", "loc_only"))),
        "elements_td": write_csv(tmp_path / "elements_td.csv",
                                 grid_rows("l_total", (4, 16, 36), ("no_isac", "td_isac"))),
        "snr": write_csv(tmp_path / "snr.csv",
                         grid_rows("snr_db", (-5.0, 0.0, 5.0), ("no_isac", "td_isac"))),
        "zeta_rand": write_csv(tmp_path / "zeta_rand.csv",
                               grid_rows("zeta", (0.1, 0.5, 0.9),
                                         ("no_isac", "random_phase"))),
        "zeta_a": write_csv(tmp_path / "zeta_a.csv",
                            grid_rows("zeta", (0.1, 0.5, 0.9), ("no_isac",))),
        "zeta_b": write_csv(tmp_path / "zeta_b.csv",
                            grid_rows("zeta", (0.1, 0.5, 0.9), ("no_isac",), scale=2.0)),
    }
    return files


FIGURE_INPUTS = {
    "f4": ("sigma",),
    "f5": ("slots_loc",),
    "f6": ("elements_loc",),
    "f8c": ("snr",),
    "f8l": ("snr",),
    "f9c": ("slots_td",),
    "f9l": ("slots_td",),
    "f10c": ("elements_td",),
    "f10l": ("elements_td",),
    "f11": ("zeta_rand",),
    "f12": ("zeta_a", "zeta_b"),
    "f13": ("zeta_a", "zeta_b"),
}

LOG_AXIS_FIGURES = {"f4", "f5", "f6", "f8l", "f9l", "f10l", "f11", "f12", "f13"}


@pytest.mark.parametrize("figure_id", sorted(FIGURE_INPUTS))
def test_every_figure_renders(figure_id, csvs, tmp_path):
    spec = FigureSpec(figure_id=figure_id,
                      inputs=tuple(csvs[k] for k in FIGURE_INPUTS[figure_id]),
                      output=tmp_path / f"{figure_id}.png")
    out = render(spec)
    assert out.is_file()
    assert out.stat().st_size > 1000


@pytest.mark.parametrize("figure_id", sorted(LOG_AXIS_FIGURES))
def test_crlb_axes_are_log_scaled(figure_id, csvs, tmp_path):
    import matplotlib.pyplot as plt

    spec = FigureSpec(figure_id=figure_id,
                      inputs=tuple(csvs[k] for k in FIGURE_INPUTS[figure_id]),
                      output=tmp_path / "unused.png")
    fig = build_figure(spec)
    try:
        scales = [ax.get_yscale() for ax in fig.axes]
        assert "log" in scales
        if figure_id == "f11":
            assert scales[:2] == ["log", "log"]
    finally:
        plt.close(fig)


def test_linear_axis_for_rate_figures(csvs, tmp_path):
    import matplotlib.pyplot as plt

    spec = FigureSpec(figure_id="f8c", inputs=(csvs["snr"],),
                      output=tmp_path / "unused.png")
    fig = build_figure(spec)
    try:
        assert fig.axes[0].get_yscale() == "linear"
    finally:
        plt.close(fig)


def test_empty_csv_rejected_without_output(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text(",".join(HEADER) + "\n")
    out = tmp_path / "f5.png"
    spec = FigureSpec(figure_id="f5", inputs=(empty,), output=out)
    with pytest.raises(EmptyInputError):
        render(spec)
    assert not out.exists()


def test_schema_mismatch_lists_column_diff(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("seed,system,bounds\n1,no_isac,0.5\n")
    with pytest.raises(SchemaError, match="crlb_angle"):
        render(FigureSpec(figure_id="f5", inputs=(bad,), output=tmp_path / "x.png"))


def test_unknown_figure_id_rejected(tmp_path):
    with pytest.raises(ValueError, match="unknown figure id"):
        FigureSpec(figure_id="f99", inputs=(tmp_path / "a.csv",),
                   output=tmp_path / "x.png")


def test_cli_round_trip(csvs, tmp_path, capsys):
    out = tmp_path / "f6.png"
    code = main(["render", "--spec", "f6", "--in", str(csvs["elements_loc"]),
                 "--out", str(out)])
    assert code == 0
    assert out.is_file()

    bad = tmp_path / "headeronly.csv"
    bad.write_text(",".join(HEADER) + "\n")
    code = main(["render", "--spec", "f6", "--in", str(bad),
                 "--out", str(tmp_path / "nope.png")])
    assert code == 1
    assert "no data rows" in capsys.readouterr().err
    assert not (tmp_path / "nope.png").exists()
