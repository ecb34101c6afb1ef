"""Command-line entry point: seeded runs in, CSV out.

Subcommands
-----------
crlb      one optimized block, metrics averaged over symbol draws
optimize  same run, plus the phase-search trace in a sibling _trace CSV
compare   paired rows for the joint, time-division, and pilot-only systems
sweep     one parameter swept over a grid, rows per (grid value, system)
verify    oracle checks of the analytic information matrix; exits nonzero
          on the first disagreement

All floating-point CSV values carry 17 significant digits so files
round-trip exactly; identical seeds give byte-identical files at any
--jobs setting.  Exit codes: 0 success, 2 configuration error, 3 numerical
failure, 4 verification failure.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from . import experiments, oracle
from .arrays import ula_response
from .beamform import active_beam
from .channel import build_channels, derivative_channels, phase_vector
from .config import RunConfig, load_config
from .errors import ConfigError, SingularFimError
from .experiments import (
    METRIC_FIELDS,
    SYSTEMS,
    apply_sweep_value,
    compare_systems,
    run_block,
    seed_samples,
    stream,
    summarize,
)
from .fim import assemble_fim, compute_betas, invert_crlbs, mutual_information, v_xi

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_VERIFY = 4

CONTEXT_COLUMNS = ("seed", "snr_db", "n_t", "l_y", "l_z", "m_y", "m_z",
                   "t_slots", "zeta", "b", "sigma_x2", "system")
STD_COLUMNS = tuple(f"{name}_std" for name in METRIC_FIELDS)
HEADER = CONTEXT_COLUMNS + METRIC_FIELDS + STD_COLUMNS


def _fmt(value) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.17g}"
    return str(value)


def write_csv(path: Path, rows: list[dict], header=HEADER):
    """Write rows atomically (temp file in place, then rename)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(_fmt(row[column]) for column in header) + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _context(config: RunConfig, seed: int, system: str) -> dict:
    return {
        "seed": seed,
        "snr_db": config.snr_db,
        "n_t": config.n_t,
        "l_y": config.l_y,
        "l_z": config.l_z,
        "m_y": config.m_y,
        "m_z": config.m_z,
        "t_slots": config.t_slots,
        "zeta": config.zeta,
        "b": config.bits,
        "sigma_x2": config.sigma_x2,
        "system": system,
    }


def _block_row(config: RunConfig, seed: int, block) -> dict:
    r = block.report
    row = _context(config, seed, "no_isac")
    row.update({
        "crlb_x": r.crlb_x,
        "crlb_gamma": r.crlb_gamma,
        "crlb_phi": r.crlb_phi,
        "crlb_angle": r.crlb_angle,
        "crlb_isac_db": r.crlb_isac_db,
        "mi_avg_bits": r.mi_avg,
        "ce_iterations": float(block.beam.iterations) if block.beam else 0.0,
        "objective": block.objective_value,
        "crlb_x_std": block.std["crlb_x"],
        "crlb_gamma_std": block.std["crlb_gamma"],
        "crlb_phi_std": block.std["crlb_phi"],
        "crlb_angle_std": block.std["crlb_angle"],
        "crlb_isac_db_std": block.std["crlb_isac_db"],
        "mi_avg_bits_std": block.std["mi_avg"],
        "ce_iterations_std": 0.0,
        "objective_std": 0.0,
    })
    return row


def _comparison_row(config: RunConfig, seed: int, summary) -> dict:
    row = _context(config, seed, summary.system)
    for name in METRIC_FIELDS:
        row[name] = getattr(summary, name)
        row[f"{name}_std"] = getattr(summary, f"{name}_std")
    return row


def _parallel_map(fn, tasks, jobs: int):
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks))


def _seed_task(task):
    config, parameter, value, seed, systems = task
    cfg = apply_sweep_value(config, parameter, value) if parameter is not None else config
    return seed_samples(cfg, seed, systems)


def _cmd_crlb(args) -> int:
    config = load_config(args.config)
    block = run_block(config, args.block, args.seed)
    write_csv(Path(args.out), [_block_row(config, args.seed, block)])
    return EXIT_OK


def _cmd_optimize(args) -> int:
    config = load_config(args.config)
    block = run_block(config, args.block, args.seed)
    out = Path(args.out)
    write_csv(out, [_block_row(config, args.seed, block)])
    trace_path = out.with_name(out.stem + "_trace" + (out.suffix or ".csv"))
    trace_rows = [{"iteration": i + 1, "best_objective": value}
                  for i, value in enumerate(block.beam.objective_trace)]
    write_csv(trace_path, trace_rows, header=("iteration", "best_objective"))
    print(f"best objective {block.beam.best_objective:.6f} after "
          f"{block.beam.iterations} iterations; trace in {trace_path}", file=sys.stderr)
    return EXIT_OK


def _cmd_compare(args) -> int:
    config = load_config(args.config)
    seeds = [args.seed + i for i in range(args.seeds)]
    if config.td_split > 0.0 and int(config.t_slots * config.td_split) < 1:
        raise ConfigError(
            f"t_slots={config.t_slots} cannot host the time-division split "
            f"{config.td_split}; use t_slots >= {math.ceil(1.0 / config.td_split)}"
        )
    tasks = [(config, None, None, seed, SYSTEMS) for seed in seeds]
    samples = _parallel_map(_seed_task, tasks, args.jobs)
    rows = [
        _comparison_row(config, args.seed, summarize(system, [s[system] for s in samples]))
        for system in SYSTEMS
    ]
    write_csv(Path(args.out), rows)
    return EXIT_OK


_SWEEP_PARAMS = ("zeta", "T", "L", "snr", "sigma_x2")


def _cmd_sweep(args) -> int:
    config = load_config(args.config)
    grid = []
    for token in args.grid.split(","):
        token = token.strip()
        if token:
            grid.append(float(token))
    spec = experiments.SweepSpec(parameter=args.param, grid=tuple(grid),
                                 monte_carlo_draws=config.monte_carlo_draws,
                                 seed=args.seed)
    seeds = [args.seed + i for i in range(args.seeds)]
    rows = []
    for value in spec.grid:
        cfg = apply_sweep_value(config, spec.parameter, value)
        systems = ["no_isac", "loc_only"]
        if cfg.td_split > 0.0 and int(cfg.t_slots * cfg.td_split) >= 1:
            systems.insert(1, "td_isac")
        if args.include_random:
            systems.append("random_phase")
        tasks = [(config, spec.parameter, value, seed, tuple(systems)) for seed in seeds]
        samples = _parallel_map(_seed_task, tasks, args.jobs)
        for system in systems:
            summary = summarize(system, [s[system] for s in samples])
            rows.append(_comparison_row(cfg, args.seed, summary))
    write_csv(Path(args.out), rows)
    return EXIT_OK


def _verify_checks(config: RunConfig, seed: int):
    """Yield (name, passed, detail) for every oracle and invariance check."""
    rng = stream(seed, 101)

    def build(scen):
        cs = build_channels(scen.link_i2u, scen.link_b2i, gain_i2u=scen.gain_i2u,
                            gain_b2i=scen.gain_b2i, user_shape=scen.user_shape,
                            irs_shape=scen.irs_shape, n_bs=scen.n_t,
                            bs_departure_elevation=scen.bs_departure_elevation)
        return cs, derivative_channels(cs)

    worst_fim = 0.0
    for _ in range(20):
        scen, phase, w, symbols = oracle.random_instance(rng, slots=int(rng.integers(1, 4)))
        cs, derivs = build(scen)
        betas = compute_betas(cs, derivs, phase_vector(phase), w, symbols)
        analytic = assemble_fim(betas, scen.noise_var).entries
        reference = oracle.fd_fim(scen, phase, w, symbols, scen.noise_var).entries
        scale = np.max(np.abs(reference))
        worst_fim = max(worst_fim, float(np.max(np.abs(analytic - reference)) / scale))
    yield ("information matrix vs central differences", worst_fim < 1e-5,
           f"max relative deviation {worst_fim:.3e}")

    worst_deriv = 0.0
    for _ in range(20):
        scen, _, _, _ = oracle.random_instance(rng)
        cs, derivs = build(scen)
        ref = oracle.fd_channel_derivatives(cs)
        for got, want in ((derivs.d_gamma, ref.d_gamma), (derivs.d_phi, ref.d_phi)):
            err = float(np.linalg.norm(got - want) / max(np.linalg.norm(want), 1e-30))
            worst_deriv = max(worst_deriv, err)
    yield ("channel derivatives vs central differences", worst_deriv < 1e-6,
           f"max relative Frobenius deviation {worst_deriv:.3e}")

    block = run_block(config, 1, seed, draws=3)
    scen = block.scenario
    xi = phase_vector(block.phase)
    symbols = np.ones(config.t_slots)

    betas = compute_betas(block.channels, block.derivatives, xi, block.w, symbols)
    base = invert_crlbs(assemble_fim(betas, scen.noise_var), config.zeta)
    scaled_w = math.sqrt(4.0) * block.w
    betas_scaled = compute_betas(block.channels, block.derivatives, xi, scaled_w, symbols)
    scaled = invert_crlbs(assemble_fim(betas_scaled, scen.noise_var), config.zeta)
    ratio = np.concatenate([scaled.crlb_per_symbol / base.crlb_per_symbol,
                            [scaled.crlb_gamma / base.crlb_gamma,
                             scaled.crlb_phi / base.crlb_phi]])
    err = float(np.max(np.abs(ratio * 4.0 - 1.0)))
    yield ("transmit power scaling of every bound", err < 1e-12,
           f"max deviation from exact 1/c scaling {err:.3e}")

    rotated = build_channels(
        scen.link_i2u, scen.link_b2i,
        gain_i2u=scen.gain_i2u * complex(math.cos(1.234), math.sin(1.234)),
        gain_b2i=scen.gain_b2i * complex(math.cos(-0.777), math.sin(-0.777)),
        user_shape=scen.user_shape, irs_shape=scen.irs_shape, n_bs=scen.n_t,
        bs_departure_elevation=scen.bs_departure_elevation)
    betas_rot = compute_betas(rotated, derivative_channels(rotated), xi, block.w, symbols)
    j_rot = assemble_fim(betas_rot, scen.noise_var).entries
    j_base = assemble_fim(betas, scen.noise_var).entries
    err = float(np.max(np.abs(j_rot - j_base)) / np.max(np.abs(j_base)))
    yield ("gain-phase invariance of the information matrix", err < 1e-12,
           f"max entry deviation {err:.3e}")

    worst = 0.0
    for convention in range(3):
        shift = np.exp(1j * convention * 0.7 * np.arange(config.n_t))
        response = ula_response(scen.bs_departure_elevation, config.n_t) * shift
        w = math.sqrt(config.p_t / config.n_t) * response
        gain = abs(np.vdot(response, w)) ** 2
        worst = max(worst, abs(gain - config.p_t * config.n_t) / (config.p_t * config.n_t))
    yield ("matched beamformer gain for any steering convention", worst < 1e-12,
           f"max |a^H w|^2 deviation {worst:.3e}")

    fim_obj = assemble_fim(betas, scen.noise_var)
    lhs = base.crlb_isac_db
    rhs = v_xi(fim_obj, block.w, config.zeta, block.bs_response) \
        - 2.0 * math.log10(abs(np.vdot(block.bs_response, block.w)))
    yield ("weighted metric identity", abs(lhs - rhs) < 1e-10,
           f"|lhs - rhs| = {abs(lhs - rhs):.3e}")

    report = mutual_information(base, config.sigma_x2)
    recomputed = 0.5 * np.log2(config.sigma_x2 / report.crlb_per_symbol)
    err = float(np.max(np.abs(recomputed - report.mi_per_slot)))
    yield ("mutual information identity", err < 1e-12, f"max deviation {err:.3e}")


def _cmd_verify(args) -> int:
    config = load_config(args.config)
    failures = 0
    for name, passed, detail in _verify_checks(config, args.seed):
        tag = "ok" if passed else "FAIL"
        print(f"{tag:4s} {name}: {detail}", file=sys.stderr)
        if not passed:
            failures += 1
    return EXIT_OK if failures == 0 else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="noisac",
        description="CRLB simulator and beamforming optimizer for an IRS-aided "
                    "non-orthogonal ISAC link",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    default_jobs = int(os.environ.get("NOISAC_JOBS", "1"))

    def common(p, out=True):
        p.add_argument("--config", default=None, help="JSON config path (defaults used when omitted)")
        p.add_argument("--seed", type=int, required=True, help="base seed; runs are deterministic in it")
        p.add_argument("--jobs", type=int, default=default_jobs,
                       help="worker processes (results identical at any value; "
                            "NOISAC_JOBS overrides the default)")
        if out:
            p.add_argument("--out", required=True, help="output CSV path")

    p = sub.add_parser("crlb", help="one optimized block, averaged over symbol draws")
    common(p)
    p.add_argument("--block", type=int, default=1, choices=(1, 2), help="sub-IRS index")
    p.set_defaults(fn=_cmd_crlb)

    p = sub.add_parser("optimize", help="phase search with objective trace")
    common(p)
    p.add_argument("--block", type=int, default=1, choices=(1, 2))
    p.set_defaults(fn=_cmd_optimize)

    p = sub.add_parser("compare", help="joint vs time-division vs pilot-only rows")
    common(p)
    p.add_argument("--seeds", type=int, default=20, help="number of consecutive seeds to average")
    p.set_defaults(fn=_cmd_compare)

    p = sub.add_parser("sweep", help="sweep one parameter over a grid")
    common(p)
    p.add_argument("--param", required=True, choices=_SWEEP_PARAMS)
    p.add_argument("--grid", required=True, help="comma-separated grid values")
    p.add_argument("--seeds", type=int, default=20)
    p.add_argument("--include-random", action="store_true",
                   help="add random-phase baseline rows")
    p.set_defaults(fn=_cmd_sweep)

    p = sub.add_parser("verify", help="oracle checks; exit 4 on any failure")
    common(p, out=False)
    p.set_defaults(fn=_cmd_verify)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SingularFimError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
