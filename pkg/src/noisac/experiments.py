"""Scenario drivers: per-block runs, system comparisons, sweeps, trade-offs.

Every stochastic quantity is drawn from a named substream of one base seed
(gain phases, the phase search, each Monte-Carlo symbol draw), so a run is
a pure function of (config, seed) and results are reproducible bit for bit
regardless of execution order or parallelism.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .arrays import ula_response
from .beamform import BeamformResult, active_beam, aligned_phase, ce_optimize
from .channel import (
    ChannelSet,
    DerivativeChannels,
    PhaseConfig,
    SignalModel,
    build_channels,
    derivative_channels,
    draw_symbols,
    phase_vector,
)
from .config import RunConfig, Scenario, resolve_scenario, signal_model, with_overrides
from .errors import ConfigError, DegenerateGeometryError
from .fim import (
    CrlbReport,
    assemble_fim,
    compute_betas,
    invert_crlbs,
    localization_crlbs,
    localization_fim,
    mutual_information,
    td_isac_metrics,
    v_xi,
)
from .geometry import LinkGeometry

# Substream tags; appending them to the base seed keeps the draws of one run
# independent without consuming a shared generator in a fragile order.
TAG_GAINS = 0
TAG_CE = 1
TAG_SYMBOLS = 2
TAG_RANDOM_PHASE = 3

SYSTEMS = ("no_isac", "td_isac", "loc_only")

METRIC_FIELDS = (
    "crlb_x",
    "crlb_gamma",
    "crlb_phi",
    "crlb_angle",
    "crlb_isac_db",
    "mi_avg_bits",
    "ce_iterations",
    "objective",
)


def stream(seed: int, *tags: int) -> np.random.Generator:
    """Independent generator for one named substream of a base seed."""
    return np.random.default_rng(np.random.SeedSequence([int(seed) & (2**63 - 1), *tags]))


@dataclass(frozen=True)
class SweepSpec:
    """One swept parameter, its grid, and the averaging budget."""

    parameter: str
    grid: tuple
    monte_carlo_draws: int = 100
    seed: int = 1

    def __post_init__(self):
        if self.parameter not in ("zeta", "T", "L", "snr", "sigma_x2"):
            raise ConfigError(f"unknown sweep parameter {self.parameter!r}")
        values = tuple(float(v) for v in self.grid)
        if not values:
            raise ConfigError("sweep grid must be non-empty")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ConfigError("sweep grid must be strictly increasing")
        if self.monte_carlo_draws < 1:
            raise ConfigError("monte_carlo_draws must be at least 1")
        object.__setattr__(self, "grid", values)


def apply_sweep_value(config: RunConfig, parameter: str, value: float) -> RunConfig:
    """Config with one swept parameter replaced; L maps to a square panel."""
    if parameter == "zeta":
        return with_overrides(config, zeta=float(value))
    if parameter == "T":
        return with_overrides(config, t_slots=int(round(value)))
    if parameter == "snr":
        return with_overrides(config, snr_db=float(value))
    if parameter == "sigma_x2":
        return with_overrides(config, sigma_x2=float(value))
    if parameter == "L":
        total = int(round(value))
        side = int(round(math.sqrt(total)))
        if side * side != total:
            raise ConfigError(f"element count {total} is not a square panel")
        return with_overrides(config, l_y=side, l_z=side)
    raise ConfigError(f"unknown sweep parameter {parameter!r}")


@dataclass
class BlockResult:
    """One optimized time block: averaged report plus everything reusable."""

    report: CrlbReport
    std: dict
    beam: BeamformResult | None
    phase: PhaseConfig
    objective_value: float
    channels: ChannelSet
    derivatives: DerivativeChannels
    w: np.ndarray
    bs_response: np.ndarray
    scenario: Scenario
    signal: SignalModel
    per_draw: list = field(default_factory=list)


def make_objective(cs, derivs, w, bs_response, zeta, noise_var, slots):
    """Phase-search objective: the beamformer-free weighted log metric.

    Evaluated on deterministic unit pilots so the search is a pure function
    of the channel; the Monte-Carlo symbol draws only enter the reported
    metrics afterwards.
    """
    pilots = np.ones(slots)

    def objective(phase: PhaseConfig) -> float:
        betas = compute_betas(cs, derivs, phase_vector(phase), w, pilots)
        fim = assemble_fim(betas, noise_var)
        return v_xi(fim, w, zeta, bs_response)

    return objective


def _mean_std(values: np.ndarray) -> tuple[float, float]:
    return float(np.mean(values)), float(np.std(values))


def average_reports(reports: list[CrlbReport]) -> tuple[CrlbReport, dict]:
    """Elementwise mean over symbol draws, plus a std dict for the scalars."""
    scalars = {}
    std = {}
    for name in ("crlb_x", "crlb_gamma", "crlb_phi", "crlb_angle", "crlb_isac_db", "mi_avg"):
        vals = np.array([getattr(r, name) for r in reports])
        scalars[name], std[name] = _mean_std(vals)
    mean = CrlbReport(
        crlb_per_symbol=np.mean([r.crlb_per_symbol for r in reports], axis=0),
        crlb_x=scalars["crlb_x"],
        crlb_gamma=scalars["crlb_gamma"],
        crlb_phi=scalars["crlb_phi"],
        crlb_angle=scalars["crlb_angle"],
        crlb_isac_db=scalars["crlb_isac_db"],
        mi_per_slot=np.mean([r.mi_per_slot for r in reports], axis=0),
        mi_avg=scalars["mi_avg"],
        mi_degraded=any(r.mi_degraded for r in reports),
    )
    return mean, std


def run_block(
    config: RunConfig,
    sub_irs_index: int,
    seed: int,
    *,
    phase_source="ce",
    draws: int | None = None,
) -> BlockResult:
    """Simulate one time block through the indexed sub-IRS.

    Builds the channels, designs the beamformer, picks the IRS phases
    (cross-entropy search by default, ``"random"`` for the baseline,
    ``"aligned"`` for the quantized matched profile, or a fixed
    PhaseConfig), then averages the conditional bounds over ``draws``
    independent symbol realizations.
    """
    rng_gains = stream(seed, TAG_GAINS)
    phase_b2i, phase_i2u = rng_gains.uniform(0.0, 2.0 * math.pi, 2)
    scen = resolve_scenario(config, sub_irs_index,
                            gain_phase_b2i=phase_b2i, gain_phase_i2u=phase_i2u)
    cs = build_channels(
        scen.link_i2u,
        scen.link_b2i,
        gain_i2u=scen.gain_i2u,
        gain_b2i=scen.gain_b2i,
        user_shape=scen.user_shape,
        irs_shape=scen.irs_shape,
        n_bs=scen.n_t,
        bs_departure_elevation=scen.bs_departure_elevation,
    )
    derivs = derivative_channels(cs)
    w = active_beam(scen.bs_departure_elevation, scen.n_t, scen.p_t)
    bs_response = ula_response(scen.bs_departure_elevation, scen.n_t)
    signal = signal_model(config, scen.noise_var)
    objective = make_objective(cs, derivs, w, bs_response, config.zeta,
                               scen.noise_var, config.t_slots)

    beam = None
    if isinstance(phase_source, PhaseConfig):
        phase = phase_source
    elif phase_source == "ce":
        beam = ce_optimize(objective, config.l_total, config.bits,
                           config.ce_config(seed), w=w)
        phase = beam.best_phase
    elif phase_source == "random":
        rng = stream(seed, TAG_RANDOM_PHASE)
        phase = PhaseConfig(indices=rng.integers(0, 2**config.bits, config.l_total),
                            bits=config.bits)
    elif phase_source == "aligned":
        phase = aligned_phase(cs, w, config.bits)
    else:
        raise ValueError(f"unknown phase source {phase_source!r}")
    objective_value = beam.best_objective if beam is not None else objective(phase)

    xi = phase_vector(phase)
    n_draws = config.monte_carlo_draws if draws is None else draws
    reports = []
    for d in range(n_draws):
        x = draw_symbols(signal, stream(seed, TAG_SYMBOLS, d))
        betas = compute_betas(cs, derivs, xi, w, x)
        fim = assemble_fim(betas, scen.noise_var)
        reports.append(mutual_information(invert_crlbs(fim, config.zeta), signal.var_x))
    mean, std = average_reports(reports)

    return BlockResult(
        report=mean,
        std=std,
        beam=beam,
        phase=phase,
        objective_value=objective_value,
        channels=cs,
        derivatives=derivs,
        w=w,
        bs_response=bs_response,
        scenario=scen,
        signal=signal,
        per_draw=reports,
    )


@dataclass(frozen=True)
class ComparisonRow:
    """Aggregated metrics of one system over seeds (means plus stds)."""

    system: str
    crlb_x: float
    crlb_gamma: float
    crlb_phi: float
    crlb_angle: float
    crlb_isac_db: float
    mi_avg_bits: float
    ce_iterations: float
    objective: float
    crlb_x_std: float = 0.0
    crlb_gamma_std: float = 0.0
    crlb_phi_std: float = 0.0
    crlb_angle_std: float = 0.0
    crlb_isac_db_std: float = 0.0
    mi_avg_bits_std: float = 0.0
    ce_iterations_std: float = 0.0
    objective_std: float = 0.0

    def __post_init__(self):
        for name in METRIC_FIELDS:
            spread = getattr(self, name + "_std")
            if not math.isnan(spread) and spread < 0.0:
                raise ValueError(f"{name}_std must be non-negative")


def seed_samples(config: RunConfig, seed: int, systems=SYSTEMS, phase_source="ce") -> dict:
    """Per-seed metric samples for each requested system, sharing one channel.

    The channel realization, beamformer, and phase configuration are computed
    once per seed and reused by every system so the comparison is paired.
    """
    block = run_block(config, 1, seed, phase_source=phase_source)
    iters = float(block.beam.iterations) if block.beam is not None else 0.0
    base = {"ce_iterations": iters, "objective": block.objective_value}
    out = {}
    for system in systems:
        if system == "no_isac":
            r = block.report
            out[system] = dict(base, crlb_x=r.crlb_x, crlb_gamma=r.crlb_gamma,
                               crlb_phi=r.crlb_phi, crlb_angle=r.crlb_angle,
                               crlb_isac_db=r.crlb_isac_db, mi_avg_bits=r.mi_avg)
        elif system == "td_isac":
            td = td_isac_metrics(block.channels, block.derivatives, block.phase,
                                 block.w, block.signal, config.td_split)
            pilots = np.ones(max(td.pilot_slots, 1))
            loc = localization_fim(block.channels, block.derivatives, block.phase,
                                   block.w, pilots, block.signal.noise_var)
            gamma, phi, _ = localization_crlbs(loc)
            betas = compute_betas(block.channels, block.derivatives, block.phase,
                                  block.w, pilots)
            crlb_x = block.signal.noise_var / (2.0 * float(np.vdot(betas.beta_x, betas.beta_x).real))
            isac_db = config.zeta * math.log10(crlb_x) \
                + (1.0 - config.zeta) * math.log10(td.crlb_angle)
            out[system] = dict(base, crlb_x=crlb_x, crlb_gamma=gamma, crlb_phi=phi,
                               crlb_angle=td.crlb_angle, crlb_isac_db=isac_db,
                               mi_avg_bits=td.mi_avg)
        elif system == "loc_only":
            loc = localization_fim(block.channels, block.derivatives, block.phase,
                                   block.w, np.ones(config.t_slots), block.signal.noise_var)
            gamma, phi, angle = localization_crlbs(loc)
            out[system] = dict(base, crlb_x=math.nan, crlb_gamma=gamma, crlb_phi=phi,
                               crlb_angle=angle, crlb_isac_db=math.nan,
                               mi_avg_bits=math.nan)
        elif system == "random_phase":
            rand = run_block(config, 1, seed, phase_source="random")
            r = rand.report
            out[system] = dict(crlb_x=r.crlb_x, crlb_gamma=r.crlb_gamma,
                               crlb_phi=r.crlb_phi, crlb_angle=r.crlb_angle,
                               crlb_isac_db=r.crlb_isac_db, mi_avg_bits=r.mi_avg,
                               ce_iterations=0.0, objective=rand.objective_value)
        else:
            raise ConfigError(f"unknown system {system!r}")
    return out


def summarize(system: str, samples: list[dict]) -> ComparisonRow:
    """Mean and std over per-seed samples for one system."""
    kwargs = {"system": system}
    for name in METRIC_FIELDS:
        vals = np.array([s[name] for s in samples])
        kwargs[name] = float(np.mean(vals))
        kwargs[name + "_std"] = float(np.std(vals))
    return ComparisonRow(**kwargs)


def compare_systems(config: RunConfig, seeds, systems=SYSTEMS) -> list[ComparisonRow]:
    """Paired comparison of the requested systems over the given seeds."""
    if "td_isac" in systems and config.td_split > 0.0 \
            and int(config.t_slots * config.td_split) < 1:
        raise ConfigError(
            f"t_slots={config.t_slots} is too short for the time-division split "
            f"{config.td_split}; drop the td_isac row or raise t_slots"
        )
    samples = [seed_samples(config, s, systems) for s in seeds]
    return [summarize(system, [s[system] for s in samples]) for system in systems]


@dataclass(frozen=True)
class TradeoffPoint:
    zeta: float
    mi_avg: float
    mi_std: float
    crlb_angle: float
    crlb_angle_std: float


def tradeoff_curve(config: RunConfig, zeta_grid, seeds) -> list[TradeoffPoint]:
    """One optimized (mutual information, angle CRLB) point per weight."""
    points = []
    for zeta in zeta_grid:
        if not 0.0 < float(zeta) < 1.0:
            raise ConfigError(f"trade-off weights must lie strictly in (0, 1), got {zeta}")
        cfg = with_overrides(config, zeta=float(zeta))
        mi = []
        angle = []
        for seed in seeds:
            block = run_block(cfg, 1, seed)
            mi.append(block.report.mi_avg)
            angle.append(block.report.crlb_angle)
        mi_mean, mi_std = _mean_std(np.array(mi))
        a_mean, a_std = _mean_std(np.array(angle))
        points.append(TradeoffPoint(zeta=float(zeta), mi_avg=mi_mean, mi_std=mi_std,
                                    crlb_angle=a_mean, crlb_angle_std=a_std))
    return points


def _ray_direction(aoa: LinkGeometry) -> np.ndarray:
    """IRS-to-user unit direction implied by a user-side arrival pair.

    The arrival angles fix the y and z direction cosines of the user-to-IRS
    line; reversing it and resolving the x sign toward the user half-space
    (+x, away from the array plane) gives the departure ray.
    """
    dy = math.cos(aoa.elevation) * math.sin(aoa.azimuth)
    dz = math.sin(aoa.elevation)
    rest = 1.0 - dy * dy - dz * dz
    return np.array([math.sqrt(max(0.0, rest)), -dy, -dz])


def triangulate(aoa_1: LinkGeometry, pos_irs_1, aoa_2: LinkGeometry, pos_irs_2) -> np.ndarray:
    """Least-squares user position from two sub-IRS arrival-angle pairs.

    Minimizes the summed squared distance to the two departure rays.
    Parallel rays leave the normal matrix rank deficient and are rejected.
    """
    r1 = _ray_direction(aoa_1)
    r2 = _ray_direction(aoa_2)
    if abs(abs(float(r1 @ r2)) - 1.0) < 1e-12:
        raise DegenerateGeometryError("triangulation rays are parallel")
    a = np.zeros((3, 3))
    b = np.zeros(3)
    for r, p in ((r1, np.asarray(pos_irs_1, dtype=float)),
                 (r2, np.asarray(pos_irs_2, dtype=float))):
        proj = np.eye(3) - np.outer(r, r)
        a += proj
        b += proj @ p
    return np.linalg.solve(a, b)
