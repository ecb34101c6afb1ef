"""Run configuration: schema, defaults, and scenario resolution.

A run is described by one flat JSON document.  Unknown keys are a hard
error so a typo in a sweep script cannot silently fall back to a default.
Node placement can be given as explicit positions (from which all link
angles are derived) or left at the built-in layout; link distances are
always taken from the scalar distance fields, which take precedence over
whatever the positions imply.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

from .arrays import UraShape
from .beamform import CeConfig
from .channel import SignalModel
from .errors import ConfigError
from .geometry import (
    LinkGeometry,
    PathLossModel,
    link_angles,
    link_from_angles,
    noise_power_for_snr,
    path_gain,
)

# Built-in layout: BS mast 10 m up, two sub-IRS panels 5 m up on a facade
# 30 m away, user on the floor where both panel ranges are exactly 10 m.
DEFAULT_POSITIONS = {
    "bs": (0.0, 0.0, 10.0),
    "irs": ((30.0, -5.0, 5.0), (30.0, 5.0, 5.0)),
    "user": (30.0 + math.sqrt(50.0), 0.0, 0.0),
}

_SCALAR_DEFAULTS = {
    "snr_db": 0.0,
    "n_t": 8,
    "l_y": 4,
    "l_z": 4,
    "m_y": 4,
    "m_z": 4,
    "p_t": 1.0,
    "t_slots": 2,
    "zeta": 0.5,
    "bits": 2,
    "sigma_x2": 1.0,
    "candidates": None,
    "elite_count": None,
    "threshold": 1e-3,
    "max_iterations": 200,
    "d_b2i": 30.0,
    "d_i2u": 10.0,
    "exponent_b2i": 2.3,
    "exponent_i2u": 2.2,
    "reference_loss_db": 30.0,
    "monte_carlo_draws": 100,
    "td_split": 0.2,
}

_ANGLE_KEYS = (
    "i2u_elevation",
    "i2u_azimuth",
    "b2i_elevation",
    "b2i_azimuth",
    "bs_departure_elevation",
)


@dataclass(frozen=True)
class RunConfig:
    """All scalar parameters of one simulated link plus node placement."""

    snr_db: float = 0.0
    n_t: int = 8
    l_y: int = 4
    l_z: int = 4
    m_y: int = 4
    m_z: int = 4
    p_t: float = 1.0
    t_slots: int = 2
    zeta: float = 0.5
    bits: int = 2
    sigma_x2: float = 1.0
    candidates: int | None = None
    elite_count: int | None = None
    threshold: float = 1e-3
    max_iterations: int = 200
    d_b2i: float = 30.0
    d_i2u: float = 10.0
    exponent_b2i: float = 2.3
    exponent_i2u: float = 2.2
    reference_loss_db: float = 30.0
    monte_carlo_draws: int = 100
    td_split: float = 0.2
    positions: dict = field(default_factory=lambda: _positions_dict(DEFAULT_POSITIONS))
    angles: dict | None = None

    def __post_init__(self):
        for name in ("n_t", "l_y", "l_z", "m_y", "m_z", "t_slots", "bits",
                     "monte_carlo_draws", "max_iterations"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ConfigError(f"{name} must be a positive integer, got {value!r}")
        if self.p_t <= 0.0:
            raise ConfigError("p_t must be positive")
        if not 0.0 <= self.zeta <= 1.0:
            raise ConfigError(f"zeta must lie in [0, 1], got {self.zeta}")
        if not 0.0 < self.sigma_x2 <= 1.0:
            raise ConfigError(f"sigma_x2 must lie in (0, 1], got {self.sigma_x2}")
        if self.threshold <= 0.0:
            raise ConfigError("threshold must be positive")
        if self.d_b2i < 1.0 or self.d_i2u < 1.0:
            raise ConfigError("link distances must be at least the 1 m reference")
        if not 0.0 <= self.td_split < 1.0:
            raise ConfigError(f"td_split must lie in [0, 1), got {self.td_split}")
        if self.candidates is not None and self.candidates < 1:
            raise ConfigError("candidates must be positive when given")
        if self.elite_count is not None and self.elite_count < 1:
            raise ConfigError("elite_count must be positive when given")
        _validate_positions(self.positions)
        if self.angles is not None:
            unknown = set(self.angles) - set(_ANGLE_KEYS)
            if unknown:
                raise ConfigError(f"unknown angle keys: {sorted(unknown)}")

    @property
    def l_total(self) -> int:
        return self.l_y * self.l_z

    @property
    def irs_shape(self) -> UraShape:
        return UraShape(self.l_y, self.l_z)

    @property
    def user_shape(self) -> UraShape:
        return UraShape(self.m_y, self.m_z)

    @property
    def mean_x(self) -> float:
        return math.sqrt(max(0.0, 1.0 - self.sigma_x2))

    def ce_config(self, seed: int) -> CeConfig:
        count = self.candidates if self.candidates is not None else 5 * self.l_total
        elite = self.elite_count if self.elite_count is not None else max(1, count // 10)
        return CeConfig(
            candidates_per_iter=count,
            elite_count=elite,
            threshold=self.threshold,
            max_iterations=self.max_iterations,
            seed=seed,
        )

    def path_loss(self) -> PathLossModel:
        return PathLossModel(
            reference_loss_db=self.reference_loss_db,
            exponent_b2i=self.exponent_b2i,
            exponent_i2u=self.exponent_i2u,
        )


def _positions_dict(raw) -> dict:
    return {
        "bs": tuple(float(v) for v in raw["bs"]),
        "irs": tuple(tuple(float(v) for v in p) for p in raw["irs"]),
        "user": tuple(float(v) for v in raw["user"]),
    }


def _validate_positions(positions: dict):
    unknown = set(positions) - {"bs", "irs", "user"}
    if unknown:
        raise ConfigError(f"unknown position keys: {sorted(unknown)}")
    for key in ("bs", "irs", "user"):
        if key not in positions:
            raise ConfigError(f"positions must include '{key}'")
    if len(positions["irs"]) != 2:
        raise ConfigError("positions['irs'] must list exactly two sub-IRS placements")
    for point in (positions["bs"], *positions["irs"], positions["user"]):
        if len(point) != 3 or not all(math.isfinite(float(v)) for v in point):
            raise ConfigError(f"positions must be finite 3-vectors, got {point}")


def config_from_dict(raw: dict) -> RunConfig:
    """Build and validate a RunConfig from parsed JSON; unknown keys are fatal."""
    if not isinstance(raw, dict):
        raise ConfigError("configuration root must be a JSON object")
    known = set(_SCALAR_DEFAULTS) | {"positions", "angles"}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown configuration keys: {sorted(unknown)}")
    kwargs = dict(raw)
    if "positions" in kwargs:
        try:
            kwargs["positions"] = _positions_dict(kwargs["positions"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed positions block: {exc}") from exc
    return RunConfig(**kwargs)


def load_config(path: str | Path | None) -> RunConfig:
    """Read a JSON config file, or return all defaults when path is None."""
    if path is None:
        return RunConfig()
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}")
    try:
        raw = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {p} is not valid JSON: {exc}") from exc
    return config_from_dict(raw)


@dataclass(frozen=True)
class Scenario:
    """A RunConfig resolved for one sub-IRS: angles, gains, and noise level."""

    link_i2u: LinkGeometry
    link_b2i: LinkGeometry
    bs_departure_elevation: float
    gain_i2u: complex
    gain_b2i: complex
    noise_var: float
    user_shape: UraShape
    irs_shape: UraShape
    n_t: int
    p_t: float


def resolve_scenario(
    config: RunConfig,
    sub_irs_index: int,
    *,
    gain_phase_b2i: float = 0.0,
    gain_phase_i2u: float = 0.0,
) -> Scenario:
    """Resolve angles and gains for the indexed sub-IRS.

    Angles come from the explicit ``angles`` block when present, otherwise
    from the configured positions.  Distances for the path-loss amplitudes
    always come from the scalar distance fields.  The complex gain phases are
    free parameters of the model (they provably do not move any reported
    bound) and are supplied by the caller, normally from a seeded draw.
    """
    if sub_irs_index not in (1, 2):
        raise ConfigError(f"sub-IRS index must be 1 or 2, got {sub_irs_index}")
    pos = config.positions
    irs = pos["irs"][sub_irs_index - 1]
    from_positions = {
        "i2u": link_angles(pos["user"], irs),
        "b2i": link_angles(irs, pos["bs"]),
        "bs_departure": link_angles(pos["bs"], irs).elevation,
    }
    angles = config.angles or {}

    def _link(tag: str, distance: float) -> LinkGeometry:
        base = from_positions[tag]
        return link_from_angles(
            angles.get(f"{tag}_elevation", base.elevation),
            angles.get(f"{tag}_azimuth", base.azimuth),
            distance,
        )

    model = config.path_loss()
    amp_b2i = path_gain(config.d_b2i, config.exponent_b2i, model)
    amp_i2u = path_gain(config.d_i2u, config.exponent_i2u, model)
    return Scenario(
        link_i2u=_link("i2u", config.d_i2u),
        link_b2i=_link("b2i", config.d_b2i),
        bs_departure_elevation=angles.get("bs_departure_elevation", from_positions["bs_departure"]),
        gain_i2u=amp_i2u * complex(math.cos(gain_phase_i2u), math.sin(gain_phase_i2u)),
        gain_b2i=amp_b2i * complex(math.cos(gain_phase_b2i), math.sin(gain_phase_b2i)),
        noise_var=noise_power_for_snr(config.snr_db, amp_b2i, amp_i2u),
        user_shape=config.user_shape,
        irs_shape=config.irs_shape,
        n_t=config.n_t,
        p_t=config.p_t,
    )


def signal_model(config: RunConfig, noise_var: float) -> SignalModel:
    return SignalModel(
        mean_x=complex(config.mean_x, 0.0),
        var_x=config.sigma_x2,
        slots=config.t_slots,
        noise_var=noise_var,
    )


def with_overrides(config: RunConfig, **kwargs) -> RunConfig:
    """Functional update helper used by parameter sweeps."""
    return replace(config, **kwargs)
