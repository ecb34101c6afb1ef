"""Fisher information of joint symbol and arrival-angle estimation.

The unknowns of one time block are the T complex symbols followed by the
elevation and azimuth of the IRS-to-user arrival, stacked into a (T+2)
parameter vector.  With white complex Gaussian noise the information matrix
has a closed block form driven by three receive-side vectors per slot:

    beta_x      = h_i2u Theta h_b2i w          (symbol direction)
    beta_gamma,t = d_gamma Theta h_b2i w x(t)   (elevation sensitivity)
    beta_phi,t   = d_phi   Theta h_b2i w x(t)   (azimuth sensitivity)

All reported bounds are conditional on the symbol realization; averaging
over draws is the experiment driver's job.
"""

from __future__ import annotations

import math
from collections import namedtuple
from dataclasses import dataclass, replace

import numpy as np

from .channel import ChannelSet, DerivativeChannels, SignalModel, _reflection
from .errors import ConfigError, SingularFimError

COND_LIMIT = 1e12


@dataclass(frozen=True)
class BetaSet:
    """Receive-side sensitivity vectors: beta_x (M,), the others (T, M)."""

    beta_x: np.ndarray
    beta_gamma: np.ndarray
    beta_phi: np.ndarray

    @property
    def slots(self) -> int:
        return self.beta_gamma.shape[0]


@dataclass(frozen=True)
class FisherMatrix:
    """Real symmetric information matrix over the stacked parameters."""

    entries: np.ndarray

    @property
    def slots(self) -> int:
        return self.entries.shape[0] - 2


@dataclass(frozen=True)
class CrlbReport:
    """Diagonal CRLBs of one block plus the derived scalar metrics.

    crlb_isac_db is the weighted log metric
    zeta*lg(crlb_x) + (1-zeta)*lg(crlb_angle).  Mutual-information fields are
    filled by :func:`mutual_information`; mi_degraded flags slots whose symbol
    bound exceeds the prior variance (estimation worse than the prior).
    """

    crlb_per_symbol: np.ndarray
    crlb_x: float
    crlb_gamma: float
    crlb_phi: float
    crlb_angle: float
    crlb_isac_db: float
    mi_per_slot: np.ndarray | None = None
    mi_avg: float | None = None
    mi_degraded: bool = False


def compute_betas(cs: ChannelSet, derivs: DerivativeChannels, theta, w, symbols) -> BetaSet:
    """Evaluate the three sensitivity vectors for one phase configuration."""
    xi = _reflection(theta)
    w = np.asarray(w)
    symbols = np.atleast_1d(np.asarray(symbols, dtype=complex))
    if symbols.ndim != 1 or symbols.size < 1:
        raise ValueError("symbols must be a non-empty 1-D sequence")
    q = xi * (cs.h_b2i @ w)
    beta_x = cs.h_i2u @ q
    base_gamma = derivs.d_gamma @ q
    base_phi = derivs.d_phi @ q
    return BetaSet(
        beta_x=beta_x,
        beta_gamma=symbols[:, None] * base_gamma[None, :],
        beta_phi=symbols[:, None] * base_phi[None, :],
    )


def assemble_fim(betas: BetaSet, noise_var: float) -> FisherMatrix:
    """Assemble the (T+2)x(T+2) information matrix from the sensitivity vectors."""
    if noise_var <= 0.0:
        raise ValueError("noise variance must be positive")
    t = betas.slots
    scale = 2.0 / noise_var
    j = np.zeros((t + 2, t + 2))

    j[np.arange(t), np.arange(t)] = scale * float(np.vdot(betas.beta_x, betas.beta_x).real)

    couple_gamma = scale * (betas.beta_gamma @ betas.beta_x.conj()).real
    couple_phi = scale * (betas.beta_phi @ betas.beta_x.conj()).real
    j[:t, t] = couple_gamma
    j[t, :t] = couple_gamma
    j[:t, t + 1] = couple_phi
    j[t + 1, :t] = couple_phi

    gg = scale * float(np.sum(np.abs(betas.beta_gamma) ** 2))
    pp = scale * float(np.sum(np.abs(betas.beta_phi) ** 2))
    gp = scale * float(np.sum(betas.beta_gamma.conj() * betas.beta_phi).real)
    j[t, t] = gg
    j[t + 1, t + 1] = pp
    j[t, t + 1] = gp
    j[t + 1, t] = gp
    return FisherMatrix(entries=j)


def _psd_inverse(entries: np.ndarray, context: str) -> np.ndarray:
    """Invert a symmetric PSD matrix through its eigendecomposition.

    Refuses matrices whose condition number exceeds COND_LIMIT or that have a
    non-positive eigenvalue, describing the degenerate block in the error.
    """
    if not np.allclose(entries, entries.T, rtol=1e-10, atol=0.0):
        raise ValueError(f"{context}: matrix is not symmetric")
    eigval, eigvec = np.linalg.eigh(entries)
    top = float(eigval[-1])
    bottom = float(eigval[0])
    if top <= 0.0 or bottom <= 0.0 or top / bottom > COND_LIMIT:
        raise SingularFimError(f"{context}: {_degeneracy_detail(entries, bottom, top)}")
    return (eigvec / eigval) @ eigvec.T


def _degeneracy_detail(entries: np.ndarray, bottom: float, top: float) -> str:
    n = entries.shape[0]
    if n >= 4:
        angle_block = entries[-2:, -2:]
        if np.all(np.abs(angle_block) < 1e-30 * max(1.0, top)):
            return "angle information block is zero (no angle sensitivity)"
        symbol_power = float(entries[0, 0])
        if symbol_power <= 0.0:
            return "symbol information block is zero (no received signal power)"
    return f"eigenvalue range [{bottom:.3e}, {top:.3e}] exceeds the conditioning limit"


def invert_crlbs(fim: FisherMatrix, zeta: float) -> CrlbReport:
    """Diagonal CRLBs and the weighted log metric for one block."""
    if not 0.0 <= zeta <= 1.0:
        raise ValueError(f"weight must lie in [0, 1], got {zeta}")
    t = fim.slots
    if t < 1:
        raise ValueError("information matrix must cover at least one symbol slot")
    inv = _psd_inverse(fim.entries, "joint symbol/angle matrix")
    diag = np.diag(inv).copy()
    crlb_per_symbol = diag[:t]
    crlb_x = float(np.mean(crlb_per_symbol))
    crlb_gamma = float(diag[t])
    crlb_phi = float(diag[t + 1])
    crlb_angle = 0.5 * (crlb_gamma + crlb_phi)
    return CrlbReport(
        crlb_per_symbol=crlb_per_symbol,
        crlb_x=crlb_x,
        crlb_gamma=crlb_gamma,
        crlb_phi=crlb_phi,
        crlb_angle=crlb_angle,
        crlb_isac_db=zeta * math.log10(crlb_x) + (1.0 - zeta) * math.log10(crlb_angle),
    )


def mutual_information(report: CrlbReport, var_x: float) -> CrlbReport:
    """Per-slot mutual information 0.5*log2(var_x / CRLB(x(t))) in bits.

    Negative values (bound looser than the prior) are kept and flagged via
    ``mi_degraded`` rather than clipped.
    """
    if var_x <= 0.0:
        raise ValueError("symbol variance must be positive for mutual information")
    mi = 0.5 * np.log2(var_x / report.crlb_per_symbol)
    return replace(
        report,
        mi_per_slot=mi,
        mi_avg=float(np.mean(mi)),
        mi_degraded=bool(np.any(mi < 0.0)),
    )


def localization_fim(cs, derivs, theta, w, pilots, noise_var: float) -> FisherMatrix:
    """2x2 angle information when the transmitted symbols are known pilots.

    Equals the angle block of the joint matrix with the symbol rows removed,
    since known symbols contribute no unknowns.
    """
    pilots = np.atleast_1d(np.asarray(pilots, dtype=complex))
    if pilots.size < 1:
        raise ValueError("at least one pilot slot is required")
    betas = compute_betas(cs, derivs, theta, w, pilots)
    scale = 2.0 / noise_var
    gg = scale * float(np.sum(np.abs(betas.beta_gamma) ** 2))
    pp = scale * float(np.sum(np.abs(betas.beta_phi) ** 2))
    gp = scale * float(np.sum(betas.beta_gamma.conj() * betas.beta_phi).real)
    return FisherMatrix(entries=np.array([[gg, gp], [gp, pp]]))


def localization_crlbs(fim: FisherMatrix) -> tuple[float, float, float]:
    """(elevation, azimuth, mean) CRLBs from a 2x2 angle information matrix."""
    inv = _psd_inverse(fim.entries, "angle-only matrix")
    crlb_gamma = float(inv[0, 0])
    crlb_phi = float(inv[1, 1])
    return crlb_gamma, crlb_phi, 0.5 * (crlb_gamma + crlb_phi)


def v_xi(fim: FisherMatrix, w, zeta: float, bs_response) -> float:
    """Beamformer-independent part of the weighted log metric.

    Normalizing the information matrix by the matched-beamformer power
    |a^H w|^2 removes the active beamformer from the objective, leaving a
    function of the phase configuration alone; the identity

        crlb_isac_db = v_xi - 2*lg|a^H w|

    ties it back to :func:`invert_crlbs`.
    """
    gain = abs(np.vdot(np.asarray(bs_response), np.asarray(w)))
    if gain <= 0.0:
        raise ValueError("beamformer is orthogonal to the BS response")
    t = fim.slots
    inv = _psd_inverse(fim.entries, "joint symbol/angle matrix")
    diag = np.diag(inv) * gain**2
    comm = float(np.sum(diag[:t])) / t
    angle = float(np.sum(diag[t:])) / 2.0
    return zeta * math.log10(comm) + (1.0 - zeta) * math.log10(angle)


TdIsacMetrics = namedtuple("TdIsacMetrics", ["mi_avg", "crlb_angle", "pilot_slots", "flagged"])


def td_isac_metrics(cs, derivs, theta, w, signal: SignalModel, split: float = 0.2) -> TdIsacMetrics:
    """Time-division baseline: pilots first, data in the remaining slots.

    The first floor(T*split) slots carry unit pilots used only for angle
    estimation; the rest carry data decoded with the angles treated as known,
    so the per-slot symbol bound is noise_var / (2*||beta_x||^2).  The average
    mutual information keeps the full block length T in its denominator.
    ``flagged`` reports a slot count that did not divide evenly.
    """
    t = signal.slots
    if split < 0.0 or split >= 1.0:
        raise ValueError(f"pilot split must lie in [0, 1), got {split}")
    n_pilot = int(math.floor(t * split))
    flagged = abs(t * split - n_pilot) > 1e-12
    if split > 0.0 and n_pilot < 1:
        raise ConfigError(f"block of {t} slots is too short for a pilot split of {split}")

    betas = compute_betas(cs, derivs, theta, w, np.ones(max(n_pilot, 1)))
    if n_pilot >= 1:
        loc = localization_fim(cs, derivs, theta, w, np.ones(n_pilot), signal.noise_var)
        _, _, crlb_angle = localization_crlbs(loc)
    else:
        crlb_angle = math.inf

    power = float(np.vdot(betas.beta_x, betas.beta_x).real)
    if power <= 0.0:
        raise SingularFimError("time-division data slots: received signal power is zero")
    crlb_data = signal.noise_var / (2.0 * power)
    mi_slot = 0.5 * math.log2(signal.var_x / crlb_data)
    mi_avg = (t - n_pilot) * mi_slot / t
    return TdIsacMetrics(mi_avg=mi_avg, crlb_angle=crlb_angle, pilot_slots=n_pilot, flagged=flagged)
