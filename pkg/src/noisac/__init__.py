"""CRLB performance simulator for an IRS-aided non-orthogonal ISAC link.

The package computes closed-form Fisher information for joint symbol and
arrival-angle estimation over a two-hop IRS cascade, optimizes the transmit
beamformer and the discrete IRS phases, and drives the comparison and
trade-off experiments behind the ``noisac`` command-line tool.
"""

from .arrays import UraShape, index_split, ula_response, ura_response
from .beamform import (
    BeamformResult,
    CeConfig,
    active_beam,
    ce_optimize,
    elite_update,
    exhaustive_search,
    sample_candidates,
    uniform_probabilities,
)
from .channel import (
    ChannelSet,
    DerivativeChannels,
    PhaseConfig,
    SignalModel,
    build_channels,
    derivative_channels,
    draw_symbols,
    mean_vector,
    phase_matrix,
    phase_vector,
)
from .config import RunConfig, Scenario, config_from_dict, load_config, resolve_scenario
from .errors import ConfigError, DegenerateGeometryError, SingularFimError
from .experiments import (
    BlockResult,
    ComparisonRow,
    SweepSpec,
    TradeoffPoint,
    compare_systems,
    run_block,
    stream,
    tradeoff_curve,
    triangulate,
)
from .fim import (
    BetaSet,
    CrlbReport,
    FisherMatrix,
    assemble_fim,
    compute_betas,
    invert_crlbs,
    localization_crlbs,
    localization_fim,
    mutual_information,
    td_isac_metrics,
    v_xi,
)
from .geometry import (
    LinkGeometry,
    PathLossModel,
    link_angles,
    link_from_angles,
    noise_power_for_snr,
    path_gain,
)

__version__ = "0.1.0"
