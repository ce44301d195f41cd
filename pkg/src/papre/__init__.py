"""Power-amplifier-aware linear precoder design for massive MIMO downlinks."""

from .channel import (
    ChannelMatrix,
    TargetSpec,
    as_channel_array,
    db_to_linear,
    evaluate_sinr,
    gen_los,
    gen_nlos,
    trial_rng,
)
from .closed_form import (
    GreedyAllocation,
    InfeasibleTargetError,
    RzfSlack,
    mrt,
    mrt_efficient,
    rzf,
    rzf_slack,
    zf,
)
from .estimators import (
    MrtEfficientPrecoder,
    MrtEfficientSolverPrecoder,
    MrtPrecoder,
    RzfEfficientPrecoder,
    RzfPrecoder,
    SinrEfficientPrecoder,
    ZfEfficientPrecoder,
    ZfPrecoder,
)
from .power import (
    PaModel,
    PowerReport,
    active_antennas,
    consumed_power,
    l21_norm,
    pa_efficiency,
    pcg_ratio,
    pcg_single_user,
    per_antenna_power,
    power_report,
    transmit_power,
)
from .problems import (
    build_mrt_eff,
    build_rzf_eff,
    build_sinr_conventional,
    build_sinr_eff,
    build_zf_eff,
)
from .solver import (
    AffineEquality,
    ConvexProblem,
    FrobeniusBall,
    HalfSpace,
    PerAntennaBall,
    SocSinr,
    SolveReport,
    SolverConfig,
    group_soft_threshold,
    project_soc,
    solve,
)

__version__ = "0.1.0"
