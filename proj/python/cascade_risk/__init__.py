"""Value-at-risk of cascading fluctuations in time-delay consensus networks."""

from ._core import (  # noqa: F401
    CascadeError,
    ConditionalStats,
    Edge,
    EmpiricalStats,
    FailureScenario,
    NoiseDelayConfig,
    OracleEstimate,
    RiskClass,
    RiskParams,
    RiskValue,
    SimConfig,
    SpectralData,
    SteadyStateCovariance,
    VulnerableSequence,
    WeightedGraph,
    __version__,
    build_complete,
    build_path,
    build_pcycle,
    cascading_risk,
    conditional_risk_oracle,
    conditional_stats,
    correlation,
    erf_inv,
    exceedance_probability,
    incremental_update,
    load_edge_list,
    max_stable_delay,
    most_vulnerable_sequence,
    risk_profile,
    sample_steady_state,
    simulate,
    single_agent_risk,
    spectral,
    steady_state_covariance,
)
