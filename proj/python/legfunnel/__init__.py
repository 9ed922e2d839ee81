"""Event-triggered funnel force control for a six-wheel-legged robot."""

from ._legfunnel import (
    ConditionCheck,
    ConfigError,
    DomainError,
    FunnelParams,
    FunnelViolation,
    LegPlantParams,
    LegPlantState,
    OmegaBound,
    ParameterError,
    ScenarioConfig,
    SimulationAbort,
    TriggerParams,
    TriggerState,
    ValidationReport,
    control_law,
    force_tracking_test,
    funnel_value,
    gain_current,
    gain_reset,
    iss_envelope,
    leg_plant_step,
    load_config,
    min_inter_event_time,
    omega_bound,
    run_scenario,
    saturate,
    static_allocation,
    trigger_evaluate,
    u_bar,
    validate_config,
    validate_parameters,
)

__version__ = "0.1.0"
