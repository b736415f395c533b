"""Computation engine for inverse flight dynamics."""

from .settings import (
    SettingsError,
    SolverSettings,
    get_settings,
    load_settings,
    reset_settings,
)

from .geom_core import (
    GeometryError,
    hat,
    vee,
    rotation_from_axes,
    reorthonormalize,
    orthonormality_residual,
    omega_from_frame_rates,
    so3_exp,
    geodesic_angle,
    frame_rate_fd,
    sampled_frame_rates,
    segmented_frame_rates,
)

from .aero_model import (
    AeroModelError,
    DegenerateLiftError,
    air_state,
    aero_directions,
    angle_of_attack,
    sideslip,
    flow_from_angles,
    polar_eval,
    drag_from_lift_coefficient,
    finite_wing_lift_slope,
    induced_factor,
    k_alpha_of,
    aspect_ratio,
    polar_from_wing,
    frd_moment_coefficients,
    aero_force_body,
    aero_force_world,
    aero_moment_body,
    distributed_aero_moment,
    offset_force_moment,
)

from .presets import (
    PresetError,
    PresetDatabase,
    PRESET_JSON_KEYS,
    get_preset_database,
    preset,
    preset_from_dict,
    preset_to_dict,
)

from .inverse_dynamics import (
    InverseDynamicsError,
    TrimError,
    DegenerateFrameError,
    required_force,
    decompose,
    degenerate_perp_frame,
    body_axes,
    bank_angle_of,
    solve_trim,
    solve_trim_smallangle,
    required_torque,
    moment_coefficients,
    allocate_controls,
    invert_trajectory,
)

from .tethered_parallel import (
    parallel_state,
    demand,
    implicit_trim,
    cardano_alpha,
    cardano_trim,
    bank_angle,
    bank_angle_dimensionless,
    zero_bank_tension,
    zero_bank_eta,
    sensitivities_at_locus,
    classify_regime,
    induced_drag_of_lift,
    specific_force,
    perceived_bank_offset,
    constant_rates,
    analytic_solution,
    attitude_sampler,
    tension_sweep,
)

from .forward_verify import (
    IntegrationError,
    TELEMETRY_COLUMNS,
    tether_force,
    dynamics_rhs,
    integrate,
    roundtrip_run,
    roundtrip_verify,
    telemetry_frame,
    convergence_order,
)

__all__ = [
    # Settings
    "SettingsError",
    "SolverSettings",
    "get_settings",
    "load_settings",
    "reset_settings",
    # Geometry
    "GeometryError",
    "hat",
    "vee",
    "rotation_from_axes",
    "reorthonormalize",
    "orthonormality_residual",
    "omega_from_frame_rates",
    "so3_exp",
    "geodesic_angle",
    "frame_rate_fd",
    "sampled_frame_rates",
    "segmented_frame_rates",
    # Aerodynamics
    "AeroModelError",
    "DegenerateLiftError",
    "air_state",
    "aero_directions",
    "angle_of_attack",
    "sideslip",
    "flow_from_angles",
    "polar_eval",
    "drag_from_lift_coefficient",
    "finite_wing_lift_slope",
    "induced_factor",
    "k_alpha_of",
    "aspect_ratio",
    "polar_from_wing",
    "frd_moment_coefficients",
    "aero_force_body",
    "aero_force_world",
    "aero_moment_body",
    "distributed_aero_moment",
    "offset_force_moment",
    # Presets
    "PresetError",
    "PresetDatabase",
    "PRESET_JSON_KEYS",
    "get_preset_database",
    "preset",
    "preset_from_dict",
    "preset_to_dict",
    # Inverse dynamics
    "InverseDynamicsError",
    "TrimError",
    "DegenerateFrameError",
    "required_force",
    "decompose",
    "degenerate_perp_frame",
    "body_axes",
    "bank_angle_of",
    "solve_trim",
    "solve_trim_smallangle",
    "required_torque",
    "moment_coefficients",
    "allocate_controls",
    "invert_trajectory",
    # Tethered flight
    "parallel_state",
    "demand",
    "implicit_trim",
    "cardano_alpha",
    "cardano_trim",
    "bank_angle",
    "bank_angle_dimensionless",
    "zero_bank_tension",
    "zero_bank_eta",
    "sensitivities_at_locus",
    "classify_regime",
    "induced_drag_of_lift",
    "specific_force",
    "perceived_bank_offset",
    "constant_rates",
    "analytic_solution",
    "attitude_sampler",
    "tension_sweep",
    # Forward verification
    "IntegrationError",
    "TELEMETRY_COLUMNS",
    "tether_force",
    "dynamics_rhs",
    "integrate",
    "roundtrip_run",
    "roundtrip_verify",
    "telemetry_frame",
    "convergence_order",
]
