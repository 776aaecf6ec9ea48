from .dmc.channel_io import (
    channel_document,
    dump_channel,
    load_channel,
    parse_channel_document,
)
from .dmc.main import (
    CostSpec,
    Dmc,
    E0Result,
    EckResult,
    ExponentResult,
    IterationConfig,
    TiltedValue,
    bec,
    bsc,
    cutoff_rate,
    dual_letter_exponents,
    dual_upper_bound,
    e0_tilted,
    eck0_constrained_max,
    eck0_dual,
    eck0_max,
    eck0_primal_oracle,
    eg0,
    eg0_modified,
    kuhn_tucker_slack,
    matrix_channel,
    noiseless,
    optimal_output_law,
    optimize_e0,
    primal_ck_objective,
    prob_vec,
    random_channel,
    random_coding_exponent,
    sphere_packing_exponent,
    verify_lagrange_duality,
    z_channel,
    zero_error_rate_limit,
)
from .quadrature.main import (
    DEFAULT_QUAD_SPEC,
    ExponentialEnvelope,
    QuadResult,
    QuadSpec,
    integrate_halfline,
    integrate_interval,
    integrate_radial_complex,
    integrate_square_diagonal,
)
from .registry.registry_global import (
    ChannelPreset,
    RegistryGlobal,
    get_global_registry,
    reset_global_registry,
)
from .ricean.main import (
    AmplitudeLaw,
    OutputDensityParams,
    RiceanParams,
    UpperBoundChoice,
    asymptotic_constant_no_si,
    bhattacharyya_integral,
    bhattacharyya_kernel,
    bracket_curve,
    capacity_constant,
    dominance_factor,
    e0_log_uniform_noise_free,
    e0_pairwise,
    e0_pairwise_noise_free,
    ell_closed_form,
    ell_integral,
    figure_one_rows,
    log_uniform_square_bound,
    log_uniform_square_integral,
    lower_bound_closed_form,
    lower_bound_r0,
    noise_gap_bound,
    optimize_upper_bound,
    output_density,
    phase_averaged_kernel,
    psi,
    psi_direct,
    psi_integral,
    upper_bound_limit,
    upper_bound_r0,
)
from .sideinfo.main import (
    ConditionalRicean,
    SideInfoParams,
    asymptotic_constant_si,
    conditional_constant,
    figure_two_rows,
    si_constant_by_integration,
    si_lower_bound_finite,
    si_sweep,
    si_upper_bound_finite,
    small_eps_expansion,
)
from .specfun.main import (
    SpecFunConfig,
    bessel_excess,
    bessel_i0,
    carlson_bounds,
    elliptic_k,
    elliptic_k_complement,
    inc_gamma,
    log_bessel_i0,
    log_inc_gamma,
    log_minus_ei,
)
from .types.error_types import (
    ConvergenceError,
    CutoffDualityError,
    DomainError,
    ParameterError,
    PreconditionError,
    QuadratureAccuracyError,
    SizeError,
    ValidationError,
)
from .types.main import (
    BoundPoint,
    DualityReport,
    ExponentCurve,
)
from .utils.main import (
    make_json_safe,
    parse_grid,
    write_csv,
    write_json,
)
from .utils.typing.custom_typing import (
    ConstraintKind,
    ConstraintKindEnum,
    ExitCodeEnum,
    LowerBoundMethod,
    LowerBoundMethodEnum,
    TailCutoffPolicy,
    TailCutoffPolicyEnum,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "Dmc",
    "CostSpec",
    "IterationConfig",
    "E0Result",
    "EckResult",
    "TiltedValue",
    "ExponentResult",
    "prob_vec",
    "eg0",
    "e0_tilted",
    "eg0_modified",
    "eck0_dual",
    "eck0_primal_oracle",
    "primal_ck_objective",
    "dual_letter_exponents",
    "dual_upper_bound",
    "optimal_output_law",
    "kuhn_tucker_slack",
    "optimize_e0",
    "cutoff_rate",
    "random_coding_exponent",
    "sphere_packing_exponent",
    "zero_error_rate_limit",
    "eck0_max",
    "eck0_constrained_max",
    "verify_lagrange_duality",
    "bsc",
    "bec",
    "z_channel",
    "noiseless",
    "matrix_channel",
    "random_channel",
    "parse_channel_document",
    "load_channel",
    "channel_document",
    "dump_channel",
    "QuadSpec",
    "QuadResult",
    "ExponentialEnvelope",
    "DEFAULT_QUAD_SPEC",
    "integrate_interval",
    "integrate_halfline",
    "integrate_radial_complex",
    "integrate_square_diagonal",
    "SpecFunConfig",
    "bessel_i0",
    "log_bessel_i0",
    "bessel_excess",
    "log_minus_ei",
    "inc_gamma",
    "log_inc_gamma",
    "elliptic_k",
    "elliptic_k_complement",
    "carlson_bounds",
    "RiceanParams",
    "OutputDensityParams",
    "AmplitudeLaw",
    "UpperBoundChoice",
    "bhattacharyya_kernel",
    "phase_averaged_kernel",
    "output_density",
    "bhattacharyya_integral",
    "e0_pairwise",
    "e0_pairwise_noise_free",
    "e0_log_uniform_noise_free",
    "log_uniform_square_integral",
    "log_uniform_square_bound",
    "noise_gap_bound",
    "asymptotic_constant_no_si",
    "capacity_constant",
    "lower_bound_closed_form",
    "lower_bound_r0",
    "dominance_factor",
    "ell_closed_form",
    "ell_integral",
    "psi",
    "psi_direct",
    "psi_integral",
    "optimize_upper_bound",
    "upper_bound_r0",
    "upper_bound_limit",
    "bracket_curve",
    "figure_one_rows",
    "SideInfoParams",
    "ConditionalRicean",
    "conditional_constant",
    "asymptotic_constant_si",
    "small_eps_expansion",
    "si_constant_by_integration",
    "si_upper_bound_finite",
    "si_lower_bound_finite",
    "figure_two_rows",
    "si_sweep",
    "RegistryGlobal",
    "ChannelPreset",
    "get_global_registry",
    "reset_global_registry",
    "BoundPoint",
    "ExponentCurve",
    "DualityReport",
    "CutoffDualityError",
    "DomainError",
    "ParameterError",
    "PreconditionError",
    "SizeError",
    "ValidationError",
    "QuadratureAccuracyError",
    "ConvergenceError",
    "parse_grid",
    "make_json_safe",
    "write_csv",
    "write_json",
    "ConstraintKind",
    "ConstraintKindEnum",
    "TailCutoffPolicy",
    "TailCutoffPolicyEnum",
    "LowerBoundMethod",
    "LowerBoundMethodEnum",
    "ExitCodeEnum",
]
