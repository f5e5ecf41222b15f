"""Data-driven H2-optimal reduced-order modeling of discrete-time LTI systems.

Builds locally H2-optimal reduced models either from a transfer-function
oracle or from a single time-domain input/output trajectory, recovering the
required frequency data through optimally scaled informativity solves.
"""

from .conditioning import (
    AppendedColumnAnalysis,
    alpha_predictor,
    condition_number,
    condition_squared,
    extreme_eigenvalues,
    optimal_scale,
)
from .h2 import (
    PoleResidueForm,
    QuadratureError,
    h2_norm_pole_residue,
    h2_norm_quadrature,
    pole_residue_of,
    relative_h2_error,
)
from .informativity import (
    FrequencySample,
    InformativityFlags,
    InformativityWorkspace,
    NotInformativeError,
    build_workspace,
    check_informativity,
    consistency_indicator,
    gamma_vectors,
    hankel,
    recover_derivative,
    recover_value,
    sigma_vectors,
)
from .irka import (
    IrkaConfig,
    IrkaReport,
    default_initial_points,
    stabilize_points,
    td_irka,
    tf_irka,
)
from .loewner import HermiteLoewnerROM, build_hermite_loewner, realify, rom_poles
from .lti import (
    ContinuousLTI,
    DiscreteLTI,
    TimeSeriesData,
    TransferEvaluator,
    advection_fd_model,
    heat_fd_model,
    lightly_damped_system,
    random_stable_system,
    simulate,
    transfer_derivative,
    transfer_value,
    zoh_discretize,
)

__version__ = "0.1.0"

__all__ = [
    "AppendedColumnAnalysis",
    "ContinuousLTI",
    "DiscreteLTI",
    "FrequencySample",
    "HermiteLoewnerROM",
    "InformativityFlags",
    "InformativityWorkspace",
    "IrkaConfig",
    "IrkaReport",
    "NotInformativeError",
    "PoleResidueForm",
    "QuadratureError",
    "TimeSeriesData",
    "TransferEvaluator",
    "advection_fd_model",
    "alpha_predictor",
    "build_hermite_loewner",
    "build_workspace",
    "check_informativity",
    "condition_number",
    "condition_squared",
    "consistency_indicator",
    "default_initial_points",
    "extreme_eigenvalues",
    "gamma_vectors",
    "h2_norm_pole_residue",
    "h2_norm_quadrature",
    "hankel",
    "heat_fd_model",
    "lightly_damped_system",
    "optimal_scale",
    "pole_residue_of",
    "random_stable_system",
    "realify",
    "recover_derivative",
    "recover_value",
    "relative_h2_error",
    "rom_poles",
    "sigma_vectors",
    "simulate",
    "stabilize_points",
    "td_irka",
    "tf_irka",
    "transfer_derivative",
    "transfer_value",
    "zoh_discretize",
]
