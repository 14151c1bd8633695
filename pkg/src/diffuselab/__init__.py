"""diffuselab: simulate diffusions, solve their PDEs, and check that the
two sides agree.

The package has three layers:

* sampling: reproducible random streams (rng), Brownian and Euler paths
  (paths, sde), and discrete stochastic integrals (ito);
* analysis: closed-form Gaussian kernels and generator checks (kernels),
  explicit grid solvers for the density and expectation equations (pde),
  histogram densities and grid distances (density), and weighted terminal
  expectations (fk);
* experiments: canned cross-checks with JSON configs and CSV outputs
  (experiments, cli).
"""

from .density import HistogramSpec, histogram_density, l1_distance, l2_distance, noise_floor, sup_distance
from .errors import (
    ConfigError,
    DiffuselabError,
    DimensionError,
    FieldEvalError,
    InstabilityError,
    InvalidParameterError,
    NumericsError,
    ParseError,
    SimulationError,
    StateOverflowError,
)
from .fieldexpr import (
    Binary,
    Const,
    FieldExpr,
    FieldSpec,
    Unary,
    Var,
    evaluate,
    grad_fd,
    hessian_fd,
    parse,
    validate_on_box,
)
from .fk import FkQuery, fk_estimate, fk_weighted_payoffs
from .ito import (
    CheckReport,
    SampledIntegrand,
    TestFunction,
    check_isometry,
    check_martingale_zero_mean,
    check_quadratic_variation,
    integration_by_parts_residual,
    ito_formula_residual,
    ito_integral,
    quadratic_covariation,
    sample_state_function,
    sample_time_function,
)
from .kernels import (
    EstimateWithError,
    HeatKernelParams,
    apply_generator,
    bm_transition_density,
    chapman_kolmogorov_gap,
    composite_gauss_legendre,
    generator_limit_gap,
    heat_solution,
    stochastic_representation,
)
from .paths import Path, brownian_path
from .pde import (
    BackwardSolution,
    FpSolution,
    HeatSolution,
    ScalarGrid,
    gaussian_grid,
    grid_from_expr,
    restrict_block_mean,
    solve_backward_fk,
    solve_fokker_planck,
    solve_heat,
)
from .rng import RngStream, derive_seed, gaussian, mix64
from .sde import (
    CoefficientReport,
    Ensemble,
    EnsembleResult,
    SdeProblem,
    euler_maruyama,
    gbm_exact,
    gbm_strong_convergence,
    simulate_ensemble,
    validate_coefficients,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
