"""zenolab: a finite-dimensional laboratory for product-formula evolutions.

Trotter splitting, projective Zeno dynamics, optical-potential absorption,
unitary-kick (bang-bang) decoupling, kicked Floquet iteration, strong
continuous coupling, and the pulsed/continuous limit-exchange experiment,
with measured convergence rates and a deterministic experiment harness.
"""

from ._version import __version__
from .config import (
    DEFAULT,
    STRICT,
    Tolerances,
    get_tolerances,
    set_tolerances,
    use_tolerances,
)
from .continuous_coupling import CouplingResult, coupled_evolution, coupling_sweep
from .harness import (
    ConfigError,
    ExperimentConfig,
    csv_bodies_equal,
    load_config,
    run_experiment,
    validate_config,
)
from .limit_equivalence import (
    InterpolatingProtocol,
    LimitOrderReport,
    interpolating_propagator,
    limit_order_experiment,
)
from .linalg import (
    DimensionMismatch,
    EigenSolverError,
    HermitianOperator,
    Projector,
    ToleranceViolation,
    UnitaryOperator,
    eig_hermitian,
    expm_hermitian,
    frob_norm,
    op_norm,
)
from .operators import (
    ModelSystem,
    SpectralDecomposition,
    model_library,
    model_names,
    spectral_projections,
    spectral_projections_unitary,
    unitary_power,
    zeno_hamiltonian,
    zeno_hamiltonian_single,
)
from .product_formulas import (
    FloquetResult,
    ProductResult,
    floquet_iterate,
    floquet_power,
    kicked_product,
    optical_potential_product,
    trotter_product,
    zeno_product,
)
from .rng import Lcg64
from .sweeps import FitError, RateFit, SweepRecord, SweepResult, fit_rate

__all__ = [
    "__version__",
    "DEFAULT",
    "STRICT",
    "Tolerances",
    "get_tolerances",
    "set_tolerances",
    "use_tolerances",
    "CouplingResult",
    "coupled_evolution",
    "coupling_sweep",
    "ConfigError",
    "ExperimentConfig",
    "csv_bodies_equal",
    "load_config",
    "run_experiment",
    "validate_config",
    "InterpolatingProtocol",
    "LimitOrderReport",
    "interpolating_propagator",
    "limit_order_experiment",
    "DimensionMismatch",
    "EigenSolverError",
    "HermitianOperator",
    "Projector",
    "ToleranceViolation",
    "UnitaryOperator",
    "eig_hermitian",
    "expm_hermitian",
    "frob_norm",
    "op_norm",
    "ModelSystem",
    "SpectralDecomposition",
    "model_library",
    "model_names",
    "spectral_projections",
    "spectral_projections_unitary",
    "unitary_power",
    "zeno_hamiltonian",
    "zeno_hamiltonian_single",
    "FloquetResult",
    "ProductResult",
    "floquet_iterate",
    "floquet_power",
    "kicked_product",
    "optical_potential_product",
    "trotter_product",
    "zeno_product",
    "Lcg64",
    "FitError",
    "RateFit",
    "SweepRecord",
    "SweepResult",
    "fit_rate",
]
