"""
circloyd services

Numerical core, bottom-up: angles -> densities -> Lloyd map ->
linearization -> stability / Lyapunov / SALA -> experiments.
"""

from .errors import (
    LloydError,
    DomainError,
    DegenerateConfigurationError,
    CellTooLargeError,
    UndefinedCentroidError,
    PerturbationTooLargeError,
    DimensionMismatchError,
    OrbitError,
)
from .angle import (
    Configuration,
    wrap_2pi,
    wrap_pi,
    geodesic,
    circular_midpoint,
    sort_config,
    remove_drift,
    symmetric_configuration,
    aligned_distance,
)
from .density import DensityModel, bessel_i0, bessel_i1, mean_resultant_length
from .quantizer import (
    LloydMap,
    VoronoiPartition,
    Orbit,
    voronoi,
    lloyd_step,
    distortion,
    fixed_point_residual,
    iterate,
    random_configuration,
)
from .linearization import (
    ModeSpectrum,
    symmetric_jacobian,
    fd_jacobian,
    circulant_eigenvalues,
    expand,
    matvec,
)
from .stability import (
    m_star,
    flip_bound,
    stability_functional_F,
    classify,
    classify_functional,
    critical_kappa,
)
from .lyapunov import QRPair, qr_decompose, lyapunov_from_jacobians, lyapunov_spectrum
from .sala import SalaTrace, sala_run, oscillation_indicator
from .experiments import (
    stability_sweep,
    eigen_scan,
    lyapunov_scan,
    residual_trace,
    critical_scan,
    symmetry_diagnostics,
)

__all__ = [
    # Errors
    "LloydError", "DomainError", "DegenerateConfigurationError", "CellTooLargeError",
    "UndefinedCentroidError", "PerturbationTooLargeError", "DimensionMismatchError",
    "OrbitError",

    # Angles and configurations
    "Configuration", "wrap_2pi", "wrap_pi", "geodesic", "circular_midpoint",
    "sort_config", "remove_drift", "symmetric_configuration", "aligned_distance",

    # Densities
    "DensityModel", "bessel_i0", "bessel_i1", "mean_resultant_length",

    # Lloyd map
    "LloydMap", "VoronoiPartition", "Orbit", "voronoi", "lloyd_step", "distortion",
    "fixed_point_residual", "iterate", "random_configuration",

    # Linearization and stability
    "ModeSpectrum", "symmetric_jacobian", "fd_jacobian", "circulant_eigenvalues",
    "expand", "matvec",
    "m_star", "flip_bound", "stability_functional_F", "classify", "classify_functional",
    "critical_kappa",

    # Dynamics
    "QRPair", "qr_decompose", "lyapunov_from_jacobians", "lyapunov_spectrum",
    "SalaTrace", "sala_run", "oscillation_indicator",

    # Experiments
    "stability_sweep", "eigen_scan", "lyapunov_scan", "residual_trace", "critical_scan",
    "symmetry_diagnostics",
]
