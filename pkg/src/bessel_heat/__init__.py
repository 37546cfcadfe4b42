"""Heat kernels and transition densities for Bessel-type diffusions on (0, 1).

The package provides

* certified evaluation of the Fourier-Bessel eigenfunction series for the
  heat kernel with absorption at 1 (``kernels.eigen_series_kernel``),
* transition densities of reflected and killed Bessel processes on the unit
  interval, and the free half-line density, with two-sided comparator
  envelopes for each,
* method-of-images evaluators used as independent cross-checks,
* an exact-step Monte Carlo sampler for squared Bessel paths with optional
  absorption at either endpoint (``montecarlo.simulate_density``),
* numerical verification drivers (``verify``) and a command line front end
  (``cli``).

Only ``numpy`` and ``scipy`` are required at runtime.
"""

from .errors import (
    BesselHeatError,
    ConfigurationError,
    DomainError,
    IllConditionedError,
    IterationError,
    PoleError,
)
from .specfun import EigenMode, bessel_i_scaled, bessel_j, bessel_j_zero, eigen_mode
from .kernels import (
    SeriesValue,
    comparator_free,
    comparator_killed,
    comparator_main,
    comparator_reflected,
    eigen_series_kernel,
    eigen_series_kernel_grid,
    free_density,
    hunt_remainder,
    images_dirichlet,
    images_dirichlet_interval,
    images_neumann_dirichlet,
    killed_density,
    reflected_density,
)
from .montecarlo import (
    HistogramDensity,
    PathEnsembleConfig,
    compare_histogram,
    simulate_density,
)

__all__ = [
    "BesselHeatError",
    "ConfigurationError",
    "DomainError",
    "IllConditionedError",
    "IterationError",
    "PoleError",
    "EigenMode",
    "bessel_i_scaled",
    "bessel_j",
    "bessel_j_zero",
    "eigen_mode",
    "SeriesValue",
    "comparator_free",
    "comparator_killed",
    "comparator_main",
    "comparator_reflected",
    "eigen_series_kernel",
    "eigen_series_kernel_grid",
    "free_density",
    "hunt_remainder",
    "images_dirichlet",
    "images_dirichlet_interval",
    "images_neumann_dirichlet",
    "killed_density",
    "reflected_density",
    "HistogramDensity",
    "PathEnsembleConfig",
    "compare_histogram",
    "simulate_density",
]

__version__ = "0.1.0"
