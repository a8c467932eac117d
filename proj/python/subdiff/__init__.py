"""Time-fractional diffusion on bounded domains.

Spectral, Monte Carlo, and iterated-Brownian-motion solvers for
d^beta/dt^beta u = L u with Dirichlet boundary conditions.
"""

from ._core import (
    DivergenceForm1D,
    Eigenmode,
    InitialData,
    IntervalLaplacian,
    McEstimate,
    Point,
    RectangleLaplacian,
    SmoothnessReport,
    SolutionGrid,
    SpectralCoefficients,
    SpectralModel,
    __version__,
    bump_datum,
    caputo_l1,
    ctrw_scaled_counts,
    divergence_form,
    eigenpairs,
    half_bm_density,
    heat_kernel,
    inverse_subordinator_density,
    mittag_leffler,
    ml_time_derivative,
    mode_datum,
    poly_datum,
    sample_inverse_subordinator,
    sampled_datum,
    smoothness_diagnostic,
    solve_fourth_order,
    solve_fractional,
    solve_ibm,
    solve_ibm_twosided,
    solve_mc,
    stable_density,
    subordination_identity,
    transform,
    truncation_select,
)

__all__ = [
    "DivergenceForm1D",
    "Eigenmode",
    "InitialData",
    "IntervalLaplacian",
    "McEstimate",
    "Point",
    "RectangleLaplacian",
    "SmoothnessReport",
    "SolutionGrid",
    "SpectralCoefficients",
    "SpectralModel",
    "__version__",
    "bump_datum",
    "caputo_l1",
    "ctrw_scaled_counts",
    "divergence_form",
    "eigenpairs",
    "half_bm_density",
    "heat_kernel",
    "inverse_subordinator_density",
    "mittag_leffler",
    "ml_time_derivative",
    "mode_datum",
    "poly_datum",
    "sample_inverse_subordinator",
    "sampled_datum",
    "smoothness_diagnostic",
    "solve_fourth_order",
    "solve_fractional",
    "solve_ibm",
    "solve_ibm_twosided",
    "solve_mc",
    "stable_density",
    "subordination_identity",
    "transform",
    "truncation_select",
]
