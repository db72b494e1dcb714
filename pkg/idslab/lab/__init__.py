"""
Numerical modules of the lab.

- coeff_field: Anderson-type fields, periodization, mean and harmonic fields
- discretize: finite-difference assembly under Dirichlet/Neumann/periodic/Floquet
- spectral: inertia counting and lowest eigenpairs
- ids: finite-volume, Floquet and homogenized IDS, smoothed DOS, bands
- sandwich, approximation, deviation, large_deviations: low-energy experiments on N
"""

from .coeff_field import (
    sample_field,
    periodize,
    mean_field,
    harmonic_mean_field,
    reciprocal_field,
    tiled_mean,
    site_uniforms,
)
from .discretize import assemble, quadratic_form
from .spectral import count_below, eigen_count, eigen_counts, lowest_eigenpairs, full_spectrum
from .ids import (
    energy_grid,
    free_ids,
    finite_volume_ids,
    floquet_ids,
    homogenized_ids,
    interpolate_ids,
    smoothed_dos,
    band_structure,
)
from .sandwich import sandwich_check, sandwich_scan, build_sandwich_report
from .approximation import approximation_check
from .deviation import deviation_event_probability, clopper_pearson
from .large_deviations import ld_rate, fit_tail, fit_tail_curve

__all__ = [
    "sample_field",
    "periodize",
    "mean_field",
    "harmonic_mean_field",
    "reciprocal_field",
    "tiled_mean",
    "site_uniforms",
    "assemble",
    "quadratic_form",
    "count_below",
    "eigen_count",
    "eigen_counts",
    "lowest_eigenpairs",
    "full_spectrum",
    "energy_grid",
    "free_ids",
    "finite_volume_ids",
    "floquet_ids",
    "homogenized_ids",
    "interpolate_ids",
    "smoothed_dos",
    "band_structure",
    "sandwich_check",
    "sandwich_scan",
    "build_sandwich_report",
    "approximation_check",
    "deviation_event_probability",
    "clopper_pearson",
    "ld_rate",
    "fit_tail",
    "fit_tail_curve",
]
