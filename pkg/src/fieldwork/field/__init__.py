"""Work statistics of a displaced thermal free scalar field."""

from __future__ import annotations

from .inversion import GridDistribution, auto_window, dist_work_auto, dist_work_grid, invert_samples
from .model import DEFAULT_QUAD, FieldConfig, QuadOptions, k_cutoff, omega_coth, profile_weight, radial_weight, sphere_area
from .phase import TimeProfile, coherent_amplitude, ordered_sine_integral, phase_theta
from .profiles import (
    SpectralProfile,
    dumps_profile_csv,
    loads_profile_csv,
    parse_profile_spec,
    read_profile_csv,
    write_profile_csv,
)
from .statistics import (
    CumulantVector,
    MomentComparison,
    char_du,
    char_work,
    crooks_identity_check,
    cumulant_work,
    cumulants,
    du_shift_term,
    log_char_work,
    mean_variance,
    moment_inequality_check,
    naive_variance_divergence_coefficient,
    raw_moments,
    single_mode_char,
    third_moment_gap,
    zero_work_atom,
)
