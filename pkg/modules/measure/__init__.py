"""Volume and density estimation, with harnesses for the sublevel-set bounds"""
from .estimators import (
    VolumeEstimate,
    SupNormBracket,
    clopper_pearson,
    sample_chunk,
    montecarlo_count,
    montecarlo_volume,
    sublevel_volume,
    sup_norm,
    band_preimage_volume,
    GRID,
    MONTECARLO,
)
from .bounds import (
    BoundReport,
    LogLogFit,
    CalibratedCheck,
    ctau_check,
    km_bound_check,
    km_rhs_form,
    km_side_conditions,
    loglog_fit,
    calibrate_constant,
    calibrated_check,
    growth_exponent_fit,
    flow_volume_check,
    flowed_embedding_delta,
    write_bound_reports,
    CHECKED,
    SKIPPED,
)
from .density import (
    DensityCurve,
    DensityPoint,
    UnionBound,
    density_curve,
    excluded_union_bound,
    check_density_preconditions,
    band_picture,
    band_reach,
    read_density_csv,
)

__all__ = [
    'VolumeEstimate', 'SupNormBracket', 'clopper_pearson', 'sample_chunk',
    'montecarlo_count', 'montecarlo_volume', 'sublevel_volume', 'sup_norm',
    'band_preimage_volume', 'GRID', 'MONTECARLO',
    'BoundReport', 'LogLogFit', 'CalibratedCheck', 'ctau_check', 'km_bound_check',
    'km_rhs_form', 'km_side_conditions', 'loglog_fit', 'calibrate_constant',
    'calibrated_check', 'growth_exponent_fit', 'flow_volume_check',
    'flowed_embedding_delta', 'write_bound_reports', 'CHECKED', 'SKIPPED',
    'DensityCurve', 'DensityPoint', 'UnionBound', 'density_curve',
    'excluded_union_bound', 'check_density_preconditions', 'band_picture',
    'band_reach', 'read_density_csv',
]
