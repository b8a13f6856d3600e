"""Polynomial curved maps: evaluation, differentiation, curvature and certified bounds"""
from .polynomial import (
    ScalarPolynomial,
    PolynomialMap,
    MultiIndex,
    generators,
    moment_curve,
    shifted_map,
)
from .curvature import CurvatureReport, curvature_check, multi_indices, row_space
from .bounds import (
    DerivativeBounds,
    derivative_bounds,
    km_constant,
    lipschitz_bound,
    sup_bound,
    grid_cells,
    HYPOTHESIS_FAILS,
    TOLERANCE_TOO_COARSE,
)

__all__ = [
    'ScalarPolynomial', 'PolynomialMap', 'MultiIndex', 'generators', 'moment_curve',
    'shifted_map',
    'CurvatureReport', 'curvature_check', 'multi_indices', 'row_space',
    'DerivativeBounds', 'derivative_bounds', 'km_constant', 'lipschitz_bound',
    'sup_bound', 'grid_cells', 'HYPOTHESIS_FAILS', 'TOLERANCE_TOO_COARSE',
]
