"""Exterior algebra and discrete subgroup norms"""
from .polyvector import PolyVector, wedge, wedge_all, hodge_star, inner, canonical_class, shuffle_sign
from .subgroup import (
    DiscreteSubgroup,
    subgroup_norm,
    wedge_norm,
    gram_norm,
    projection_norm,
    ht_image_basis,
    ht_subgroup_norm,
)
__all__ = [
    'PolyVector', 'wedge', 'wedge_all', 'hodge_star', 'inner', 'canonical_class', 'shuffle_sign',
    'DiscreteSubgroup', 'subgroup_norm', 'wedge_norm', 'gram_norm', 'projection_norm',
    'ht_image_basis', 'ht_subgroup_norm',
]
