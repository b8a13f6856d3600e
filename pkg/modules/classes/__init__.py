"""Decreasing sequences, arithmetic class membership and the band decomposition"""
from .sequences import (
    DyadicValue,
    DecreasingSequence,
    RhoSequence,
    derived_exponents,
    derived_sequence,
    rho_sequence,
)
from .membership import ClassVerdict, IN_CLASS, VIOLATED, exp_index, membership
from .bands import (
    Band,
    BandSet,
    make_band,
    band_halfwidth,
    admissible_shells,
    candidate_band_set,
    candidate_bands,
    exclusion_threshold,
    shell_count,
    shell_bound,
    tail_sum,
    truncation_tail,
)

__all__ = [
    'DyadicValue', 'DecreasingSequence', 'RhoSequence', 'derived_exponents',
    'derived_sequence', 'rho_sequence',
    'ClassVerdict', 'IN_CLASS', 'VIOLATED', 'exp_index', 'membership',
    'Band', 'BandSet', 'make_band', 'band_halfwidth', 'admissible_shells',
    'candidate_band_set', 'candidate_bands', 'exclusion_threshold',
    'shell_count', 'shell_bound', 'tail_sum', 'truncation_tail',
]
