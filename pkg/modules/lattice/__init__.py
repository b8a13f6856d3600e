"""Integer enumeration, approximation profiles, the Schmidt embedding and shortest vectors"""
from .target import TargetVector, IntVector, norm_sq, canonical, is_canonical
from .enumeration import enumerate_ball, ball_points_array, count_ball, radius_limit
from .sigma import (
    SigmaResult,
    SigmaProfile,
    sigma,
    sigma_profile,
    write_profile_csv,
    read_profile_csv,
    decay_exponent,
)
from .shortest import DeltaResult, delta
from .flow import (
    DiagonalFlow,
    g_flow,
    schmidt_embedding,
    lemma_eps_t,
    lemma_check,
    flow_trajectory,
    witness_vector_norm,
)
from shared.rational_utils import best_approximations
__all__ = [
    'TargetVector', 'IntVector', 'norm_sq', 'canonical', 'is_canonical',
    'enumerate_ball', 'ball_points_array', 'count_ball', 'radius_limit',
    'SigmaResult', 'SigmaProfile', 'sigma', 'sigma_profile', 'write_profile_csv',
    'read_profile_csv', 'decay_exponent',
    'DeltaResult', 'delta',
    'DiagonalFlow', 'g_flow', 'schmidt_embedding', 'lemma_eps_t', 'lemma_check',
    'flow_trajectory', 'witness_vector_norm', 'best_approximations',
]
