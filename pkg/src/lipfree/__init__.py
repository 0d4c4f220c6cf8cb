"""Finite-scale computations around Lipschitz extension into normed spaces.

Lipschitz constants, Lipschitz-free (Kantorovich-Rubinstein) norms, optimal
Lipschitz extensions, and ball-intersection tests for finite metric spaces
and finite-dimensional targets.

Finite-dimensional spaces are reflexive, so the bidual of a target is the
target itself; nothing here models biduals separately.
"""

from .balls import (
    BallSystem,
    ball_extension_bridge,
    joint_intersection,
    pairwise_intersections,
    weak_intersection_sampler,
)
from .extension import (
    ExtensionResult,
    WitnessReport,
    extension_constant,
    l1predual_evidence,
    optimal_extension,
    witness_search,
)
from .freespace import FreeVector, delta, kr_norm, kr_norm_dual, kr_norm_primal, linearization_norm
from .lipschitz import LipschitzMap, difference_quotient_set, lip_norm, mcshane_extend, transfer_extension
from .metric import FiniteMetricSpace, SubsetEmbedding, induced_subspace, metric_from_points, validate_metric
from .norms import EuclideanNorm, PolyhedralNorm, l1, l2, linf, linf_embedding, norm_eval, operator_norm, parse_norm

__all__ = [
    "BallSystem", "EuclideanNorm", "ExtensionResult", "FiniteMetricSpace", "FreeVector", "LipschitzMap",
    "PolyhedralNorm", "SubsetEmbedding", "WitnessReport", "ball_extension_bridge", "delta",
    "difference_quotient_set", "extension_constant", "induced_subspace", "joint_intersection", "kr_norm",
    "kr_norm_dual", "kr_norm_primal", "l1", "l1predual_evidence", "l2", "linearization_norm", "linf",
    "linf_embedding", "lip_norm", "mcshane_extend", "metric_from_points", "norm_eval", "operator_norm",
    "optimal_extension", "pairwise_intersections", "parse_norm", "transfer_extension", "validate_metric",
    "weak_intersection_sampler", "witness_search",
]
