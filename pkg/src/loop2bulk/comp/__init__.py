"""Monoid-comprehension IR, evaluator, normalizer and optimizers."""

from .alpha import alpha_equal, canonical
from .evaluate import compile_expr, evaluate, evaluate_target, merge_bags
from .normalize import normalize, normalize_target
from .optimize import (eliminate_constant_key_groupby, eliminate_range_iteration,
                       eliminate_unique_key_groupby, infer_unique_key, invert_affine_index,
                       optimize, optimize_target)
from .printer import show, show_target

__all__ = [
    "alpha_equal", "canonical", "compile_expr", "evaluate", "evaluate_target", "merge_bags",
    "normalize", "normalize_target", "eliminate_constant_key_groupby",
    "eliminate_range_iteration", "eliminate_unique_key_groupby", "infer_unique_key",
    "invert_affine_index", "optimize", "optimize_target", "show", "show_target",
]
