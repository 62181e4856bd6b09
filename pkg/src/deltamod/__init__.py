"""Exact arithmetic for Delta-modular matrices and the matroids they represent."""

__version__ = "0.1.0"

from ._accel import backend
from .linalg import (
    IntMatrix,
    det,
    is_delta_modular,
    is_totally_delta_modular,
    max_abs_minor,
    rank,
    rank_mod_p,
    row_point_count,
)
from .matroid import (
    LinearMatroid,
    Matroid,
    UniformMatroid,
    closure,
    contract,
    delete,
    direct_sum,
    dual,
    epsilon,
    flats_of_rank,
    simplify,
)
from .normal_form import Representation, dual_representation, pivot_to_standard_form

__all__ = [
    "IntMatrix",
    "LinearMatroid",
    "Matroid",
    "Representation",
    "UniformMatroid",
    "backend",
    "closure",
    "contract",
    "delete",
    "det",
    "direct_sum",
    "dual",
    "dual_representation",
    "epsilon",
    "flats_of_rank",
    "is_delta_modular",
    "is_totally_delta_modular",
    "max_abs_minor",
    "pivot_to_standard_form",
    "rank",
    "rank_mod_p",
    "row_point_count",
    "simplify",
]
