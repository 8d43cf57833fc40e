"""Conflict-graph link scheduling with learned utilities and a local greedy solver."""

from ._linksched import (
    ConflictGraph,
    FeasibilityError,
    InputError,
    LoadError,
    ParameterError,
    ShapeError,
    SizeError,
    UtilityModel,
    degree_stats,
    evaluate,
    generate,
    gradcheck,
    is_independent_set,
    lgs,
    mwis_exact,
    simulate,
    train,
)

__all__ = [
    "ConflictGraph",
    "FeasibilityError",
    "InputError",
    "LoadError",
    "ParameterError",
    "ShapeError",
    "SizeError",
    "UtilityModel",
    "degree_stats",
    "evaluate",
    "generate",
    "gradcheck",
    "is_independent_set",
    "lgs",
    "mwis_exact",
    "simulate",
    "train",
]
