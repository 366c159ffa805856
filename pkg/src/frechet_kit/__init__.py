"""Curve simplification and (k,l)-median clustering under the continuous
Frechet distance."""

from .cluster import CandidateSet, FinderParams, candidate_finder, cost, \
    kl_median, median34_standin, sample_size
from .errors import BudgetExceeded, DegenerateSegment, DimensionMismatch, \
    EmptyInput, EmptyStep, FrechetKitError, InvalidCurve, ParseError, \
    TooLarge
from .frechet import FrechetResult, PolygonalCurve, densify, \
    discrete_frechet, frechet_distance, free_space_decision, pad_curve
from .simplify import bicriteria_simplify
from .twophase import QInstance, solve_Q

__version__ = "0.1.0"

__all__ = [
    "BudgetExceeded",
    "CandidateSet",
    "DegenerateSegment",
    "DimensionMismatch",
    "EmptyInput",
    "EmptyStep",
    "FinderParams",
    "FrechetKitError",
    "FrechetResult",
    "InvalidCurve",
    "ParseError",
    "PolygonalCurve",
    "QInstance",
    "TooLarge",
    "bicriteria_simplify",
    "candidate_finder",
    "cost",
    "densify",
    "discrete_frechet",
    "frechet_distance",
    "free_space_decision",
    "kl_median",
    "median34_standin",
    "pad_curve",
    "sample_size",
    "solve_Q",
]
