"""Covariant light-cone state reduction for two-particle spin experiments."""

__version__ = "0.1.0"

from .collapse import Observation, RegionLabel, ReductionReport, applicable_observations, consistency_check, effective_state, region_of
from .hilbert import D, P, Basis, Projector, StateVector, is_separable, probabilities, project, singlet, tensor
from .spacetime import Boost, CausalRelation, Event, boost, compose, in_strict_past_cone, interval, relation

__all__ = [
    "Basis",
    "Boost",
    "CausalRelation",
    "D",
    "Event",
    "Observation",
    "P",
    "Projector",
    "ReductionReport",
    "RegionLabel",
    "StateVector",
    "applicable_observations",
    "boost",
    "compose",
    "consistency_check",
    "effective_state",
    "in_strict_past_cone",
    "interval",
    "is_separable",
    "probabilities",
    "project",
    "region_of",
    "relation",
    "singlet",
    "tensor",
]
