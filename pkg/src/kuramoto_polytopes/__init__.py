"""Polytope bounds on the phase-locking region of the Kuramoto model."""

__version__ = "0.1.0"

from .core import FrequencyVector, PhaseConfiguration, project_mean_zero
from .evs import parse_distribution, phase_transition_experiment
from .membership import hull_membership, in_polytope, order_param_locking_test, stability_check
from .norms import PolytopeSpec, norm_for, parse_spec, spread
from .points import VertexFamily, cs_points, db_points, tau, tau_general
from .sampler import VolumeEstimate, estimate_spec_volume, estimate_true_volume, poke_estimate
from .volumes import exact_volume, postnikov_volume, unit_cs_volume_closed_form

__all__ = [
    "FrequencyVector",
    "PhaseConfiguration",
    "PolytopeSpec",
    "VertexFamily",
    "VolumeEstimate",
    "cs_points",
    "db_points",
    "estimate_spec_volume",
    "estimate_true_volume",
    "exact_volume",
    "hull_membership",
    "in_polytope",
    "norm_for",
    "order_param_locking_test",
    "parse_distribution",
    "parse_spec",
    "phase_transition_experiment",
    "poke_estimate",
    "postnikov_volume",
    "project_mean_zero",
    "spread",
    "stability_check",
    "tau",
    "tau_general",
    "unit_cs_volume_closed_form",
]
