"""Exact rates, latency planning and executable codes for two-user coded caching.

The package has five layers:

``rate_laws``
    closed-form rates, latencies and bound expressions in exact rationals;
``corner_schemes``
    executable placement/delivery/decoding for the twelve corner points;
``composer``
    memory sharing of corner schemes into codes on concrete file sizes;
``planner``
    latency-optimal choice of private and shared rates;
``simulator``
    end-to-end runs of composed codes on seeded libraries.
"""

from .composer import ComposedCode, SharePlan, compose, min_file_size, nine_points, region_of, share_plan
from .corner_schemes import BASE_IDS, Library, Transcript, signature
from .errors import DecodeError, DomainError, PlanningError, SizingError
from .planner import Plan, plan, solve_monotone
from .rate_laws import (
    ProblemInstance,
    distortion_rate,
    f_bar,
    latency,
    lhc_rate,
    rc_star,
    t_star,
    yang_bound,
)
from .simulator import SimulationReport, make_library, run_all, run_demand, verify_against_formula

__version__ = "0.1.0"

__all__ = [
    "BASE_IDS", "ComposedCode", "DecodeError", "DomainError", "Library", "Plan", "PlanningError",
    "ProblemInstance", "SharePlan", "SimulationReport", "SizingError", "Transcript",
    "compose", "distortion_rate", "f_bar", "latency", "lhc_rate", "make_library", "min_file_size",
    "nine_points", "plan", "rc_star", "region_of", "run_all", "run_demand", "share_plan", "signature",
    "solve_monotone", "t_star", "verify_against_formula", "yang_bound",
]
