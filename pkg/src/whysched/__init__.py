"""Explainable course scheduling.

Degree requirements compile to a labeled propositional knowledge base;
schedules are models of it; contrastive "why X instead of Y" questions are
answered either with an alternative schedule or with a subset-minimal set of
conflicting constraints rendered in English.
"""

from .catalog import Catalog, Course, RequirementSet, load_catalog, resolve_course, save_catalog
from .encoder import LabeledKB, encode
from .explainer import AlternativeSchedule, Explanation, Foil, MinimalExplanation, explain
from .evalharness import EvalReport, generate_queries, run_eval
from .queryparse import ParsedQuery, Restatement, parse, parse_llm, restate, to_foil
from .refiner import RefinedExplanation, refine_llm, refine_template
from .scheduler import Exhausted, Infeasible, Schedule, check_schedule, generate_schedule, next_schedule

__version__ = "0.1.0"

__all__ = [
    "AlternativeSchedule", "Catalog", "Course", "EvalReport", "Exhausted",
    "Explanation", "Foil", "Infeasible", "LabeledKB", "MinimalExplanation",
    "ParsedQuery", "RefinedExplanation", "RequirementSet", "Restatement",
    "Schedule", "check_schedule", "encode", "explain", "generate_queries",
    "generate_schedule", "load_catalog", "next_schedule", "parse", "parse_llm",
    "refine_llm", "refine_template", "resolve_course", "restate", "run_eval",
    "save_catalog", "to_foil",
]
