"""Situation-calculus reasoning about knowledge, prioritized goals,
intentions, actual causes and explanations over finite models."""

from .causality import causes, causes_oracle, validate_setting
from .engine import BoundedPath, Engine, Situation
from .explanation import RRIntFact, RRIntStore, explains
from .goals import g_intersection, intends, pgoal
from .syntax import load_domain, load_narrative, parse_action, parse_domain, parse_formula
from .theory import TheoryModel, validate_theory

__all__ = [
    "BoundedPath", "Engine", "RRIntFact", "RRIntStore", "Situation", "TheoryModel",
    "causes", "causes_oracle", "explains", "g_intersection", "intends", "load_domain",
    "load_narrative", "parse_action", "parse_domain", "parse_formula", "pgoal",
    "validate_setting", "validate_theory",
]
