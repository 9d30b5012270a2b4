"""Inoculation games on graphs: costs, equilibria, social optima and price of anarchy."""

from .errors import (BracketError, ConvergenceError, EnumerationCapError, InfeasibleError,
                     InoculationError, NotATreeError, PreconditionError, SeparatorError)
from .game import CostReport, Estimate, GameConfig, StrategyProfile, cost_profile, cost_pure
from .graph import Graph

__all__ = [
    "BracketError", "ConvergenceError", "CostReport", "EnumerationCapError", "Estimate",
    "GameConfig", "Graph", "InfeasibleError", "InoculationError", "NotATreeError",
    "PreconditionError", "SeparatorError", "StrategyProfile", "cost_profile", "cost_pure",
]

__version__ = "0.1.0"
