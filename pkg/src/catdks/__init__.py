"""Caterpillar-template approximation toolkit for Densest k-Subgraph."""

from .graphs import (BudgetExceededError, DensityReport, Graph,
                     GraphFormatError, SolveResult, brute_force_dks,
                     density_report, load_graph, save_graph)
from .solvers import SolverConfig, approximate, dks_cat_combinatorial, dks_exp, dks_local

__version__ = "0.1.0"

__all__ = [
    "Graph", "SolveResult", "DensityReport", "GraphFormatError",
    "BudgetExceededError", "load_graph", "save_graph", "density_report",
    "brute_force_dks", "SolverConfig", "approximate", "dks_local",
    "dks_cat_combinatorial", "dks_exp", "__version__",
]
