"""Learning from failures: an inductive logic programming engine with
sequential, portfolio and divide-and-conquer parallel search."""

from ._kernels import BACKEND
from .hyplang import Bias, Clause, Hypothesis, Literal, PredSig, cost, format_hypothesis, parse_hypothesis
from .solve import SolveResult, TaskSpec, run_dac, run_portfolio, solve_sequential
from .taskfile import load_task, parse_task
from .tester import BKProgram, EvalLimits, Example, Outcome, entails, test_hypothesis

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "BKProgram", "Bias", "Clause", "EvalLimits", "Example", "Hypothesis",
    "Literal", "Outcome", "PredSig", "SolveResult", "TaskSpec", "cost", "entails",
    "format_hypothesis", "load_task", "parse_hypothesis", "parse_task", "run_dac",
    "run_portfolio", "solve_sequential", "test_hypothesis",
]
