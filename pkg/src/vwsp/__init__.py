"""Exact solver for the valued workflow satisfiability problem.

Minimises constraint plus authorisation weight over complete plans with a
pattern branch and bound search.  The search kernel is compiled when the
extension is built and pure Python otherwise.
"""
from ._compile import ImportanceParams, step_importance
from ._kernel import HAVE_COMPILED, default_backend
from .assignment import hungarian, optimal_plan_for_pattern
from .auth import (Additive, AuthorisationModel, Consultant, Employee, Table,
                   authorisation_weight, block_min_weight, set_weight)
from .constraints import (Kind, WeightedConstraint, at_least, at_most, counting_lower_bound,
                          not_equals)
from .generator import GeneratorParams, SplitMix64, generate
from .io import FormatError, dump_instance, load_instance, parse_instance, save_instance
from .mip import build_mip, check_plan_against_mip, export_mip
from .model import (Pattern, Plan, WorkflowInstance, constraint_weight, extend_pattern,
                    pattern_lower_bound, pattern_of, total_weight)
from .oracle import oracle_by_patterns, oracle_by_plans
from .solver import (SolveConfig, SolveReport, global_lower_bound, heuristic_upper_bound,
                     is_satisfiable, reduce_to_wsp, solve)

__version__ = "0.1.0"
