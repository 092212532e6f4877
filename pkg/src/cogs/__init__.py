"""Causally consistent counterfactual paths over rule-based classifiers."""

from ._lexer import ParseError
from .actions import Action, ActionError, ActionSpace, apply_action, candidate_values, enumerate_actions
from .data import DatasetTable, read_csv, train_test_split
from .inference import decision, goal_conditions, is_causally_consistent, is_counterfactual, satisfies
from .learner import LearnParams, classification_metrics, extract_logic, fidelity, learn_rules
from .oracle import bfs_shortest_path, brute_force_counterfactuals, enumerate_space, verify_path
from .planner import (BudgetExhausted, CandidatePath, NoSolution, PlanConfig, Planner, VisitedEntry,
                      drop_inconsistent, enumerate_paths, find_path, intervene, transition)
from .rules import CausalRule, DecisionRule, Literal, Op, RuleSet, parse_ruleset, serialize_ruleset, validate_ruleset
from .schema import (CategoricalDomain, Feature, Mutability, NumericDomain, Schema, State, load_schema,
                     parse_instance, validate_state)

__version__ = "0.1.0"

__all__ = [
    "Action", "ActionError", "ActionSpace", "BudgetExhausted", "CandidatePath", "CategoricalDomain",
    "CausalRule", "DatasetTable", "DecisionRule", "Feature", "LearnParams", "Literal", "Mutability",
    "NoSolution", "NumericDomain", "Op", "ParseError", "PlanConfig", "Planner", "RuleSet", "Schema",
    "State", "VisitedEntry", "apply_action", "bfs_shortest_path", "brute_force_counterfactuals",
    "candidate_values", "classification_metrics", "decision", "drop_inconsistent", "enumerate_actions",
    "enumerate_paths", "enumerate_space", "extract_logic", "fidelity", "find_path", "goal_conditions",
    "intervene", "is_causally_consistent", "is_counterfactual", "learn_rules", "load_schema",
    "parse_instance", "parse_ruleset", "read_csv", "satisfies", "serialize_ruleset", "train_test_split",
    "transition", "validate_ruleset", "validate_state", "verify_path",
]
