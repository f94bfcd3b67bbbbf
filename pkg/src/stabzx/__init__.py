"""Exact, verified graph rewriting for the stabilizer ZX-calculus."""

from .exact import ExactAmplitude, PrecisionError
from .diagram import (
    ArityMismatch,
    Diagram,
    DiagramError,
    DiagramFormatError,
    H,
    X,
    Z,
    compose,
    empty,
    identity,
    isomorphic,
    parse_diagram,
    serialize_diagram,
    tensor,
    to_dot,
)
from .semantics import FLAT, STANDARD, ContractionCapExceeded, InterpretationKind, Tensor, interpret, tensors_equal
from .rules import RULE_SETS, UnknownRuleSet, apply, find_matches, get_rule, instantiate, rule_registry
from .verifier import (
    Derivation,
    GoalMismatch,
    SemanticsChanged,
    StepInapplicable,
    lemma_suite,
    necessity_report,
    replay,
    structural_audits,
    sweep_soundness,
)

__version__ = "0.1.0"

__all__ = [
    "ExactAmplitude",
    "PrecisionError",
    "ArityMismatch",
    "Diagram",
    "DiagramError",
    "DiagramFormatError",
    "H",
    "X",
    "Z",
    "compose",
    "empty",
    "identity",
    "isomorphic",
    "parse_diagram",
    "serialize_diagram",
    "tensor",
    "to_dot",
    "FLAT",
    "STANDARD",
    "ContractionCapExceeded",
    "InterpretationKind",
    "Tensor",
    "interpret",
    "tensors_equal",
    "RULE_SETS",
    "UnknownRuleSet",
    "apply",
    "find_matches",
    "get_rule",
    "instantiate",
    "rule_registry",
    "Derivation",
    "GoalMismatch",
    "SemanticsChanged",
    "StepInapplicable",
    "lemma_suite",
    "necessity_report",
    "replay",
    "structural_audits",
    "sweep_soundness",
]
