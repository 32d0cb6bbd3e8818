"""Translations between first-order logic, the calculus of relations and
the three-variable fragment, with a finite-model checker to test them."""

from .cor import parse_cor, parse_qf, parse_term, print_cor, size_qf, size_term
from .errors import BudgetExceeded, EvaluationError, ParseError, RelcalcError, TranslationError
from .fo import parse_fo, print_fo, size_fo
from .semantics import check_valid_upto, eval_fo, eval_term, holds_fo, holds_qf
from .structures import Structure, k_tuple_structure

__all__ = [
    "BudgetExceeded",
    "EvaluationError",
    "ParseError",
    "RelcalcError",
    "Structure",
    "TranslationError",
    "check_valid_upto",
    "eval_fo",
    "eval_term",
    "holds_fo",
    "holds_qf",
    "k_tuple_structure",
    "parse_cor",
    "parse_fo",
    "parse_qf",
    "parse_term",
    "print_cor",
    "print_fo",
    "size_fo",
    "size_qf",
    "size_term",
]
