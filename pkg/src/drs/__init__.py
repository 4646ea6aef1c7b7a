"""Dynamic reasoning engine with a time-stamped belief set, dialectical
belief revision, and a multiple-inheritance controller."""

from .beliefs import DerivationPath, Entry, Label, SymbolTable, init_path
from .controller import (
    ConsistencyResult,
    Controller,
    EventOutcome,
    UserInput,
    classify_input,
)
from .formulas import (
    Atom,
    Constant,
    Falsum,
    ForAll,
    Implies,
    Not,
    PredicateSymbol,
    Variable,
    complementary_mod_occurrence,
    conjunction,
    equal_mod_occurrence,
    parse_formula,
    render_formula,
    substitute,
)
from .hierarchy import Hierarchy
from .revision import (
    Automated,
    Interactive,
    RevisionReport,
    collect_culprits,
    dialectical_revision,
    forward_retract,
)
from .session import Journal, JournalRecord, Session

__version__ = "0.1.0"

__all__ = [
    "Atom", "Automated", "ConsistencyResult", "Constant", "Controller",
    "DerivationPath", "Entry", "EventOutcome", "Falsum", "ForAll",
    "Hierarchy", "Implies", "Interactive", "Journal", "JournalRecord",
    "Label", "Not", "PredicateSymbol", "RevisionReport", "Session",
    "SymbolTable", "UserInput", "Variable", "classify_input",
    "collect_culprits", "complementary_mod_occurrence", "conjunction",
    "dialectical_revision", "equal_mod_occurrence", "forward_retract",
    "init_path", "parse_formula", "render_formula", "substitute",
]
