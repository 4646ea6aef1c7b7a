"""Exception hierarchy shared across the engine."""


class DrsError(Exception):
    """Base class for all engine errors."""


class ParseError(DrsError):
    """Raised on malformed formula text; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class SymbolConflictError(DrsError):
    """A name is being reused with an incompatible role, sort, or arity."""


class DuplicateEntryError(DrsError):
    """The formula is already active (believed) in the belief set."""


class OpenFormulaError(DrsError):
    """Belief-set entries must be closed formulas."""


class ContradictionInputError(DrsError):
    """The falsum marker cannot be entered as an external input."""


class UnknownEntryError(DrsError):
    """No entry exists with the requested time stamp."""


class AprioriRetractionError(DrsError):
    """Entries created by schema instantiation are held unconditionally."""


class DisbelievedPremiseError(DrsError):
    """Only believed entries may serve as rule premises."""


class RuleMatchError(DrsError):
    """Premises do not fit the rule's template."""


class UnknownRuleError(DrsError):
    """No inference rule with that identifier."""


class UnknownSchemaError(DrsError):
    """No axiom schema with that identifier."""


class SchemaBindingError(DrsError):
    """Schema bindings are missing, ill-typed, or break a side condition."""


class LoopError(DrsError):
    """The proposed link would create a directed cycle."""


class RedundantLinkError(DrsError):
    """The proposed link would duplicate an existing inheritance path."""


class NodeConflictError(DrsError):
    """A node descriptor clashes with an existing node of another kind."""


class NotContradictionError(DrsError):
    """Revision can only be triggered from a falsum entry."""


class InvalidChoiceError(DrsError):
    """A revision chooser returned something other than a non-empty subset
    of the offered culprits."""


class RetractionEligibilityError(DrsError):
    """Entry cannot start a retraction cascade (missing, disbelieved,
    or a priori)."""


class PendingRevisionError(DrsError):
    """The session is parked on an unresolved contradiction; writes are
    rejected until a choice is submitted."""


class JournalError(DrsError):
    """Malformed or out-of-sequence journal record."""


class ScriptError(DrsError):
    """Unparseable script line."""
