"""Append-only derivation path: labeled belief-set entries, axiom schema
instantiation, and the inference rule catalog.

Every entry is an expression-label pair. The label carries a time stamp
(the entry's index, starting at 1), a from-list saying how the entry came
to exist (external source, rule application, or schema instantiation), a
to-list of later entries derived from it, a believed/disbelieved status,
an entrenchment value in [0, 1], and a knowledge category. Entries are
never removed; retraction flips status to disbelieved and the path keeps
the full history.

Rules:

    MP    from P and P -> Q infer Q
    GEN   from P infer (forall x)P
    HS    from P -> Q and Q -> R infer P -> R
    AS    from (forall x)(P -> Q) and P(a/x) infer Q(a/x)
    SUB   from (forall x)(a(x) -> b(x)) and (forall x)(b(x) -> g(x))
          infer (forall x)(a(x) -> g(x))
    CD    from P and ~P infer false (matched modulo occurrence indexes)
    CONF  from (forall x)~(P and Q), P(a/x), and Q(a/x) infer false

Schemas (instantiated with explicit bindings):

    A1  P -> (Q -> P)
    A2  (P -> (Q -> R)) -> ((P -> Q) -> (P -> R))
    A3  (~P -> ~Q) -> (Q -> P)
    Q1  (forall x)P -> P(a/x), a free for x in P
    Q2  (forall x)(P -> Q) -> (P -> (forall x)Q), x not free in P

Schema instantiation may not introduce symbols that are not yet in the
symbol table; only external inputs extend the language.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from . import hierarchy as _hierarchy
from .errors import (
    AprioriRetractionError,
    ContradictionInputError,
    DisbelievedPremiseError,
    DuplicateEntryError,
    OpenFormulaError,
    RuleMatchError,
    SchemaBindingError,
    SymbolConflictError,
    UnknownEntryError,
    UnknownRuleError,
    UnknownSchemaError,
)
from .formulas import (
    FALSUM,
    Atom,
    Constant,
    Falsum,
    ForAll,
    Formula,
    Implies,
    Not,
    PredicateSymbol,
    Term,
    Variable,
    complementary_mod_occurrence,
    free_variables,
    is_closed,
    render_formula,
    strip_occurrences,
    subformulas,
    substitute,
)

BELIEVED = "believed"
DISBELIEVED = "disbelieved"

A_PRIORI = "a-priori"
A_POSTERIORI = "a-posteriori"
ANALYTIC = "analytic"
SYNTHETIC = "synthetic"


# ---------------------------------------------------------------------------
# Labels
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExternalSource:
    code: str = "es"
    info: Optional[str] = None


@dataclass(frozen=True)
class RuleApplication:
    rule: str
    premises: tuple


@dataclass(frozen=True)
class SchemaInstantiation:
    schema: str
    rule: str = "inst"


FromList = Union[ExternalSource, RuleApplication, SchemaInstantiation]


@dataclass
class Label:
    time_stamp: int
    from_list: FromList
    to_list: list = field(default_factory=list)
    status: str = BELIEVED
    entrenchment: float = 0.5
    category: str = A_POSTERIORI


@dataclass
class Entry:
    formula: Formula
    label: Label
    strip_key: str = ""  # canonical text modulo occurrences, cached

    def __post_init__(self) -> None:
        if not self.strip_key:
            self.strip_key = render_formula(strip_occurrences(self.formula))

    @property
    def time_stamp(self) -> int:
        return self.label.time_stamp

    @property
    def believed(self) -> bool:
        return self.label.status == BELIEVED

    def premises(self) -> tuple:
        if isinstance(self.label.from_list, RuleApplication):
            return self.label.from_list.premises
        return ()

    def export(self) -> dict:
        """Stable wire record for this entry."""
        fl = self.label.from_list
        if isinstance(fl, ExternalSource):
            from_rec = {"kind": "external", "source": fl.info or ""}
        elif isinstance(fl, RuleApplication):
            from_rec = {"kind": "rule", "rule": fl.rule,
                        "premises": list(fl.premises)}
        else:
            from_rec = {"kind": "schema", "schema": fl.schema, "rule": fl.rule}
        return {
            "t": self.label.time_stamp,
            "formula": render_formula(self.formula),
            "from": from_rec,
            "to": list(self.label.to_list),
            "status": self.label.status,
            "entrenchment": self.label.entrenchment,
            "category": self.label.category,
        }


# ---------------------------------------------------------------------------
# Symbol table
# ---------------------------------------------------------------------------

class SymbolTable:
    """Extralogical symbols in use, in order of first appearance.

    Grows monotonically. A name may serve as a constant or as a predicate
    but not both, and a predicate keeps one arity and sort for the whole
    session; occurrence indexes are not part of the table.
    """

    def __init__(self) -> None:
        self.constants: list = []
        self.predicates: list = []
        self._constant_set: set = set()
        self._predicate_map: dict = {}

    def has_constant(self, name: str) -> bool:
        return name in self._constant_set

    def predicate(self, name: str) -> Optional[PredicateSymbol]:
        return self._predicate_map.get(name)

    def covers(self, f: Formula) -> bool:
        """True when every extralogical symbol of f is already in use."""
        for sub in subformulas(f):
            if isinstance(sub, Atom):
                known = self._predicate_map.get(sub.predicate.name)
                if known is None or known != sub.predicate.strip_occurrence():
                    return False
                for t in sub.args:
                    if isinstance(t, Constant) and t.name not in self._constant_set:
                        return False
        return True

    def check(self, f: Formula) -> None:
        """Raise SymbolConflictError if f clashes with declared symbols,
        without admitting anything."""
        for sub in subformulas(f):
            if not isinstance(sub, Atom):
                continue
            pred = sub.predicate.strip_occurrence()
            known = self._predicate_map.get(pred.name)
            if known is None:
                if pred.name in self._constant_set:
                    raise SymbolConflictError(
                        f"{pred.name} is already a constant")
            elif known != pred:
                raise SymbolConflictError(
                    f"{pred.name} is already declared as {known.sort} "
                    f"with arity {known.arity}")
            for t in sub.args:
                if (isinstance(t, Constant)
                        and t.name not in self._constant_set
                        and t.name in self._predicate_map):
                    raise SymbolConflictError(
                        f"{t.name} is already a predicate")

    def absorb(self, f: Formula) -> None:
        """Admit all symbols of f, checking for role and sort conflicts."""
        for sub in subformulas(f):
            if not isinstance(sub, Atom):
                continue
            pred = sub.predicate.strip_occurrence()
            known = self._predicate_map.get(pred.name)
            if known is None:
                if pred.name in self._constant_set:
                    raise SymbolConflictError(
                        f"{pred.name} is already a constant")
                self._predicate_map[pred.name] = pred
                self.predicates.append(pred)
            elif known != pred:
                raise SymbolConflictError(
                    f"{pred.name} is already declared as {known.sort} "
                    f"with arity {known.arity}")
            for t in sub.args:
                if isinstance(t, Constant) and t.name not in self._constant_set:
                    if t.name in self._predicate_map:
                        raise SymbolConflictError(
                            f"{t.name} is already a predicate")
                    self._constant_set.add(t.name)
                    self.constants.append(t.name)

    def export(self) -> dict:
        return {
            "constants": list(self.constants),
            "predicates": [
                {"name": p.name, "arity": p.arity, "sort": p.sort}
                for p in self.predicates
            ],
        }


# ---------------------------------------------------------------------------
# Axiom schemas
# ---------------------------------------------------------------------------

def _need(bindings: dict, slot: str, kind: type) -> object:
    try:
        value = bindings[slot]
    except KeyError:
        raise SchemaBindingError(f"missing binding for slot {slot}") from None
    if kind is Formula:
        if not isinstance(value, (Falsum, Atom, Not, Implies, ForAll)):
            raise SchemaBindingError(f"slot {slot} must be a formula")
    elif not isinstance(value, kind):
        raise SchemaBindingError(f"slot {slot} must be {kind.__name__}")
    return value


def _schema_a1(b: dict) -> Formula:
    p = _need(b, "P", Formula)
    q = _need(b, "Q", Formula)
    return Implies(p, Implies(q, p))


def _schema_a2(b: dict) -> Formula:
    p, q, r = (_need(b, s, Formula) for s in ("P", "Q", "R"))
    return Implies(Implies(p, Implies(q, r)),
                   Implies(Implies(p, q), Implies(p, r)))


def _schema_a3(b: dict) -> Formula:
    p = _need(b, "P", Formula)
    q = _need(b, "Q", Formula)
    return Implies(Implies(Not(p), Not(q)), Implies(q, p))


def _schema_q1(b: dict) -> Formula:
    p = _need(b, "P", Formula)
    x = _need(b, "x", str)
    a = b.get("a")
    if not isinstance(a, (Variable, Constant)):
        raise SchemaBindingError("slot a must be a term")
    instantiated = substitute(p, x, a)  # raises on capture
    return Implies(ForAll(x, p), instantiated)


def _schema_q2(b: dict) -> Formula:
    p = _need(b, "P", Formula)
    q = _need(b, "Q", Formula)
    x = _need(b, "x", str)
    if x in free_variables(p):
        raise SchemaBindingError(f"{x} must not be free in the antecedent")
    return Implies(ForAll(x, Implies(p, q)), Implies(p, ForAll(x, q)))


SCHEMAS: dict = {
    "A1": _schema_a1,
    "A2": _schema_a2,
    "A3": _schema_a3,
    "Q1": _schema_q1,
    "Q2": _schema_q2,
}


# ---------------------------------------------------------------------------
# Rule template matching
# ---------------------------------------------------------------------------

def match_substitution(template: Formula, x: str, instance: Formula
                       ) -> Optional[Term]:
    """Find the unique term a with template[a/x] == instance, requiring at
    least one free occurrence of x in the template. Returns None when the
    shapes do not line up."""
    found: list = []

    def walk(t: Formula, i: Formula, shadowed: bool) -> bool:
        if isinstance(t, Atom) and isinstance(i, Atom):
            if t.predicate != i.predicate or len(t.args) != len(i.args):
                return False
            for ta, ia in zip(t.args, i.args):
                if isinstance(ta, Variable) and ta.name == x and not shadowed:
                    found.append(ia)
                elif ta != ia:
                    return False
            return True
        if isinstance(t, Not) and isinstance(i, Not):
            return walk(t.operand, i.operand, shadowed)
        if isinstance(t, Implies) and isinstance(i, Implies):
            return (walk(t.antecedent, i.antecedent, shadowed)
                    and walk(t.consequent, i.consequent, shadowed))
        if isinstance(t, ForAll) and isinstance(i, ForAll):
            if t.variable != i.variable:
                return False
            return walk(t.body, i.body, shadowed or t.variable == x)
        return t == i

    if not walk(template, instance, False):
        return None
    if not found:
        return None
    first = found[0]
    if any(term != first for term in found[1:]):
        return None
    return first


def _unary_universal(f: Formula) -> Optional[tuple]:
    """Destructure (forall x)(a(x) -> b(x)) with unary predicate sides.
    Returns (x, antecedent predicate, consequent predicate) or None."""
    if not (isinstance(f, ForAll) and isinstance(f.body, Implies)):
        return None
    x = f.variable
    left, right = f.body.antecedent, f.body.consequent
    if not (isinstance(left, Atom) and left.args == (Variable(x),)):
        return None
    if not (isinstance(right, Atom) and right.args == (Variable(x),)):
        return None
    return x, left.predicate, right.predicate


def _conclude_mp(premises: list) -> Formula:
    p, impl = premises
    if not isinstance(impl, Implies) or impl.antecedent != p:
        raise RuleMatchError("MP needs P and P -> Q in that order")
    return impl.consequent


def _conclude_hs(premises: list) -> Formula:
    first, second = premises
    if not (isinstance(first, Implies) and isinstance(second, Implies)):
        raise RuleMatchError("HS needs two implications")
    if first.consequent != second.antecedent:
        raise RuleMatchError("HS needs P -> Q and Q -> R with matching Q")
    return Implies(first.antecedent, second.consequent)


def _conclude_as(premises: list) -> Formula:
    universal, instance = premises
    if not (isinstance(universal, ForAll)
            and isinstance(universal.body, Implies)):
        raise RuleMatchError("AS needs (forall x)(P -> Q) as first premise")
    x = universal.variable
    term = match_substitution(universal.body.antecedent, x, instance)
    if term is None:
        raise RuleMatchError(
            "AS second premise does not instantiate the antecedent")
    if not isinstance(term, Constant):
        raise RuleMatchError("AS instantiates with an individual constant")
    return substitute(universal.body.consequent, x, term)


def _conclude_sub(premises: list) -> Formula:
    first = _unary_universal(premises[0])
    second = _unary_universal(premises[1])
    if first is None or second is None:
        raise RuleMatchError("SUB needs two unary universal implications")
    x1, a, b1 = first
    x2, b2, g = second
    if x1 != x2 or b1 != b2:
        raise RuleMatchError("SUB premises do not chain")
    v = Variable(x1)
    return ForAll(x1, Implies(Atom(a, (v,)), Atom(g, (v,))))


def _conclude_cd(premises: list) -> Formula:
    p, q = premises
    if not complementary_mod_occurrence(p, q):
        raise RuleMatchError("CD needs a formula and its negation")
    return FALSUM


def _conclude_conf(premises: list) -> Formula:
    guard, first, second = premises
    # Guard shape: (forall x)~(P and Q), conjunction spelled ~(P -> ~Q),
    # so the body is ~~(P -> ~Q).
    if not isinstance(guard, ForAll):
        raise RuleMatchError("CONF needs a universal exclusion")
    body = guard.body
    if not (isinstance(body, Not) and isinstance(body.operand, Not)
            and isinstance(body.operand.operand, Implies)
            and isinstance(body.operand.operand.consequent, Not)):
        raise RuleMatchError("CONF guard must negate a conjunction")
    inner = body.operand.operand
    p_template = inner.antecedent
    q_template = inner.consequent.operand
    x = guard.variable
    a1 = match_substitution(p_template, x, first)
    a2 = match_substitution(q_template, x, second)
    if a1 is None or a2 is None or a1 != a2:
        raise RuleMatchError("CONF instances do not share one constant")
    return FALSUM


RULES: dict = {
    "MP": (2, _conclude_mp),
    "HS": (2, _conclude_hs),
    "AS": (2, _conclude_as),
    "SUB": (2, _conclude_sub),
    "CD": (2, _conclude_cd),
    "CONF": (3, _conclude_conf),
}


# ---------------------------------------------------------------------------
# Derivation path
# ---------------------------------------------------------------------------

class DerivationPath:
    """The evolving (symbol table, belief set, hierarchy) state.

    Single-writer: callers serialize mutations. Entries are appended only;
    the only in-place changes are to-list growth and status flips.
    """

    def __init__(self) -> None:
        self.entries: list = []
        self.symbols = SymbolTable()
        self.hierarchy = _hierarchy.Hierarchy()
        self.next_time = 1
        # Occurrence-stripped canonical string -> believed time stamps.
        self._believed_keys: dict = {}

    # -- queries ------------------------------------------------------

    def __len__(self) -> int:
        return len(self.entries)

    def entry(self, t: int) -> Entry:
        if not 1 <= t <= len(self.entries):
            raise UnknownEntryError(f"no entry {t}")
        return self.entries[t - 1]

    def has_entry(self, t: int) -> bool:
        return 1 <= t <= len(self.entries)

    def strip_key(self, f: Formula) -> str:
        return render_formula(strip_occurrences(f))

    def believed_matching(self, f: Formula) -> Optional[int]:
        """Time stamp of a believed entry equal to f modulo occurrences."""
        stamps = self._believed_keys.get(self.strip_key(f))
        return stamps[0] if stamps else None

    def believed_formulas(self, form_filter: Optional[str] = None) -> list:
        """Believed (time stamp, formula) pairs in entry order.

        form_filter: None, "atomic-kind", "atomic-property", or "universal".
        Atomic property formulas include their negations.
        """
        out = []
        for e in self.entries:
            if not e.believed:
                continue
            f = e.formula
            if form_filter == "atomic-kind":
                if not (isinstance(f, Atom) and f.predicate.sort == "kind"):
                    continue
            elif form_filter == "atomic-property":
                core = f.operand if isinstance(f, Not) else f
                if not (isinstance(core, Atom)
                        and core.predicate.sort == "property"):
                    continue
            elif form_filter == "universal":
                if not isinstance(f, ForAll):
                    continue
            elif form_filter is not None:
                raise ValueError(f"unknown filter {form_filter!r}")
            out.append((e.time_stamp, f))
        return out

    # -- mutation -----------------------------------------------------

    def _append(self, f: Formula, from_list: FromList, entrenchment: float,
                category: str) -> int:
        t = self.next_time
        entry = Entry(f, Label(t, from_list, [], BELIEVED, entrenchment,
                               category))
        self.entries.append(entry)
        self.next_time += 1
        self._believed_keys.setdefault(entry.strip_key, []).append(t)
        return t

    def enter_extralogical(self, f: Formula, source_info: str = "",
                           entrenchment: float = 0.5) -> int:
        """Enter an external input as an a-posteriori believed entry.

        Rejects the falsum marker, open formulas, formulas already believed
        modulo occurrence, and symbol conflicts.
        """
        if not 0.0 <= entrenchment <= 1.0:
            raise ValueError(f"entrenchment {entrenchment} outside [0, 1]")
        if strip_occurrences(f) == FALSUM:
            raise ContradictionInputError(
                "the contradiction marker cannot be an external input")
        free = free_variables(f)
        if free:
            raise OpenFormulaError(
                f"unbound variable(s): {', '.join(sorted(free))}")
        existing = self.believed_matching(f)
        if existing is not None:
            raise DuplicateEntryError(
                f"already believed as entry {existing}")
        self.symbols.absorb(f)
        return self._append(f, ExternalSource("es", source_info or None),
                            entrenchment, A_POSTERIORI)

    def instantiate_schema(self, schema: str, bindings: dict) -> int:
        """Enter a logical axiom by instantiating a schema.

        The instance is a-priori with entrenchment 1.0. All symbols in the
        bindings must already be in the symbol table; schema instantiation
        never extends the language.
        """
        builder = SCHEMAS.get(schema)
        if builder is None:
            raise UnknownSchemaError(f"unknown schema {schema!r}")
        instance = builder(bindings)
        if not is_closed(instance):
            raise SchemaBindingError("schema instance must be closed")
        if not self.symbols.covers(instance):
            raise SchemaBindingError(
                "schema instantiation cannot introduce new symbols")
        return self._append(instance, SchemaInstantiation(schema), 1.0,
                            A_PRIORI)

    def apply_rule(self, rule: str, premises: Iterable[int],
                   var: str = "x") -> int:
        """Apply an inference rule to believed premises and enter the
        conclusion. Premise to-lists gain the new time stamp; entrenchment
        is the minimum over premises; the category is analytic when every
        premise is a-priori or analytic, synthetic otherwise."""
        stamps = tuple(premises)
        entries = [self.entry(t) for t in stamps]
        for e in entries:
            if not e.believed:
                raise DisbelievedPremiseError(
                    f"entry {e.time_stamp} is disbelieved")
        if rule == "GEN":
            if len(stamps) != 1:
                raise RuleMatchError("GEN takes one premise")
            conclusion: Formula = ForAll(var, entries[0].formula)
        else:
            spec = RULES.get(rule)
            if spec is None:
                raise UnknownRuleError(f"unknown rule {rule!r}")
            arity, conclude = spec
            if len(stamps) != arity:
                raise RuleMatchError(f"{rule} takes {arity} premises")
            conclusion = conclude([e.formula for e in entries])
        entrenchment = min(e.label.entrenchment for e in entries)
        if all(e.label.category in (A_PRIORI, ANALYTIC) for e in entries):
            category = ANALYTIC
        else:
            category = SYNTHETIC
        t = self._append(conclusion, RuleApplication(rule, stamps),
                         entrenchment, category)
        for e in entries:
            if t not in e.label.to_list:
                e.label.to_list.append(t)
        return t

    def set_status(self, t: int, status: str) -> None:
        """Flip an entry's believed/disbelieved status in place.

        A-priori entries are held unconditionally and cannot be retracted.
        Idempotent on repeated application."""
        if status not in (BELIEVED, DISBELIEVED):
            raise ValueError(f"unknown status {status!r}")
        e = self.entry(t)
        if e.label.category == A_PRIORI and status == DISBELIEVED:
            raise AprioriRetractionError(
                f"entry {t} is a-priori and cannot be disbelieved")
        if e.label.status == status:
            return
        key = e.strip_key
        if status == DISBELIEVED:
            stamps = self._believed_keys.get(key, [])
            if t in stamps:
                stamps.remove(t)
                if not stamps:
                    del self._believed_keys[key]
        else:
            self._believed_keys.setdefault(key, []).append(t)
            self._believed_keys[key].sort()
        e.label.status = status

    # -- integrity ----------------------------------------------------

    def validate(self) -> None:
        """Check global invariants; raises AssertionError on violation.

        Covers from/to duality, dense increasing time stamps, premise
        ordering, a-priori permanence, and category soundness against an
        independent ancestry recomputation."""
        for i, e in enumerate(self.entries, start=1):
            assert e.time_stamp == i, "time stamps must be dense from 1"
            for p in e.premises():
                assert p < i, "premises must precede the entry"
                assert i in self.entry(p).label.to_list, "missing to-list edge"
            for d in e.label.to_list:
                assert d > i, "to-list must point forward"
                assert i in self.entry(d).premises(), "stray to-list edge"
            if e.label.category == A_PRIORI:
                assert e.label.status == BELIEVED
                assert e.label.entrenchment == 1.0
        assert self.next_time == len(self.entries) + 1

        # Category soundness: walk from-lists down to leaves.
        def leaf_categories(t: int, seen: set) -> set:
            if t in seen:
                return set()
            seen.add(t)
            entry = self.entry(t)
            ps = entry.premises()
            if not ps:
                return {entry.label.category}
            out: set = set()
            for p in ps:
                out |= leaf_categories(p, seen)
            return out

        for e in self.entries:
            if not isinstance(e.label.from_list, RuleApplication):
                continue
            leaves = leaf_categories(e.time_stamp, set())
            expected = ANALYTIC if leaves <= {A_PRIORI} else SYNTHETIC
            assert e.label.category == expected, (
                f"entry {e.time_stamp} category {e.label.category}, "
                f"ancestry says {expected}")

    # -- export -------------------------------------------------------

    def export_entries(self) -> list:
        return [e.export() for e in self.entries]


def init_path() -> DerivationPath:
    """A fresh path: no entries, no extralogical symbols, empty hierarchy."""
    return DerivationPath()
