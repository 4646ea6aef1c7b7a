"""The inheritance controller: accepts user inputs, keeps the hierarchy
and the belief set in step, derives all salient object classifications
and properties, and resolves contradictions.

Accepted input shapes (anything else is rejected as malformed):

    (i)    K^k(a)                          object classification
    (ii)   (forall x)(A^k(x) -> B^k(x))    subkind rule
    (iii)  (forall x)(A^k(x) -> P^p(x))    positive property rule
    (iv)   (forall x)(A^k(x) -> ~P^p(x))   negative property rule

Universal inputs are normalized to the bound variable x, and property
rules get a fresh occurrence index from the hierarchy (an index supplied
by the user is ignored). An input equal, modulo occurrence indexes, to a
believed entry is rejected as a duplicate. Hierarchy edits reject loops
and redundant links with machine-readable reasons.

After the input is entered, the salient closure runs to a fixpoint:
every believed classification is chained upward through believed subkind
rules, every object receives the properties that survive the specificity
filter (a blocked or no-longer-applicable property atom is retracted
first, so refinements never bounce through a contradiction), and any
complementary pair triggers contradiction detection followed by
revision. With a deferred interactive chooser the controller parks on
the pending choice instead; reads stay available and writes are refused
until the choice arrives.

After a revision the hierarchy drops the links whose defining entries
were retracted, and believed link-type entries whose links had earlier
been absorbed as shortcuts are re-added when they are no longer implied,
so the graph always mirrors the believed link formulas.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from . import hierarchy as hi
from .beliefs import DerivationPath, init_path
from .errors import (
    DrsError,
    InvalidChoiceError,
    LoopError,
    ParseError,
    PendingRevisionError,
    RedundantLinkError,
    SymbolConflictError,
)
from .formulas import (
    KIND,
    PROPERTY,
    Atom,
    Constant,
    ForAll,
    Formula,
    Implies,
    Not,
    PredicateSymbol,
    Variable,
    parse_formula,
    render_formula,
)
from .revision import (
    Automated,
    FixedChoice,
    RevisionReport,
    collect_culprits,
    dialectical_revision,
    forward_retract,
)

REJECT_DUPLICATE = "duplicate"
REJECT_MALFORMED = "malformed"
REJECT_LOOP = "loop"
REJECT_REDUNDANT = "redundant"


@dataclass(frozen=True)
class UserInput:
    formula: Union[str, Formula]
    source_info: str = "user"


@dataclass
class EventOutcome:
    accepted: bool
    reject_reason: Optional[str] = None
    reject_detail: Optional[str] = None
    new_entries: list = field(default_factory=list)
    removed_links: list = field(default_factory=list)
    revision: Optional[RevisionReport] = None
    pending_choice: Optional[tuple] = None

    def export(self) -> dict:
        rec: dict = {
            "accepted": self.accepted,
            "new_entries": list(self.new_entries),
            "removed_links": [l.export() for l in self.removed_links],
        }
        if self.reject_reason:
            rec["reject_reason"] = self.reject_reason
            rec["reject_detail"] = self.reject_detail or ""
        if self.revision is not None:
            rec["revision"] = self.revision.export()
        if self.pending_choice is not None:
            rec["pending_choice"] = list(self.pending_choice)
        return rec


@dataclass(frozen=True)
class PendingRevision:
    trigger: int
    culprits: tuple


@dataclass(frozen=True)
class ConsistencyResult:
    consistent: bool
    witness: Optional[tuple] = None

    def export(self) -> dict:
        return {"consistent": self.consistent,
                "witness": list(self.witness) if self.witness else None}


# ---------------------------------------------------------------------------
# Input classification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClassifiedInput:
    form: str  # "object" | "subkind" | "property"
    constant: Optional[str] = None
    kind: Optional[str] = None       # the antecedent kind
    target: Optional[str] = None     # consequent kind or property name
    sign: Optional[str] = None       # property forms only


def classify_input(f: Formula) -> Optional[ClassifiedInput]:
    """Match a formula against the four accepted input shapes."""
    if isinstance(f, Atom):
        if (f.predicate.sort == KIND and len(f.args) == 1
                and isinstance(f.args[0], Constant)):
            return ClassifiedInput("object", constant=f.args[0].name,
                                   kind=f.predicate.name)
        return None
    if not (isinstance(f, ForAll) and isinstance(f.body, Implies)):
        return None
    x = f.variable
    ante, cons = f.body.antecedent, f.body.consequent
    if not (isinstance(ante, Atom) and ante.predicate.sort == KIND
            and ante.args == (Variable(x),)):
        return None
    sign = hi.POSITIVE
    if isinstance(cons, Not):
        cons = cons.operand
        sign = hi.NEGATIVE
    if not (isinstance(cons, Atom) and cons.args == (Variable(x),)):
        return None
    if cons.predicate.sort == KIND and sign == hi.POSITIVE:
        return ClassifiedInput("subkind", kind=ante.predicate.name,
                               target=cons.predicate.name)
    if cons.predicate.sort == PROPERTY:
        return ClassifiedInput("property", kind=ante.predicate.name,
                               target=cons.predicate.name, sign=sign)
    return None


def _kind_atom(name: str, constant: str) -> Atom:
    return Atom(PredicateSymbol(name, 1, KIND), (Constant(constant),))


def _subkind_rule(sub: str, sup: str) -> ForAll:
    x = Variable("x")
    return ForAll("x", Implies(Atom(PredicateSymbol(sub, 1, KIND), (x,)),
                               Atom(PredicateSymbol(sup, 1, KIND), (x,))))


def _property_rule(kind: str, prop: str, sign: str,
                   occurrence: Optional[int]) -> ForAll:
    x = Variable("x")
    head: Formula = Atom(PredicateSymbol(prop, 1, PROPERTY, occurrence), (x,))
    if sign == hi.NEGATIVE:
        head = Not(head)
    return ForAll("x", Implies(Atom(PredicateSymbol(kind, 1, KIND), (x,)),
                               head))


def _property_atom(prop: str, occurrence: int, sign: str,
                   constant: str) -> Formula:
    atom = Atom(PredicateSymbol(prop, 1, PROPERTY, occurrence),
                (Constant(constant),))
    return Not(atom) if sign == hi.NEGATIVE else atom


def _canonical_input(info: ClassifiedInput) -> Formula:
    """The normalized formula for an input (bound variable x, property
    occurrence left for the hierarchy to assign)."""
    if info.form == "object":
        return _kind_atom(info.kind, info.constant)
    if info.form == "subkind":
        return _subkind_rule(info.kind, info.target)
    return _property_rule(info.kind, info.target, info.sign, None)


def _is_atomic_belief(f: Formula) -> bool:
    core = f.operand if isinstance(f, Not) else f
    return isinstance(core, Atom)


# ---------------------------------------------------------------------------
# Controller
# ---------------------------------------------------------------------------

class Controller:
    """One controller drives one derivation path, one input at a time."""

    def __init__(self, path: Optional[DerivationPath] = None, policy=None):
        self.path = path if path is not None else init_path()
        self.policy = policy if policy is not None else Automated()
        self.pending: Optional[PendingRevision] = None
        self._event_entries: list = []
        self._event_removed: list = []
        self._event_revision: Optional[RevisionReport] = None

    # -- bookkeeping ----------------------------------------------------

    @property
    def hierarchy(self) -> hi.Hierarchy:
        return self.path.hierarchy

    def _record_entry(self, t: int) -> int:
        self._event_entries.append(t)
        return t

    def _believed_exact(self, f: Formula) -> Optional[int]:
        t = self.path.believed_matching(f)
        if t is not None and self.path.entry(t).formula == f:
            return t
        return None

    # -- input handling ---------------------------------------------------

    def handle_input(self, formula: Union[str, Formula, UserInput],
                     source_info: str = "user") -> EventOutcome:
        """Validate, enter, and propagate one user input to quiescence.

        Returns an EventOutcome; rejection reasons are duplicate,
        malformed, loop, or redundant. Raises PendingRevisionError when a
        previous input is still parked on an unresolved contradiction."""
        if isinstance(formula, UserInput):
            source_info = formula.source_info
            formula = formula.formula
        if self.pending is not None:
            raise PendingRevisionError(
                "session is waiting on a retraction choice")
        self._event_entries = []
        self._event_removed = []
        self._event_revision = None

        if isinstance(formula, str):
            try:
                formula = parse_formula(formula)
            except ParseError as exc:
                return EventOutcome(False, REJECT_MALFORMED, str(exc))
        info = classify_input(formula)
        if info is None:
            return EventOutcome(
                False, REJECT_MALFORMED,
                f"not an accepted input shape: {render_formula(formula)}")
        canonical = _canonical_input(info)
        existing = self.path.believed_matching(canonical)
        if existing is not None:
            return EventOutcome(
                False, REJECT_DUPLICATE,
                f"already believed as entry {existing}")
        try:
            self.path.symbols.check(canonical)
        except SymbolConflictError as exc:
            return EventOutcome(False, REJECT_MALFORMED, str(exc))

        h = self.hierarchy
        try:
            if info.form == "object":
                src = h.ensure_node(hi.ObjectSpec(info.constant))
                dst = h.ensure_node(hi.KindSpec(info.kind))
                removed = h.add_link(src, dst, hi.OBJECT_KIND)
                entered = canonical
            elif info.form == "subkind":
                src = h.ensure_node(hi.KindSpec(info.kind))
                dst = h.ensure_node(hi.KindSpec(info.target))
                removed = h.add_link(src, dst, hi.SUBKIND_KIND)
                entered = canonical
            else:
                src = h.ensure_node(hi.KindSpec(info.kind))
                dst = h.ensure_node(hi.PropertySpec(info.target, info.sign))
                removed = h.add_link(src, dst, hi.HAS_PROPERTY)
                entered = _property_rule(info.kind, info.target, info.sign,
                                         h.node(dst).occurrence)
        except LoopError as exc:
            return EventOutcome(False, REJECT_LOOP, str(exc))
        except RedundantLinkError as exc:
            return EventOutcome(False, REJECT_REDUNDANT, str(exc))
        self._event_removed.extend(removed)

        t = self.path.enter_extralogical(entered, source_info, 0.5)
        self._record_entry(t)
        self.salient_closure()
        return self._finish_outcome()

    def _finish_outcome(self) -> EventOutcome:
        outcome = EventOutcome(
            True,
            new_entries=list(self._event_entries),
            removed_links=list(self._event_removed),
            revision=self._event_revision,
        )
        if self.pending is not None:
            outcome.pending_choice = self.pending.culprits
        return outcome

    # -- propagation -------------------------------------------------------

    def propagate_object(self, t: int) -> list:
        """Chain a believed classification upward through believed subkind
        rules, entering any missing classifications. Recurses on each new
        entry and returns the new time stamps in derivation order."""
        entry = self.path.entry(t)
        if not entry.believed or not isinstance(entry.formula, Atom):
            return []
        pred = entry.formula.predicate
        if pred.sort != KIND:
            return []
        constant = entry.formula.args[0].name
        new: list = []
        for ut, uf in self.path.believed_formulas("universal"):
            rule = classify_input(uf)
            if rule is None or rule.form != "subkind" or rule.kind != pred.name:
                continue
            conclusion = _kind_atom(rule.target, constant)
            if self.path.believed_matching(conclusion) is not None:
                continue
            nt = self.path.apply_rule("AS", [ut, t])
            self._record_entry(nt)
            new.append(nt)
            new.extend(self.propagate_object(nt))
        return new

    def propagate_properties(self, constant: str) -> list:
        """Bring one object's property atoms in line with the specificity
        filter: retract believed property atoms whose occurrence is
        blocked or no longer applicable, then enter the surviving
        properties. Returns the new time stamps."""
        h = self.hierarchy
        obj_id = f"obj_{constant}"
        if obj_id not in h.nodes:
            return []
        applicable = h.applicable_properties(obj_id)
        applicable_ids = {node.id for node, _ in applicable}

        for t, f in list(self.path.believed_formulas("atomic-property")):
            if not self.path.entry(t).believed:
                continue  # fell in an earlier cascade of this pass
            core = f.operand if isinstance(f, Not) else f
            if core.args != (Constant(constant),):
                continue
            occ = core.predicate.occurrence
            node_id = f"prop_{core.predicate.name}_{occ}"
            if occ is None or node_id not in applicable_ids:
                cascade = forward_retract(self.path, [t])
                self._after_retraction(cascade)

        new: list = []
        for node, sign in applicable:
            target = _property_atom(node.name, node.occurrence, sign, constant)
            if self.path.believed_matching(target) is not None:
                continue
            kind_id = h.kind_of_property(node.id)
            link = next(l for l in h.links
                        if l.link_type == hi.HAS_PROPERTY and l.dst == node.id)
            rule_ts = self._believed_exact(h.link_formula(link))
            minor = _kind_atom(h.node(kind_id).name, constant)
            minor_ts = self._believed_exact(minor)
            if rule_ts is None or minor_ts is None:
                continue
            nt = self.path.apply_rule("AS", [rule_ts, minor_ts])
            self._record_entry(nt)
            new.append(nt)
        return new

    # -- contradiction handling ---------------------------------------------

    def _find_complementary_pair(self) -> Optional[tuple]:
        atoms = [(e.time_stamp, e.strip_key) for e in self.path.entries
                 if e.believed and _is_atomic_belief(e.formula)]
        for i, (t1, s1) in enumerate(atoms):
            for t2, s2 in atoms[i + 1:]:
                if s1 == f"~{s2}" or s2 == f"~{s1}":
                    return t1, t2
        return None

    def detect_and_resolve(self, policy=None) -> Optional[RevisionReport]:
        """Detect complementary believed atom pairs, enter the
        contradiction marker for each, and revise. With a deferred
        chooser the controller parks on the first contradiction and
        returns; otherwise it loops until no pair remains and returns the
        last revision report."""
        policy = policy if policy is not None else self.policy
        report: Optional[RevisionReport] = None
        while True:
            pair = self._find_complementary_pair()
            if pair is None:
                return report
            bot = self.path.apply_rule("CD", list(pair))
            self._record_entry(bot)
            if getattr(policy, "deferred", False):
                culprits = tuple(
                    t for t in sorted(collect_culprits(self.path, bot))
                    if self.path.entry(t).believed)
                self.pending = PendingRevision(bot, culprits)
                return report
            rep = dialectical_revision(self.path, bot, policy)
            self._after_revision(rep)
            report = rep
            self._event_revision = rep

    def _after_retraction(self, cascade: list) -> None:
        """Drop hierarchy links whose defining entries were retracted."""
        for t in cascade:
            f = self.path.entry(t).formula
            link = self.hierarchy.find_link_by_formula(f)
            if link is not None:
                self.hierarchy.remove_link(link)
                self._event_removed.append(link)
        self._repair_links()

    def _after_revision(self, report: RevisionReport) -> None:
        self._after_retraction(list(report.cascade))

    def _repair_links(self) -> None:
        """Re-add links for believed link-type entries that lost their
        graph edge to shortcut removal and are no longer implied.

        Keeps the hierarchy equal to the reduced form of the believed
        link formulas after revisions shrink reachability."""
        h = self.hierarchy
        changed = True
        while changed:
            changed = False
            for t, f in self.path.believed_formulas():
                info = classify_input(f)
                if info is None or info.form == "property":
                    continue
                if h.find_link_by_formula(f) is not None:
                    continue
                if info.form == "object":
                    src = f"obj_{info.constant}"
                    dst = f"kind_{info.kind}"
                    link_type = hi.OBJECT_KIND
                else:
                    src = f"kind_{info.kind}"
                    dst = f"kind_{info.target}"
                    link_type = hi.SUBKIND_KIND
                if src not in h.nodes or dst not in h.nodes:
                    continue
                try:
                    removed = h.add_link(src, dst, link_type)
                except (LoopError, RedundantLinkError):
                    continue
                self._event_removed.extend(removed)
                changed = True

    # -- closure --------------------------------------------------------------

    def _state_fingerprint(self) -> tuple:
        disbelieved = sum(1 for e in self.path.entries if not e.believed)
        return (len(self.path.entries), disbelieved, len(self.hierarchy.links))

    def salient_closure(self, policy=None) -> None:
        """Propagate classifications and properties and resolve
        contradictions until nothing changes. Parks (returns early) when
        a deferred chooser hits a contradiction."""
        policy = policy if policy is not None else self.policy
        passes = 0
        while True:
            passes += 1
            kinds = sum(1 for n in self.hierarchy.nodes.values()
                        if n.kind == "kind")
            objects = [n for n in
                       sorted(self.hierarchy.nodes.values(),
                              key=lambda n: n.created_at)
                       if n.kind == "object"]
            props = sum(1 for n in self.hierarchy.nodes.values()
                        if n.kind == "property")
            limit = len(self.path.entries) + kinds * max(1, len(objects)) \
                * max(1, props) + 8
            if passes > limit:
                raise DrsError("salient closure failed to quiesce")
            before = self._state_fingerprint()
            for t, _ in list(self.path.believed_formulas("atomic-kind")):
                if self.path.entry(t).believed:
                    self.propagate_object(t)
            for node in objects:
                self.propagate_properties(node.name)
            self.detect_and_resolve(policy)
            if self.pending is not None:
                return
            if self._state_fingerprint() == before:
                return

    # -- pending resolution ----------------------------------------------------

    def check_choice(self, chosen) -> None:
        """Validate a pending-choice selection without applying it."""
        if self.pending is None:
            raise PendingRevisionError("no pending revision to resolve")
        chosen = set(chosen)
        offered = set(self.pending.culprits)
        if not chosen or not chosen <= offered:
            raise InvalidChoiceError(
                f"selection {sorted(chosen)} is not a non-empty subset of "
                f"the offered culprits {sorted(offered)}")

    def resolve_pending(self, chosen) -> RevisionReport:
        """Apply a retraction choice for the parked contradiction, then
        run the closure onward (which may park again)."""
        self.check_choice(chosen)
        pending = self.pending
        self.pending = None
        self._event_revision = None
        report = dialectical_revision(self.path, pending.trigger,
                                      FixedChoice(chosen))
        self._after_revision(report)
        self._event_revision = report
        self.salient_closure()
        return report

    def pending_culprit_view(self) -> list:
        """Culprit rows for the parked revision, for choosers and UIs."""
        if self.pending is None:
            return []
        rows = []
        for t in self.pending.culprits:
            e = self.path.entry(t)
            rows.append({"t": t, "formula": render_formula(e.formula),
                         "entrenchment": e.label.entrenchment})
        return rows

    # -- consistency -------------------------------------------------------------

    def consistency_scan(self) -> ConsistencyResult:
        """Consistent when no contradiction marker is believed and no two
        believed atoms are complementary modulo occurrences."""
        pair = self._find_complementary_pair()
        if pair is not None:
            return ConsistencyResult(False, pair)
        for e in self.path.entries:
            if e.believed and e.strip_key == "false":
                premises = e.premises()
                witness = (tuple(premises[:2]) if len(premises) >= 2
                           else (e.time_stamp, e.time_stamp))
                return ConsistencyResult(False, witness)
        return ConsistencyResult(True)
