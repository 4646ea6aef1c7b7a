"""First-order formula language: terms, sorted predicates, AST, parser,
and canonical printer.

Concrete syntax (LL(1)):

    formula  := quant | impl
    quant    := "(" "forall" IDENT ")" formula
    impl     := unary ("->" formula)?           # right-associative
    unary    := "~" unary | "false" | atom | "(" formula ")"
    atom     := IDENT sort? occ? "(" termlist ")"
    sort     := "^k" | "^p"
    occ      := "#" NAT                         # property occurrence index
    termlist := IDENT ("," IDENT)*

`false` is the falsum marker. `^k` tags a kind predicate, `^p` a property
predicate; untagged predicates are plain. `#n` distinguishes separate
attachments of the same property symbol; occurrences are syntactic only
and are erased by the `*_mod_occurrence` comparisons. A term identifier
denotes a variable exactly when it is bound by an enclosing `forall`,
otherwise it denotes a constant.

The canonical rendering is fully parenthesized: implications print as
"(P -> Q)", quantifiers as "(forall x)" followed by the rendered body,
and negation binds tightly with no space. A quantifier whose body is an
unparenthesized implication absorbs the arrow ("(forall x)P(x) -> Q(a)"
quantifies the whole implication), so the renderer wraps a quantified
formula in parens when it stands as a negation operand or implication
antecedent. `parse` and `render` are mutually inverse on canonical text
and on all well-formed ASTs.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, replace
from typing import Iterator, Optional, Union

from .errors import ParseError

PLAIN = "plain"
KIND = "kind"
PROPERTY = "property"

_SORT_TAGS = {KIND: "^k", PROPERTY: "^p", PLAIN: ""}
_KEYWORDS = {"forall", "false"}


# ---------------------------------------------------------------------------
# Terms and predicate symbols
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Variable:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Constant:
    name: str

    def __str__(self) -> str:
        return self.name


Term = Union[Variable, Constant]


@dataclass(frozen=True)
class PredicateSymbol:
    """A predicate name with arity, sort, and optional occurrence index.

    Kind and property symbols are unary. An occurrence index is allowed
    only on property symbols and must be >= 1 when present.
    """

    name: str
    arity: int
    sort: str = PLAIN
    occurrence: Optional[int] = None

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("predicate name must be non-empty")
        if self.sort not in (PLAIN, KIND, PROPERTY):
            raise ValueError(f"unknown sort {self.sort!r}")
        if self.sort in (KIND, PROPERTY) and self.arity != 1:
            raise ValueError(f"{self.sort} predicates are unary")
        if self.occurrence is not None:
            if self.sort != PROPERTY:
                raise ValueError("occurrence index requires a property symbol")
            if self.occurrence < 1:
                raise ValueError("occurrence index must be >= 1")

    def strip_occurrence(self) -> "PredicateSymbol":
        if self.occurrence is None:
            return self
        return replace(self, occurrence=None)


# ---------------------------------------------------------------------------
# Formula AST
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Falsum:
    pass


@dataclass(frozen=True)
class Atom:
    predicate: PredicateSymbol
    args: tuple

    def __post_init__(self) -> None:
        if len(self.args) != self.predicate.arity:
            raise ValueError(
                f"{self.predicate.name} expects {self.predicate.arity} "
                f"argument(s), got {len(self.args)}")


@dataclass(frozen=True)
class Not:
    operand: "Formula"


@dataclass(frozen=True)
class Implies:
    antecedent: "Formula"
    consequent: "Formula"


@dataclass(frozen=True)
class ForAll:
    variable: str
    body: "Formula"


Formula = Union[Falsum, Atom, Not, Implies, ForAll]

FALSUM = Falsum()


def conjunction(p: Formula, q: Formula) -> Formula:
    """P and Q, expressed through the primitive connectives as ~(P -> ~Q)."""
    return Not(Implies(p, Not(q)))


# ---------------------------------------------------------------------------
# Structural queries
# ---------------------------------------------------------------------------

def subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    if isinstance(f, Not):
        yield from subformulas(f.operand)
    elif isinstance(f, Implies):
        yield from subformulas(f.antecedent)
        yield from subformulas(f.consequent)
    elif isinstance(f, ForAll):
        yield from subformulas(f.body)


def free_variables(f: Formula, bound: frozenset = frozenset()) -> set:
    if isinstance(f, Atom):
        return {t.name for t in f.args
                if isinstance(t, Variable) and t.name not in bound}
    if isinstance(f, Not):
        return free_variables(f.operand, bound)
    if isinstance(f, Implies):
        return (free_variables(f.antecedent, bound)
                | free_variables(f.consequent, bound))
    if isinstance(f, ForAll):
        return free_variables(f.body, bound | {f.variable})
    return set()


def is_closed(f: Formula) -> bool:
    return not free_variables(f)


def substitute(f: Formula, x: str, a: Term) -> Formula:
    """Replace every free occurrence of variable x in f with term a.

    When a is a variable it must be free for x in f; a substitution that
    would capture a raises ValueError.
    """
    if isinstance(f, Atom):
        new_args = tuple(
            a if isinstance(t, Variable) and t.name == x else t
            for t in f.args)
        return Atom(f.predicate, new_args) if new_args != f.args else f
    if isinstance(f, Not):
        return Not(substitute(f.operand, x, a))
    if isinstance(f, Implies):
        return Implies(substitute(f.antecedent, x, a),
                       substitute(f.consequent, x, a))
    if isinstance(f, ForAll):
        if f.variable == x:
            return f
        if (isinstance(a, Variable) and a.name == f.variable
                and x in free_variables(f.body, frozenset({f.variable}))):
            raise ValueError(
                f"substituting {a.name} for {x} would capture it under "
                f"(forall {f.variable})")
        return ForAll(f.variable, substitute(f.body, x, a))
    return f


def strip_occurrences(f: Formula) -> Formula:
    """Erase every property occurrence index in f."""
    if isinstance(f, Atom):
        stripped = f.predicate.strip_occurrence()
        return f if stripped is f.predicate else Atom(stripped, f.args)
    if isinstance(f, Not):
        inner = strip_occurrences(f.operand)
        return f if inner is f.operand else Not(inner)
    if isinstance(f, Implies):
        left = strip_occurrences(f.antecedent)
        right = strip_occurrences(f.consequent)
        if left is f.antecedent and right is f.consequent:
            return f
        return Implies(left, right)
    if isinstance(f, ForAll):
        inner = strip_occurrences(f.body)
        return f if inner is f.body else ForAll(f.variable, inner)
    return f


def equal_mod_occurrence(p: Formula, q: Formula) -> bool:
    """Structural equality after erasing occurrence indexes.

    Occurrences of the same property symbol denote the same predicate, so
    this is the equality used for duplicate detection.
    """
    return strip_occurrences(p) == strip_occurrences(q)


def complementary_mod_occurrence(p: Formula, q: Formula) -> bool:
    """True when one formula is the single negation of the other, ignoring
    occurrence indexes. This is the shape contradiction detection fires on."""
    ps, qs = strip_occurrences(p), strip_occurrences(q)
    return qs == Not(ps) or ps == Not(qs)


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

def render_term(t: Term) -> str:
    return t.name


def _render_tight(f: Formula) -> str:
    # In operand position a bare quantifier would capture a following
    # arrow, so it gets an extra pair of parens there.
    if isinstance(f, ForAll):
        return f"({render_formula(f)})"
    return render_formula(f)


def render_formula(f: Formula) -> str:
    """Canonical, fully parenthesized text for f."""
    if isinstance(f, Falsum):
        return "false"
    if isinstance(f, Atom):
        p = f.predicate
        occ = f"#{p.occurrence}" if p.occurrence is not None else ""
        args = ",".join(render_term(t) for t in f.args)
        return f"{p.name}{_SORT_TAGS[p.sort]}{occ}({args})"
    if isinstance(f, Not):
        return f"~{_render_tight(f.operand)}"
    if isinstance(f, Implies):
        return f"({_render_tight(f.antecedent)} -> {render_formula(f.consequent)})"
    if isinstance(f, ForAll):
        return f"(forall {f.variable}){render_formula(f.body)}"
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<arrow>->)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<nat>[0-9]+)
  | (?P<punct>[()~,^#])
""", re.VERBOSE)


@dataclass(frozen=True)
class _Token:
    text: str
    pos: int


def _tokenize(text: str) -> list:
    tokens = []
    i = 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        if m is None:
            raise ParseError(f"unexpected character {text[i]!r}", i)
        if m.lastgroup != "ws":
            tokens.append(_Token(m.group(), i))
        i = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> Optional[str]:
        if self.pos < len(self.tokens):
            return self.tokens[self.pos].text
        return None

    def here(self) -> int:
        if self.pos < len(self.tokens):
            return self.tokens[self.pos].pos
        return len(self.text)

    def take(self, expected: Optional[str] = None) -> str:
        tok = self.peek()
        if tok is None:
            raise ParseError(
                f"unexpected end of input"
                + (f", expected {expected!r}" if expected else ""),
                len(self.text))
        if expected is not None and tok != expected:
            raise ParseError(f"expected {expected!r}, found {tok!r}", self.here())
        self.pos += 1
        return tok

    def take_ident(self, what: str) -> str:
        tok = self.peek()
        if tok is None or not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", tok) \
                or tok in _KEYWORDS:
            raise ParseError(f"expected {what}, found {tok!r}", self.here())
        self.pos += 1
        return tok

    def parse(self) -> Formula:
        f = self.formula(frozenset())
        if self.peek() is not None:
            raise ParseError(f"trailing input {self.peek()!r}", self.here())
        return f

    def formula(self, bound: frozenset) -> Formula:
        if (self.peek() == "(" and self.pos + 1 < len(self.tokens)
                and self.tokens[self.pos + 1].text == "forall"):
            self.take("(")
            self.take("forall")
            var = self.take_ident("quantified variable")
            self.take(")")
            body = self.formula(bound | {var})
            return ForAll(var, body)
        return self.impl(bound)

    def impl(self, bound: frozenset) -> Formula:
        left = self.unary(bound)
        if self.peek() == "->":
            self.take("->")
            right = self.formula(bound)
            return Implies(left, right)
        return left

    def unary(self, bound: frozenset) -> Formula:
        tok = self.peek()
        if tok == "~":
            self.take("~")
            return Not(self.unary(bound))
        if tok == "false":
            self.take("false")
            return FALSUM
        if tok == "(":
            self.take("(")
            f = self.formula(bound)
            self.take(")")
            return f
        return self.atom(bound)

    def atom(self, bound: frozenset) -> Formula:
        start = self.here()
        name = self.take_ident("predicate name")
        sort = PLAIN
        occurrence = None
        if self.peek() == "^":
            self.take("^")
            tag = self.take_ident("sort tag")
            if tag == "k":
                sort = KIND
            elif tag == "p":
                sort = PROPERTY
            else:
                raise ParseError(f"unknown sort tag ^{tag}", start)
        if self.peek() == "#":
            self.take("#")
            tok = self.take()
            if not tok.isdigit():
                raise ParseError(f"expected occurrence number, found {tok!r}",
                                 self.here())
            occurrence = int(tok)
            if sort != PROPERTY:
                raise ParseError(
                    "occurrence index is only valid on a property symbol (^p)",
                    start)
            if occurrence < 1:
                raise ParseError("occurrence index must be >= 1", start)
        self.take("(")
        args = [self.term(bound)]
        while self.peek() == ",":
            self.take(",")
            args.append(self.term(bound))
        self.take(")")
        if sort in (KIND, PROPERTY) and len(args) != 1:
            raise ParseError(
                f"{name} is {sort}-typed and must be unary, got {len(args)} "
                f"arguments", start)
        pred = PredicateSymbol(name, len(args), sort, occurrence)
        return Atom(pred, tuple(args))

    def term(self, bound: frozenset) -> Term:
        name = self.take_ident("term")
        return Variable(name) if name in bound else Constant(name)


def parse_formula(text: str) -> Formula:
    """Parse concrete syntax into the unique AST.

    Raises ParseError with the offending position on malformed input.
    """
    return _Parser(text).parse()


def canonical(text: str) -> str:
    """Parse then re-render: the canonical spelling of a formula string."""
    return render_formula(parse_formula(text))
