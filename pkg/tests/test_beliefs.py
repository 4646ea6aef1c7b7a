import random

import pytest

from drs.beliefs import (
    A_POSTERIORI,
    A_PRIORI,
    ANALYTIC,
    BELIEVED,
    DISBELIEVED,
    SYNTHETIC,
    DerivationPath,
    init_path,
)
from drs.errors import (
    AprioriRetractionError,
    ContradictionInputError,
    DisbelievedPremiseError,
    DuplicateEntryError,
    OpenFormulaError,
    RuleMatchError,
    SchemaBindingError,
    SymbolConflictError,
    UnknownRuleError,
    UnknownSchemaError,
)
from drs.formulas import (
    Atom,
    Constant,
    Falsum,
    ForAll,
    Implies,
    Not,
    PredicateSymbol,
    Variable,
    parse_formula,
    render_formula,
)
from oracles import is_propositional_tautology

P = parse_formula


def seed_symbols(path, *formulas):
    for f in formulas:
        path.symbols.absorb(P(f) if isinstance(f, str) else f)


def enter(path, text, source="t", entrenchment=0.5):
    return path.enter_extralogical(P(text), source, entrenchment)


def build_penguin_path(path=None):
    """The five penguin inputs plus their three derivations, entered
    through raw kernel calls (the controller has its own tests)."""
    path = path or init_path()
    r1 = enter(path, "(forall x)(Penguin^k(x) -> Bird^k(x))")
    r2 = enter(path, "(forall x)(Bird^k(x) -> CanFly^p#1(x))")
    r3 = enter(path, "(forall x)(Penguin^k(x) -> ~CanFly^p#2(x))")
    t4 = enter(path, "Bird^k(Tweety)")
    t5 = path.apply_rule("AS", [r2, t4])
    t6 = enter(path, "Penguin^k(Opus)")
    t7 = path.apply_rule("AS", [r1, t6])
    t8 = path.apply_rule("AS", [r3, t6])
    return path, (r1, r2, r3, t4, t5, t6, t7, t8)


def build_nixon(path=None):
    path = path or init_path()
    r1 = enter(path, "(forall x)(Quaker^k(x) -> Pacifist^p#1(x))")
    r2 = enter(path, "(forall x)(Republican^k(x) -> ~Pacifist^p#2(x))")
    t3 = enter(path, "Quaker^k(Nixon)")
    t4 = path.apply_rule("AS", [r1, t3])
    t5 = enter(path, "Republican^k(Nixon)")
    t6 = path.apply_rule("AS", [r2, t5])
    t7 = path.apply_rule("CD", [t4, t6])
    return path, (r1, r2, t3, t4, t5, t6, t7)


class TestInitPath:
    def test_empty(self):
        path = init_path()
        assert len(path) == 0
        assert path.next_time == 1
        assert path.believed_formulas() == []
        assert path.symbols.constants == []
        assert path.symbols.predicates == []


class TestEnterExtralogical:
    def test_third_input_gets_time_stamp_three(self):
        path = init_path()
        enter(path, "(forall x)(Quaker^k(x) -> Pacifist^p#1(x))")
        enter(path, "(forall x)(Republican^k(x) -> ~Pacifist^p#2(x))")
        t = enter(path, "Quaker^k(Nixon)")
        assert t == 3
        e = path.entry(t)
        assert e.label.from_list.code == "es"
        assert e.label.entrenchment == 0.5
        assert e.label.category == A_POSTERIORI
        assert e.label.status == BELIEVED

    def test_duplicate_rejected(self):
        path = init_path()
        enter(path, "Bird^k(Tweety)")
        with pytest.raises(DuplicateEntryError):
            enter(path, "Bird^k(Tweety)")

    def test_duplicate_check_is_mod_occurrence(self):
        path = init_path()
        enter(path, "(forall x)(Bird^k(x) -> CanFly^p#1(x))")
        with pytest.raises(DuplicateEntryError):
            enter(path, "(forall x)(Bird^k(x) -> CanFly^p#2(x))")

    def test_falsum_rejected(self):
        path = init_path()
        with pytest.raises(ContradictionInputError):
            enter(path, "false")

    def test_open_formula_rejected(self):
        path = init_path()
        with pytest.raises(OpenFormulaError):
            path.enter_extralogical(
                Atom(PredicateSymbol("P", 1), (Variable("x"),)), "t", 0.5)

    def test_symbols_appended_in_order(self):
        path = init_path()
        enter(path, "Bird^k(Tweety)")
        enter(path, "Penguin^k(Opus)")
        assert path.symbols.constants == ["Tweety", "Opus"]
        assert [p.name for p in path.symbols.predicates] == \
            ["Bird", "Penguin"]

    def test_sort_conflict_rejected(self):
        path = init_path()
        enter(path, "Bird^k(Tweety)")
        with pytest.raises(SymbolConflictError):
            enter(path, "(forall x)(Penguin^k(x) -> Bird^p(x))")

    def test_redderiving_disbelieved_formula_gets_fresh_entry(self):
        path = init_path()
        t = enter(path, "Bird^k(Tweety)")
        path.set_status(t, DISBELIEVED)
        t2 = enter(path, "Bird^k(Tweety)")
        assert t2 == t + 1
        assert path.entry(t).label.status == DISBELIEVED


class TestInstantiateSchema:
    def test_a1_template_fill(self):
        path = init_path()
        seed_symbols(path, "Bird^k(Tweety)")
        t = path.instantiate_schema(
            "A1", {"P": P("Bird^k(Tweety)"), "Q": Falsum()})
        assert render_formula(path.entry(t).formula) == \
            "(Bird^k(Tweety) -> (false -> Bird^k(Tweety)))"

    def test_instances_have_full_entrenchment_and_apriori(self):
        path = init_path()
        seed_symbols(path, "Bird^k(Tweety)", "Penguin^k(Opus)")
        rng = random.Random(3)
        pool = [P("Bird^k(Tweety)"), P("Penguin^k(Opus)"), Falsum()]
        for _ in range(20):
            schema = rng.choice(["A1", "A2", "A3"])
            bindings = {"P": rng.choice(pool), "Q": rng.choice(pool),
                        "R": rng.choice(pool)}
            t = path.instantiate_schema(schema, bindings)
            e = path.entry(t)
            assert e.label.entrenchment == 1.0
            assert e.label.category == A_PRIORI

    def test_propositional_instances_are_tautologies(self):
        path = init_path()
        seed_symbols(path, "Bird^k(Tweety)", "Penguin^k(Opus)")
        rng = random.Random(5)
        pool = [P("Bird^k(Tweety)"), P("Penguin^k(Opus)"), Falsum(),
                Not(P("Bird^k(Tweety)"))]
        for _ in range(60):
            schema = rng.choice(["A1", "A2", "A3"])
            bindings = {"P": rng.choice(pool), "Q": rng.choice(pool),
                        "R": rng.choice(pool)}
            t = path.instantiate_schema(schema, bindings)
            assert is_propositional_tautology(path.entry(t).formula)

    def test_quantifier_schemas_structure(self):
        path = init_path()
        seed_symbols(path, "Bird^k(Tweety)")
        t = path.instantiate_schema(
            "Q1", {"P": P("(forall y)Bird^k(y)").body, "x": "y",
                   "a": Constant("Tweety")})
        assert render_formula(path.entry(t).formula) == \
            "(((forall y)Bird^k(y)) -> Bird^k(Tweety))"
        t2 = path.instantiate_schema(
            "Q2", {"P": P("Bird^k(Tweety)"),
                   "Q": P("Bird^k(Tweety)"), "x": "y"})
        assert render_formula(path.entry(t2).formula) == (
            "(((forall y)(Bird^k(Tweety) -> Bird^k(Tweety))) -> "
            "(Bird^k(Tweety) -> (forall y)Bird^k(Tweety)))")
        with pytest.raises(SchemaBindingError):
            body = Atom(PredicateSymbol("Bird", 1, "kind"), (Variable("y"),))
            path.instantiate_schema("Q2", {"P": body, "Q": body, "x": "y"})

    def test_unknown_schema_and_bad_bindings(self):
        path = init_path()
        with pytest.raises(UnknownSchemaError):
            path.instantiate_schema("A9", {})
        with pytest.raises(SchemaBindingError):
            path.instantiate_schema("A1", {"P": P("false")})

    def test_no_new_symbols_through_schemas(self):
        path = init_path()
        with pytest.raises(SchemaBindingError):
            path.instantiate_schema(
                "A1", {"P": P("Bird^k(Tweety)"), "Q": Falsum()})


class TestApplyRule:
    def test_aristotelian_syllogism(self):
        path = init_path()
        r1 = enter(path, "(forall x)(Penguin^k(x) -> Bird^k(x))")
        t6 = enter(path, "Penguin^k(Opus)")
        t = path.apply_rule("AS", [r1, t6])
        assert render_formula(path.entry(t).formula) == "Bird^k(Opus)"
        assert path.entry(t).label.status == BELIEVED
        assert path.entry(t).label.from_list.premises == (r1, t6)
        assert t in path.entry(r1).label.to_list
        assert t in path.entry(t6).label.to_list

    def test_contradiction_detection_mod_occurrence(self):
        path, stamps = build_nixon()
        t7 = stamps[-1]
        assert path.entry(t7).formula == Falsum()
        assert path.entry(t7).label.from_list.premises == (stamps[3], stamps[5])

    def test_hypothetical_syllogism(self):
        path = init_path()
        a = enter(path, "P(a) -> Q(a)")
        b = enter(path, "Q(a) -> R(a)")
        t = path.apply_rule("HS", [a, b])
        assert render_formula(path.entry(t).formula) == "(P(a) -> R(a))"

    def test_modus_ponens_and_template_mismatch(self):
        path = init_path()
        a = enter(path, "P(a)")
        b = enter(path, "P(a) -> Q(a)")
        t = path.apply_rule("MP", [a, b])
        assert render_formula(path.entry(t).formula) == "Q(a)"
        with pytest.raises(RuleMatchError):
            path.apply_rule("MP", [t, b])

    def test_subsumption(self):
        path = init_path()
        a = enter(path, "(forall x)(Penguin^k(x) -> Bird^k(x))")
        b = enter(path, "(forall x)(Bird^k(x) -> Animal^k(x))")
        t = path.apply_rule("SUB", [a, b])
        assert render_formula(path.entry(t).formula) == \
            "(forall x)(Penguin^k(x) -> Animal^k(x))"

    def test_conflict_detection(self):
        path = init_path()
        guard = enter(path, "(forall x)~~(P(x) -> ~Q(x))")
        a = enter(path, "P(a)")
        b = enter(path, "Q(a)")
        t = path.apply_rule("CONF", [guard, a, b])
        assert path.entry(t).formula == Falsum()

    def test_generalization(self):
        path = init_path()
        a = enter(path, "P(a)")
        t = path.apply_rule("GEN", [a], var="x")
        assert render_formula(path.entry(t).formula) == "(forall x)P(a)"

    def test_disbelieved_premise_rejected(self):
        path = init_path()
        a = enter(path, "P(a)")
        b = enter(path, "P(a) -> Q(a)")
        path.set_status(a, DISBELIEVED)
        with pytest.raises(DisbelievedPremiseError):
            path.apply_rule("MP", [a, b])

    def test_unknown_rule(self):
        path = init_path()
        with pytest.raises(UnknownRuleError):
            path.apply_rule("XYZ", [])

    def test_entrenchment_is_minimum(self):
        path = init_path()
        a = path.enter_extralogical(P("P(a)"), "t", 0.9)
        b = path.enter_extralogical(P("P(a) -> Q(a)"), "t", 0.3)
        t = path.apply_rule("MP", [a, b])
        assert path.entry(t).label.entrenchment == 0.3

    def test_categories_analytic_versus_synthetic(self):
        path = init_path()
        seed_symbols(path, "Bird^k(Tweety)")
        ax = path.instantiate_schema(
            "A1", {"P": P("Bird^k(Tweety)"), "Q": Falsum()})
        wrap = path.instantiate_schema(
            "A1", {"P": path.entry(ax).formula, "Q": Falsum()})
        t = path.apply_rule("MP", [ax, wrap])
        assert path.entry(t).label.category == ANALYTIC
        assert path.entry(t).label.entrenchment == 1.0
        fact = enter(path, "Penguin^k(Opus)")
        rule = enter(path, "(forall x)(Penguin^k(x) -> Bird^k(x))")
        s = path.apply_rule("AS", [rule, fact])
        assert path.entry(s).label.category == SYNTHETIC

    def test_fuzz_rules_never_consume_disbelieved(self):
        rng = random.Random(41)
        for _ in range(50):
            path, stamps = build_nixon()
            t = rng.choice(stamps[:-1])
            try:
                path.set_status(t, DISBELIEVED)
            except AprioriRetractionError:
                continue
            with pytest.raises(DisbelievedPremiseError):
                path.apply_rule("CD", [t, t])


class TestBelievedFormulas:
    def test_penguin_scenario_has_eight(self):
        path, _ = build_penguin_path()
        believed = path.believed_formulas()
        assert len(believed) == 8
        rendered = {render_formula(f) for _, f in believed}
        assert rendered == {
            "(forall x)(Penguin^k(x) -> Bird^k(x))",
            "(forall x)(Bird^k(x) -> CanFly^p#1(x))",
            "(forall x)(Penguin^k(x) -> ~CanFly^p#2(x))",
            "Bird^k(Tweety)",
            "CanFly^p#1(Tweety)",
            "Penguin^k(Opus)",
            "Bird^k(Opus)",
            "~CanFly^p#2(Opus)",
        }

    def test_empty_on_init(self):
        assert init_path().believed_formulas() == []

    def test_atomic_property_filter(self):
        path, _ = build_penguin_path()
        props = {render_formula(f)
                 for _, f in path.believed_formulas("atomic-property")}
        assert props == {"CanFly^p#1(Tweety)", "~CanFly^p#2(Opus)"}

    def test_atomic_kind_and_universal_filters(self):
        path, _ = build_penguin_path()
        kinds = {render_formula(f)
                 for _, f in path.believed_formulas("atomic-kind")}
        assert kinds == {"Bird^k(Tweety)", "Penguin^k(Opus)", "Bird^k(Opus)"}
        assert len(path.believed_formulas("universal")) == 3


class TestSetStatus:
    def test_retraction_on_nixon(self):
        path, stamps = build_nixon()
        path.set_status(stamps[5], DISBELIEVED)
        assert path.entry(stamps[5]).label.status == DISBELIEVED
        assert len(path.entries) == 7  # history intact

    def test_apriori_cannot_be_disbelieved(self):
        path = init_path()
        seed_symbols(path, "Bird^k(Tweety)")
        t = path.instantiate_schema(
            "A1", {"P": P("Bird^k(Tweety)"), "Q": Falsum()})
        with pytest.raises(AprioriRetractionError):
            path.set_status(t, DISBELIEVED)

    def test_double_disbelieve_idempotent(self):
        path = init_path()
        t = enter(path, "P(a)")
        path.set_status(t, DISBELIEVED)
        path.set_status(t, DISBELIEVED)
        assert path.entry(t).label.status == DISBELIEVED


class TestPathInvariants:
    def test_validate_after_scenarios(self):
        path, _ = build_penguin_path()
        path.validate()
        path2, stamps = build_nixon()
        path2.validate()
        path2.set_status(stamps[1], DISBELIEVED)
        path2.validate()

    def test_monotone_history_and_dense_stamps(self):
        path, _ = build_penguin_path()
        counts = []
        for i, e in enumerate(path.entries, start=1):
            assert e.time_stamp == i
            counts.append(len(path.symbols.constants))
        assert counts == sorted(counts)

    def test_logic_alone_cannot_yield_falsum(self):
        # Close random schema instances under MP; no contradiction marker
        # may ever appear.
        rng = random.Random(43)
        path = init_path()
        seed_symbols(path, "Bird^k(Tweety)", "Penguin^k(Opus)")
        pool = [P("Bird^k(Tweety)"), P("Penguin^k(Opus)"), Falsum()]
        for _ in range(120):
            schema = rng.choice(["A1", "A2", "A3"])
            bindings = {"P": rng.choice(pool), "Q": rng.choice(pool),
                        "R": rng.choice(pool)}
            path.instantiate_schema(schema, bindings)
            believed = path.believed_formulas()
            for _ in range(3):
                a = rng.choice(believed)
                b = rng.choice(believed)
                try:
                    path.apply_rule("MP", [a[0], b[0]])
                except RuleMatchError:
                    pass
        assert all(e.formula != Falsum() for e in path.entries)
        path.validate()


class TestEntryExport:
    def test_export_shapes(self):
        path, stamps = build_penguin_path()
        rec = path.entry(stamps[4]).export()
        assert rec["t"] == stamps[4]
        assert rec["formula"] == "CanFly^p#1(Tweety)"
        assert rec["from"] == {"kind": "rule", "rule": "AS",
                               "premises": [stamps[1], stamps[3]]}
        assert rec["status"] == "believed"
        assert rec["category"] == "synthetic"
        ext = path.entry(stamps[0]).export()
        assert ext["from"]["kind"] == "external"
        assert ext["entrenchment"] == 0.5
