import itertools
import random

import pytest

from drs.errors import LoopError, RedundantLinkError
from drs.hierarchy import (
    EXISTING_LINKS_REDUNDANT,
    HAS_PROPERTY,
    NEGATIVE,
    NEW_LINK_REDUNDANT,
    NONE,
    OBJECT_KIND,
    POSITIVE,
    SUBKIND_KIND,
    Hierarchy,
    KindSpec,
    ObjectSpec,
    PropertySpec,
)
from oracles import (
    closure_reachable,
    find_redundant_pair,
    has_cycle,
)


def build_fig3():
    """Penguins under birds, a flyer and a non-flyer property, two birds."""
    h = Hierarchy()
    penguin = h.ensure_node(KindSpec("Penguin"))
    bird = h.ensure_node(KindSpec("Bird"))
    h.add_link(penguin, bird, SUBKIND_KIND)
    cf1 = h.ensure_node(PropertySpec("CanFly", POSITIVE))
    h.add_link(bird, cf1, HAS_PROPERTY)
    cf2 = h.ensure_node(PropertySpec("CanFly", NEGATIVE))
    h.add_link(penguin, cf2, HAS_PROPERTY)
    tweety = h.ensure_node(ObjectSpec("Tweety"))
    h.add_link(tweety, bird, OBJECT_KIND)
    opus = h.ensure_node(ObjectSpec("Opus"))
    h.add_link(opus, penguin, OBJECT_KIND)
    return h


def build_fig6():
    h = Hierarchy()
    quaker = h.ensure_node(KindSpec("Quaker"))
    p1 = h.ensure_node(PropertySpec("Pacifist", POSITIVE))
    h.add_link(quaker, p1, HAS_PROPERTY)
    republican = h.ensure_node(KindSpec("Republican"))
    p2 = h.ensure_node(PropertySpec("Pacifist", NEGATIVE))
    h.add_link(republican, p2, HAS_PROPERTY)
    nixon = h.ensure_node(ObjectSpec("Nixon"))
    h.add_link(nixon, quaker, OBJECT_KIND)
    h.add_link(nixon, republican, OBJECT_KIND)
    return h


def ok_edges(h):
    return [(l.src, l.dst) for l in h.links if l.link_type != HAS_PROPERTY]


class TestEnsureNode:
    def test_kind_idempotent(self):
        h = Hierarchy()
        assert h.ensure_node(KindSpec("Bird")) == \
            h.ensure_node(KindSpec("Bird"))

    def test_property_occurrences_are_fresh(self):
        h = Hierarchy()
        a = h.ensure_node(PropertySpec("CanFly", POSITIVE))
        b = h.ensure_node(PropertySpec("CanFly", NEGATIVE))
        assert h.node(a).occurrence == 1
        assert h.node(b).occurrence == 2

    def test_counters_never_decrease(self):
        rng = random.Random(5)
        h = Hierarchy()
        highs = {}
        for _ in range(1000):
            name = rng.choice(["F", "G", "H"])
            node = h.ensure_node(
                PropertySpec(name, rng.choice([POSITIVE, NEGATIVE])))
            occ = h.node(node).occurrence
            assert occ > highs.get(name, 0)
            highs[name] = occ


class TestWouldLoop:
    def test_two_cycle(self):
        h = Hierarchy()
        p = h.ensure_node(KindSpec("Penguin"))
        b = h.ensure_node(KindSpec("Bird"))
        h.add_link(p, b, SUBKIND_KIND)
        assert h.would_loop(b, p)

    def test_empty_graph(self):
        h = Hierarchy()
        a = h.ensure_node(KindSpec("A"))
        b = h.ensure_node(KindSpec("B"))
        assert not h.would_loop(a, b)

    def test_agrees_with_cycle_oracle(self):
        rng = random.Random(7)
        for _ in range(300):
            h = Hierarchy()
            kinds = [h.ensure_node(KindSpec(f"K{i}")) for i in range(6)]
            for _ in range(7):
                s, d = rng.choice(kinds), rng.choice(kinds)
                try:
                    h.add_link(s, d, SUBKIND_KIND)
                except (LoopError, RedundantLinkError):
                    pass
            s, d = rng.choice(kinds), rng.choice(kinds)
            assert h.would_loop(s, d) == has_cycle(ok_edges(h) + [(s, d)])


class TestRedundancyAnalysis:
    def test_shortcut_to_grandparent_rejected(self):
        h = build_fig3()
        result = h.redundancy_analysis("obj_Opus", "kind_Bird")
        assert result.verdict == NEW_LINK_REDUNDANT

    def test_fresh_object_link_fine(self):
        h = Hierarchy()
        p = h.ensure_node(KindSpec("Penguin"))
        b = h.ensure_node(KindSpec("Bird"))
        h.add_link(p, b, SUBKIND_KIND)
        opus = h.ensure_node(ObjectSpec("Opus"))
        assert h.redundancy_analysis(opus, p).verdict == NONE

    def test_refinement_marks_old_direct_link(self):
        h = build_fig3()
        result = h.redundancy_analysis("obj_Tweety", "kind_Penguin")
        assert result.verdict == EXISTING_LINKS_REDUNDANT
        assert [(l.src, l.dst) for l in result.removable] == \
            [("obj_Tweety", "kind_Bird")]


class TestAddLink:
    def test_fig3_build_keeps_all_five_links(self):
        h = build_fig3()
        assert len(h.links) == 5
        assert len(ok_edges(h)) == 3

    def test_refinement_removes_superseded_link(self):
        h = build_fig3()
        removed = h.add_link("obj_Tweety", "kind_Penguin", OBJECT_KIND)
        assert [(l.src, l.dst) for l in removed] == \
            [("obj_Tweety", "kind_Bird")]
        assert ("obj_Tweety", "kind_Penguin") in ok_edges(h)
        assert ("obj_Tweety", "kind_Bird") not in ok_edges(h)

    def test_loop_rejected(self):
        h = build_fig3()
        with pytest.raises(LoopError):
            h.add_link("kind_Bird", "kind_Penguin", SUBKIND_KIND)

    def test_redundant_rejected(self):
        h = build_fig3()
        with pytest.raises(RedundantLinkError):
            h.add_link("obj_Opus", "kind_Bird", OBJECT_KIND)

    def test_single_root_diamond_rejected(self):
        # Re-converging paths under one root would give a node two
        # positions relative to the same root.
        h = Hierarchy()
        r = h.ensure_node(KindSpec("R"))
        a = h.ensure_node(KindSpec("A"))
        b = h.ensure_node(KindSpec("B"))
        c = h.ensure_node(KindSpec("C"))
        h.add_link(a, r, SUBKIND_KIND)
        h.add_link(b, r, SUBKIND_KIND)
        h.add_link(c, a, SUBKIND_KIND)
        with pytest.raises(RedundantLinkError):
            h.add_link(c, b, SUBKIND_KIND)

    def test_two_root_diamond_allowed(self):
        h = build_fig6()
        edges = ok_edges(h)
        assert ("obj_Nixon", "kind_Quaker") in edges
        assert ("obj_Nixon", "kind_Republican") in edges

    def test_descendant_shortcut_absorbed(self):
        # c sits under both a and r; wiring a under r makes the direct
        # c -> r link a shortcut, which the new link absorbs.
        h = Hierarchy()
        r = h.ensure_node(KindSpec("R"))
        a = h.ensure_node(KindSpec("A"))
        c = h.ensure_node(KindSpec("C"))
        h.add_link(c, a, SUBKIND_KIND)
        h.add_link(c, r, SUBKIND_KIND)
        removed = h.add_link(a, r, SUBKIND_KIND)
        assert [(l.src, l.dst) for l in removed] == [("kind_C", "kind_R")]
        assert sorted(ok_edges(h)) == \
            [("kind_A", "kind_R"), ("kind_C", "kind_A")]


class TestAddresses:
    def test_fig3_addresses(self):
        h = build_fig3()
        addresses = h.compute_addresses()
        assert addresses["kind_Bird"] == {(1,)}
        assert addresses["kind_Penguin"] == {(1, 1)}
        assert addresses["obj_Tweety"] == {(1, 2)}
        assert addresses["obj_Opus"] == {(1, 1, 1)}

    def test_single_root(self):
        h = Hierarchy()
        h.ensure_node(KindSpec("A"))
        assert h.compute_addresses()["kind_A"] == {(1,)}

    def test_nixon_object_has_two_addresses(self):
        h = build_fig6()
        addresses = h.compute_addresses()
        assert addresses["obj_Nixon"] == {(1, 1), (2, 1)}

    def test_property_rank_inherited(self):
        h = build_fig3()
        assert h.rank("prop_CanFly_2") == h.addresses["kind_Penguin"]

    def test_prefix_law_on_random_hierarchies(self):
        rng = random.Random(11)
        for _ in range(200):
            h = Hierarchy()
            kinds = [h.ensure_node(KindSpec(f"K{i}")) for i in range(6)]
            for _ in range(8):
                try:
                    h.add_link(rng.choice(kinds), rng.choice(kinds),
                               SUBKIND_KIND)
                except (LoopError, RedundantLinkError):
                    pass
            addresses = h.compute_addresses()
            edges = ok_edges(h)
            for src, dst in edges:
                # every address of the child extends one of the parent
                for addr in addresses[src]:
                    prefixes = {addr[:i] for i in range(1, len(addr))}
                    if any(a in prefixes for a in addresses[dst]):
                        break
                else:
                    pytest.fail(f"no prefix relation for {src}->{dst}")

    def test_coherence_with_more_specific(self):
        rng = random.Random(13)
        for _ in range(100):
            h = Hierarchy()
            kinds = [h.ensure_node(KindSpec(f"K{i}")) for i in range(5)]
            for _ in range(6):
                try:
                    h.add_link(rng.choice(kinds), rng.choice(kinds),
                               SUBKIND_KIND)
                except (LoopError, RedundantLinkError):
                    pass
            addresses = h.compute_addresses()
            for n1, n2 in itertools.permutations(kinds, 2):
                prefix = any(
                    a2 == a1[:len(a2)] and len(a2) < len(a1)
                    for a1 in addresses[n1] for a2 in addresses[n2])
                assert (h.more_specific(n1, n2) == "yes") == prefix


class TestMoreSpecific:
    def test_opus_more_specific_than_bird(self):
        h = build_fig3()
        assert h.more_specific("obj_Opus", "kind_Bird") == "yes"
        assert h.more_specific("kind_Bird", "obj_Opus") == "no"

    def test_two_roots_incomparable(self):
        h = build_fig6()
        assert h.more_specific("kind_Quaker", "kind_Republican") == \
            "incomparable"

    def test_property_nodes_compare_through_kinds(self):
        h = build_fig3()
        assert h.more_specific("prop_CanFly_2", "prop_CanFly_1") == "yes"
        assert h.more_specific("prop_CanFly_1", "prop_CanFly_2") == "no"

    def test_agrees_with_reachability_oracle(self):
        rng = random.Random(17)
        for _ in range(100):
            h = Hierarchy()
            kinds = [h.ensure_node(KindSpec(f"K{i}")) for i in range(7)]
            for _ in range(9):
                try:
                    h.add_link(rng.choice(kinds), rng.choice(kinds),
                               SUBKIND_KIND)
                except (LoopError, RedundantLinkError):
                    pass
            edges = ok_edges(h)
            for n1, n2 in itertools.permutations(kinds, 2):
                up1 = closure_reachable(edges, n1)
                up2 = closure_reachable(edges, n2)
                if n2 in up1:
                    expected = "yes"
                elif n1 in up2:
                    expected = "no"
                else:
                    expected = "incomparable"
                assert h.more_specific(n1, n2) == expected


class TestApplicableProperties:
    def test_opus_gets_only_the_negative_occurrence(self):
        h = build_fig3()
        assert [(n.id, s) for n, s in h.applicable_properties("obj_Opus")] \
            == [("prop_CanFly_2", NEGATIVE)]

    def test_tweety_gets_the_positive_occurrence(self):
        h = build_fig3()
        assert [(n.id, s) for n, s in h.applicable_properties("obj_Tweety")] \
            == [("prop_CanFly_1", POSITIVE)]

    def test_nixon_gets_both(self):
        h = build_fig6()
        assert [(n.id, s) for n, s in h.applicable_properties("obj_Nixon")] \
            == [("prop_Pacifist_1", POSITIVE), ("prop_Pacifist_2", NEGATIVE)]

    def test_blocking_is_antisymmetric(self):
        h = build_fig3()
        survivors = {n.id for n, _ in h.applicable_properties("obj_Opus")}
        assert "prop_CanFly_1" not in survivors
        assert "prop_CanFly_2" in survivors

    def test_same_sign_duplicates_all_survive(self):
        h = Hierarchy()
        a = h.ensure_node(KindSpec("A"))
        b = h.ensure_node(KindSpec("B"))
        h.add_link(a, b, SUBKIND_KIND)
        p1 = h.ensure_node(PropertySpec("F", POSITIVE))
        h.add_link(b, p1, HAS_PROPERTY)
        p2 = h.ensure_node(PropertySpec("F", POSITIVE))
        h.add_link(a, p2, HAS_PROPERTY)
        o = h.ensure_node(ObjectSpec("o"))
        h.add_link(o, a, OBJECT_KIND)
        assert {n.id for n, _ in h.applicable_properties(o)} == \
            {"prop_F_1", "prop_F_2"}


class TestMaintainedInvariant:
    def test_random_insertions_never_leave_cycles_or_redundant_pairs(self):
        # The heavyweight sweep lives in the acceptance suite; this is the
        # fast development version.
        rng = random.Random(19)
        for _ in range(300):
            h = Hierarchy()
            kinds = [h.ensure_node(KindSpec(f"K{i}")) for i in range(6)]
            objects = [h.ensure_node(ObjectSpec(f"o{i}")) for i in range(2)]
            for _ in range(10):
                if objects and rng.random() < 0.3:
                    s, d = rng.choice(objects), rng.choice(kinds)
                    link_type = OBJECT_KIND
                else:
                    s, d = rng.choice(kinds), rng.choice(kinds)
                    link_type = SUBKIND_KIND
                try:
                    h.add_link(s, d, link_type)
                except (LoopError, RedundantLinkError):
                    continue
                edges = ok_edges(h)
                assert not has_cycle(edges)
                assert find_redundant_pair(edges, h.nodes) is None


class TestOracleAgreement:
    def test_pairwise_and_grouped_redundancy_oracles_agree(self):
        # Two independent formulations of "redundant pair": the pairwise
        # divergence scan and the two-paths-to-one-node grouping used by
        # the acceptance sweep. They must agree on arbitrary graphs,
        # including ones the engine would never build.
        from test_acceptance import redundant_pair_found
        rng = random.Random(23)
        disagreements = 0
        flagged = 0
        for _ in range(300):
            n = rng.randint(2, 6)
            nodes = [f"n{i}" for i in range(n)]
            edges = []
            for _ in range(rng.randint(1, 8)):
                a, b = rng.sample(nodes, 2)
                if (a, b) not in edges and not has_cycle(edges + [(a, b)]):
                    edges.append((a, b))
            pairwise = find_redundant_pair(edges, nodes) is not None
            grouped = redundant_pair_found(edges, nodes)
            assert pairwise == grouped, (edges, pairwise, grouped)
            flagged += pairwise
        assert flagged > 10  # the sample hits genuinely redundant graphs


class TestDotExport:
    def test_shapes_and_stable_names(self):
        dot = build_fig3().to_dot()
        assert 'obj_Tweety [shape=box, label="Tweety"]' in dot
        assert 'kind_Bird [shape=ellipse, label="Bird"]' in dot
        assert 'prop_CanFly_2 [shape=plaintext, label="~CanFly#2"]' in dot
        assert "obj_Opus -> kind_Penguin;" in dot
        assert "kind_Penguin -> kind_Bird [style=bold];" in dot
        assert "style=dashed" in dot


class TestExportRoundTrip:
    def test_from_export_preserves_structure(self):
        h = build_fig3()
        data = h.export()
        h2 = Hierarchy.from_export(data, h.occurrence_counters)
        assert h2.export() == data
        assert h2.compute_addresses() == h.compute_addresses()
