"""Multiple-inheritance hierarchy: typed nodes and links, specificity
addresses, and the blocking filter for property inheritance.

Nodes are objects (individual constants), kinds (kind-typed predicates),
or properties (property-typed predicates with a sign and an occurrence
index; every attachment of a property predicate gets a fresh node and a
fresh occurrence). Links run upward from the more specific endpoint:
object-kind, subkind-kind, and has-property. Loop and redundancy
maintenance looks only at the object/kind subgraph.

The maintained invariant on the object/kind subgraph is that between any
two nodes there is at most one directed path. Two distinct paths from a
shared starting point that meet again would make the later node's
position ambiguous; links from distinct roots that merge (the diamond
with two roots) are fine because the paths never shared a prefix. When a
proposed link would itself duplicate an existing path it is rejected;
when it makes existing direct links into shortcuts (the usual case:
refining "Tweety is a Bird" to "Tweety is a Penguin") those links are
removed and returned. A proposed link that would create two paths not
repairable by shortcut removal is rejected as redundant.

Addresses: roots are numbered (1), (2), ... by creation order, and the
children of each node are numbered by link creation order, so a node's
address set is {parent address + (i)} over all of its parent links. A
node under several roots has several addresses. Property nodes take the
rank (address set) of the kind they are attached to.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .errors import LoopError, NodeConflictError, RedundantLinkError
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
)

OBJECT_KIND = "object-kind"
SUBKIND_KIND = "subkind-kind"
HAS_PROPERTY = "has-property"

POSITIVE = "positive"
NEGATIVE = "negative"


@dataclass(frozen=True)
class ObjectSpec:
    constant: str


@dataclass(frozen=True)
class KindSpec:
    name: str


@dataclass(frozen=True)
class PropertySpec:
    name: str
    sign: str  # POSITIVE or NEGATIVE


NodeSpec = Union[ObjectSpec, KindSpec, PropertySpec]


@dataclass
class Node:
    id: str
    kind: str  # "object" | "kind" | "property"
    name: str  # constant or predicate name
    created_at: int
    occurrence: Optional[int] = None  # property nodes only
    sign: Optional[str] = None        # property nodes only

    def export(self) -> dict:
        rec = {"id": self.id, "kind": self.kind, "name": self.name,
               "created_at": self.created_at}
        if self.kind == "property":
            rec["occurrence"] = self.occurrence
            rec["sign"] = self.sign
        return rec


@dataclass
class Link:
    src: str
    dst: str
    link_type: str
    created_at: int

    def export(self) -> dict:
        return {"from": self.src, "to": self.dst, "type": self.link_type,
                "created_at": self.created_at}


# Result of redundancy analysis for a proposed object/kind link.
@dataclass(frozen=True)
class RedundancyResult:
    verdict: str  # "none" | "new_link_redundant" | "existing_links_redundant"
    removable: tuple = ()


NONE = "none"
NEW_LINK_REDUNDANT = "new_link_redundant"
EXISTING_LINKS_REDUNDANT = "existing_links_redundant"


class Hierarchy:
    def __init__(self) -> None:
        self.nodes: dict = {}
        self.links: list = []
        self.occurrence_counters: dict = {}
        self._seq = 0
        self._addresses: dict = {}
        self._addresses_stale = False

    # -- nodes ----------------------------------------------------------

    def _next_seq(self) -> int:
        self._seq += 1
        return self._seq

    def ensure_node(self, spec: NodeSpec) -> str:
        """Return the node id for the descriptor, creating it if needed.

        Object and kind descriptors are idempotent. A property descriptor
        always creates a fresh node carrying the predicate's next
        occurrence index.
        """
        if isinstance(spec, ObjectSpec):
            node_id = f"obj_{spec.constant}"
            if node_id not in self.nodes:
                self.nodes[node_id] = Node(node_id, "object", spec.constant,
                                           self._next_seq())
                self._addresses_stale = True  # a fresh node starts as a root
            return node_id
        if isinstance(spec, KindSpec):
            node_id = f"kind_{spec.name}"
            if node_id not in self.nodes:
                self.nodes[node_id] = Node(node_id, "kind", spec.name,
                                           self._next_seq())
                self._addresses_stale = True
            return node_id
        if isinstance(spec, PropertySpec):
            if spec.sign not in (POSITIVE, NEGATIVE):
                raise NodeConflictError(f"bad property sign {spec.sign!r}")
            occ = self.occurrence_counters.get(spec.name, 1)
            self.occurrence_counters[spec.name] = occ + 1
            node_id = f"prop_{spec.name}_{occ}"
            self.nodes[node_id] = Node(node_id, "property", spec.name,
                                       self._next_seq(), occurrence=occ,
                                       sign=spec.sign)
            return node_id
        raise NodeConflictError(f"unknown node descriptor {spec!r}")

    def node(self, node_id: str) -> Node:
        return self.nodes[node_id]

    def _require(self, node_id: str, *kinds: str) -> Node:
        node = self.nodes.get(node_id)
        if node is None:
            raise NodeConflictError(f"no node {node_id}")
        if node.kind not in kinds:
            raise NodeConflictError(
                f"{node_id} is a {node.kind} node, expected {' or '.join(kinds)}")
        return node

    # -- object/kind subgraph queries ------------------------------------

    def _ok_links(self) -> list:
        return [l for l in self.links if l.link_type != HAS_PROPERTY]

    def parent_links(self, node_id: str) -> list:
        return [l for l in self._ok_links() if l.src == node_id]

    def child_links(self, node_id: str) -> list:
        return [l for l in self._ok_links() if l.dst == node_id]

    def strict_ancestors(self, node_id: str,
                         extra: Optional[tuple] = None,
                         skip: Optional[Link] = None) -> set:
        """Nodes reachable upward from node_id (object/kind links only),
        optionally pretending `extra` (src, dst) exists or `skip` does not."""
        adjacency: dict = {}
        for l in self._ok_links():
            if skip is not None and l is skip:
                continue
            adjacency.setdefault(l.src, []).append(l.dst)
        if extra is not None:
            adjacency.setdefault(extra[0], []).append(extra[1])
        seen: set = set()
        stack = list(adjacency.get(node_id, []))
        while stack:
            n = stack.pop()
            if n in seen:
                continue
            seen.add(n)
            stack.extend(adjacency.get(n, []))
        return seen

    def would_loop(self, src: str, dst: str) -> bool:
        """True when adding (src, dst) would close a directed cycle."""
        return src == dst or src in self.strict_ancestors(dst)

    def _paths_unique(self, edges: list) -> bool:
        """True when no ordered node pair is joined by two directed paths."""
        adjacency: dict = {}
        for s, d in edges:
            adjacency.setdefault(s, []).append(d)
        memo: dict = {}

        def counts_from(n: str) -> dict:
            if n in memo:
                return memo[n]
            out: dict = {}
            for parent in adjacency.get(n, ()):
                out[parent] = out.get(parent, 0) + 1
                for anc, c in counts_from(parent).items():
                    out[anc] = out.get(anc, 0) + c
            memo[n] = out
            return out

        for n in set(adjacency) | {d for ds in adjacency.values() for d in ds}:
            if any(c > 1 for c in counts_from(n).values()):
                return False
        return True

    def redundancy_analysis(self, src: str, dst: str) -> RedundancyResult:
        """Classify a proposed object/kind link.

        new_link_redundant: the link would duplicate an existing upward
        path, either directly (dst is already an ancestor of src) or by
        creating a second path between some pair of nodes that no shortcut
        removal can repair.

        existing_links_redundant: accepting the link turns some existing
        direct links into shortcuts (their targets remain reachable along
        the new, more specific route); those links are returned for
        removal.
        """
        if dst in self.strict_ancestors(src):
            return RedundancyResult(NEW_LINK_REDUNDANT)
        candidate = (src, dst)
        ok_links = self._ok_links()
        shortcuts = []
        for l in ok_links:
            others = [(o.src, o.dst) for o in ok_links if o is not l]
            others.append(candidate)
            # l is a shortcut if its target stays reachable without it.
            adjacency: dict = {}
            for s, d in others:
                adjacency.setdefault(s, []).append(d)
            stack = list(adjacency.get(l.src, []))
            seen: set = set()
            reachable = False
            while stack:
                n = stack.pop()
                if n == l.dst:
                    reachable = True
                    break
                if n in seen:
                    continue
                seen.add(n)
                stack.extend(adjacency.get(n, []))
            if reachable:
                shortcuts.append(l)
        remaining = [(l.src, l.dst) for l in ok_links if l not in shortcuts]
        remaining.append(candidate)
        if not self._paths_unique(remaining):
            return RedundancyResult(NEW_LINK_REDUNDANT)
        if shortcuts:
            return RedundancyResult(EXISTING_LINKS_REDUNDANT, tuple(shortcuts))
        return RedundancyResult(NONE)

    # -- mutation ---------------------------------------------------------

    def add_link(self, src: str, dst: str, link_type: str) -> list:
        """Add a link, enforcing the loop and redundancy rules on the
        object/kind subgraph. Returns the links removed as shortcuts."""
        if link_type == HAS_PROPERTY:
            self._require(src, "kind")
            prop = self._require(dst, "property")
            if any(l.dst == prop.id for l in self.links):
                raise NodeConflictError(
                    f"{prop.id} already has an attachment")
            self.links.append(Link(src, dst, HAS_PROPERTY, self._next_seq()))
            return []
        if link_type == OBJECT_KIND:
            self._require(src, "object")
            self._require(dst, "kind")
        elif link_type == SUBKIND_KIND:
            self._require(src, "kind")
            self._require(dst, "kind")
        else:
            raise NodeConflictError(f"unknown link type {link_type!r}")
        if self.would_loop(src, dst):
            raise LoopError(f"{src} -> {dst} would create a cycle")
        analysis = self.redundancy_analysis(src, dst)
        if analysis.verdict == NEW_LINK_REDUNDANT:
            raise RedundantLinkError(
                f"{src} -> {dst} would duplicate an inheritance path")
        removed = list(analysis.removable)
        for l in removed:
            self.links.remove(l)
        self.links.append(Link(src, dst, link_type, self._next_seq()))
        self._addresses_stale = True
        return removed

    def remove_link(self, link: Link) -> None:
        self.links.remove(link)
        if link.link_type != HAS_PROPERTY:
            self._addresses_stale = True

    # -- addresses and specificity ----------------------------------------

    def compute_addresses(self) -> dict:
        """Address sets for all object and kind nodes.

        Roots take (1), (2), ... in creation order; each node's parent
        links are ordered by creation to number it among the parent's
        children."""
        ok_nodes = [n for n in self.nodes.values()
                    if n.kind in ("object", "kind")]
        roots = sorted((n for n in ok_nodes if not self.parent_links(n.id)),
                       key=lambda n: n.created_at)
        root_ordinal = {n.id: i + 1 for i, n in enumerate(roots)}
        child_ordinal: dict = {}
        for n in ok_nodes:
            for i, l in enumerate(sorted(self.child_links(n.id),
                                         key=lambda l: l.created_at)):
                child_ordinal[(l.src, l.dst, l.created_at)] = i + 1

        memo: dict = {}

        def addresses_of(node_id: str) -> frozenset:
            if node_id in memo:
                return memo[node_id]
            out: set = set()
            if node_id in root_ordinal:
                out.add((root_ordinal[node_id],))
            for l in sorted(self.parent_links(node_id),
                            key=lambda l: l.created_at):
                ordinal = child_ordinal[(l.src, l.dst, l.created_at)]
                for addr in addresses_of(l.dst):
                    out.add(addr + (ordinal,))
            memo[node_id] = frozenset(out)
            return memo[node_id]

        result = {n.id: addresses_of(n.id) for n in ok_nodes}
        self._addresses = result
        self._addresses_stale = False
        return result

    @property
    def addresses(self) -> dict:
        if self._addresses_stale or not self._addresses:
            self.compute_addresses()
        return self._addresses

    def kind_of_property(self, prop_id: str) -> str:
        for l in self.links:
            if l.link_type == HAS_PROPERTY and l.dst == prop_id:
                return l.src
        raise NodeConflictError(f"{prop_id} has no attachment")

    def rank(self, node_id: str) -> frozenset:
        """Address set; a property node inherits its kind node's rank.
        A property node whose attachment was retracted has no rank."""
        node = self.nodes[node_id]
        if node.kind == "property":
            for l in self.links:
                if l.link_type == HAS_PROPERTY and l.dst == node_id:
                    return self.addresses.get(l.src, frozenset())
            return frozenset()
        return self.addresses.get(node_id, frozenset())

    def more_specific(self, n1: str, n2: str) -> str:
        """'yes' when n1 sits strictly below n2, 'no' for the reverse,
        'incomparable' otherwise. Property nodes compare through the kind
        they are attached to."""
        a = self.kind_of_property(n1) if self.nodes[n1].kind == "property" else n1
        b = self.kind_of_property(n2) if self.nodes[n2].kind == "property" else n2
        if b in self.strict_ancestors(a):
            return "yes"
        if a in self.strict_ancestors(b):
            return "no"
        return "incomparable"

    # -- property applicability -------------------------------------------

    def applicable_properties(self, object_id: str) -> list:
        """Surviving (property node, sign) pairs for an object.

        Candidates are the properties attached to any ancestor kind. A
        candidate is blocked by a same-name opposite-sign candidate whose
        kind is strictly more specific. Same-name same-sign candidates at
        different levels all survive; duplicate suppression happens at
        formula entry, modulo occurrence."""
        self._require(object_id, "object")
        ancestors = self.strict_ancestors(object_id)
        candidates = []
        for l in self.links:
            if l.link_type == HAS_PROPERTY and l.src in ancestors:
                candidates.append((self.nodes[l.dst], l.src))
        survivors = []
        for node, kind_id in candidates:
            blocked = False
            for other, other_kind in candidates:
                if (other.name == node.name and other.sign != node.sign
                        and other_kind != kind_id
                        and kind_id in self.strict_ancestors(other_kind)):
                    blocked = True
                    break
            if not blocked:
                survivors.append(node)
        survivors.sort(key=lambda n: n.created_at)
        return [(n, n.sign) for n in survivors]

    # -- formulas represented by links --------------------------------------

    def link_formula(self, link: Link) -> Formula:
        """The belief-set formula a link stands for."""
        if link.link_type == OBJECT_KIND:
            obj = self.nodes[link.src]
            kind = self.nodes[link.dst]
            pred = PredicateSymbol(kind.name, 1, KIND)
            return Atom(pred, (Constant(obj.name),))
        x = Variable("x")
        if link.link_type == SUBKIND_KIND:
            sub = self.nodes[link.src]
            sup = self.nodes[link.dst]
            return ForAll("x", Implies(
                Atom(PredicateSymbol(sub.name, 1, KIND), (x,)),
                Atom(PredicateSymbol(sup.name, 1, KIND), (x,))))
        kind = self.nodes[link.src]
        prop = self.nodes[link.dst]
        head: Formula = Atom(
            PredicateSymbol(prop.name, 1, PROPERTY, prop.occurrence), (x,))
        if prop.sign == NEGATIVE:
            head = Not(head)
        return ForAll("x", Implies(
            Atom(PredicateSymbol(kind.name, 1, KIND), (x,)), head))

    def find_link_by_formula(self, f: Formula) -> Optional[Link]:
        for l in self.links:
            if self.link_formula(l) == f:
                return l
        return None

    # -- export --------------------------------------------------------------

    def export(self) -> dict:
        return {
            "nodes": [n.export() for n in
                      sorted(self.nodes.values(), key=lambda n: n.created_at)],
            "links": [l.export() for l in self.links],
        }

    def view(self) -> dict:
        """Nodes with addresses plus links, for the read API."""
        addresses = self.addresses
        nodes = []
        for n in sorted(self.nodes.values(), key=lambda n: n.created_at):
            rec = n.export()
            rec["addresses"] = sorted(list(a) for a in self.rank(n.id))
            nodes.append(rec)
        return {"nodes": nodes,
                "links": [l.export() for l in self.links]}

    @classmethod
    def from_export(cls, data: dict, counters: dict) -> "Hierarchy":
        h = cls()
        for rec in data.get("nodes", []):
            node = Node(rec["id"], rec["kind"], rec["name"],
                        rec["created_at"], rec.get("occurrence"),
                        rec.get("sign"))
            h.nodes[node.id] = node
            h._seq = max(h._seq, node.created_at)
        for rec in data.get("links", []):
            link = Link(rec["from"], rec["to"], rec["type"],
                        rec["created_at"])
            h.links.append(link)
            h._seq = max(h._seq, link.created_at)
        h.occurrence_counters = dict(counters)
        h._addresses_stale = True
        return h

    def to_dot(self) -> str:
        """Graphviz rendering: objects as boxes at the bottom, kinds as
        ellipses, properties as plaintext beside their kind."""
        lines = ["digraph hierarchy {", "  rankdir=BT;"]
        for n in sorted(self.nodes.values(), key=lambda n: n.created_at):
            if n.kind == "object":
                lines.append(f'  {n.id} [shape=box, label="{n.name}"];')
            elif n.kind == "kind":
                lines.append(f'  {n.id} [shape=ellipse, label="{n.name}"];')
            else:
                prefix = "~" if n.sign == NEGATIVE else ""
                lines.append(
                    f'  {n.id} [shape=plaintext, '
                    f'label="{prefix}{n.name}#{n.occurrence}"];')
        for l in self.links:
            if l.link_type == OBJECT_KIND:
                lines.append(f"  {l.src} -> {l.dst};")
            elif l.link_type == SUBKIND_KIND:
                lines.append(f"  {l.src} -> {l.dst} [style=bold];")
            else:
                lines.append(
                    f"  {l.src} -> {l.dst} [style=dashed, dir=none, "
                    f"constraint=false];")
        lines.append("}")
        return "\n".join(lines) + "\n"
