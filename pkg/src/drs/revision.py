"""Contradiction resolution over a derivation path.

The algorithm runs in three steps: walk from-lists backward from the
contradiction entry to find every external input in its ancestry (the
culprits), retract a chosen subset of them, then chain forward through
to-lists retracting every entry whose derivation lost a premise. The
cascade must end up including the triggering contradiction; if the first
choice does not achieve that, further culprits are retracted under the
automated rule until it does.

Choosers: Automated picks the single believed culprit with the lowest
entrenchment, breaking ties toward the greatest time stamp (the most
recent input). Interactive delegates to a callback; a callback of None
marks a deferred chooser, used by callers that park the session and
collect the choice later (the controller refuses to run a revision with
it directly).
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

from .beliefs import (
    A_PRIORI,
    DISBELIEVED,
    DerivationPath,
    Entry,
    ExternalSource,
)
from .errors import (
    InvalidChoiceError,
    NotContradictionError,
    RetractionEligibilityError,
)
from .formulas import FALSUM, strip_occurrences


@dataclass(frozen=True)
class RevisionReport:
    trigger: int
    culprits: tuple
    chosen: tuple
    cascade: tuple

    def export(self) -> dict:
        return {
            "trigger": self.trigger,
            "culprits": list(self.culprits),
            "chosen": list(self.chosen),
            "cascade": list(self.cascade),
        }


class Automated:
    """Retract the lowest-entrenchment culprit, most recent on ties."""

    deferred = False

    def choose(self, candidates: list) -> set:
        return {automated_choice(candidates)}


class Interactive:
    """Delegate the choice to a callback over the believed culprits.

    The callback receives the culprit entries and must return a non-empty
    subset of their time stamps. With callback=None the chooser is
    deferred: the caller must park and collect the choice out of band.
    """

    def __init__(self, callback: Optional[Callable] = None):
        self.callback = callback

    @property
    def deferred(self) -> bool:
        return self.callback is None

    def choose(self, candidates: list) -> set:
        if self.callback is None:
            raise InvalidChoiceError(
                "deferred interactive chooser cannot run inline")
        return set(self.callback(candidates))


class FixedChoice:
    """One-shot chooser replaying a recorded selection."""

    deferred = False

    def __init__(self, chosen: Iterable):
        self.chosen = set(chosen)

    def choose(self, candidates: list) -> set:
        return set(self.chosen)


def automated_choice(candidates: list) -> int:
    """The automated retraction rule over culprit entries."""
    if not candidates:
        raise InvalidChoiceError("no believed culprits left to retract")
    best = min(candidates,
               key=lambda e: (e.label.entrenchment, -e.time_stamp))
    return best.time_stamp


def _is_contradiction_entry(entry: Entry) -> bool:
    return strip_occurrences(entry.formula) == FALSUM


def collect_culprits(path: DerivationPath, trigger: int) -> set:
    """All external inputs in the trigger's derivation ancestry.

    Follows from-list premises transitively; the result is the set of
    a-posteriori time stamps found at the leaves and along the way."""
    entry = path.entry(trigger)
    if not _is_contradiction_entry(entry):
        raise NotContradictionError(
            f"entry {trigger} is not a contradiction entry")
    culprits: set = set()
    seen: set = set()
    stack = [trigger]
    while stack:
        t = stack.pop()
        if t in seen:
            continue
        seen.add(t)
        e = path.entry(t)
        if isinstance(e.label.from_list, ExternalSource):
            culprits.add(t)
        stack.extend(e.premises())
    if not culprits:
        raise NotContradictionError(
            f"entry {trigger} has no extralogical ancestry; the logic "
            f"itself cannot derive a contradiction")
    return culprits


def forward_retract(path: DerivationPath, axioms: Iterable) -> list:
    """Retract the given entries and everything derived from them.

    Chains through to-lists breadth-first by time stamp; an entry falls
    when any of its from-list premises has been retracted. Returns the
    retraction order, the seed entries included. Seeds must be believed
    and not a-priori."""
    seeds = sorted(set(axioms))
    for t in seeds:
        if not path.has_entry(t):
            raise RetractionEligibilityError(f"no entry {t}")
        e = path.entry(t)
        if e.label.category == A_PRIORI:
            raise RetractionEligibilityError(
                f"entry {t} is a-priori and cannot be retracted")
        if not e.believed:
            raise RetractionEligibilityError(f"entry {t} is not believed")
    cascade: list = []
    fallen: set = set()
    frontier: list = list(seeds)
    heapq.heapify(frontier)
    queued: set = set(seeds)
    while frontier:
        t = heapq.heappop(frontier)
        if t in fallen:
            continue
        e = path.entry(t)
        if not e.believed:
            continue
        path.set_status(t, DISBELIEVED)
        fallen.add(t)
        cascade.append(t)
        for dependent in e.label.to_list:
            d = path.entry(dependent)
            if not d.believed or dependent in fallen:
                continue
            if any(p in fallen for p in d.premises()):
                if dependent not in queued:
                    heapq.heappush(frontier, dependent)
                    queued.add(dependent)
    return cascade


def dialectical_revision(path: DerivationPath, trigger: int,
                         policy) -> RevisionReport:
    """Resolve a believed contradiction entry under the given chooser.

    Collects culprits, retracts the chosen subset with its forward
    cascade, and keeps retracting under the automated rule until the
    trigger itself is disbelieved. A-priori entries are never touched."""
    entry = path.entry(trigger)
    if not _is_contradiction_entry(entry):
        raise NotContradictionError(
            f"entry {trigger} is not a contradiction entry")
    if not entry.believed:
        raise NotContradictionError(f"entry {trigger} is already disbelieved")
    culprits = collect_culprits(path, trigger)
    believed = [path.entry(t) for t in sorted(culprits)
                if path.entry(t).believed]
    chosen = set(policy.choose(believed))
    offered = {e.time_stamp for e in believed}
    if not chosen or not chosen <= offered:
        raise InvalidChoiceError(
            f"chooser returned {sorted(chosen)}, expected a non-empty "
            f"subset of {sorted(offered)}")
    cascade = forward_retract(path, chosen)
    while path.entry(trigger).believed:
        remaining = [path.entry(t) for t in sorted(culprits)
                     if path.entry(t).believed]
        extra = automated_choice(remaining)
        chosen.add(extra)
        cascade.extend(forward_retract(path, {extra}))
    assert not path.entry(trigger).believed
    return RevisionReport(trigger, tuple(sorted(culprits)),
                          tuple(sorted(chosen)), tuple(cascade))
