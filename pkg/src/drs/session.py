"""Session persistence: a write-ahead journal of user inputs and
retraction choices, JSON snapshots of the full engine state, and
deterministic replay.

Journal format: one JSON object per line, UTF-8, LF separators,
fields {"seq", "kind", "payload", "source", "wall_time"}. The payload of
a user_input record is the canonical formula string; a resolution_choice
record carries the chosen time stamps. Records are appended (and fsynced
when file-backed) before the engine mutation they describe, so a journal
truncated at any line boundary replays to a valid state. Wall-clock
times are recorded but play no part in replay; the engine's logical time
stamps are authoritative.

Snapshots are a single JSON document with top-level keys entries,
symbols, hierarchy, counters, and next_time, serialized with sorted keys
so equal states give byte-identical documents.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Iterable, Optional

from .beliefs import (
    DerivationPath,
    Entry,
    ExternalSource,
    Label,
    RuleApplication,
    SchemaInstantiation,
)
from .controller import Controller, EventOutcome
from .errors import JournalError, ParseError, PendingRevisionError
from .formulas import parse_formula, render_formula
from .hierarchy import Hierarchy
from .revision import Automated, Interactive, RevisionReport

USER_INPUT = "user_input"
RESOLUTION_CHOICE = "resolution_choice"


@dataclass(frozen=True)
class JournalRecord:
    seq: int
    kind: str
    payload: object
    source: str = ""
    wall_time: str = ""

    def to_line(self) -> str:
        return json.dumps(
            {"seq": self.seq, "kind": self.kind, "payload": self.payload,
             "source": self.source, "wall_time": self.wall_time},
            separators=(",", ":"))

    @classmethod
    def from_line(cls, line: str) -> "JournalRecord":
        try:
            data = json.loads(line)
        except json.JSONDecodeError as exc:
            raise JournalError(f"bad journal line: {exc}") from None
        for key in ("seq", "kind", "payload"):
            if key not in data:
                raise JournalError(f"journal line missing {key!r}")
        if data["kind"] not in (USER_INPUT, RESOLUTION_CHOICE):
            raise JournalError(f"unknown record kind {data['kind']!r}")
        return cls(data["seq"], data["kind"], data["payload"],
                   data.get("source", ""), data.get("wall_time", ""))


class Journal:
    """Append-only record log, optionally backed by a file."""

    def __init__(self, path: Optional[str] = None):
        self.path = path
        self.records: list = []
        self._fh = None
        if path is not None:
            self._fh = open(path, "a", encoding="utf-8")

    def __len__(self) -> int:
        return len(self.records)

    def next_seq(self) -> int:
        return len(self.records) + 1

    def append(self, record: JournalRecord) -> None:
        if record.seq != self.next_seq():
            raise JournalError(
                f"sequence gap: expected {self.next_seq()}, got {record.seq}")
        if self._fh is not None:
            self._fh.write(record.to_line() + "\n")
            self._fh.flush()
            os.fsync(self._fh.fileno())
        self.records.append(record)

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None

    def dump(self) -> str:
        return "".join(r.to_line() + "\n" for r in self.records)

    @classmethod
    def load(cls, path: str) -> list:
        records = []
        with open(path, encoding="utf-8") as fh:
            for n, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                rec = JournalRecord.from_line(line)
                if rec.seq != n:
                    raise JournalError(
                        f"sequence gap at line {n}: record says {rec.seq}")
                records.append(rec)
        return records


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


class Session:
    """A controller plus its journal; every mutation is journaled first."""

    def __init__(self, policy=None, journal_path: Optional[str] = None):
        self.controller = Controller(policy=policy)
        self.journal = Journal(journal_path)

    # -- convenience views ------------------------------------------------

    @property
    def path(self) -> DerivationPath:
        return self.controller.path

    @property
    def pending(self):
        return self.controller.pending

    # -- mutations ----------------------------------------------------------

    def input(self, text: str, source: str = "user") -> EventOutcome:
        """Journal then process one formula input.

        Unparseable text never reaches the journal (there is no canonical
        payload for it and no engine mutation either); it is rejected as
        malformed directly."""
        if self.controller.pending is not None:
            raise PendingRevisionError(
                "session is waiting on a retraction choice")
        try:
            canonical = render_formula(parse_formula(text))
        except ParseError as exc:
            from .controller import REJECT_MALFORMED
            return EventOutcome(False, REJECT_MALFORMED, str(exc))
        self.journal.append(JournalRecord(
            self.journal.next_seq(), USER_INPUT, canonical, source, _now()))
        return self.controller.handle_input(canonical, source)

    def resolve(self, chosen: Iterable) -> RevisionReport:
        """Journal then apply a retraction choice for the parked revision."""
        chosen = sorted(set(int(t) for t in chosen))
        self.controller.check_choice(chosen)
        self.journal.append(JournalRecord(
            self.journal.next_seq(), RESOLUTION_CHOICE, chosen, "", _now()))
        return self.controller.resolve_pending(chosen)

    # -- snapshots ------------------------------------------------------------

    def snapshot(self) -> dict:
        path = self.path
        return {
            "entries": path.export_entries(),
            "symbols": path.symbols.export(),
            "hierarchy": path.hierarchy.export(),
            "counters": dict(path.hierarchy.occurrence_counters),
            "next_time": path.next_time,
        }

    def snapshot_json(self) -> str:
        return json.dumps(self.snapshot(), sort_keys=True,
                          separators=(",", ":")) + "\n"

    def save_snapshot(self, file_path: str) -> None:
        with open(file_path, "w", encoding="utf-8") as fh:
            fh.write(self.snapshot_json())

    @classmethod
    def from_snapshot(cls, data: dict, policy=None) -> "Session":
        session = cls(policy=policy)
        path = session.path
        for rec in data["entries"]:
            frm = rec["from"]
            if frm["kind"] == "external":
                from_list = ExternalSource("es", frm.get("source") or None)
            elif frm["kind"] == "rule":
                from_list = RuleApplication(frm["rule"],
                                            tuple(frm["premises"]))
            else:
                from_list = SchemaInstantiation(frm["schema"],
                                                frm.get("rule", "inst"))
            label = Label(rec["t"], from_list, list(rec["to"]),
                          rec["status"], rec["entrenchment"], rec["category"])
            entry = Entry(parse_formula(rec["formula"]), label)
            path.entries.append(entry)
            if entry.believed:
                path._believed_keys.setdefault(
                    entry.strip_key, []).append(entry.time_stamp)
        path.next_time = data["next_time"]
        for name in data["symbols"]["constants"]:
            path.symbols.constants.append(name)
            path.symbols._constant_set.add(name)
        from .formulas import PredicateSymbol
        for p in data["symbols"]["predicates"]:
            pred = PredicateSymbol(p["name"], p["arity"], p["sort"])
            path.symbols.predicates.append(pred)
            path.symbols._predicate_map[pred.name] = pred
        path.hierarchy = Hierarchy.from_export(data["hierarchy"],
                                               data["counters"])
        return session

    @classmethod
    def load_snapshot(cls, file_path: str, policy=None) -> "Session":
        with open(file_path, encoding="utf-8") as fh:
            return cls.from_snapshot(json.load(fh), policy=policy)

    # -- replay -----------------------------------------------------------------

    @classmethod
    def replay(cls, records: list, policy=None) -> "Session":
        """Rebuild a session by re-running journal records in order.

        The default deferred-interactive policy parks on contradictions
        until the matching resolution_choice record arrives, which is how
        interactively driven journals replay; pass Automated() to replay
        a journal produced under the automated chooser. The journal of
        the returned session holds the same records."""
        session = cls(policy=policy if policy is not None else Interactive())
        for rec in records:
            if rec.kind == USER_INPUT:
                if session.controller.pending is not None:
                    raise JournalError(
                        f"record {rec.seq}: input while a choice was pending")
                session.controller.handle_input(rec.payload, rec.source)
            else:
                chosen = [int(t) for t in rec.payload]
                session.controller.check_choice(chosen)
                session.controller.resolve_pending(chosen)
            session.journal.records.append(rec)
        return session

    @classmethod
    def replay_file(cls, journal_path: str, policy=None) -> "Session":
        return cls.replay(Journal.load(journal_path), policy=policy)
