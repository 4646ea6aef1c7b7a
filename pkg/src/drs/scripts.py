"""Batch script runner for reasoning sessions.

A script is a text file executed line by line against a fresh session.
Bare lines are formula inputs. Blank lines and lines starting with //
are skipped. Directives:

    #choose auto|prompt           switch the revision chooser
    #resolve t1,t2,...            answer the pending retraction choice
    #expect-believed "formula"    the formula is currently believed
    #expect-disbelieved "formula" some entry holds it, none believed
    #expect-rejected reason       the last input was rejected for reason
    #expect-consistent            the scan reports consistency

Expectations are checked at their position in the script and collected
into a conformance report; the run never aborts on a failed expectation.

The session journal records inputs and explicit #resolve choices, so a
script that sticks to one chooser mode leaves a journal that replays
deterministically (prompt mode with Interactive, auto mode with
Automated). A #choose switch mid-script affects the live run only;
journals do not record the switch.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .controller import EventOutcome
from .errors import DrsError, ScriptError
from .formulas import parse_formula, render_formula
from .revision import Automated, Interactive
from .session import Session


@dataclass
class ExpectationResult:
    line_no: int
    text: str
    ok: bool
    actual: str = ""

    def describe(self) -> str:
        mark = "ok" if self.ok else "FAIL"
        out = f"{mark}  line {self.line_no}: {self.text}"
        if not self.ok and self.actual:
            out += f"  [{self.actual}]"
        return out


@dataclass
class ScriptReport:
    results: list = field(default_factory=list)
    error: Optional[str] = None

    @property
    def passed(self) -> bool:
        return self.error is None and all(r.ok for r in self.results)

    def describe(self) -> str:
        lines = [r.describe() for r in self.results]
        checked = len(self.results)
        failed = sum(1 for r in self.results if not r.ok)
        if self.error:
            lines.append(f"ERROR: {self.error}")
        lines.append(f"{checked - failed}/{checked} expectations passed")
        return "\n".join(lines)


def _canonical(text: str) -> str:
    return render_formula(parse_formula(text))


def _unquote(text: str) -> str:
    text = text.strip()
    if len(text) >= 2 and text[0] == '"' and text[-1] == '"':
        return text[1:-1]
    return text


def run_script(script_text: str, choose: Optional[str] = None,
               session: Optional[Session] = None) -> ScriptReport:
    """Execute script text against a fresh session and report on every
    expectation. `choose` ("auto" or "prompt") overrides the initial
    chooser; #choose directives switch it mid-run."""
    report = ScriptReport()
    if session is None:
        policy = Automated() if choose == "auto" else Interactive()
        session = Session(policy=policy)
    last_outcome: Optional[EventOutcome] = None

    for line_no, raw in enumerate(script_text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("//"):
            continue
        try:
            if line.startswith("#"):
                last_outcome = _directive(session, report, line_no, line,
                                          last_outcome)
            else:
                # uniform source label keeps script-driven sessions
                # byte-identical with the other interfaces
                last_outcome = session.input(line)
        except DrsError as exc:
            report.results.append(ExpectationResult(
                line_no, line, False, f"engine error: {exc}"))
    return report


def _directive(session: Session, report: ScriptReport, line_no: int,
               line: str, last_outcome: Optional[EventOutcome]):
    head, _, rest = line.partition(" ")
    rest = rest.strip()
    if head == "#choose":
        if rest == "auto":
            session.controller.policy = Automated()
        elif rest == "prompt":
            session.controller.policy = Interactive()
        else:
            raise ScriptError(f"line {line_no}: #choose takes auto|prompt")
        return last_outcome
    if head == "#resolve":
        stamps = [int(s) for s in rest.replace(",", " ").split()]
        if session.controller.pending is None:
            report.results.append(ExpectationResult(
                line_no, line, False, "no pending revision"))
            return last_outcome
        session.resolve(stamps)
        return last_outcome
    if head == "#expect-believed":
        wanted = _canonical(_unquote(rest))
        believed = {render_formula(f)
                    for _, f in session.path.believed_formulas()}
        report.results.append(ExpectationResult(
            line_no, line, wanted in believed,
            f"{wanted} not among believed formulas"))
        return last_outcome
    if head == "#expect-disbelieved":
        wanted = _canonical(_unquote(rest))
        statuses = [e.label.status for e in session.path.entries
                    if render_formula(e.formula) == wanted]
        ok = bool(statuses) and all(s == "disbelieved" for s in statuses)
        report.results.append(ExpectationResult(
            line_no, line, ok,
            f"statuses for {wanted}: {statuses or 'no entry'}"))
        return last_outcome
    if head == "#expect-rejected":
        reason = rest.strip()
        if last_outcome is None:
            report.results.append(ExpectationResult(
                line_no, line, False, "no preceding input"))
        else:
            ok = (not last_outcome.accepted
                  and last_outcome.reject_reason == reason)
            actual = ("accepted" if last_outcome.accepted
                      else f"rejected: {last_outcome.reject_reason}")
            report.results.append(ExpectationResult(line_no, line, ok, actual))
        return last_outcome
    if head == "#expect-consistent":
        scan = session.controller.consistency_scan()
        report.results.append(ExpectationResult(
            line_no, line, scan.consistent,
            f"witness {scan.witness}" if not scan.consistent else ""))
        return last_outcome
    raise ScriptError(f"line {line_no}: unknown directive {head}")


def run_script_file(path: str, choose: Optional[str] = None) -> ScriptReport:
    with open(path, encoding="utf-8") as fh:
        return run_script(fh.read(), choose=choose)
