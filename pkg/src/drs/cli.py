"""Command line front end.

    drs repl [--journal FILE]
    drs run SCRIPT [--choose auto|prompt]
    drs serve [--port N] [--data DIR] [--host HOST]
    drs export --dot SESSION_FILE

SESSION_FILE is a snapshot (.json) or a journal (.jsonl; replayed first).
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional

from .controller import EventOutcome
from .errors import DrsError
from .formulas import render_formula
from .revision import Interactive
from .scripts import run_script_file
from .session import Journal, Session


def _print_outcome(session: Session, outcome: EventOutcome) -> None:
    if not outcome.accepted:
        print(f"rejected: {outcome.reject_reason} ({outcome.reject_detail})")
        return
    for t in outcome.new_entries:
        e = session.path.entry(t)
        marker = "+" if e.believed else "-"
        print(f"  {marker} {t}: {render_formula(e.formula)}")
    for link in outcome.removed_links:
        print(f"  removed link {link.src} -> {link.dst}")
    if outcome.revision is not None:
        rep = outcome.revision
        print(f"  revision: retracted {list(rep.chosen)}, "
              f"cascade {list(rep.cascade)}")
    if outcome.pending_choice is not None:
        _print_pending(session)


def _print_pending(session: Session) -> None:
    print("contradiction: choose entries to retract with "
          ":resolve t1,t2,...")
    for row in session.controller.pending_culprit_view():
        print(f"  {row['t']}: {row['formula']} "
              f"(entrenchment {row['entrenchment']})")


def _print_beliefs(session: Session, which: str) -> None:
    for e in session.path.entries:
        if which == "believed" and not e.believed:
            continue
        if which == "disbelieved" and e.believed:
            continue
        print(f"  {e.time_stamp}: [{e.label.status[:6]}] "
              f"{render_formula(e.formula)}")


def _print_entry(session: Session, t: int) -> None:
    rec = session.path.entry(t).export()
    for key in ("t", "formula", "from", "to", "status", "entrenchment",
                "category"):
        print(f"  {key}: {rec[key]}")


def _print_hierarchy(session: Session) -> None:
    view = session.path.hierarchy.view()
    for node in view["nodes"]:
        addresses = ",".join(
            "(" + ",".join(str(i) for i in a) + ")"
            for a in node["addresses"]) or "-"
        tag = {"object": "obj", "kind": "kind", "property": "prop"}[node["kind"]]
        name = node["name"]
        if node["kind"] == "property":
            sign = "~" if node["sign"] == "negative" else ""
            name = f"{sign}{name}#{node['occurrence']}"
        print(f"  {tag:5} {name:24} {addresses}")
    for link in view["links"]:
        print(f"  {link['from']} -> {link['to']} ({link['type']})")


def repl(journal_path: Optional[str] = None) -> int:
    session = Session(policy=Interactive(), journal_path=journal_path)
    print("drs repl; formulas are inputs, :help lists commands")
    while True:
        try:
            line = input("drs> ").strip()
        except EOFError:
            print()
            return 0
        if not line:
            continue
        try:
            if line in (":quit", ":q", ":exit"):
                return 0
            if line == ":help":
                print("  :beliefs [all|believed|disbelieved]   list entries\n"
                      "  :hierarchy                            show the graph\n"
                      "  :entry T                              entry details\n"
                      "  :resolve T1,T2,...                    answer a pending choice\n"
                      "  :consistency                          run the scan\n"
                      "  :save FILE / :load FILE               snapshot\n"
                      "  :dot FILE                             graphviz export\n"
                      "  :quit                                 leave")
            elif line.startswith(":beliefs"):
                arg = (line.split(None, 1) + ["believed"])[1]
                _print_beliefs(session, arg)
            elif line == ":hierarchy":
                _print_hierarchy(session)
            elif line.startswith(":entry"):
                _print_entry(session, int(line.split()[1]))
            elif line.startswith(":resolve"):
                stamps = [int(s) for s in
                          line.split(None, 1)[1].replace(",", " ").split()]
                report = session.resolve(stamps)
                print(f"  retracted {list(report.chosen)}, "
                      f"cascade {list(report.cascade)}")
                if session.pending is not None:
                    _print_pending(session)
            elif line == ":consistency":
                scan = session.controller.consistency_scan()
                print(f"  {'consistent' if scan.consistent else 'INCONSISTENT'}"
                      + (f" witness {list(scan.witness)}"
                         if scan.witness else ""))
            elif line.startswith(":save"):
                session.save_snapshot(line.split(None, 1)[1])
                print("  saved")
            elif line.startswith(":load"):
                session = Session.load_snapshot(line.split(None, 1)[1],
                                                policy=Interactive())
                print("  loaded")
            elif line.startswith(":dot"):
                with open(line.split(None, 1)[1], "w", encoding="utf-8") as fh:
                    fh.write(session.path.hierarchy.to_dot())
                print("  written")
            elif line.startswith(":"):
                print(f"  unknown command {line.split()[0]}; try :help")
            else:
                outcome = session.input(line)
                _print_outcome(session, outcome)
        except (DrsError, OSError, IndexError, ValueError) as exc:
            print(f"  error: {exc}")


def _export(session_file: str, as_dot: bool) -> int:
    if session_file.endswith(".jsonl"):
        session = Session.replay(Journal.load(session_file))
    else:
        session = Session.load_snapshot(session_file)
    if as_dot:
        sys.stdout.write(session.path.hierarchy.to_dot())
    else:
        sys.stdout.write(session.snapshot_json())
    return 0


def main(argv: Optional[list] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="drs", description="dynamic reasoning sessions")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("repl", help="interactive session").add_argument(
        "--journal", help="append inputs to this journal file")

    run_p = sub.add_parser("run", help="run a script file")
    run_p.add_argument("script")
    run_p.add_argument("--choose", choices=["auto", "prompt"],
                       default="prompt")

    serve_p = sub.add_parser("serve", help="start the HTTP service")
    serve_p.add_argument("--port", type=int, default=8000)
    serve_p.add_argument("--host", default="127.0.0.1")
    serve_p.add_argument("--data", help="journal persistence directory")

    export_p = sub.add_parser("export", help="export a saved session")
    export_p.add_argument("session_file")
    export_p.add_argument("--dot", action="store_true",
                          help="emit the hierarchy as graphviz")

    args = parser.parse_args(argv)
    if args.command == "repl":
        return repl(args.journal)
    if args.command == "run":
        report = run_script_file(args.script, choose=args.choose)
        print(report.describe())
        return 0 if report.passed else 1
    if args.command == "serve":
        from .service import serve
        serve(port=args.port, data_dir=args.data, host=args.host)
        return 0
    if args.command == "export":
        return _export(args.session_file, args.dot)
    return 2


if __name__ == "__main__":
    sys.exit(main())
