"""Command line interface.

Exit codes: 0 the query holds (or the set is non-empty), 1 it does not,
2 the theory, narrative or causal setting is invalid, 3 an input could
not be read or parsed.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from importlib import resources
from pathlib import Path

from . import goals
from .causality import SettingError, causes, first_impossible
from .engine import Engine, EngineError, Situation
from .explanation import RRIntError, RRIntStore, explains
from .syntax import (ParseError, format_formula, load_domain, load_narrative,
                     parse_formula, parse_queries, parse_rrint)
from .terms import TermError
from .theory import validate_theory

OK, FALSE, INVALID, UNREADABLE = 0, 1, 2, 3


class CliError(Exception):
    def __init__(self, code, kind, message, location=None):
        super().__init__(message)
        self.code, self.kind, self.location = code, kind, location


def data_dir() -> Path:
    return Path(str(resources.files("causekit") / "data"))


def resolve(name: str, suffix: str) -> Path:
    """A path as given, or else a shipped fixture file of that name."""
    p = Path(name)
    if p.exists():
        return p
    for cand in (data_dir() / name, data_dir() / (name + suffix)):
        if cand.exists():
            return cand
    raise CliError(UNREADABLE, "missing-file", f"no such file: {name}")


class Session:
    def __init__(self, args):
        self.args = args
        self.theory = load_domain(resolve(args.domain, ".ck"))
        if args.horizon is not None:
            self.theory.horizon = args.horizon
        self.engine = Engine(self.theory)
        report = validate_theory(self.theory, self.engine)
        if not report.ok:
            raise CliError(INVALID, "invalid-theory", "; ".join(report.messages()),
                           {"violations": [{"code": v.code, "message": v.message}
                                           for v in report.violations]})
        self.world = args.world or self.theory.real_world
        if self.world not in self.theory.worlds:
            raise CliError(INVALID, "unknown-world", f"unknown world {self.world}")
        self.narrative = None
        if getattr(args, "narrative", None):
            self.narrative = load_narrative(resolve(args.narrative, ".nr"), self.theory.tables)

    def scenario(self) -> Situation:
        acts = self.narrative.actions if self.narrative else ()
        s = Situation(self.world, acts)
        at = getattr(self.args, "at", None)
        if at is not None:
            if not 0 <= at <= s.time:
                raise CliError(INVALID, "bad-time", f"time {at} is outside the narrative")
            s = s.prefix(at)
        if s.time > self.engine.horizon:
            raise CliError(INVALID, "horizon", f"narrative is longer than the horizon {self.engine.horizon}")
        return s

    def executable(self, s: Situation) -> Situation:
        bad = first_impossible(self.engine, s)
        if bad is not None:
            raise CliError(INVALID, "not-executable",
                           f"step {bad} ({s.history[bad]}) is not possible", {"step": bad})
        return s

    def formula(self, text: str):
        return parse_formula(text, self.theory.tables)


def _pairs(items):
    return [{"action": str(a), "time": t} for a, t in items]


def cmd_check(ses, args, doc):
    doc["theory"] = {"name": ses.theory.name, "worlds": sorted(ses.theory.worlds),
                     "agents": list(ses.theory.tables.agents), "valid": True}
    if ses.narrative is not None:
        s = ses.scenario()
        doc["narrative"] = {"name": ses.narrative.name, "length": s.time,
                            "actions": [str(a) for a in s.history]}
        ses.executable(s)
        doc["narrative"]["executable"] = True
    return True


def cmd_eval(ses, args, doc):
    f = ses.formula(args.formula)
    s = ses.scenario()
    doc["query"].update(formula=format_formula(f), situation=str(s))
    return ses.engine.holds(s, f)


def cmd_intends(ses, args, doc):
    f = ses.formula(args.formula)
    s = ses.scenario()
    doc["query"].update(agent=args.agent, formula=format_formula(f), level=args.level, situation=str(s))
    return goals.intends(ses.engine, args.agent, f, s, args.level)


def cmd_pgoal(ses, args, doc):
    f = ses.formula(args.formula)
    s = ses.scenario()
    doc["query"].update(agent=args.agent, formula=format_formula(f), level=args.level, situation=str(s))
    return goals.pgoal(ses.engine, args.agent, f, args.level, s)


def cmd_causes(ses, args, doc):
    f = ses.formula(args.effect)
    s = ses.executable(ses.scenario())
    doc["query"].update(effect=format_formula(f), situation=str(s))
    found = list(causes(ses.engine, f, s))
    doc["causes"] = _pairs(found)
    return bool(found)


def _narratives(ses, args):
    names = {}
    if ses.narrative is not None:
        names[ses.narrative.name] = ses.narrative.actions
    dirs = [Path(args.rrint).parent, data_dir()]
    if args.narrative:
        dirs.insert(0, Path(args.narrative).parent)
    return names, dirs


def cmd_explains(ses, args, doc):
    f = ses.formula(args.effect)
    s = ses.executable(ses.scenario())
    doc["query"].update(effect=format_formula(f), situation=str(s))
    store = RRIntStore()
    if args.rrint:
        path = resolve(args.rrint, ".rr")
        lines = parse_rrint(path.read_text(), ses.theory.tables, str(path))
        names, dirs = _narratives(ses, args)
        for ln in lines:
            if ln.narrative in names:
                continue
            for d in dirs:
                cand = d / (ln.narrative + ".nr")
                if cand.exists():
                    names[ln.narrative] = load_narrative(cand, ses.theory.tables).actions
                    break
        store = RRIntStore.from_lines(lines, names, ses.world, ses.theory.tables)
        doc["query"]["rrint_facts"] = len(store)
    found = explains(ses.engine, store, f, s)
    doc["explanations"] = [
        {"action": str(e.action), "time": e.time,
         "via": [{"action": str(l.action), "time": l.time, "intention": format_formula(l.intention)}
                 for l in e.chain]}
        for e in found]
    return bool(found)


def cmd_paths(ses, args, doc):
    s = ses.scenario()
    doc["query"]["situation"] = str(s)
    n = ses.engine.count_paths(s)
    doc["paths"] = {"count": n}
    if not args.count:
        doc["paths"]["list"] = sorted(" ; ".join(map(str, p.actions))
                                      for p in ses.engine.enumerate_paths(s))
    return n > 0


def cmd_query(ses, args, doc):
    path = resolve(args.file, ".q")
    qs = parse_queries(path.read_text(), ses.theory.tables, str(path))
    s = ses.scenario()
    doc["query"]["situation"] = str(s)
    results = []
    for q in qs:
        if q.kind == "eval":
            v = ses.engine.holds(s, q.formula)
        elif q.kind == "intends":
            v = goals.intends(ses.engine, q.agent, q.formula, s, q.level)
        elif q.kind == "pgoal":
            v = goals.pgoal(ses.engine, q.agent, q.formula, q.level, s)
        elif q.kind == "causes":
            v = _pairs(causes(ses.engine, q.formula, ses.executable(s)))
        else:
            v = [{"action": str(e.action), "time": e.time}
                 for e in explains(ses.engine, RRIntStore(), q.formula, ses.executable(s))]
        results.append({"kind": q.kind, "agent": q.agent, "level": q.level,
                        "formula": format_formula(q.formula), "result": v})
    doc["results"] = results
    return all(bool(r["result"]) for r in results)


COMMANDS = {"check": cmd_check, "eval": cmd_eval, "intends": cmd_intends, "pgoal": cmd_pgoal,
            "causes": cmd_causes, "explains": cmd_explains, "paths": cmd_paths, "query": cmd_query}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(UNREADABLE, "usage", f"{self.prog}: {message}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--domain", default="drone.ck",
                        help="domain file, or the name of a shipped fixture (default: drone.ck)")
    common.add_argument("--horizon", type=int, help="override the domain's horizon")
    common.add_argument("--world", help="initial world of the scenario (default: the real one)")
    common.add_argument("--json", action="store_true", help="print a JSON document")
    common.add_argument("--timing", action="store_true", help="include wall-clock timing in the output")

    scen = argparse.ArgumentParser(add_help=False)
    scen.add_argument("--narrative", help="narrative file; the scenario is its end situation")
    scen.add_argument("--at", type=int, help="use the narrative prefix of this length")

    ap = _Parser(prog="causekit", description="Reason about causes of actions, knowledge and intentions.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("check", parents=[common, scen], help="validate the theory and a narrative")
    p = sub.add_parser("eval", parents=[common, scen], help="evaluate a state formula")
    p.add_argument("--formula", required=True)
    for name in ("intends", "pgoal"):
        p = sub.add_parser(name, parents=[common, scen], help=f"decide {'Int' if name == 'intends' else 'PGoal'}")
        p.add_argument("--agent", required=True)
        p.add_argument("--formula", required=True)
        p.add_argument("--level", type=int)
    p = sub.add_parser("causes", parents=[common, scen], help="actual causes of an effect")
    p.add_argument("--effect", required=True)
    p = sub.add_parser("explains", parents=[common, scen], help="explanations of an observation")
    p.add_argument("--effect", required=True)
    p.add_argument("--rrint", help="file of recognized intentions")
    p = sub.add_parser("paths", parents=[common, scen], help="paths from the scenario to the horizon")
    p.add_argument("--count", action="store_true", help="only count them")
    p = sub.add_parser("query", parents=[common, scen], help="run a file of queries")
    p.add_argument("file")
    return ap


def _render_text(doc) -> str:
    lines = []
    if "error" in doc:
        e = doc["error"]
        lines.append(f"error [{e['kind']}]: {e['message']}")
        return "\n".join(lines)
    q = doc.get("query", {})
    for k in sorted(q):
        if q[k] is not None:
            lines.append(f"{k}: {q[k]}")
    if "narrative" in doc:
        n = doc["narrative"]
        lines.append(f"narrative {n['name']}: {n['length']} actions, executable")
    if "causes" in doc:
        lines.append("causes:")
        lines.extend(f"  {c['action']} @ {c['time']}" for c in doc["causes"])
    if "explanations" in doc:
        lines.append("explanations:")
        for e in doc["explanations"]:
            via = "".join(f"  <- Int({l['intention']}) behind {l['action']} @ {l['time']}" for l in e["via"])
            lines.append(f"  {e['action']} @ {e['time']}{via}")
    if "paths" in doc:
        lines.append(f"paths: {doc['paths']['count']}")
        lines.extend("  " + p for p in doc["paths"].get("list", []))
    if "results" in doc:
        for r in doc["results"]:
            lines.append(f"{r['kind']} {r['formula']}: {r['result']}")
    lines.append(f"verdict: {doc['verdict']}")
    return "\n".join(lines)


def run_cli(argv=None) -> "tuple[int, dict]":
    try:
        args = build_parser().parse_args(argv)
    except CliError as e:
        return e.code, {"error": {"kind": e.kind, "message": str(e), "detail": None}, "exit": e.code}
    doc = {"command": args.command, "query": {}}
    t0 = time.perf_counter()
    try:
        ses = Session(args)
        doc["engine"] = {"domain": ses.theory.name, "horizon": ses.engine.horizon, "world": ses.world}
        verdict = bool(COMMANDS[args.command](ses, args, doc))
        doc["verdict"] = verdict
        code = OK if verdict else FALSE
    except CliError as e:
        doc["error"] = {"kind": e.kind, "message": str(e), "detail": e.location}
        code = e.code
    except ParseError as e:
        doc["error"] = {"kind": "parse", "message": str(e),
                        "detail": {"source": e.source, "line": e.line, "col": e.col}}
        code = UNREADABLE
    except OSError as e:
        doc["error"] = {"kind": "io", "message": str(e), "detail": None}
        code = UNREADABLE
    except SettingError as e:
        detail = {"step": e.step} if hasattr(e, "step") else None
        doc["error"] = {"kind": e.code, "message": str(e), "detail": detail}
        code = INVALID
    except (RRIntError, TermError, EngineError) as e:
        doc["error"] = {"kind": type(e).__name__, "message": str(e), "detail": None}
        code = INVALID
    if args.timing:
        doc["seconds"] = round(time.perf_counter() - t0, 3)
    doc["exit"] = code
    return code, doc


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    code, doc = run_cli(argv)
    if "--json" in argv:
        print(json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False))
    else:
        out = _render_text(doc)
        print(out, file=sys.stderr if "error" in doc else sys.stdout)
    return code


if __name__ == "__main__":
    sys.exit(main())
