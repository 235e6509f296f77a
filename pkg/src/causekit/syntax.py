"""Text formats: formulas, domain files (.ck), narratives (.nr), RRInt fact
files (.rr) and query files (.q), plus a printer whose output parses back
to the same tree.

Formula syntax, loosest binding first::

    p <-> q     p -> q     p | q     p & q     p U q     p B q
    !p  X p  F p  G p  A p           forall x:Sort. p     exists x:Sort. p
    Know(d, p)  Kwhether(d, p)  Kref(d, t, Sort)  Int(d, p[, n])  PGoal(d, p[, n])
    Poss(act)  After(act, p)  Does(act, p)  Init  true  false  t = u  t != u

Line comments start with ``#``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from . import terms as tm
from .terms import MESSAGE, GroundAction, Tables
from .theory import TheoryModel, World


class ParseError(ValueError):
    def __init__(self, message, line=None, col=None, source=None):
        self.line, self.col, self.source = line, col, source
        where = ""
        if line is not None:
            where = f"{source + ':' if source else ''}{line}:{col}: "
        super().__init__(where + message)


_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+) | (?P<comment>\#[^\n]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<int>\d+)
  | (?P<sym><->|->|:=|!=|[()\[\]{},.:;=!~&|@])
""", re.VERBOSE)

KEYWORDS = {"true", "false", "forall", "exists", "X", "F", "G", "A", "U", "B",
            "Know", "Kwhether", "Kref", "Int", "PGoal", "Poss", "After", "Does", "Init"}


@dataclass(frozen=True)
class Token:
    kind: str
    value: str
    line: int
    col: int


def tokenize(text: str, source: str = None) -> list:
    out = []
    pos, line, start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - start + 1, source)
        kind = m.lastgroup
        if kind not in ("ws", "comment"):
            out.append(Token(kind, m.group(), line, pos - start + 1))
        chunk = m.group()
        nl = chunk.count("\n")
        if nl:
            line += nl
            start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    out.append(Token("eof", "", line, pos - start + 1))
    return out


class _Parser:
    def __init__(self, text, tables=None, source=None):
        self.toks = tokenize(text, source)
        self.i = 0
        self.tables = tables
        self.source = source

    # -- token helpers
    @property
    def tok(self):
        return self.toks[self.i]

    def peek(self, k=1):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        return ParseError(msg, tok.line, tok.col, self.source)

    def at(self, value):
        return self.tok.kind in ("sym", "ident") and self.tok.value == value

    def accept(self, value):
        if self.at(value):
            self.i += 1
            return True
        return False

    def expect(self, value):
        if not self.accept(value):
            shown = self.tok.value or "end of input"
            raise self.error(f"expected {value!r}, found {shown!r}")

    def ident(self):
        if self.tok.kind != "ident":
            raise self.error(f"expected a name, found {self.tok.value or 'end of input'!r}")
        v = self.tok.value
        self.i += 1
        return v

    def integer(self):
        if self.tok.kind != "int":
            raise self.error("expected a number")
        v = int(self.tok.value)
        self.i += 1
        return v

    def done(self):
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.value!r}")

    def skip_semis(self):
        while self.accept(";"):
            pass

    # -- formulas
    def formula(self, scope):
        return self._iff(scope)

    def _iff(self, sc):
        left = self._imp(sc)
        while self.accept("<->"):
            left = tm.Iff(left, self._imp(sc))
        return left

    def _imp(self, sc):
        left = self._or(sc)
        if self.accept("->"):
            return tm.Implies(left, self._imp(sc))
        return left

    def _or(self, sc):
        left = self._and(sc)
        while self.accept("|"):
            left = tm.Or(left, self._and(sc))
        return left

    def _and(self, sc):
        left = self._temporal(sc)
        while self.accept("&"):
            left = tm.And(left, self._temporal(sc))
        return left

    def _temporal(self, sc):
        left = self._unary(sc)
        if self.tok.kind == "ident" and self.tok.value in ("U", "B"):
            op = self.tok.value
            self.i += 1
            right = self._unary(sc)
            return tm.Until(left, right) if op == "U" else tm.Before(left, right)
        return left

    def _unary(self, sc):
        t = self.tok
        if self.accept("!") or self.accept("~"):
            return tm.Not(self._unary(sc))
        if t.kind == "ident" and t.value in ("X", "F", "G", "A"):
            self.i += 1
            body = self._unary(sc)
            return {"X": tm.Next, "F": tm.Eventually, "G": tm.Always, "A": tm.AllPaths}[t.value](body)
        if t.kind == "ident" and t.value in ("forall", "exists"):
            self.i += 1
            bound = []
            while True:
                name = self.ident()
                self.expect(":")
                sort = self.ident()
                if self.tables is not None and sort not in self.tables.sorts:
                    raise self.error(f"unknown sort {sort}")
                bound.append(tm.Var(name, sort))
                if not self.accept(","):
                    break
            self.expect(".")
            inner = dict(sc)
            for v in bound:
                inner[v.name] = v
            body = self.formula(inner)
            for v in reversed(bound):
                body = tm.Forall(v, body) if t.value == "forall" else tm.Exists(v, body)
            return body
        return self._primary(sc)

    def _primary(self, sc):
        t = self.tok
        if self.accept("("):
            f = self.formula(sc)
            self.expect(")")
            return f
        if t.kind != "ident":
            raise self.error(f"expected a formula, found {t.value or 'end of input'!r}")
        v = t.value
        if v in ("true", "false"):
            self.i += 1
            return tm.Truth(v == "true")
        if v == "Init":
            self.i += 1
            return tm.Atom(tm.INIT)
        if v in ("Know", "Kwhether", "Int", "PGoal"):
            self.i += 1
            self.expect("(")
            agent = self.term(sc, tm.AGENT_SORT)
            self.expect(",")
            body = self.formula(sc)
            level = None
            if v in ("Int", "PGoal") and self.accept(","):
                level = self.integer()
            self.expect(")")
            if v == "Know":
                return tm.Know(agent, body)
            if v == "Kwhether":
                return tm.Kwhether(agent, body)
            return (tm.Int if v == "Int" else tm.PGoal)(agent, body, level)
        if v == "Kref":
            self.i += 1
            self.expect("(")
            agent = self.term(sc, tm.AGENT_SORT)
            self.expect(",")
            term = self.term(sc, None)
            self.expect(",")
            sort = self.ident()
            self.expect(")")
            return tm.Kref(agent, term, sort)
        if v in ("Poss", "After", "Does"):
            self.i += 1
            self.expect("(")
            act = self.action_term(sc)
            if v == "Poss":
                self.expect(")")
                return tm.Poss(act)
            self.expect(",")
            body = self.formula(sc)
            self.expect(")")
            return (tm.After if v == "After" else tm.Does)(act, body)
        if v in sc and sc[v] == MESSAGE:
            self.i += 1
            return tm.Meta(v)
        tables = self.tables
        if tables is not None and (v in tables.fluents or v in tables.definitions):
            self.i += 1
            sig = tables.fluents.get(v) or tables.definitions[v]
            args = ()
            if self.accept("("):
                args = tuple(self._args(sc, sig.sorts))
                self.expect(")")
            elif sig.sorts:
                raise self.error(f"{v} expects {len(sig.sorts)} arguments")
            return tm.Atom(v, args)
        left = self.term(sc, None)
        if self.accept("="):
            return tm.Eq(left, self.term(sc, None))
        if self.accept("!="):
            return tm.Not(tm.Eq(left, self.term(sc, None)))
        raise self.error(f"unknown predicate {v}", t)

    def _args(self, sc, sorts):
        out = []
        for k, sort in enumerate(sorts):
            if k:
                self.expect(",")
            out.append(self.term(sc, sort))
        if self.at(","):
            raise self.error("too many arguments")
        return out

    def term(self, sc, sort):
        t = self.tok
        name = self.ident()
        if name in sc and sc[name] != MESSAGE:
            var = sc[name]
            if sort is not None and self.tables is not None and not self.tables.subsort(var.sort, sort):
                raise self.error(f"variable {name} of sort {var.sort} used where {sort} is expected", t)
            return var
        tables = self.tables
        if tables is not None and name in tables.actions:
            self.i -= 1
            return self.action_term(sc)
        if tables is not None:
            if name not in tables.objects:
                raise self.error(f"unknown symbol {name}", t)
            if sort is not None and not tables.in_sort(name, sort):
                raise self.error(f"{name} is not of sort {sort}", t)
        return tm.Const(name)

    def action_term(self, sc):
        t = self.tok
        name = self.ident()
        if name in sc and isinstance(sc[name], tm.Var) and sc[name].sort == "action":
            return sc[name]
        if self.tables is None or name not in self.tables.actions:
            raise self.error(f"unknown action {name}", t)
        sch = self.tables.actions[name]
        self.expect("(")
        args, payload = [], None
        for k, sort in enumerate(sch.sorts):
            if k:
                self.expect(",")
            if sort == MESSAGE:
                payload = self.formula(sc)
            else:
                args.append(self.term(sc, sort))
        if self.at(","):
            raise self.error("too many arguments")
        self.expect(")")
        return tm.ActionTerm(name, tuple(args), payload)

    def ground_action(self):
        tok = self.tok
        t = self.action_term({})
        try:
            return tm.ground_action(t)
        except tm.TermError as exc:
            raise self.error(str(exc), tok) from None

    # -- domain files
    def params(self, sorts_known=True):
        out = []
        self.expect("(")
        if not self.accept(")"):
            while True:
                name = self.ident()
                self.expect(":")
                sort = self.ident()
                if sort != MESSAGE and sort not in self.sorts:
                    raise self.error(f"unknown sort {sort}")
                out.append((name, sort))
                if not self.accept(","):
                    break
            self.expect(")")
        return out

    def domain(self):
        self.sorts = {}
        fluents, actions, defs, messages = {}, {}, {}, {}
        raw = {"poss": [], "ssa": [], "sf": [], "messages": [], "worlds": [], "k0": [],
               "goals": [], "axioms": []}
        horizon, name = None, "domain"
        while self.tok.kind != "eof":
            self.skip_semis()
            if self.tok.kind == "eof":
                break
            t = self.tok
            head = self.ident()
            if head == "domain":
                name = self.ident()
            elif head == "horizon":
                horizon = self.integer()
            elif head == "sorts":
                self.expect("{")
                while not self.accept("}"):
                    s = self.ident()
                    self.expect("=")
                    members = [self.ident()]
                    while self.accept(","):
                        members.append(self.ident())
                    if s in self.sorts:
                        raise self.error(f"sort {s} declared twice", t)
                    self.sorts[s] = tuple(members)
                    self.skip_semis()
            elif head == "fluents":
                self.expect("{")
                while not self.accept("}"):
                    tt = self.tok
                    f = self.ident()
                    ps = self.params() if self.at("(") else []
                    if f in fluents or f in KEYWORDS:
                        raise self.error(f"bad or duplicate fluent name {f}", tt)
                    fluents[f] = tm.FluentSchema(f, tuple(p for p, _ in ps), tuple(s for _, s in ps))
                    self.skip_semis()
            elif head == "actions":
                self.expect("{")
                while not self.accept("}"):
                    tt = self.tok
                    a = self.ident()
                    ps = self.params()
                    pnames = [p for p, _ in ps]
                    self.expect("agent")
                    ag = self.ident()
                    if ag not in pnames:
                        raise self.error(f"agent {ag} is not a parameter of {a}")
                    kind, target = "plain", None
                    if self.tok.kind == "ident" and self.tok.value in ("informs", "requests"):
                        kind = "inform" if self.tok.value == "informs" else "request"
                        self.i += 1
                        tg = self.ident()
                        if tg not in pnames:
                            raise self.error(f"addressee {tg} is not a parameter of {a}")
                        target = pnames.index(tg)
                        if sum(1 for _, s in ps if s == MESSAGE) != 1:
                            raise self.error(f"{a} needs exactly one message parameter", tt)
                    elif self.accept("senses"):
                        kind = "sense"
                    if a in actions:
                        raise self.error(f"action {a} declared twice", tt)
                    actions[a] = tm.ActionSchema(a, tuple(pnames), tuple(s for _, s in ps),
                                                 pnames.index(ag), kind, target)
                    self.skip_semis()
            elif head == "define":
                d = self.ident()
                ps = self.params()
                self.expect(":=")
                start = self.i
                # definition bodies are parsed once all symbols are known
                defs[d] = (ps, start)
                self._skip_formula()
            elif head in raw:
                self.expect("{")
                start = self.i
                self._skip_block()
                raw[head].append(start)
            else:
                raise self.error(f"unknown section {head}", t)
        if horizon is None:
            raise self.error("missing horizon")
        try:
            placeholder = {d: tm.Definition(d, tuple(p for p, _ in ps), tuple(s for _, s in ps), tm.TRUE)
                           for d, (ps, _) in defs.items()}
            self.tables = Tables(self.sorts, fluents, actions, placeholder, messages)
        except tm.TermError as exc:
            raise self.error(str(exc)) from None
        for d, (ps, start) in defs.items():
            self.i = start
            body = self.formula({p: tm.Var(p, s) for p, s in ps})
            defs_body = tm.Definition(d, tuple(p for p, _ in ps), tuple(s for _, s in ps), body)
            self.tables.definitions[d] = defs_body
        for start in raw["messages"]:
            self.i = start
            while not self.accept("}"):
                a = self.ident()
                if a not in actions:
                    raise self.error(f"unknown action {a}")
                self.expect(":")
                msgs = [self.formula({})]
                while self.accept(","):
                    msgs.append(self.formula({}))
                messages.setdefault(a, [])
                messages[a].extend(msgs)
                self.skip_semis()
        for a in messages:
            messages[a] = tuple(messages[a])
        poss = self._axioms(raw["poss"], actions, "precondition")
        sf = self._axioms(raw["sf"], actions, "sensing condition")
        ssa = self._axioms(raw["ssa"], fluents, "successor-state axiom", ssa=True)
        worlds = {}
        for start in raw["worlds"]:
            self.i = start
            while not self.accept("}"):
                real = self.accept("real")
                tt = self.tok
                w = self.ident()
                self.expect(":")
                self.expect("{")
                atoms = set()
                while not self.accept("}"):
                    f = self.formula({})
                    if not isinstance(f, tm.Atom) or f.pred not in fluents:
                        raise self.error("world valuations list fluent atoms only", tt)
                    atoms.add((f.pred, tuple(c.name for c in f.args)))
                    self.accept(",")
                if w in worlds:
                    raise self.error(f"world {w} declared twice", tt)
                worlds[w] = World(w, frozenset(atoms), real)
                self.skip_semis()
        k0 = {}
        for start in raw["k0"]:
            self.i = start
            while not self.accept("}"):
                tt = self.tok
                ag = self.ident()
                if ag not in self.tables.agents:
                    raise self.error(f"{ag} is not an agent", tt)
                self.expect(":")
                pairs = k0.setdefault(ag, set())
                while self.at("{") or (self.tok.kind == "ident" and self.peek().value == "->"):
                    if self.accept("{"):
                        grp = []
                        while not self.accept("}"):
                            grp.append(self._world(worlds))
                            self.accept(",")
                        pairs.update((u, v) for u in grp for v in grp)
                    else:
                        u = self._world(worlds)
                        self.expect("->")
                        pairs.add((u, self._world(worlds)))
                    self.accept(",")
                self.skip_semis()
        goals = {}
        for start in raw["goals"]:
            self.i = start
            while not self.accept("}"):
                tt = self.tok
                ag = self.ident()
                if ag not in self.tables.agents:
                    raise self.error(f"{ag} is not an agent", tt)
                level = self.integer()
                self.expect(":")
                f = self.formula({})
                goals.setdefault(ag, {})
                if level in goals[ag]:
                    raise self.error(f"goal level {level} for {ag} given twice", tt)
                goals[ag][level] = f
                self.skip_semis()
        goal_lists = {}
        for ag, lv in goals.items():
            if sorted(lv) != list(range(len(lv))):
                raise self.error(f"goal levels for {ag} must be numbered 0, 1, 2, ...")
            goal_lists[ag] = tuple(lv[k] for k in range(len(lv)))
        axioms = []
        for start in raw["axioms"]:
            self.i = start
            while not self.accept("}"):
                label = self.ident() if self.tok.kind == "ident" else str(self.integer())
                self.expect(":")
                axioms.append((label, self.formula({})))
                self.skip_semis()
        return TheoryModel(tables=self.tables, poss=poss, ssa=ssa, sf=sf, worlds=worlds,
                           k0={a: frozenset(p) for a, p in k0.items()}, goals=goal_lists,
                           horizon=horizon, axioms=tuple(axioms), name=name)

    def _world(self, worlds):
        t = self.tok
        w = self.ident()
        if w not in worlds:
            raise self.error(f"unknown world {w}", t)
        return w

    def _axioms(self, starts, schemas, what, ssa=False):
        out = {}
        for start in starts:
            self.i = start
            while not self.accept("}"):
                tt = self.tok
                name = self.ident()
                if name not in schemas:
                    raise self.error(f"{what} for unknown symbol {name}", tt)
                sch = schemas[name]
                names = []
                if self.accept("("):
                    if not self.accept(")"):
                        names.append(self.ident())
                        while self.accept(","):
                            names.append(self.ident())
                        self.expect(")")
                if len(names) != len(sch.sorts):
                    raise self.error(f"{name} has {len(sch.sorts)} parameters", tt)
                scope = {}
                for p, s in zip(names, sch.sorts):
                    scope[p] = MESSAGE if s == MESSAGE else tm.Var(p, s)
                if ssa:
                    scope["a"] = tm.Var("a", "action")
                self.expect(":=")
                body = self.formula(scope)
                if name in out:
                    raise self.error(f"{what} for {name} given twice", tt)
                out[name] = (tuple(names), body)
                self.skip_semis()
        return out

    def _skip_block(self):
        depth = 1
        while depth:
            if self.tok.kind == "eof":
                raise self.error("unterminated block")
            if self.at("{"):
                depth += 1
            elif self.at("}"):
                depth -= 1
            self.i += 1

    def _skip_formula(self):
        # a definition body runs until the next top-level section keyword
        heads = {"domain", "horizon", "sorts", "fluents", "actions", "define", "poss", "ssa",
                 "sf", "messages", "worlds", "k0", "goals", "axioms"}
        depth = 0
        while self.tok.kind != "eof":
            if depth == 0 and self.tok.kind == "ident" and self.tok.value in heads \
                    and (self.peek().value in ("{",) or self.tok.value in ("define", "horizon", "domain")):
                return
            if self.at("("):
                depth += 1
            elif self.at(")"):
                depth -= 1
            self.i += 1


# ------------------------------------------------------------- public API


def parse_formula(text: str, tables: Tables, variables: "dict | None" = None) -> tm.Formula:
    """Parse a formula.  ``variables`` maps free variable names to sorts."""
    p = _Parser(text, tables)
    scope = {n: (MESSAGE if s == MESSAGE else tm.Var(n, s)) for n, s in (variables or {}).items()}
    f = p.formula(scope)
    p.done()
    return f


def parse_action(text: str, tables: Tables) -> GroundAction:
    p = _Parser(text, tables)
    a = p.ground_action()
    p.done()
    return a


def parse_domain(text: str, source: str = None) -> TheoryModel:
    return _Parser(text, None, source).domain()


def load_domain(path) -> TheoryModel:
    path = Path(path)
    return parse_domain(path.read_text(), str(path))


@dataclass(frozen=True)
class Narrative:
    name: str
    actions: tuple


def parse_narrative(text: str, tables: Tables, name: str = "narrative", source: str = None) -> Narrative:
    p = _Parser(text, tables, source)
    acts = []
    while True:
        p.skip_semis()
        if p.tok.kind == "eof":
            break
        acts.append(p.ground_action())
    return Narrative(name, tuple(acts))


def load_narrative(path, tables: Tables) -> Narrative:
    path = Path(path)
    return parse_narrative(path.read_text(), tables, path.stem, str(path))


@dataclass(frozen=True)
class RRIntLine:
    agent: str
    action: GroundAction
    time: int
    narrative: str
    formula: tm.Formula


def parse_rrint(text: str, tables: Tables, source: str = None) -> list:
    p = _Parser(text, tables, source)
    out = []
    while True:
        p.skip_semis()
        if p.tok.kind == "eof":
            break
        p.expect("rrint")
        t = p.tok
        agent = p.ident()
        if agent not in tables.agents:
            raise p.error(f"{agent} is not an agent", t)
        action = p.ground_action()
        p.expect("@")
        time = p.integer()
        p.expect("in")
        narrative = p.ident()
        p.expect(":")
        out.append(RRIntLine(agent, action, time, narrative, p.formula({})))
    return out


@dataclass(frozen=True)
class Query:
    kind: str
    formula: tm.Formula
    agent: "str | None" = None
    level: "int | None" = None


def parse_queries(text: str, tables: Tables, source: str = None) -> list:
    """Query files hold one query per statement::

        eval <state formula>
        intends <agent> [level <n>] : <path formula>
        pgoal <agent> [level <n>] : <path formula>
        causes <formula>
        explains <formula>
    """
    p = _Parser(text, tables, source)
    out = []
    while True:
        p.skip_semis()
        if p.tok.kind == "eof":
            break
        t = p.tok
        kind = p.ident()
        if kind in ("eval", "causes", "explains"):
            out.append(Query(kind, p.formula({})))
        elif kind in ("intends", "pgoal"):
            agent = p.ident()
            level = None
            if p.accept("level"):
                level = p.integer()
            p.expect(":")
            out.append(Query(kind, p.formula({}), agent, level))
        else:
            raise p.error(f"unknown query {kind}", t)
    return out


# --------------------------------------------------------------- printer

_PREC = {tm.Iff: 1, tm.Implies: 2, tm.Or: 3, tm.And: 4, tm.Until: 5, tm.Before: 5}
_OPS = {tm.Iff: "<->", tm.Implies: "->", tm.Or: "|", tm.And: "&", tm.Until: "U", tm.Before: "B"}
_PREFIX = {tm.Not: "!", tm.Next: "X ", tm.Eventually: "F ", tm.Always: "G ", tm.AllPaths: "A "}


def format_term(t) -> str:
    if isinstance(t, (tm.Var, tm.Const)):
        return t.name
    if isinstance(t, tm.ActionTerm):
        return _format_call(t.name, [format_term(a) for a in t.args], t.payload)
    raise TypeError(f"not a term: {t!r}")


def format_action(a: GroundAction) -> str:
    return _format_call(a.name, list(a.args), a.payload)


def _format_call(name, args, payload):
    if payload is not None:
        args = args + [format_formula(payload)]
    return f"{name}({', '.join(args)})"


def format_formula(f: tm.Formula) -> str:
    return _fmt(f)[0]


def _wrap(f, need):
    text, prec = _fmt(f)
    return text if prec >= need else f"({text})"


def _fmt(f):
    if isinstance(f, tm.Truth):
        return ("true" if f.value else "false"), 9
    if isinstance(f, tm.Meta):
        return f.name, 9
    if isinstance(f, tm.Atom):
        if not f.args:
            return f.pred, 9
        return f"{f.pred}({', '.join(format_term(a) for a in f.args)})", 9
    if isinstance(f, tm.Eq):
        return f"{format_term(f.left)} = {format_term(f.right)}", 8
    if isinstance(f, tm.Not) and isinstance(f.body, tm.Eq):
        return f"{format_term(f.body.left)} != {format_term(f.body.right)}", 8
    if type(f) in _PREFIX:
        return _PREFIX[type(f)] + _wrap(f.body, 6), 6
    if type(f) in _PREC:
        p = _PREC[type(f)]
        if isinstance(f, (tm.And, tm.Or, tm.Iff)):
            lneed, rneed = p, p + 1
        elif isinstance(f, tm.Implies):
            lneed, rneed = p + 1, p
        else:
            lneed = rneed = p + 1
        return f"{_wrap(f.left, lneed)} {_OPS[type(f)]} {_wrap(f.right, rneed)}", p
    if isinstance(f, (tm.Forall, tm.Exists)):
        q = "forall" if isinstance(f, tm.Forall) else "exists"
        return f"{q} {f.var.name}:{f.var.sort}. {_fmt(f.body)[0]}", 0
    if isinstance(f, (tm.Know, tm.Kwhether)):
        return f"{type(f).__name__}({format_term(f.agent)}, {_fmt(f.body)[0]})", 9
    if isinstance(f, (tm.Int, tm.PGoal)):
        lvl = "" if f.level is None else f", {f.level}"
        return f"{type(f).__name__}({format_term(f.agent)}, {_fmt(f.body)[0]}{lvl})", 9
    if isinstance(f, tm.Kref):
        return f"Kref({format_term(f.agent)}, {format_term(f.term)}, {f.sort})", 9
    if isinstance(f, tm.Poss):
        return f"Poss({format_term(f.action)})", 9
    if isinstance(f, (tm.After, tm.Does)):
        return f"{type(f).__name__}({format_term(f.action)}, {_fmt(f.body)[0]})", 9
    raise TypeError(f"not a formula: {f!r}")
