"""Random small action theories, written as domain text."""
from __future__ import annotations

import random

from causekit import terms as tm
from causekit.syntax import parse_domain, parse_formula

AGENTS = ("A", "B")


def _lit(rng, fluents):
    f = rng.choice(fluents)
    return f if rng.random() < 0.6 else "!" + f


def _partition(rng, worlds):
    groups = {}
    for w in worlds:
        groups.setdefault(rng.randrange(2), []).append(w)
    return " ".join("{" + ", ".join(g) + "}" for g in groups.values())


def domain_text(rng: random.Random, horizon=4, knowledge=True, goals=False, sensing=False) -> str:
    nf = rng.randint(1, 3)
    na = rng.randint(1, 3)
    fluents = [f"f{i}" for i in range(nf)]
    acts = [f"act{i}" for i in range(na)]
    lines = ["domain random", f"horizon {horizon}", "sorts { Agent = A, B }",
             "fluents { " + "; ".join(fluents) + " }"]
    decl = [f"{a}(d: Agent) agent d" for a in acts]
    if sensing:
        decl.append("look(d: Agent) agent d senses")
    lines.append("actions { " + "; ".join(decl) + " }")

    poss = []
    for a in acts:
        parts = []
        for _ in range(rng.randint(0, 2)):
            parts.append(_lit(rng, fluents))
        if knowledge and rng.random() < 0.3:
            parts.append(f"Know(d, {_lit(rng, fluents)})")
        poss.append(f"{a}(d) := " + (" & ".join(parts) if parts else "true"))
    if sensing:
        poss.append("look(d) := true")
    lines.append("poss { " + "; ".join(poss) + " }")
    if sensing:
        lines.append(f"sf {{ look(d) := {rng.choice(fluents)} }}")

    ssa = []
    for f in fluents:
        pos = rng.sample(acts, rng.randint(0, len(acts)))
        neg = [a for a in acts if a not in pos and rng.random() < 0.5]
        def cond(a):
            c = f"(exists d:Agent. a = {a}(d))"
            if rng.random() < 0.3:
                c = f"({c} & {_lit(rng, fluents)})"
            return c
        plus = " | ".join(cond(a) for a in pos)
        keep = f
        if neg:
            keep = f"({f} & !(" + " | ".join(cond(a) for a in neg) + "))"
        ssa.append(f"{f} := " + (f"{plus} | {keep}" if plus else keep))
    lines.append("ssa { " + "; ".join(ssa) + " }")

    nw = rng.randint(1, 3)
    worlds = [f"W{i}" for i in range(nw)]
    ws = []
    for i, w in enumerate(worlds):
        atoms = [f for f in fluents if rng.random() < 0.5]
        ws.append(("real " if i == 0 else "") + f"{w}: {{" + ", ".join(atoms) + "}")
    lines.append("worlds { " + "; ".join(ws) + " }")
    lines.append("k0 { " + "; ".join(f"{ag}: {_partition(rng, worlds)}" for ag in AGENTS) + " }")
    if goals:
        gl = [f"A 0: F {_lit(rng, fluents)}"]
        if rng.random() < 0.5:
            gl.append(f"A 1: G {_lit(rng, fluents)}")
        lines.append("goals { " + "; ".join(gl) + " }")
    return "\n".join(lines) + "\n"


def random_theory(rng: random.Random, **kw):
    return parse_domain(domain_text(rng, **kw), "<random>")


def random_state_formula(rng: random.Random, tables, depth=2, paths=False, intentions=False) -> tm.Formula:
    """A ground formula over the random theory's symbols, as text parsed back."""
    return parse_formula(_formula_text(rng, tables, depth, paths, intentions), tables)


def _formula_text(rng, tables, depth, paths, intentions):
    fluents = sorted(tables.fluents)
    acts = [str(a) for a in tm.all_ground_actions(tables)]
    if depth == 0:
        return _lit(rng, fluents)
    options = ["lit", "and", "or", "not", "poss", "after", "know"]
    if paths:
        options.append("A")
    if intentions:
        options += ["int", "pgoal"]
    k = rng.choice(options)
    sub = lambda: _formula_text(rng, tables, depth - 1, paths, intentions)
    if k == "lit":
        return _lit(rng, fluents)
    if k == "and":
        return f"({sub()} & {sub()})"
    if k == "or":
        return f"({sub()} | {sub()})"
    if k == "not":
        return f"!({sub()})"
    if k == "poss":
        return f"Poss({rng.choice(acts)})"
    if k == "after":
        return f"After({rng.choice(acts)}, {sub()})"
    if k == "know":
        return f"Know({rng.choice(AGENTS)}, {sub()})"
    p = random_path_text(rng, fluents, acts)
    if k == "A":
        return f"A({p})"
    if k == "int":
        return f"Int({rng.choice(AGENTS)}, {p})"
    return f"PGoal({rng.choice(AGENTS)}, {p})"


def random_path_text(rng, fluents, acts) -> str:
    k = rng.randrange(6)
    l1, l2 = _lit(rng, fluents), _lit(rng, fluents)
    if k == 0:
        return f"F {l1}"
    if k == 1:
        return f"G {l1}"
    if k == 2:
        return f"X {l1}"
    if k == 3:
        return f"({l1} U {l2})"
    if k == 4:
        return f"({l1} B {l2})"
    return f"Does({rng.choice(acts)}, F {l1})"
