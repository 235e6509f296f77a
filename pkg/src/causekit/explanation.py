"""Explaining observed behaviour through causes and recognized intentions."""
from __future__ import annotations

from dataclasses import dataclass

from . import terms as tm
from .causality import causes, validate_setting
from .engine import Engine, Situation
from .syntax import format_formula
from .terms import Formula, GroundAction


class RRIntError(ValueError):
    pass


@dataclass(frozen=True)
class RRIntFact:
    """``agent`` was recognized to intend ``formula`` when doing
    ``action`` at ``time`` in ``scenario``."""

    agent: str
    formula: Formula
    action: GroundAction
    time: int
    scenario: Situation


class RRIntStore:
    def __init__(self, facts=(), tables=None):
        self.facts = []
        for f in facts:
            self.add(f, tables)

    def add(self, fact: RRIntFact, tables=None) -> None:
        if tables is not None and tables.agent_of(fact.action) != fact.agent:
            raise RRIntError(f"{fact.agent} is not the agent of {fact.action}")
        if not 0 <= fact.time < fact.scenario.time:
            raise RRIntError(f"time {fact.time} is outside the scenario")
        if fact.scenario.history[fact.time] != fact.action:
            raise RRIntError(f"the scenario does not perform {fact.action} at time {fact.time}")
        if not tm.is_path(fact.formula) or tm.free_vars(fact.formula):
            raise RRIntError("recognized intentions must be ground path formulas")
        self.facts.append(fact)

    @classmethod
    def from_lines(cls, lines, narratives: dict, world: str, tables) -> "RRIntStore":
        """Build a store from parsed ``rrint`` lines; ``narratives`` maps a
        narrative name to its actions, played from ``world``."""
        store = cls()
        for ln in lines:
            if ln.narrative not in narratives:
                raise RRIntError(f"unknown narrative {ln.narrative}")
            s = Situation(world, tuple(narratives[ln.narrative]))
            store.add(RRIntFact(ln.agent, ln.formula, ln.action, ln.time, s), tables)
        return store

    def __len__(self) -> int:
        return len(self.facts)


def rrint_lookup(store: RRIntStore, agent: str, a: GroundAction, t: int, s: Situation) -> frozenset:
    return frozenset(f.formula for f in store.facts
                     if f.agent == agent and f.action == a and f.time == t and f.scenario == s)


@dataclass(frozen=True)
class Link:
    """An explaining action and the intention recognized behind it."""

    action: GroundAction
    time: int
    intention: Formula


@dataclass(frozen=True)
class Explanation:
    action: GroundAction
    time: int
    chain: tuple = ()

    def describe(self) -> str:
        if not self.chain:
            return "cause of the observation"
        return " <- ".join(f"Int({format_formula(l.intention)}) behind {l.action}@{l.time}"
                           for l in reversed(self.chain))


class ExplanationSet(tuple):
    """Explanations ordered by time, then action text."""

    def pairs(self) -> frozenset:
        return frozenset((e.action, e.time) for e in self)

    def __contains__(self, item) -> bool:
        if isinstance(item, Explanation):
            return tuple.__contains__(self, item)
        return item in self.pairs()


def explains(engine: Engine, store: RRIntStore, effect: Formula, s: Situation) -> ExplanationSet:
    validate_setting(engine, effect, s)
    found = {}
    queue = []
    for a, t in causes(engine, effect, s):
        e = Explanation(a, t)
        found[a, t] = e
        queue.append(e)
    while queue:
        cur = queue.pop(0)
        agent = engine.tables.agent_of(cur.action)
        s2 = s.prefix(cur.time)
        for psi in sorted(rrint_lookup(store, agent, cur.action, cur.time, s), key=format_formula):
            intent = tm.Int(tm.Const(agent), psi)
            if engine.holds(s2.root(), intent) or not engine.holds(s2, intent):
                continue
            link = Link(cur.action, cur.time, psi)
            for a, t in causes(engine, intent, s2):
                if (a, t) not in found:
                    e = Explanation(a, t, cur.chain + (link,))
                    found[a, t] = e
                    queue.append(e)
    return ExplanationSet(sorted(found.values(), key=lambda e: (e.time, str(e.action))))
