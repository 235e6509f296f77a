"""Prioritized goals, realistic goals, their prioritized intersection and
the intention and p-goal modalities, as path sets and booleans.

Goal levels are not stored per situation.  After history ``h`` an agent's
levels are, most important first, the payloads of the requests addressed
to it in ``h`` (latest first) and then its initial goals; each level is
evaluated from the cursor just after the request that created it, or from
time 0 for initial goals.  This is the closed form of progressing the
initial goal paths and pushing every request in at the top.
"""
from __future__ import annotations

from .engine import BoundedPath, Engine, Situation
from .terms import Formula, GroundAction, Int, PGoal, TermError
from . import terms as tm


def _paths(engine: Engine, s: Situation, leaves) -> frozenset:
    t = s.time
    return frozenset(
        BoundedPath(engine.situation(l.chain[t]), l.history()[t:], 0) for l in leaves
    )


def level_count(engine: Engine, agent: str, s: Situation) -> int:
    """Number of non-trivial levels; every level from here on is trivial."""
    return engine.goal_count(agent, engine.node(s))


def g_paths(engine: Engine, agent: str, n: int, s: Situation) -> frozenset:
    node = engine.node(s)
    return _paths(engine, s, engine.spec_leaves(engine.g_spec(agent, n, node)))


def realistic_paths(engine: Engine, agent: str, n: int, s: Situation) -> frozenset:
    node = engine.node(s)
    ks = set(engine.k_nodes(agent, node))
    starts, cons = engine.g_spec(agent, n, node)
    spec = (tuple(m for m in starts if m in ks), cons)
    return _paths(engine, s, engine.spec_leaves(spec))


def g_intersection(engine: Engine, agent: str, n: int, s: Situation) -> frozenset:
    node = engine.node(s)
    return _paths(engine, s, engine.spec_leaves(engine.gint_spec(agent, n, node)))


def g_intersection_nonempty(engine: Engine, agent: str, n: int, s: Situation) -> bool:
    """Non-emptiness without enumerating the paths."""
    nodes, cons = engine.gint_spec(agent, n, engine.node(s))
    return engine._some(nodes, cons)


def pgoal(engine: Engine, agent: str, phi: Formula, n: "int | None", s: Situation) -> bool:
    return engine.holds(s, PGoal(tm.Const(agent), phi, n))


def intends(engine: Engine, agent: str, phi: Formula, s: Situation, n: "int | None" = None) -> bool:
    return engine.holds(s, Int(tm.Const(agent), phi, n))


def _check_payload(engine: Engine, a: GroundAction, kind: str) -> None:
    sch = engine.tables.actions.get(a.name)
    if sch is None or sch.kind != kind:
        raise TermError(f"{a.name} is not a {kind} action")
    if a.payload not in engine.tables.messages.get(a.name, ()):
        raise TermError(f"payload of {a} is not in the message alphabet")


def poss_req(engine: Engine, a: GroundAction, s: Situation) -> bool:
    _check_payload(engine, a, "request")
    return engine.poss(a, s)


def poss_inform(engine: Engine, a: GroundAction, s: Situation) -> bool:
    _check_payload(engine, a, "inform")
    return engine.poss(a, s)
