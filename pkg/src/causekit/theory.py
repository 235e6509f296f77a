"""Basic action theories over finitely many initial worlds, and their validation."""
from __future__ import annotations

from dataclasses import dataclass, field

from . import terms as tm
from .terms import GroundAction, Tables, TermError


@dataclass(frozen=True)
class World:
    name: str
    true_atoms: frozenset
    real: bool = False


@dataclass
class TheoryModel:
    """``poss``, ``ssa`` and ``sf`` map a schema or fluent name to
    ``(params, body)``.  Successor-state bodies use the variable ``a`` for
    the action.  ``k0`` maps each agent to a set of world pairs.  ``goals``
    maps an agent to its initial goal formulas, most important first."""

    tables: Tables
    poss: dict
    ssa: dict
    sf: dict
    worlds: dict
    k0: dict
    goals: dict
    horizon: int
    axioms: tuple = ()
    name: str = "theory"

    @property
    def real_world(self) -> str:
        reals = [w.name for w in self.worlds.values() if w.real]
        if len(reals) != 1:
            raise TermError(f"expected exactly one real world, found {len(reals)}")
        return reals[0]

    def goal_count(self, agent: str) -> int:
        return len(self.goals.get(agent, ()))

    def agent_of(self, a: GroundAction) -> str:
        return self.tables.agent_of(a)


def initial_k(theory: TheoryModel, agent: str, world: str) -> frozenset:
    """Worlds ``agent`` considers possible at time 0 when the actual world is ``world``."""
    pairs = theory.k0.get(agent, frozenset())
    return frozenset(v for (u, v) in pairs if u == world)


@dataclass(frozen=True)
class Violation:
    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, code: str, message: str) -> None:
        self.violations.append(Violation(code, message))

    def messages(self) -> list:
        return [v.message for v in self.violations]


def validate_theory(theory: TheoryModel, engine=None) -> ValidationReport:
    """Check structural well-formedness, the epistemic constraints on the
    initial accessibility relation, the message grammar, every listed
    initial axiom and non-emptiness of each initial goal level."""
    rep = ValidationReport()
    t = theory.tables
    worlds = list(theory.worlds)

    if theory.horizon < 1:
        rep.add("horizon", f"horizon must be positive, got {theory.horizon}")
    reals = [w for w in theory.worlds.values() if w.real]
    if len(reals) != 1:
        rep.add("real-world", f"expected exactly one real world, found {len(reals)}")

    for name in sorted(t.fluents):
        if name not in theory.ssa:
            rep.add("missing-ssa", f"no successor-state axiom for {name}")
    for name in sorted(theory.ssa):
        if name not in t.fluents:
            rep.add("unknown-fluent", f"successor-state axiom for undeclared fluent {name}")
            continue
        _, body = theory.ssa[name]
        if any(isinstance(g, (tm.Know, tm.Kwhether, tm.Kref, tm.Int, tm.PGoal, tm.AllPaths,
                              tm.Poss, tm.After, tm.Next, tm.Until, tm.Eventually,
                              tm.Always, tm.Before, tm.Does))
               for g in tm.subformulas(body)):
            rep.add("ssa-form", f"successor-state axiom for {name} must be an objective state formula")
    for name in sorted(t.actions):
        sch = t.actions[name]
        if name not in theory.poss:
            rep.add("missing-poss", f"no precondition axiom for {name}")
        if sch.kind == "sense" and name not in theory.sf:
            rep.add("missing-sf", f"no sensing condition for {name}")

    for agent in t.agents:
        pairs = theory.k0.get(agent)
        if pairs is None:
            rep.add("k0-missing", f"no initial accessibility given for {agent}")
            continue
        for u, v in sorted(pairs):
            if u not in theory.worlds or v not in theory.worlds:
                rep.add("k0-world", f"unknown world in accessibility pair {u}->{v} for {agent}")
        for w in worlds:
            if (w, w) not in pairs:
                rep.add("k0-reflexive", f"missing reflexive pair for {agent}/{w}")
        for u in worlds:
            succ = sorted(v for (x, v) in pairs if x == u)
            for v in succ:
                for v2 in succ:
                    if (v, v2) not in pairs:
                        rep.add("k0-euclidean",
                                f"accessibility for {agent} is not Euclidean: {u}->{v}, {u}->{v2} but not {v}->{v2}")

    for schema, msgs in sorted(t.messages.items()):
        sch = t.actions.get(schema)
        if sch is None or not sch.communicative:
            rep.add("messages", f"message alphabet given for non-communicative action {schema}")
            continue
        for m in msgs:
            if tm.free_vars(m):
                rep.add("messages", f"message for {schema} is not ground")
            elif sch.kind == "inform":
                if not tm.is_state(m) or tm.mentions_paths(m):
                    rep.add("messages", "inform message must be an objective-or-epistemic state formula")
            elif not tm.is_path(m):
                rep.add("messages", "request message must be a path formula")
    for name in sorted(t.actions):
        sch = t.actions[name]
        if sch.communicative and not t.messages.get(name):
            rep.add("messages", f"no message alphabet for {name}")
    for name in sorted(theory.sf):
        _, body = theory.sf[name]
        if tm.mentions_paths(body):
            rep.add("sf-form", f"sensing condition for {name} may not mention paths or intentions")

    if not rep.ok:
        return rep

    from .engine import Engine, Situation

    eng = engine if engine is not None else Engine(theory)
    real = theory.real_world
    for label, f in theory.axioms:
        try:
            ok = eng.eval_state_formula(Situation(real), f)
        except TermError as exc:
            rep.add("axiom", f"axiom {label} cannot be evaluated: {exc}")
            continue
        if not ok:
            rep.add("axiom", f"axiom {label} does not hold initially")

    for agent in t.agents:
        for n, _ in enumerate(theory.goals.get(agent, ())):
            if not eng.initial_goal_nonempty(agent, n):
                rep.add("empty-goal", f"empty initial goal level {n} for {agent}")
    return rep
