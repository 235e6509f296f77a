"""Sorts, ground actions and the formula syntax trees.

Every other module works over the classes defined here.  Formulas are
immutable and hashable; their hash is computed once and cached, since
formulas are used heavily as dictionary keys by the evaluator.

Surface sugar (disjunction, implication, existentials, F, G, B, Kwhether,
Kref) is kept in the tree as parsed and removed by :func:`desugar`.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, fields
from typing import Iterable, Iterator, Mapping, Union

MESSAGE = "message"
AGENT_SORT = "Agent"
INIT = "Init"


class TermError(ValueError):
    pass


# ---------------------------------------------------------------- terms


@dataclass(frozen=True)
class Var:
    name: str
    sort: str


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class ActionTerm:
    """An action term; ``payload`` is the message argument of inform/req schemas."""

    name: str
    args: tuple
    payload: "Formula | None" = None


Term = Union[Var, Const, ActionTerm]


@dataclass(frozen=True)
class GroundAction:
    name: str
    args: tuple
    payload: "Formula | None" = None

    def __str__(self) -> str:
        from .syntax import format_action

        return format_action(self)

    def term(self) -> ActionTerm:
        return ActionTerm(self.name, tuple(Const(a) for a in self.args), self.payload)


# ------------------------------------------------------------- formulas


class Formula:
    __slots__ = ()


@dataclass(frozen=True)
class Truth(Formula):
    value: bool


@dataclass(frozen=True)
class Atom(Formula):
    pred: str
    args: tuple = ()


@dataclass(frozen=True)
class Meta(Formula):
    """A message parameter standing in for a formula."""

    name: str


@dataclass(frozen=True)
class Eq(Formula):
    left: Term
    right: Term


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: Var
    body: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: Var
    body: Formula


@dataclass(frozen=True)
class Poss(Formula):
    action: ActionTerm


@dataclass(frozen=True)
class After(Formula):
    action: ActionTerm
    body: Formula


@dataclass(frozen=True)
class Know(Formula):
    agent: Term
    body: Formula


@dataclass(frozen=True)
class Kwhether(Formula):
    agent: Term
    body: Formula


@dataclass(frozen=True)
class Kref(Formula):
    agent: Term
    term: Term
    sort: str


@dataclass(frozen=True)
class Int(Formula):
    """Intention; ``level=None`` means every level (evaluated at the deepest)."""

    agent: Term
    body: Formula
    level: "int | None" = None


@dataclass(frozen=True)
class PGoal(Formula):
    """Prioritized goal; ``level=None`` means at some level."""

    agent: Term
    body: Formula
    level: "int | None" = None


@dataclass(frozen=True)
class AllPaths(Formula):
    body: Formula


@dataclass(frozen=True)
class Next(Formula):
    body: Formula


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Eventually(Formula):
    body: Formula


@dataclass(frozen=True)
class Always(Formula):
    body: Formula


@dataclass(frozen=True)
class Before(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Does(Formula):
    """The next step of the path is ``action`` and ``body`` holds right after it."""

    action: ActionTerm
    body: Formula


TRUE = Truth(True)
FALSE = Truth(False)

_FIELDS: dict[type, tuple[str, ...]] = {}


def _cached_hash(self) -> int:
    d = self.__dict__
    h = d.get("_h")
    if h is None:
        names = _FIELDS[type(self)]
        h = hash((type(self).__name__,) + tuple(getattr(self, n) for n in names))
        object.__setattr__(self, "_h", h)
    return h


for _cls in (Var, Const, ActionTerm, GroundAction, Truth, Atom, Meta, Eq, Not, And, Or,
             Implies, Iff, Forall, Exists, Poss, After, Know, Kwhether, Kref, Int, PGoal,
             AllPaths, Next, Until, Eventually, Always, Before, Does):
    _FIELDS[_cls] = tuple(f.name for f in fields(_cls))
    _cls.__hash__ = _cached_hash


def disj(*parts: Formula) -> Formula:
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = Or(p, out)
    return out


def conj(*parts: Formula) -> Formula:
    if not parts:
        return TRUE
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = And(p, out)
    return out


# --------------------------------------------------------- symbol tables


@dataclass(frozen=True)
class FluentSchema:
    name: str
    params: tuple
    sorts: tuple


@dataclass(frozen=True)
class ActionSchema:
    """``kind`` is one of plain, inform, request, sense.

    ``agent`` and ``target`` are parameter positions; the target is the
    addressee of an inform or request.
    """

    name: str
    params: tuple
    sorts: tuple
    agent: int
    kind: str = "plain"
    target: "int | None" = None

    @property
    def payload_index(self) -> "int | None":
        for i, s in enumerate(self.sorts):
            if s == MESSAGE:
                return i
        return None

    @property
    def communicative(self) -> bool:
        return self.kind in ("inform", "request")


@dataclass(frozen=True)
class Definition:
    name: str
    params: tuple
    sorts: tuple
    body: Formula


@dataclass
class Tables:
    sorts: dict
    fluents: dict
    actions: dict
    definitions: dict
    messages: dict

    def __post_init__(self):
        if AGENT_SORT not in self.sorts:
            raise TermError(f"no sort named {AGENT_SORT}")
        for name, members in self.sorts.items():
            if not members:
                raise TermError(f"sort {name} is empty")

    @property
    def agents(self) -> tuple:
        return tuple(self.sorts[AGENT_SORT])

    @property
    def objects(self) -> frozenset:
        return frozenset(o for ms in self.sorts.values() for o in ms)

    def members(self, sort: str) -> tuple:
        try:
            return tuple(self.sorts[sort])
        except KeyError:
            raise TermError(f"unknown sort {sort}") from None

    def in_sort(self, obj: str, sort: str) -> bool:
        return obj in self.sorts.get(sort, ())

    def subsort(self, a: str, b: str) -> bool:
        return set(self.members(a)) <= set(self.members(b))

    def agent_of(self, a: GroundAction) -> str:
        sch = self.actions[a.name]
        return a.args[_arg_index(sch, sch.agent)]

    def target_of(self, a: GroundAction) -> "str | None":
        sch = self.actions[a.name]
        if sch.target is None:
            return None
        return a.args[_arg_index(sch, sch.target)]

    def schema(self, a) -> ActionSchema:
        return self.actions[a.name]


def _arg_index(sch: ActionSchema, pos: int) -> int:
    """Position of parameter ``pos`` inside ``args`` (which omits the payload)."""
    p = sch.payload_index
    return pos if p is None or pos < p else pos - 1


def ground_instances(schema: ActionSchema, tables: Tables) -> tuple:
    """All ground actions of ``schema``; message parameters range over the
    schema's alphabet in ``tables.messages``."""
    object_sorts = [s for s in schema.sorts if s != MESSAGE]
    pools = [tables.members(s) for s in object_sorts]
    if schema.payload_index is None:
        payloads = [None]
    else:
        payloads = list(tables.messages.get(schema.name, ()))
    out = []
    for combo in itertools.product(*pools):
        for msg in payloads:
            out.append(GroundAction(schema.name, tuple(combo), msg))
    return tuple(out)


def all_ground_actions(tables: Tables) -> tuple:
    out = []
    for name in sorted(tables.actions):
        out.extend(ground_instances(tables.actions[name], tables))
    return tuple(out)


def ground_atoms(tables: Tables) -> tuple:
    out = []
    for name in sorted(tables.fluents):
        fs = tables.fluents[name]
        for combo in itertools.product(*(tables.members(s) for s in fs.sorts)):
            out.append((name, combo))
    return tuple(out)


# ------------------------------------------------------------- traversal

_BINARY = (And, Or, Implies, Iff, Until, Before)
_UNARY = (Not, AllPaths, Next, Eventually, Always)


def children(f: Formula) -> tuple:
    if isinstance(f, _BINARY):
        return (f.left, f.right)
    if isinstance(f, _UNARY):
        return (f.body,)
    if isinstance(f, (Forall, Exists, Know, Kwhether, Int, PGoal)):
        return (f.body,)
    if isinstance(f, (After, Does)):
        return tuple(_action_formulas(f.action)) + (f.body,)
    if isinstance(f, Poss):
        return tuple(_action_formulas(f.action))
    if isinstance(f, Eq):
        return tuple(_action_formulas(f.left)) + tuple(_action_formulas(f.right))
    return ()


def _action_formulas(t) -> Iterator[Formula]:
    if isinstance(t, ActionTerm) and t.payload is not None:
        yield t.payload


def subformulas(f: Formula) -> Iterator[Formula]:
    yield f
    for c in children(f):
        yield from subformulas(c)


def _term_vars(t) -> set:
    if isinstance(t, Var):
        return {t}
    if isinstance(t, ActionTerm):
        out = set()
        for a in t.args:
            out |= _term_vars(a)
        if t.payload is not None:
            out |= free_vars(t.payload)
        return out
    return set()


def free_vars(f: Formula) -> set:
    """Free object variables and message parameters (as :class:`Meta`)."""
    if isinstance(f, Meta):
        return {f}
    if isinstance(f, Atom):
        out = set()
        for a in f.args:
            out |= _term_vars(a)
        return out
    if isinstance(f, Eq):
        return _term_vars(f.left) | _term_vars(f.right)
    if isinstance(f, (Forall, Exists)):
        return free_vars(f.body) - {f.var}
    if isinstance(f, (Poss,)):
        return _term_vars(f.action)
    if isinstance(f, (After, Does)):
        return _term_vars(f.action) | free_vars(f.body)
    if isinstance(f, (Know, Kwhether, Int, PGoal)):
        return _term_vars(f.agent) | free_vars(f.body)
    if isinstance(f, Kref):
        return _term_vars(f.agent) | _term_vars(f.term)
    out = set()
    for c in children(f):
        out |= free_vars(c)
    return out


def bound_vars(f: Formula) -> set:
    out = set()
    for g in subformulas(f):
        if isinstance(g, (Forall, Exists)):
            out.add(g.var.name)
    return out


def is_ground(f: Formula) -> bool:
    return not free_vars(f)


# ----------------------------------------------------------- substitution


def substitute(f: Formula, bindings: Mapping, tables: "Tables | None" = None) -> Formula:
    """Replace free variables by ground values.

    ``bindings`` maps variable names to object names (``str``), ground
    actions, or formulas (for message parameters).  Binding a name that is
    bound inside ``f`` is rejected, which also rules out variable capture
    since all values are ground.
    """
    clash = set(bindings) & bound_vars(f)
    if clash:
        raise TermError(f"cannot substitute bound variable {sorted(clash)[0]}")
    return _subst(f, bindings, tables)


def _subst_term(t, b, tables):
    if isinstance(t, Var):
        if t.name not in b:
            return t
        v = b[t.name]
        if isinstance(v, GroundAction):
            return v.term()
        if isinstance(v, ActionTerm):
            return v
        if isinstance(v, Const):
            v = v.name
        if not isinstance(v, str):
            raise TermError(f"sort mismatch for variable {t.name}")
        if tables is not None and not tables.in_sort(v, t.sort):
            raise TermError(f"sort mismatch for variable {t.name}: {v} is not a {t.sort}")
        return Const(v)
    if isinstance(t, ActionTerm):
        payload = t.payload
        if payload is not None:
            payload = _subst(payload, b, tables)
        return ActionTerm(t.name, tuple(_subst_term(a, b, tables) for a in t.args), payload)
    return t


def _subst(f, b, tables):
    if isinstance(f, Meta):
        if f.name not in b:
            return f
        v = b[f.name]
        if not isinstance(v, Formula):
            raise TermError(f"sort mismatch for variable {f.name}: expected a formula")
        return v
    if isinstance(f, Atom):
        return Atom(f.pred, tuple(_subst_term(a, b, tables) for a in f.args))
    if isinstance(f, Eq):
        return Eq(_subst_term(f.left, b, tables), _subst_term(f.right, b, tables))
    if isinstance(f, Truth):
        return f
    if isinstance(f, (Forall, Exists)):
        return type(f)(f.var, _subst(f.body, b, tables))
    if isinstance(f, Poss):
        return Poss(_subst_term(f.action, b, tables))
    if isinstance(f, (After, Does)):
        return type(f)(_subst_term(f.action, b, tables), _subst(f.body, b, tables))
    if isinstance(f, (Know, Kwhether)):
        return type(f)(_subst_term(f.agent, b, tables), _subst(f.body, b, tables))
    if isinstance(f, (Int, PGoal)):
        return type(f)(_subst_term(f.agent, b, tables), _subst(f.body, b, tables), f.level)
    if isinstance(f, Kref):
        return Kref(_subst_term(f.agent, b, tables), _subst_term(f.term, b, tables), f.sort)
    if isinstance(f, _BINARY):
        return type(f)(_subst(f.left, b, tables), _subst(f.right, b, tables))
    if isinstance(f, _UNARY):
        return type(f)(_subst(f.body, b, tables))
    raise TermError(f"unknown formula node {type(f).__name__}")


# --------------------------------------------------------------- desugar


def _fresh(base: str, taken: set) -> str:
    for i in itertools.count():
        name = f"{base}{i}"
        if name not in taken:
            return name
    raise AssertionError


def _names(f) -> set:
    out = {v.name for v in free_vars(f) if isinstance(v, Var)}
    return out | bound_vars(f)


def desugar(f: Formula) -> Formula:
    """Rewrite to the core connectives.

    Core: Truth, Atom, Meta, Eq, Not, And, Forall, Poss, After, Know, Int,
    PGoal, AllPaths, Next, Until, Does.
    """
    if isinstance(f, (Truth, Atom, Meta, Eq)):
        return f
    if isinstance(f, Not):
        return Not(desugar(f.body))
    if isinstance(f, And):
        return And(desugar(f.left), desugar(f.right))
    if isinstance(f, Or):
        return Not(And(Not(desugar(f.left)), Not(desugar(f.right))))
    if isinstance(f, Implies):
        return Not(And(desugar(f.left), Not(desugar(f.right))))
    if isinstance(f, Iff):
        return desugar(And(Implies(f.left, f.right), Implies(f.right, f.left)))
    if isinstance(f, Forall):
        return Forall(f.var, desugar(f.body))
    if isinstance(f, Exists):
        return Not(Forall(f.var, Not(desugar(f.body))))
    if isinstance(f, Poss):
        return Poss(_desugar_action(f.action))
    if isinstance(f, After):
        return After(_desugar_action(f.action), desugar(f.body))
    if isinstance(f, Does):
        return Does(_desugar_action(f.action), desugar(f.body))
    if isinstance(f, Know):
        return Know(f.agent, desugar(f.body))
    if isinstance(f, Kwhether):
        return desugar(Or(Know(f.agent, f.body), Know(f.agent, Not(f.body))))
    if isinstance(f, Kref):
        v = Var(_fresh("t", _names(Eq(f.term, f.agent))), f.sort)
        return desugar(Exists(v, Know(f.agent, Eq(f.term, v))))
    if isinstance(f, Int):
        return Int(f.agent, desugar(f.body), f.level)
    if isinstance(f, PGoal):
        return PGoal(f.agent, desugar(f.body), f.level)
    if isinstance(f, AllPaths):
        return AllPaths(desugar(f.body))
    if isinstance(f, Next):
        return Next(desugar(f.body))
    if isinstance(f, Until):
        return Until(desugar(f.left), desugar(f.right))
    if isinstance(f, Eventually):
        return Until(TRUE, desugar(f.body))
    if isinstance(f, Always):
        return Not(Until(TRUE, Not(desugar(f.body))))
    if isinstance(f, Before):
        return Not(Until(Not(desugar(f.left)), desugar(f.right)))
    raise TermError(f"unknown formula node {type(f).__name__}")


def _desugar_action(t):
    if isinstance(t, ActionTerm) and t.payload is not None:
        return ActionTerm(t.name, t.args, desugar(t.payload))
    return t


# ------------------------------------------------------- syntactic classes

_PATH_ONLY = (Next, Until, Eventually, Always, Before, Does)


def is_if(f: Formula) -> bool:
    """Membership in the intention-formula grammar: fluents, Poss, After,
    boolean connectives, quantifiers, Know and level-free Int."""
    if isinstance(f, (Truth, Atom, Meta, Eq, Poss)):
        return True
    if isinstance(f, (Not, And, Or, Implies, Iff, Forall, Exists, Know, Kwhether)):
        return all(is_if(c) for c in children(f))
    if isinstance(f, Kref):
        return True
    if isinstance(f, After):
        return is_if(f.body)
    if isinstance(f, Int):
        return f.level is None and is_path(f.body)
    return False


def is_state(f: Formula) -> bool:
    """State formulas may use every construct except bare path operators."""
    if isinstance(f, _PATH_ONLY):
        return False
    if isinstance(f, (Truth, Atom, Meta, Eq, Kref, Poss)):
        return True
    if isinstance(f, (Int, PGoal, AllPaths)):
        return is_path(f.body)
    if isinstance(f, (Know, Kwhether, After)):
        return is_state(f.body)
    return all(is_state(c) for c in children(f))


def is_path(f: Formula) -> bool:
    if isinstance(f, (Truth, Atom, Meta, Eq, Kref, Poss)):
        return True
    if isinstance(f, (Int, PGoal, AllPaths, Does)):
        return is_path(f.body)
    if isinstance(f, (Know, Kwhether, After)):
        return is_state(f.body)
    return all(is_path(c) for c in children(f))


def mentions_paths(f: Formula) -> bool:
    """True if evaluating ``f`` can depend on which actions are possible."""
    return any(isinstance(g, (AllPaths, Int, PGoal, Poss)) for g in subformulas(f))


def uses_knowledge(f: Formula) -> bool:
    return any(isinstance(g, (Know, Kwhether, Kref)) for g in subformulas(f))


def walk_terms(f: Formula) -> Iterable:
    for g in subformulas(f):
        if isinstance(g, Atom):
            yield from g.args
        elif isinstance(g, Eq):
            yield g.left
            yield g.right
        elif isinstance(g, (Poss, After, Does)):
            yield g.action
        elif isinstance(g, (Know, Kwhether, Int, PGoal)):
            yield g.agent
        elif isinstance(g, Kref):
            yield g.agent
            yield g.term


# -------------------------------------------------------------- grounding


def expand(f: Formula, tables: Tables, env: "Mapping | None" = None, keep: frozenset = frozenset()) -> Formula:
    """Desugar, ground quantifiers over their finite sorts, inline defined
    predicates and fold constants.

    Variables named in ``keep`` are left alone (the action variable of a
    successor-state axiom).  Anything else left free is an error.
    """
    return _expand(desugar(f), tables, dict(env or {}), keep)


def _resolve(t, tables, env, keep):
    if isinstance(t, Var):
        if t.name in env:
            v = env[t.name]
            return v if isinstance(v, ActionTerm) else Const(v)
        if t.name in keep:
            return t
        raise TermError(f"free variable {t.name}")
    if isinstance(t, ActionTerm):
        payload = t.payload
        if isinstance(payload, Meta):
            payload = _meta(payload, env)
        elif payload is not None:
            payload = canonical_payload(tables, t.name, _subst(payload, env, None))
        return ActionTerm(t.name, tuple(_resolve(a, tables, env, keep) for a in t.args), payload)
    if isinstance(t, Const) and t.name not in tables.objects:
        raise TermError(f"unknown object {t.name}")
    return t


def _meta(m, env):
    if m.name in env and isinstance(env[m.name], Formula):
        return env[m.name]
    raise TermError(f"unbound message parameter {m.name}")


def _neg(x):
    if isinstance(x, Truth):
        return Truth(not x.value)
    if isinstance(x, Not):
        return x.body
    return Not(x)


def _and(x, y):
    if isinstance(x, Truth):
        return y if x.value else FALSE
    if isinstance(y, Truth):
        return x if y.value else FALSE
    return And(x, y)


def _expand(f, tables, env, keep):
    if isinstance(f, Truth):
        return f
    if isinstance(f, Meta):
        return desugar(_meta(f, env))
    if isinstance(f, Atom):
        args = tuple(_resolve(a, tables, env, keep) for a in f.args)
        if f.pred in tables.definitions:
            d = tables.definitions[f.pred]
            inner = {p: a.name for p, a in zip(d.params, args)}
            return _expand(desugar(d.body), tables, inner, frozenset())
        return Atom(f.pred, args)
    if isinstance(f, Eq):
        left = _resolve(f.left, tables, env, keep)
        right = _resolve(f.right, tables, env, keep)
        if isinstance(left, Var) or isinstance(right, Var):
            return Eq(left, right)
        return Truth(left == right)
    if isinstance(f, Not):
        return _neg(_expand(f.body, tables, env, keep))
    if isinstance(f, And):
        left = _expand(f.left, tables, env, keep)
        if left == FALSE:
            return FALSE
        return _and(left, _expand(f.right, tables, env, keep))
    if isinstance(f, Forall):
        out = TRUE
        for c in reversed(tables.members(f.var.sort)):
            out = _and(_expand(f.body, tables, {**env, f.var.name: c}, keep), out)
            if out == FALSE:
                break
        return out
    if isinstance(f, Poss):
        return Poss(_resolve(f.action, tables, env, keep))
    if isinstance(f, After):
        return After(_resolve(f.action, tables, env, keep), _expand(f.body, tables, env, keep))
    if isinstance(f, Does):
        return Does(_resolve(f.action, tables, env, keep), _expand(f.body, tables, env, keep))
    if isinstance(f, Know):
        return Know(_resolve(f.agent, tables, env, keep), _expand(f.body, tables, env, keep))
    if isinstance(f, (Int, PGoal)):
        return type(f)(_resolve(f.agent, tables, env, keep), _expand(f.body, tables, env, keep), f.level)
    if isinstance(f, AllPaths):
        return AllPaths(_expand(f.body, tables, env, keep))
    if isinstance(f, Next):
        return Next(_expand(f.body, tables, env, keep))
    if isinstance(f, Until):
        return Until(_expand(f.left, tables, env, keep), _expand(f.right, tables, env, keep))
    raise TermError(f"cannot expand {type(f).__name__}")


def ground_action(t: ActionTerm) -> GroundAction:
    """Turn a fully resolved action term into a :class:`GroundAction`."""
    if not isinstance(t, ActionTerm) or not all(isinstance(a, Const) for a in t.args):
        raise TermError(f"action term is not ground: {t}")
    return GroundAction(t.name, tuple(a.name for a in t.args), t.payload)


def canonical_payload(tables: Tables, schema: str, payload: Formula) -> Formula:
    """Map a payload to the alphabet entry it is equivalent to (up to
    sugar), so that equal messages compare equal as ground actions."""
    for m in tables.messages.get(schema, ()):
        if m == payload:
            return m
    target = desugar(payload)
    for m in tables.messages.get(schema, ()):
        if desugar(m) == target:
            return m
    return payload
