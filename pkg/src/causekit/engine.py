"""Situations, bounded paths and formula evaluation.

The engine unfolds one tree of situations per initial world, lazily and
with every node interned, so that a situation is only built once.  Paths
of the bounded horizon are identified by their leaf node plus a cursor.

Formulas are grounded once (quantifiers expanded over their finite
sorts) and compiled to closures.  Closures over nodes answer state
formulas; closures over ``(chain, index)`` answer path formulas, where
``chain`` is the tuple of nodes from a root down to a leaf.  ``A``,
``Int`` and ``PGoal`` never enumerate paths: they search depth first for
a counterexample path, progressing the formula one step at a time.

Precondition axioms that talk about intentions or goals make the tree
depend on itself: whether ``req`` is possible depends on the paths that
start with ``req``.  These are resolved as a greatest fixed point by
tabling: while such a precondition is being computed it is assumed to
hold; every cached value computed under that assumption is tagged with
it, and if the assumption turns out false those values are dropped and
the precondition recomputed with the opposite assumption.
"""
from __future__ import annotations

import sys
from collections import defaultdict
from dataclasses import dataclass

from . import terms as tm
from .terms import Formula, GroundAction, TermError
from .theory import TheoryModel, initial_k

sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))


class EngineError(RuntimeError):
    pass


class HorizonError(EngineError):
    pass


@dataclass(frozen=True)
class Situation:
    world: str
    history: tuple = ()

    @property
    def time(self) -> int:
        return len(self.history)

    def do(self, a: GroundAction) -> "Situation":
        return Situation(self.world, self.history + (a,))

    def root(self) -> "Situation":
        return Situation(self.world)

    def prefix(self, t: int) -> "Situation":
        return Situation(self.world, self.history[:t])

    def precedes(self, other: "Situation") -> bool:
        """``self ⊑ other``: same world and a prefix of its history."""
        return self.world == other.world and other.history[: self.time] == self.history

    def __str__(self) -> str:
        if not self.history:
            return f"S0[{self.world}]"
        return f"do([{', '.join(map(str, self.history))}], {self.world})"


@dataclass(frozen=True)
class BoundedPath:
    """A path through ``start`` followed by ``actions``; ``cursor`` counts
    steps from ``start``."""

    start: Situation
    actions: tuple
    cursor: int = 0

    @property
    def end(self) -> Situation:
        return Situation(self.start.world, self.start.history + self.actions)

    @property
    def current(self) -> Situation:
        return Situation(self.start.world, self.start.history + self.actions[: self.cursor])

    def suffix(self, k: int = 1) -> "BoundedPath":
        return BoundedPath(self.start, self.actions, self.cursor + k)

    def __str__(self) -> str:
        acts = ", ".join(map(str, self.actions))
        return f"<{self.start} | {acts} @{self.cursor}>"


class _History:
    __slots__ = ("parent", "action", "depth", "members", "next")

    def __init__(self, parent, action, depth):
        self.parent = parent
        self.action = action
        self.depth = depth
        self.members = {}
        self.next = {}

    def child(self, a):
        h = self.next.get(a)
        if h is None:
            h = self.next[a] = _History(self, a, self.depth + 1)
        return h


class Node:
    __slots__ = ("world", "parent", "action", "depth", "hc", "kids", "state", "_chain")

    def __init__(self, world, parent, action, depth, hc, state):
        self.world = world
        self.parent = parent
        self.action = action
        self.depth = depth
        self.hc = hc
        self.kids = {}
        self.state = state
        self._chain = None
        hc.members[world] = self

    @property
    def chain(self) -> tuple:
        c = self._chain
        if c is None:
            c = (self,) if self.parent is None else self.parent.chain + (self,)
            self._chain = c
        return c

    def history(self) -> tuple:
        return tuple(n.action for n in self.chain[1:])

    def __repr__(self) -> str:
        return f"Node({self.world}, {list(map(str, self.history()))})"


class Engine:
    """Query context for one theory and horizon.  Caches live as long as
    the engine does."""

    def __init__(self, theory: TheoryModel, horizon: "int | None" = None):
        self.theory = theory
        self.tables = theory.tables
        self.horizon = theory.horizon if horizon is None else horizon
        if self.horizon < 0:
            raise EngineError("horizon must be non-negative")
        self._atoms = tm.ground_atoms(self.tables)
        self._ssa = self._compile_ssa()
        self._transitions = {}
        self._h0 = _History(None, None, 0)
        self.roots = {}
        for w in theory.worlds.values():
            self.roots[w.name] = Node(w.name, None, None, 0, self._h0, frozenset(w.true_atoms))
        self._k0 = {}
        for agent in self.tables.agents:
            for w in theory.worlds:
                self._k0[agent, w] = tuple(sorted(initial_k(theory, agent, w)))
        self._kcache = {}
        self._apa_cache = {}
        self._sf_cache = {}
        self._candidates = None
        self._compiled_state = {}
        self._compiled_path = {}
        # tabling state
        self._inprogress = {}
        self._pessimistic = set()
        self._frames = []
        self._taint_of = {}
        self._registry = defaultdict(list)
        self._children = {}
        self._conts = {}
        self._exec = {}
        self._pd_poss = {}
        self._levels = {}
        self._gint = {}
        self._progs = {}
        self._ex = {}
        self._res = {}
        self._obj = {}
        self._rmoves = None
        self._rprogs = {}
        self._rcache = {}
        self._counts = {}

    # ---------------------------------------------------------- plumbing

    def _cached(self, cache, key, fn):
        try:
            v = cache[key]
        except KeyError:
            pass
        else:
            if self._taint_of:
                t = self._taint_of.get((id(cache), key))
                if t and self._frames:
                    self._frames[-1].update(t)
            return v
        if not self._inprogress:
            v = fn()
            cache[key] = v
            return v
        frame = set()
        self._frames.append(frame)
        try:
            v = fn()
        finally:
            self._frames.pop()
        cache[key] = v
        if frame:
            self._taint_of[(id(cache), key)] = frame
            for k in frame:
                self._registry[k].append((cache, key))
            if self._frames:
                self._frames[-1].update(frame)
        return v

    def node(self, s: Situation) -> Node:
        try:
            n = self.roots[s.world]
        except KeyError:
            raise EngineError(f"unknown world {s.world}") from None
        for a in s.history:
            n = self.do(a, n)
        return n

    @staticmethod
    def situation(n: Node) -> Situation:
        return Situation(n.world, n.history())

    def do(self, a: GroundAction, n: Node) -> Node:
        c = n.kids.get(a)
        if c is None:
            if a.name not in self.tables.actions:
                raise TermError(f"unknown action {a.name}")
            c = Node(n.world, n, a, n.depth + 1, n.hc.child(a), self._transition(n.state, a))
            n.kids[a] = c
        return c

    def _sibling(self, hc, world) -> Node:
        n = hc.members.get(world)
        if n is None:
            n = self.do(hc.action, self._sibling(hc.parent, world))
        return n

    def siblings(self, n: Node) -> list:
        return [self._sibling(n.hc, w) for w in self.theory.worlds]

    # --------------------------------------------------------- fluents

    def _compile_ssa(self):
        out = {}
        for pred, args in self._atoms:
            params, body = self.theory.ssa[pred]
            env = dict(zip(params, args))
            f = tm.expand(body, self.tables, env, keep=frozenset({"a"}))
            out[pred, args] = _compile_objective(f)
        return out

    def _transition(self, state, a):
        key = (state, a)
        st = self._transitions.get(key)
        if st is None:
            st = frozenset(atom for atom, fn in self._ssa.items() if fn(state, a))
            self._transitions[key] = st
        return st

    def holds_fluent(self, s: Situation, pred: str, args: tuple) -> bool:
        if (pred, tuple(args)) not in self._ssa:
            raise TermError(f"unknown fluent atom {pred}{tuple(args)}")
        return (pred, tuple(args)) in self.node(s).state

    # ------------------------------------------------------- knowledge

    def k_nodes(self, agent: str, n: Node) -> tuple:
        key = (agent, n)
        ks = self._kcache.get(key)
        if ks is not None:
            return ks
        if n.parent is None:
            try:
                ks = tuple(self.roots[w] for w in self._k0[agent, n.world])
            except KeyError:
                raise TermError(f"unknown agent {agent}") from None
        else:
            a = n.action
            prev = self.k_nodes(agent, n.parent)
            sch = self.tables.actions[a.name]
            keep = prev
            if sch.kind == "sense" and self.tables.agent_of(a) == agent:
                sf = self._sf(a)
                val = sf(n.parent)
                keep = [m for m in prev if sf(m) == val]
            elif sch.kind == "inform" and self.tables.target_of(a) == agent:
                msg = self.compile_state(a.payload)
                keep = [m for m in prev if msg(m)]
            ks = tuple(self.do(a, m) for m in keep)
        self._kcache[key] = ks
        return ks

    def k_accessible(self, agent: str, s: Situation) -> list:
        return [self.situation(m) for m in self.k_nodes(agent, self.node(s))]

    def _sf(self, a):
        fn = self._sf_cache.get(a)
        if fn is None:
            sch = self.tables.actions[a.name]
            params, body = self.theory.sf[a.name]
            fn = self.compile_state(tm.expand(body, self.tables, self._action_env(sch, params, a)))
            self._sf_cache[a] = fn
        return fn

    @staticmethod
    def _action_env(sch, params, a):
        env = {}
        args = iter(a.args)
        for p, sort in zip(params, sch.sorts):
            env[p] = a.payload if sort == tm.MESSAGE else next(args)
        return env

    # ---------------------------------------------------- preconditions

    def _apa(self, a):
        info = self._apa_cache.get(a)
        if info is None:
            sch = self.tables.actions.get(a.name)
            if sch is None:
                raise TermError(f"unknown action {a.name}")
            params, body = self.theory.poss[a.name]
            f = tm.expand(body, self.tables, self._action_env(sch, params, a))
            guard = frozenset(_positive_guards(f))
            info = (f, guard, self.compile_state(f), tm.mentions_paths(f))
            self._apa_cache[a] = info
        return info

    def candidates(self) -> tuple:
        """Ground actions whose precondition is not constantly false."""
        if self._candidates is None:
            out = []
            for a in tm.all_ground_actions(self.tables):
                f, guard, fn, dep = self._apa(a)
                if f != tm.FALSE:
                    out.append((a, guard, fn, dep))
            # cheap preconditions first, so searches find witnesses early
            out.sort(key=lambda c: c[3])
            self._candidates = tuple(out)
        return self._candidates

    def poss_node(self, a: GroundAction, n: Node) -> bool:
        f, guard, fn, dep = self._apa(a)
        if not guard <= n.state:
            return False
        if not dep:
            return fn(n)
        return self._poss_dep(a, n, fn)

    def _poss_dep(self, a, n, fn):
        key = (a, n)
        cache = self._pd_poss
        if key in cache:
            if self._taint_of:
                t = self._taint_of.get((id(cache), key))
                if t and self._frames:
                    self._frames[-1].update(t)
            return cache[key]
        if key in self._inprogress:
            self._frames[-1].add(key)
            return self._inprogress[key]
        assume = key not in self._pessimistic
        while True:
            self._inprogress[key] = assume
            frame = set()
            self._frames.append(frame)
            try:
                v = bool(fn(n))
            finally:
                self._frames.pop()
                del self._inprogress[key]
            used = key in frame
            frame.discard(key)
            entries = self._registry.pop(key, [])
            if used and v != assume:
                for c, k in entries:
                    c.pop(k, None)
                    self._taint_of.pop((id(c), k), None)
                if not assume:
                    raise EngineError(f"precondition of {a} has no consistent truth value")
                self._pessimistic.add(key)
                assume = False
                continue
            for c, k in entries:
                t = self._taint_of.get((id(c), k))
                if t is not None:
                    t.discard(key)
                    if not t:
                        del self._taint_of[(id(c), k)]
            break
        cache[key] = v
        if frame:
            self._taint_of[(id(cache), key)] = frame
            for k in frame:
                self._registry[k].append((cache, key))
            if self._frames:
                self._frames[-1].update(frame)
        return v

    def poss(self, a: GroundAction, s: Situation) -> bool:
        return self.poss_node(a, self.node(s))

    def executable_node(self, n: Node) -> bool:
        if n.parent is None:
            return True
        return self._cached(self._exec, n, lambda: self.executable_node(n.parent)
                            and self.poss_node(n.action, n.parent))

    def executable(self, s: Situation) -> bool:
        return self.executable_node(self.node(s))

    def children(self, n: Node) -> tuple:
        if n.depth >= self.horizon:
            return ()

        def compute():
            st = n.state
            out = []
            for a, guard, fn, dep in self.candidates():
                if guard <= st and (self._poss_dep(a, n, fn) if dep else fn(n)):
                    out.append(self.do(a, n))
            return tuple(out)

        return self._cached(self._children, n, compute)

    # ------------------------------------------------------------ paths

    def leaves(self, n: Node) -> tuple:
        """Leaves of every executable continuation of ``n`` to the horizon."""
        if n.depth > self.horizon:
            raise HorizonError(f"situation at time {n.depth} is beyond horizon {self.horizon}")
        if n.depth == self.horizon:
            return (n,)

        def compute():
            out = []
            for c in self.children(n):
                out.extend(self.leaves(c))
            return tuple(out)

        return self._cached(self._conts, n, compute)

    def enumerate_paths(self, s: Situation) -> list:
        n = self.node(s)
        t = n.depth
        return [BoundedPath(s, l.history()[t:], 0) for l in self.leaves(n)]

    def count_paths(self, s: Situation) -> int:
        return self._count(self.node(s))

    def _count(self, n):
        if n.depth > self.horizon:
            raise HorizonError(f"situation at time {n.depth} is beyond horizon {self.horizon}")
        if n.depth == self.horizon:
            return 1
        return self._cached(self._counts, n, lambda: sum(self._count(c) for c in self.children(n)))

    def path_leaf(self, p: BoundedPath):
        leaf = self.node(p.end)
        return leaf, p.start.time + p.cursor

    # ---------------------------------------------------------- formulas

    def prepare(self, f: Formula) -> Formula:
        return tm.expand(f, self.tables)

    def compile_state(self, f: Formula):
        fn = self._compiled_state.get(f)
        if fn is None:
            fn = self._state(tm.expand(f, self.tables))
            self._compiled_state[f] = fn
        return fn

    def compile_path(self, f: Formula):
        fn = self._compiled_path.get(f)
        if fn is None:
            fn = self._path(tm.expand(f, self.tables))
            self._compiled_path[f] = fn
        return fn

    def _state(self, f):
        if isinstance(f, tm.Truth):
            v = f.value
            return lambda n: v
        if isinstance(f, tm.Atom):
            if f.pred == tm.INIT and not f.args:
                return lambda n: n.depth == 0
            if f.pred not in self.tables.fluents:
                raise TermError(f"unknown predicate {f.pred}")
            key = (f.pred, tuple(a.name for a in f.args))
            return lambda n: key in n.state
        if isinstance(f, tm.Not):
            b = self._state(f.body)
            return lambda n: not b(n)
        if isinstance(f, tm.And):
            l, r = self._state(f.left), self._state(f.right)
            return lambda n: l(n) and r(n)
        if isinstance(f, tm.Poss):
            a = tm.ground_action(f.action)
            return lambda n: self.poss_node(a, n)
        if isinstance(f, tm.After):
            a = tm.ground_action(f.action)
            b = self._state(f.body)
            return lambda n: b(self.do(a, n))
        if isinstance(f, tm.Know):
            agent = _agent(f.agent)
            b = self._state(f.body)
            return self._memo(lambda n: all(b(m) for m in self.k_nodes(agent, n)),
                              tm.mentions_paths(f.body))
        if isinstance(f, tm.AllPaths):
            neg = _neg(f.body)
            return self._memo(lambda n: not self.exists(n, neg), True)
        if isinstance(f, tm.Int):
            agent, level, body = _agent(f.agent), f.level, f.body
            return self._memo(lambda n: self._intends(agent, body, level, n), True)
        if isinstance(f, tm.PGoal):
            agent, level, body = _agent(f.agent), f.level, f.body
            return self._memo(lambda n: self._pgoal(agent, body, level, n), True)
        if isinstance(f, (tm.Next, tm.Until, tm.Does)):
            raise TermError(f"path operator {type(f).__name__} used where a state formula is required")
        if isinstance(f, tm.Eq):
            raise TermError("equality between non-ground terms")
        raise TermError(f"cannot evaluate {type(f).__name__}")

    def _memo(self, fn, dependent):
        cache = {}
        if dependent:
            cached = self._cached
            return lambda n: cached(cache, n, lambda: fn(n))

        def pure(n):
            v = cache.get(n)
            if v is None:
                v = cache[n] = fn(n)
            return v

        return pure

    def _path(self, f):
        if isinstance(f, tm.Not):
            b = self._path(f.body)
            return lambda c, i: not b(c, i)
        if isinstance(f, tm.And):
            l, r = self._path(f.left), self._path(f.right)
            return lambda c, i: l(c, i) and r(c, i)
        if isinstance(f, tm.Next):
            b = self._path(f.body)
            return lambda c, i: i + 1 < len(c) and b(c, i + 1)
        if isinstance(f, tm.Does):
            a = tm.ground_action(f.action)
            b = self._path(f.body)
            return lambda c, i: i + 1 < len(c) and c[i + 1].action == a and b(c, i + 1)
        if isinstance(f, tm.Until):
            l, r = self._path(f.left), self._path(f.right)
            if f.left == tm.TRUE:
                def ev(c, i):
                    for j in range(i, len(c)):
                        if r(c, j):
                            return True
                    return False
                return ev

            def until(c, i):
                for j in range(i, len(c)):
                    if r(c, j):
                        return True
                    if not l(c, j):
                        return False
                return False
            return until
        s = self._state(f)
        return lambda c, i: s(c[i])

    def eval_state_formula(self, s: Situation, f: Formula) -> bool:
        if not tm.is_state(f):
            raise TermError("not a state formula")
        return bool(self.compile_state(f)(self.node(s)))

    def eval_if(self, s: Situation, f: Formula) -> bool:
        if not tm.is_if(f):
            raise TermError("not an intention formula")
        return bool(self.compile_state(f)(self.node(s)))

    def eval_path_formula(self, p: BoundedPath, f: Formula) -> bool:
        if not tm.is_path(f):
            raise TermError("not a path formula")
        leaf, i = self.path_leaf(p)
        return bool(self.compile_path(f)(leaf.chain, i))

    def holds(self, s: Situation, f: Formula) -> bool:
        return bool(self.compile_state(f)(self.node(s)))

    # ----------------------------------------------------------- search

    def _prog(self, f):
        """Closure ``(node, last) -> residual``: what must hold from the
        next node on for ``f`` to hold at ``node``."""
        fn = self._progs.get(f)
        if fn is not None:
            return fn
        if isinstance(f, tm.Truth):
            fn = lambda n, last: f
        elif isinstance(f, _Did):
            a = f.action
            fn = lambda n, last: tm.TRUE if n.action == a else tm.FALSE
        elif isinstance(f, tm.Not):
            b = self._prog(f.body)
            fn = lambda n, last: _neg(b(n, last))
        elif isinstance(f, tm.And):
            l, r = self._prog(f.left), self._prog(f.right)

            def fn(n, last):
                x = l(n, last)
                if x is tm.FALSE or x == tm.FALSE:
                    return tm.FALSE
                return _and(x, r(n, last))
        elif isinstance(f, tm.Next):
            body = f.body
            fn = lambda n, last: tm.FALSE if last else body
        elif isinstance(f, tm.Does):
            rest = _and(_Did(tm.ground_action(f.action)), f.body)
            fn = lambda n, last: tm.FALSE if last else rest
        elif isinstance(f, tm.Until):
            l, r = self._prog(f.left), self._prog(f.right)

            def fn(n, last):
                y = r(n, last)
                if y == tm.TRUE:
                    return y
                x = tm.FALSE if last else _and(l(n, last), f)
                return _neg(_and(_neg(y), _neg(x)))
        else:
            s = self._state(f)
            fn = lambda n, last: tm.TRUE if s(n) else tm.FALSE
        self._progs[f] = fn
        return fn

    def exists(self, n: Node, f: Formula) -> bool:
        """Is there an executable continuation of ``n`` to the horizon on
        which the (expanded) path formula ``f`` holds at ``n``?"""
        if n.depth > self.horizon:
            raise HorizonError(f"situation at time {n.depth} is beyond horizon {self.horizon}")
        return self._cached(self._ex, (n, f), lambda: self._exists(n, f))

    def _exists(self, n, f):
        if self._objective(f) and not self._relaxed(n.state, n.depth, n.action, f):
            return False
        last = n.depth == self.horizon
        r = _norm(self._prog(f)(n, last))
        if r == tm.FALSE:
            return False
        if last:
            return r == tm.TRUE
        need = _required_action(r)
        if need is not None:
            return self.poss_node(need, n) and self.exists(self.do(need, n), r)
        st = n.state
        for a, guard, fn, dep in self.candidates():
            if guard <= st and (self._poss_dep(a, n, fn) if dep else fn(n)):
                if self.exists(self.do(a, n), r):
                    return True
        return False

    # Relaxed search: fluent states only, with every precondition weakened
    # to an objective upper bound.  Every real continuation is also a
    # relaxed one, so a relaxed failure proves a real one.

    def _objective(self, f) -> bool:
        v = self._obj.get(f)
        if v is None:
            v = self._obj[f] = all(
                isinstance(g, (tm.Truth, tm.Atom, tm.Not, tm.And, tm.Next, tm.Until, tm.Does, _Did))
                for g in tm.subformulas(f))
        return v

    def _relaxed_moves(self):
        if self._rmoves is None:
            out = []
            for a, guard, fn, dep in self.candidates():
                f = self._apa(a)[0]
                out.append((a, guard, _compile_objective(_upper(f, True))))
            self._rmoves = tuple(out)
        return self._rmoves

    def _rprog(self, f):
        fn = self._rprogs.get(f)
        if fn is not None:
            return fn
        if isinstance(f, tm.Truth):
            fn = lambda st, d, act, last: f
        elif isinstance(f, _Did):
            a = f.action
            fn = lambda st, d, act, last: tm.TRUE if act == a else tm.FALSE
        elif isinstance(f, tm.Atom):
            if f.pred == tm.INIT and not f.args:
                fn = lambda st, d, act, last: tm.TRUE if d == 0 else tm.FALSE
            else:
                key = (f.pred, tuple(x.name for x in f.args))
                fn = lambda st, d, act, last: tm.TRUE if key in st else tm.FALSE
        elif isinstance(f, tm.Not):
            b = self._rprog(f.body)
            fn = lambda st, d, act, last: _neg(b(st, d, act, last))
        elif isinstance(f, tm.And):
            l, r = self._rprog(f.left), self._rprog(f.right)

            def fn(st, d, act, last):
                x = l(st, d, act, last)
                if x == tm.FALSE:
                    return x
                return _and(x, r(st, d, act, last))
        elif isinstance(f, tm.Next):
            body = f.body
            fn = lambda st, d, act, last: tm.FALSE if last else body
        elif isinstance(f, tm.Does):
            rest = _and(_Did(tm.ground_action(f.action)), f.body)
            fn = lambda st, d, act, last: tm.FALSE if last else rest
        elif isinstance(f, tm.Until):
            l, r = self._rprog(f.left), self._rprog(f.right)

            def fn(st, d, act, last):
                y = r(st, d, act, last)
                if y == tm.TRUE:
                    return y
                x = tm.FALSE if last else _and(l(st, d, act, last), f)
                return _neg(_and(_neg(y), _neg(x)))
        else:
            raise TermError(f"not objective: {type(f).__name__}")
        self._rprogs[f] = fn
        return fn

    def _relaxed(self, st, d, act, f) -> bool:
        key = (st, d, act, f)
        v = self._rcache.get(key)
        if v is not None:
            return v
        last = d == self.horizon
        r = _norm(self._rprog(f)(st, d, act, last))
        if r == tm.FALSE:
            v = False
        elif last:
            v = r == tm.TRUE
        else:
            need = _required_action(r)
            v = False
            for a, guard, ub in self._relaxed_moves():
                if (need is None or a == need) and guard <= st and ub(st, None):
                    if self._relaxed(self._transition(st, a), d + 1, a, r):
                        v = True
                        break
        self._rcache[key] = v
        return v

    def residual(self, f: Formula, origin: int, m: Node) -> Formula:
        """``f`` evaluated from cursor ``origin`` on ``m``'s own history,
        progressed up to ``m``."""
        if m.depth <= origin:
            return f
        return self._cached(self._res, (f, origin, m), lambda: _norm(
            self._prog(self.residual(f, origin, m.parent))(m.parent, False)))

    def _some(self, nodes, cons, extra=tm.TRUE) -> bool:
        for m in nodes:
            parts = [self.residual(f, o, m) for f, o in cons]
            parts.append(extra)
            g = _norm(_and_all(parts))
            if g != tm.FALSE and self.exists(m, g):
                return True
        return False

    # ------------------------------------------------------------ goals

    def levels(self, agent: str, hc) -> tuple:
        """Non-trivial goal levels for ``agent`` after history ``hc`` as
        ``(formula, origin cursor)``, most important first."""
        key = (agent, hc)
        lv = self._levels.get(key)
        if lv is not None:
            return lv
        reqs = []
        h = hc
        while h.parent is not None:
            a = h.action
            sch = self.tables.actions[a.name]
            if sch.kind == "request" and self.tables.target_of(a) == agent:
                reqs.append((self.prepare(a.payload), h.depth))
            h = h.parent
        lv = tuple(reqs) + tuple((self.prepare(g), 0) for g in self.theory.goals.get(agent, ()))
        self._levels[key] = lv
        return lv

    def goal_count(self, agent: str, n: Node) -> int:
        return len(self.levels(agent, n.hc))

    def universe_nodes(self, n: Node) -> tuple:
        """Executable situations sharing ``n``'s history."""
        return tuple(m for m in self.siblings(n) if self.executable_node(m))

    def g_spec(self, agent: str, level: int, n: Node) -> tuple:
        """Level ``level`` of ``agent``'s goals at ``n`` as ``(start nodes,
        constraints)``: the paths from those starts satisfying each
        ``(formula, origin)`` constraint."""
        lv = self.levels(agent, n.hc)
        cons = (lv[level],) if level < len(lv) else ()
        return self.universe_nodes(n), cons

    def gint_spec(self, agent: str, level: int, n: Node) -> tuple:
        """The prioritized intersection at ``level`` in the same form."""
        ks = self.k_nodes(agent, n)
        lv = self.levels(agent, n.hc)
        level = min(level, len(lv))

        def compute():
            real = tuple(m for m in ks if self.executable_node(m))
            cons = lv[:1]
            if self._some(real, cons):
                cur = (real, cons)
            else:
                cur = (ks, ())
            for k in range(1, level + 1):
                nxt = cur[1] + ((lv[k],) if k < len(lv) else ())
                if self._some(real, nxt):
                    cur = (real, nxt)
            return cur

        return self._cached(self._gint, (agent, level, ks, n.hc), compute)

    def _intends(self, agent, psi, level, n):
        if level is None:
            level = len(self.levels(agent, n.hc))
        nodes, cons = self.gint_spec(agent, level, n)
        return not self._some(nodes, cons, _neg(psi))

    def _pgoal_at(self, agent, psi, k, n):
        nodes, cons = self.g_spec(agent, k, n)
        return not self._some(nodes, cons, _neg(psi))

    def _pgoal(self, agent, psi, level, n):
        if level is not None:
            return self._pgoal_at(agent, psi, level, n)
        count = len(self.levels(agent, n.hc))
        return any(self._pgoal_at(agent, psi, k, n) for k in range(count + 1))

    def spec_leaves(self, spec) -> list:
        """Enumerate the paths described by a ``(starts, constraints)`` pair."""
        nodes, cons = spec
        checks = [(self.compile_path(f), o) for f, o in cons]
        return [l for m in nodes for l in self.leaves(m)
                if all(p(l.chain, o) for p, o in checks)]

    def initial_goal_nonempty(self, agent: str, level: int) -> bool:
        f = self.prepare(self.theory.goals[agent][level])
        return any(self.exists(self.roots[w], f) for w in self.theory.worlds)


@dataclass(frozen=True)
class _Did(Formula):
    """Residual marker: the next step is ``action``."""

    action: GroundAction


def _neg(f):
    if f == tm.TRUE:
        return tm.FALSE
    if f == tm.FALSE:
        return tm.TRUE
    if isinstance(f, tm.Not):
        return f.body
    return tm.Not(f)


def _and(x, y):
    if x == tm.FALSE or y == tm.FALSE:
        return tm.FALSE
    if x == tm.TRUE:
        return y
    if y == tm.TRUE or x == y:
        return x
    return tm.And(x, y)


def _and_all(parts):
    out = tm.TRUE
    for p in reversed(parts):
        out = _and(p, out)
    return out


def _conjuncts(f, out):
    if isinstance(f, tm.And):
        _conjuncts(f.left, out)
        _conjuncts(f.right, out)
    elif f != tm.TRUE:
        out.append(f)
    return out


def _subst(f, facts):
    if f in facts:
        return tm.TRUE
    if isinstance(f, tm.Not):
        b = _subst(f.body, facts)
        return f if b is f.body else _neg(b)
    if isinstance(f, tm.And):
        l, r = _subst(f.left, facts), _subst(f.right, facts)
        if l is f.left and r is f.right:
            return f
        return _and(l, r)
    return f


_NORM = {}


def _norm(f):
    """Cheap propositional simplification of a residual, treating
    temporal subformulas as opaque: conjuncts are flattened and
    deduplicated and each conjunct is simplified under the others."""
    if not isinstance(f, tm.And):
        return f
    r = _NORM.get(f)
    if r is not None:
        return r
    parts = []
    for c in _conjuncts(f, []):
        if c not in parts:
            parts.append(c)
    changed = True
    while changed:
        changed = False
        if tm.FALSE in parts:
            parts = [tm.FALSE]
            break
        did = {c.action for c in parts if isinstance(c, _Did)}
        if len(did) > 1:
            parts = [tm.FALSE]
            break
        for i, c in enumerate(parts):
            if isinstance(c, (tm.Not, tm.And)):
                facts = set(parts[:i] + parts[i + 1:])
                d = _subst(c, facts)
                if d is not c:
                    rest = parts[:i] + parts[i + 1:]
                    new = []
                    for x in _conjuncts(d, []) if d != tm.FALSE else [tm.FALSE]:
                        if x not in rest and x not in new:
                            new.append(x)
                    parts = parts[:i] + new + parts[i + 1:]
                    changed = True
                    break
    r = _and_all(parts)
    _NORM[f] = r
    return r


def _upper(f, positive):
    """Objective formula implied by ``f`` (``positive``) or implying it."""
    if isinstance(f, tm.Truth) or (isinstance(f, tm.Atom) and f.pred != tm.INIT):
        return f
    if isinstance(f, tm.Not):
        return tm.Not(_upper(f.body, not positive))
    if isinstance(f, tm.And):
        return tm.And(_upper(f.left, positive), _upper(f.right, positive))
    return tm.TRUE if positive else tm.FALSE


def _required_action(f):
    for c in _conjuncts(f, []):
        if isinstance(c, _Did):
            return c.action
    return None


def _agent(t) -> str:
    if isinstance(t, tm.Const):
        return t.name
    raise TermError(f"agent term is not ground: {t}")


def _positive_guards(f):
    if isinstance(f, tm.And):
        yield from _positive_guards(f.left)
        yield from _positive_guards(f.right)
    elif isinstance(f, tm.Atom) and f.pred != tm.INIT:
        yield (f.pred, tuple(a.name for a in f.args))


def _compile_objective(f):
    """Closure ``(state, action) -> bool`` for a successor-state body."""
    if isinstance(f, tm.Truth):
        v = f.value
        return lambda st, a: v
    if isinstance(f, tm.Atom):
        key = (f.pred, tuple(x.name for x in f.args))
        return lambda st, a: key in st
    if isinstance(f, tm.Eq):
        left, right = f.left, f.right
        if isinstance(right, tm.Var):
            left, right = right, left
        if not (isinstance(left, tm.Var) and left.name == "a" and isinstance(right, tm.ActionTerm)):
            raise TermError("successor-state axioms may only compare the action variable with action terms")
        target = tm.ground_action(right)
        return lambda st, a: a == target
    if isinstance(f, tm.Not):
        b = _compile_objective(f.body)
        return lambda st, a: not b(st, a)
    if isinstance(f, tm.And):
        l, r = _compile_objective(f.left), _compile_objective(f.right)
        return lambda st, a: l(st, a) and r(st, a)
    raise TermError(f"successor-state axiom uses {type(f).__name__}")
