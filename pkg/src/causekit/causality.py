"""Achievement causes of intentional dynamic formulas in a narrative."""
from __future__ import annotations

import logging
from dataclasses import dataclass

from . import terms as tm
from .engine import Engine, Situation
from .terms import Formula, GroundAction

log = logging.getLogger(__name__)

ORACLE_LIMIT = 6


class SettingError(ValueError):
    code = "setting"


class NotExecutable(SettingError):
    code = "not-executable"

    def __init__(self, step: int, action: GroundAction):
        super().__init__(f"step {step} ({action}) is not possible")
        self.step = step
        self.action = action


class EffectAtRoot(SettingError):
    code = "effect-at-root"


class EffectNotAchieved(SettingError):
    code = "effect-not-achieved"


@dataclass(frozen=True)
class CausalSetting:
    effect: Formula
    scenario: Situation


class CauseSet(frozenset):
    """``(action, time)`` pairs; iteration is by time, then action text."""

    def __iter__(self):
        return iter(sorted(super().__iter__(), key=lambda p: (p[1], str(p[0]))))

    def __repr__(self) -> str:
        return "CauseSet([" + ", ".join(f"({a}, {t})" for a, t in self) + "])"


def first_impossible(engine: Engine, s: Situation) -> "int | None":
    cur = s.root()
    for i, a in enumerate(s.history):
        if not engine.poss(a, cur):
            return i
        cur = cur.do(a)
    return None


def validate_setting(engine: Engine, effect: Formula, s: Situation) -> CausalSetting:
    if tm.free_vars(effect):
        raise SettingError("effect must be ground")
    if not tm.is_if(effect):
        raise SettingError("effect must be an intentional dynamic formula")
    bad = first_impossible(engine, s)
    if bad is not None:
        raise NotExecutable(bad, s.history[bad])
    if engine.holds(s.root(), effect):
        raise EffectAtRoot("effect already holds at the root of the scenario")
    if not engine.holds(s, effect):
        raise EffectNotAchieved("effect does not hold at the end of the scenario")
    return CausalSetting(effect, s)


def causes_directly(engine: Engine, a: GroundAction, t: int, effect: Formula, s: Situation) -> bool:
    if not 0 <= t < s.time or s.history[t] != a:
        return False
    if engine.holds(s.prefix(t), effect):
        return False
    return all(engine.holds(s.prefix(k), effect) for k in range(t + 1, s.time + 1))


def direct_cause(engine: Engine, effect: Formula, s: Situation):
    """The unique direct cause as ``(action, time)``, or None."""
    for k in range(s.time, -1, -1):
        if not engine.holds(s.prefix(k), effect):
            return None if k == s.time else (s.history[k], k)
    return None


def enabler(a: GroundAction, effect: Formula) -> Formula:
    """``Poss(a) ∧ After(a, effect)``."""
    term = a.term()
    return tm.And(tm.Poss(term), tm.After(term, effect))


def causes(engine: Engine, effect: Formula, s: Situation) -> CauseSet:
    validate_setting(engine, effect, s)
    memo = {}
    return CauseSet(_causes(engine, effect, s, memo))


def _causes(engine, effect, s, memo):
    key = (effect, s)
    if key in memo:
        return memo[key]
    out = set()
    d = direct_cause(engine, effect, s)
    if d is not None:
        a, t = d
        out.add(d)
        sub = enabler(a, effect)
        s2 = s.prefix(t)
        if t > 0 and engine.holds(s2.root(), sub):
            log.info("enabler of %s at %d already holds at the root", a, t)
        if t > 0:
            out |= _causes(engine, sub, s2, memo)
    memo[key] = frozenset(out)
    return memo[key]


def causes_oracle(engine: Engine, effect: Formula, s: Situation) -> CauseSet:
    """Least fixed point by naive iteration over every setting reachable
    through enablers, testing every (action, time) pair directly."""
    if s.time > ORACLE_LIMIT:
        raise ValueError(f"oracle is limited to narratives of length {ORACLE_LIMIT}")
    validate_setting(engine, effect, s)

    settings = []
    frontier = [(effect, s)]
    while frontier:
        f, sit = frontier.pop()
        if (f, sit) in settings:
            continue
        settings.append((f, sit))
        for t, a in enumerate(sit.history):
            if causes_directly(engine, a, t, f, sit):
                frontier.append((enabler(a, f), sit.prefix(t)))

    rel = set()
    while True:
        new = set(rel)
        for f, sit in settings:
            for t, a in enumerate(sit.history):
                if causes_directly(engine, a, t, f, sit):
                    new.add((a, t, f, sit))
                    sub, s2 = enabler(a, f), sit.prefix(t)
                    for (b, u, g, s3) in rel:
                        if g == sub and s3 == s2:
                            new.add((b, u, f, sit))
        if new == rel:
            break
        rel = new
    return CauseSet((a, t) for (a, t, f, sit) in rel if f == effect and sit == s)
