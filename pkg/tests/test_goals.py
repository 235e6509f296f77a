"""The closed-form goal levels against explicit step-by-step progression."""
import random

import pytest
from hypothesis import given, settings, strategies as st

from causekit import goals
from causekit.engine import Engine, Situation
from oracle import Oracle
from randtheory import random_theory

REQ = "req(Dc, D1, F Vis(D1, L1'))"


def as_set(paths):
    return {(p.start, p.actions) for p in paths}


def oracle_set(paths):
    return {(Situation(*p[0]), tuple(x[1][-1] for x in p[1:])) for p in paths}


def compare(theory, horizon, sits, agents):
    eng, orc = Engine(theory, horizon), Oracle(theory, horizon)
    for s in sits:
        if not eng.executable(s):
            continue
        key = (s.world, s.history)
        for d in agents:
            c = goals.level_count(eng, d, s)
            assert c == orc.count(d, key)
            for n in range(c + 2):
                assert as_set(goals.g_paths(eng, d, n, s)) == oracle_set(orc.G(d, n, key)), (d, n, s)
                assert as_set(goals.realistic_paths(eng, d, n, s)) == oracle_set(orc.g_realistic(d, n, key))
                assert as_set(goals.g_intersection(eng, d, n, s)) == oracle_set(orc.g_int(d, n, key))


def reachable(eng, depth):
    out, stack = [], [eng.roots[w] for w in sorted(eng.roots)]
    while stack:
        n = stack.pop()
        out.append(eng.situation(n))
        if n.depth < depth:
            stack.extend(eng.children(n))
    return out


def test_fixture_levels_match_progression(drone):
    eng = Engine(drone, 3)
    compare(drone, 3, reachable(eng, 3), ("D1", "D2"))


@pytest.mark.parametrize("seed", range(3))
def test_random_levels_match_progression(seed):
    rng = random.Random(100 + seed)
    for _ in range(15):
        theory = random_theory(rng, horizon=3, goals=True, sensing=rng.random() < 0.5)
        eng = Engine(theory)
        compare(theory, 3, reachable(eng, 3), ("A", "B"))


def test_request_pushes_a_new_top_level(engine, F, act, s3):
    s2 = s3.prefix(2)
    assert goals.level_count(engine, "D1", s2) == 2
    assert goals.level_count(engine, "D1", s3) == 3
    assert goals.pgoal(engine, "D1", F("F Vis(D1, L1')"), 0, s3)
    assert goals.pgoal(engine, "D1", F("F At(D1, Ld)"), 1, s3)
    assert not goals.pgoal(engine, "D1", F("F Vis(D1, L1')"), None, s2)
    assert goals.pgoal(engine, "D1", F("F Vis(D1, L1')"), None, s3)


def test_intention_levels_at_s3(engine, F, s3):
    both = F("F Vis(D1, L1') & F At(D1, Ld)")
    assert goals.intends(engine, "D1", both, s3)
    assert goals.intends(engine, "D1", both, s3, 1)
    assert not goals.intends(engine, "D1", F("F At(D1, Ld)"), s3, 0)
    assert not goals.intends(engine, "D1", F("Vis(D1, L1) B Vis(D1, Ld)"), s3, 2)


def test_trivial_intention(engine, F, sigma):
    for t in range(sigma.time + 1):
        assert goals.intends(engine, "D2", F("true"), sigma.prefix(t))
        assert goals.intends(engine, "D1", F("F true | true"), sigma.prefix(t))


def test_payload_checks(engine, act, s0):
    from causekit.terms import TermError
    with pytest.raises(TermError):
        goals.poss_req(engine, act("takeOff(D1, Ls)"), s0)
    with pytest.raises(TermError):
        goals.poss_req(engine, act("req(Dc, D1, F At(D1, Ld))"), s0)
    assert goals.poss_inform(engine, act("inform(Dc, D2, TStrom(L1))"), s0)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 10 ** 6), max_size=6), st.sampled_from(["W0", "W1", "W2"]))
def test_walk_properties(small_engine, walk, world):
    """Along random executable histories: intersections shrink with the
    level and stay non-empty, and a request is adopted at the top."""
    eng = small_engine
    n = eng.roots[world]
    for pick in walk:
        ch = eng.children(n)
        if not ch:
            break
        n = ch[pick % len(ch)]
        s = eng.situation(n)
        for d in ("D1", "D2"):
            sets = [goals.g_intersection(eng, d, k, s) for k in range(goals.level_count(eng, d, s) + 2)]
            assert all(sets)
            assert all(b <= a for a, b in zip(sets, sets[1:]))
        if eng.tables.actions[n.action.name].kind == "request":
            assert goals.pgoal(eng, eng.tables.target_of(n.action), n.action.payload, 0, s)
