from causekit.engine import Engine
from causekit.syntax import parse_domain
from causekit.theory import initial_k, validate_theory

BASE = """
domain tiny
horizon 3
sorts { Agent = A, B }
fluents { p; q }
actions { flip(d: Agent) agent d; tell(d: Agent, e: Agent, m: message) agent d informs e }
messages { tell: p }
poss { flip(d) := true; tell(d, e, m) := Know(d, m) }
ssa { p := (exists d:Agent. a = flip(d)) | p; q := q }
worlds { real W0: {p}; W1: {} }
k0 { A: {W0} {W1}; B: {W0, W1} }
"""


def tiny():
    return parse_domain(BASE)


def codes(theory):
    return sorted({v.code for v in validate_theory(theory).violations})


def test_drone_fixture_is_valid(drone, engine):
    rep = validate_theory(drone, engine)
    assert rep.ok, rep.messages()


def test_tiny_is_valid():
    assert codes(tiny()) == []


def test_initial_k():
    t = tiny()
    assert initial_k(t, "A", "W0") == {"W0"}
    assert initial_k(t, "B", "W0") == {"W0", "W1"}


def test_missing_axioms():
    assert "missing-ssa" in codes(parse_domain(BASE.replace("; q := q", "")))
    assert "missing-poss" in codes(parse_domain(BASE.replace("; tell(d, e, m) := Know(d, m)", "")))


def test_k0_must_be_an_equivalence():
    assert "k0-reflexive" in codes(parse_domain(BASE.replace("A: {W0} {W1}", "A: {W0}")))


def test_real_world_required():
    assert "real-world" in codes(parse_domain(BASE.replace("real W0", "W0")))


def test_inform_messages_must_be_state_formulas():
    assert "messages" in codes(parse_domain(BASE.replace("tell: p", "tell: F p")))


def test_axioms_and_goals_are_checked():
    t = parse_domain(BASE + "axioms { a1: Know(A, p); a2: Know(B, p) }\ngoals { A 0: F q }\n")
    rep = validate_theory(t)
    assert sorted(v.code for v in rep.violations) == ["axiom", "empty-goal"]
    assert any("a2" in m for m in rep.messages())
    assert not any("a1" in m for m in rep.messages())


def test_engine_can_be_shared():
    t = tiny()
    assert validate_theory(t, Engine(t)).ok
