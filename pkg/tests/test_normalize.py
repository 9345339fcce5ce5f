import random

import pytest

from oracle_utils import formulas_satisfiable

from nlprover.datagen import oracle_sat
from nlprover.logic import Const, Origin, Var, clause_to_str
from nlprover.normalize import (
    And,
    Atom,
    CnfBlowupError,
    Exists,
    ForAll,
    Implies,
    Not,
    Or,
    SkolemNamer,
    build_theory_sets,
    negate,
    nnf,
    to_clauses,
)

X = Var("x")
BOB = Const("Bob")


def _strs(clauses):
    return [clause_to_str(c) for c in clauses]


def test_rule_converts_to_single_clause():
    f = ForAll(X, Implies(And(Atom("round", (X,)), Atom("kind", (X,))), Atom("rough", (X,))))
    assert _strs(to_clauses(f)) == ["-kind(v1) | -round(v1) | rough(v1)"]


def test_top_level_existential_becomes_sk_constant():
    f = Exists(X, Atom("kind", (X,)))
    assert _strs(to_clauses(f, SkolemNamer())) == ["kind(sk1)"]


def test_ground_atom_is_identity():
    assert _strs(to_clauses(Atom("kind", (BOB,)))) == ["kind(Bob)"]


def test_negate_atomic():
    f = negate(Atom("kind", (BOB,)))
    assert f == Not(Atom("kind", (BOB,)))


def test_negate_dualizes_quantifier():
    f = negate(ForAll(X, Atom("kind", (X,))))
    assert f == Exists(X, Not(Atom("kind", (X,))))


def test_negate_cancels_double_negation():
    f = negate(Not(Atom("round", (BOB,))))
    assert f == Atom("round", (BOB,))


def _random_formula(rng, depth=0):
    roll = rng.random()
    atom = Atom(rng.choice("pqr"), (rng.choice([BOB, Const("Alan")]),))
    if depth >= 3 or roll < 0.3:
        return atom
    if roll < 0.45:
        return Not(_random_formula(rng, depth + 1))
    a = _random_formula(rng, depth + 1)
    b = _random_formula(rng, depth + 1)
    return (And if roll < 0.65 else Or if roll < 0.85 else Implies)(a, b)


def test_double_negation_is_nnf_identity_for_quantifier_free():
    rng = random.Random(2)
    for _ in range(300):
        f = _random_formula(rng)
        assert negate(negate(f)) == nnf(f)


def _grammar_like_formula(rng, entities, attrs):
    kind = rng.choice(("fact", "rule", "univ", "exist", "univ1"))
    x = Var("x")
    if kind == "fact":
        a = Atom(rng.choice(attrs), (Const(rng.choice(entities)),))
        return a if rng.random() < 0.6 else Not(a)
    if kind == "exist":
        a = Atom(rng.choice(attrs), (x,))
        return Exists(x, a if rng.random() < 0.6 else Not(a))
    if kind == "univ1":
        a = Atom(rng.choice(attrs), (x,))
        return ForAll(x, a if rng.random() < 0.6 else Not(a))
    body_attrs = rng.sample(attrs, rng.randint(1, min(2, len(attrs) - 1)))
    body = Atom(body_attrs[0], (x,))
    for b in body_attrs[1:]:
        body = And(body, Atom(b, (x,)))
    head = Atom(rng.choice([a for a in attrs if a not in body_attrs]), (x,))
    if rng.random() < 0.3:
        head = Not(head)
    if kind == "rule":
        return ForAll(x, Implies(body, head))
    lits = Or(Not(Atom(body_attrs[0], (x,))), head)
    return ForAll(x, lits)


def test_clause_form_is_equisatisfiable_with_formulas():
    # Formula-level finite-model search against clause-level enumeration.
    rng = random.Random(4)
    both = {True: 0, False: 0}
    for trial in range(120):
        # the second half uses a cramped vocabulary so contradictions are common
        attrs = ["p", "q", "r"] if trial < 60 else ["p", "q"]
        n = rng.randint(2, 4) if trial < 60 else rng.randint(4, 6)
        formulas = [_grammar_like_formula(rng, ["Bob"], attrs) for _ in range(n)]
        namer = SkolemNamer()
        clauses = [c for f in formulas for c in to_clauses(f, namer)]
        expected = formulas_satisfiable(formulas)
        got = oracle_sat(clauses)
        assert got == expected
        both[expected] += 1
    assert both[True] > 10 and both[False] > 10


def test_cnf_blowup_raises():
    # Or-chain of 9 conjunction pairs distributes to 2^9 = 512 clauses.
    def pair(i):
        return And(Atom(f"a{i}", (BOB,)), Atom(f"b{i}", (BOB,)))

    f = pair(0)
    for i in range(1, 9):
        f = Or(f, pair(i))
    with pytest.raises(CnfBlowupError):
        to_clauses(f)


def test_free_variables_rejected():
    with pytest.raises(ValueError):
        to_clauses(Atom("kind", (X,)))


def test_build_theory_sets_minimal_case():
    t1, t2 = build_theory_sets([Atom("kind", (BOB,))], Atom("kind", (BOB,)))
    assert _strs(t1.clauses) == ["kind(Bob)"]
    assert _strs(t2.clauses) == ["kind(Bob)", "-kind(Bob)"]
    assert t2.clauses[1].origin is Origin.NEGATED_HYPOTHESIS
    # the hypothesis clause collapsed into the theory clause in T1 but keeps
    # its support mark there
    assert t1.is_supported(t1.clauses[0].id)


def test_negated_hypothesis_lands_in_t2():
    nlt = [ForAll(X, Or(Not(Atom("kind", (X,))), Atom("rough", (X,))))]
    h = Not(Atom("kind", (BOB,)))
    t1, t2 = build_theory_sets(nlt, h)
    assert "kind(Bob)" in _strs(t2.clauses)
    assert "-kind(Bob)" in _strs(t1.clauses)


def test_existential_theory_shares_sk_constant_across_sets():
    nlt = [Exists(X, Atom("kind", (X,)))]
    h = Atom("round", (BOB,))
    t1, t2 = build_theory_sets(nlt, h)
    assert "kind(sk1)" in _strs(t1.clauses)
    assert "kind(sk1)" in _strs(t2.clauses)
    # both sets stay satisfiable under the independent model checker
    assert oracle_sat(t1.clauses)
    assert oracle_sat(t2.clauses)


def test_skolem_namer_avoids_existing_names():
    f = And(Atom("kind", (Const("sk3"),)), Exists(X, Atom("round", (X,))))
    clauses = to_clauses(f, SkolemNamer.starting_after([f]))
    assert "round(sk4)" in _strs(clauses)
