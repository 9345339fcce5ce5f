"""Quantified formulas and their conversion to clause form.

The pipeline is the usual one: eliminate implications and push negations to
the atoms, rename bound variables apart, pull quantifiers out left to right,
replace existentials with fresh sk-terms, then distribute disjunction over
conjunction. The resulting clause set is equisatisfiable with the input
formula, which is all refutation needs.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Union

from .logic import (
    Clause,
    Const,
    Func,
    Literal,
    Origin,
    Term,
    Var,
    canonicalize,
    is_tautology,
    term_consts,
)


@dataclass(frozen=True, slots=True)
class Atom:
    pred: str
    args: tuple[Term, ...]


@dataclass(frozen=True, slots=True)
class Not:
    f: "Formula"


@dataclass(frozen=True, slots=True)
class And:
    a: "Formula"
    b: "Formula"


@dataclass(frozen=True, slots=True)
class Or:
    a: "Formula"
    b: "Formula"


@dataclass(frozen=True, slots=True)
class Implies:
    a: "Formula"
    b: "Formula"


@dataclass(frozen=True, slots=True)
class ForAll:
    var: Var
    body: "Formula"


@dataclass(frozen=True, slots=True)
class Exists:
    var: Var
    body: "Formula"


Formula = Union[Atom, Not, And, Or, Implies, ForAll, Exists]


class CnfBlowupError(Exception):
    """The clause form of one formula exceeded the configured bound."""


MAX_CLAUSES_PER_FORMULA = 256

_SK_RE = re.compile(r"sk(\d+)\Z")


class SkolemNamer:
    """Hands out sk1, sk2, ... in first-use order. One namer per judging
    task, shared across every formula of that task so names never collide."""

    def __init__(self, start: int = 1):
        self.next_index = start

    def fresh(self, universal_vars: tuple[Var, ...]) -> Term:
        name = f"sk{self.next_index}"
        self.next_index += 1
        if universal_vars:
            return Func(name, universal_vars)
        return Const(name)

    @classmethod
    def starting_after(cls, formulas: Iterable[Formula]) -> "SkolemNamer":
        """A namer whose names cannot clash with sk-constants already present
        in the inputs (e.g. re-parsed 'person sk1' pseudo-entities)."""
        top = 0
        for f in formulas:
            for c in _formula_consts(f):
                m = _SK_RE.match(c.name)
                if m:
                    top = max(top, int(m.group(1)))
        return cls(start=top + 1)


def _formula_consts(f: Formula) -> Iterable[Const]:
    if isinstance(f, Atom):
        for a in f.args:
            yield from term_consts(a)
    elif isinstance(f, Not):
        yield from _formula_consts(f.f)
    elif isinstance(f, (And, Or, Implies)):
        yield from _formula_consts(f.a)
        yield from _formula_consts(f.b)
    else:
        yield from _formula_consts(f.body)


def free_vars(f: Formula, bound: frozenset = frozenset()) -> set[Var]:
    if isinstance(f, Atom):
        out = set()
        for a in f.args:
            if isinstance(a, Var) and a not in bound:
                out.add(a)
            elif isinstance(a, Func):
                out |= {v for v in _func_vars(a) if v not in bound}
        return out
    if isinstance(f, Not):
        return free_vars(f.f, bound)
    if isinstance(f, (And, Or, Implies)):
        return free_vars(f.a, bound) | free_vars(f.b, bound)
    return free_vars(f.body, bound | {f.var})


def _func_vars(t: Func):
    for a in t.args:
        if isinstance(a, Var):
            yield a
        elif isinstance(a, Func):
            yield from _func_vars(a)


def nnf(f: Formula) -> Formula:
    """Negation normal form: no Implies, negation only on atoms."""
    if isinstance(f, Atom):
        return f
    if isinstance(f, Implies):
        return nnf(Or(Not(f.a), f.b))
    if isinstance(f, And):
        return And(nnf(f.a), nnf(f.b))
    if isinstance(f, Or):
        return Or(nnf(f.a), nnf(f.b))
    if isinstance(f, ForAll):
        return ForAll(f.var, nnf(f.body))
    if isinstance(f, Exists):
        return Exists(f.var, nnf(f.body))
    g = f.f
    if isinstance(g, Atom):
        return f
    if isinstance(g, Not):
        return nnf(g.f)
    if isinstance(g, Implies):
        return nnf(Not(Or(Not(g.a), g.b)))
    if isinstance(g, And):
        return Or(nnf(Not(g.a)), nnf(Not(g.b)))
    if isinstance(g, Or):
        return And(nnf(Not(g.a)), nnf(Not(g.b)))
    if isinstance(g, ForAll):
        return Exists(g.var, nnf(Not(g.body)))
    return ForAll(g.var, nnf(Not(g.body)))


def negate(f: Formula) -> Formula:
    """Negation pushed to the atoms, quantifiers dualized."""
    if free_vars(f):
        raise ValueError("cannot negate a formula with free variables")
    return nnf(Not(f))


def _standardize(f: Formula, env: dict, counter: list[int]) -> Formula:
    """Rename every bound variable to a fresh one (q1, q2, ...)."""
    if isinstance(f, Atom):
        return Atom(f.pred, tuple(_std_term(a, env) for a in f.args))
    if isinstance(f, Not):
        return Not(_standardize(f.f, env, counter))
    if isinstance(f, And):
        return And(_standardize(f.a, env, counter), _standardize(f.b, env, counter))
    if isinstance(f, Or):
        return Or(_standardize(f.a, env, counter), _standardize(f.b, env, counter))
    counter[0] += 1
    fresh = Var(f"q{counter[0]}")
    inner = dict(env)
    inner[f.var] = fresh
    body = _standardize(f.body, inner, counter)
    return ForAll(fresh, body) if isinstance(f, ForAll) else Exists(fresh, body)


def _std_term(t: Term, env: dict) -> Term:
    if isinstance(t, Var):
        return env.get(t, t)
    if isinstance(t, Func):
        return Func(t.name, tuple(_std_term(a, env) for a in t.args))
    return t


def _prenex(f: Formula) -> tuple[list[tuple[str, Var]], Formula]:
    """Pull quantifiers to the front, left to right, outside in. Assumes NNF
    with bound variables already renamed apart."""
    if isinstance(f, Atom) or isinstance(f, Not):
        return [], f
    if isinstance(f, (And, Or)):
        pa, ma = _prenex(f.a)
        pb, mb = _prenex(f.b)
        matrix = And(ma, mb) if isinstance(f, And) else Or(ma, mb)
        return pa + pb, matrix
    kind = "forall" if isinstance(f, ForAll) else "exists"
    prefix, matrix = _prenex(f.body)
    return [(kind, f.var)] + prefix, matrix


def _skolemize(prefix, matrix: Formula, namer: SkolemNamer) -> Formula:
    env: dict[Var, Term] = {}
    universals: list[Var] = []
    for kind, var in prefix:
        if kind == "forall":
            universals.append(var)
        else:
            env[var] = namer.fresh(tuple(universals))
    if not env:
        return matrix
    return _apply_env(matrix, env)


def _apply_env(f: Formula, env: dict) -> Formula:
    if isinstance(f, Atom):
        return Atom(f.pred, tuple(_std_term(a, env) for a in f.args))
    if isinstance(f, Not):
        return Not(_apply_env(f.f, env))
    if isinstance(f, And):
        return And(_apply_env(f.a, env), _apply_env(f.b, env))
    if isinstance(f, Or):
        return Or(_apply_env(f.a, env), _apply_env(f.b, env))
    raise AssertionError("quantifier survived prenexing")


def _distribute(f: Formula, max_clauses: int) -> list[list[Literal]]:
    if isinstance(f, Atom):
        return [[Literal(True, f.pred, f.args)]]
    if isinstance(f, Not):
        assert isinstance(f.f, Atom)
        return [[Literal(False, f.f.pred, f.f.args)]]
    if isinstance(f, And):
        out = _distribute(f.a, max_clauses) + _distribute(f.b, max_clauses)
        if len(out) > max_clauses:
            raise CnfBlowupError("cnf_blowup")
        return out
    assert isinstance(f, Or)
    left = _distribute(f.a, max_clauses)
    right = _distribute(f.b, max_clauses)
    if len(left) * len(right) > max_clauses:
        raise CnfBlowupError("cnf_blowup")
    return [li + rj for li in left for rj in right]


def to_clauses(
    f: Formula,
    namer: Optional[SkolemNamer] = None,
    max_clauses: int = MAX_CLAUSES_PER_FORMULA,
) -> list[Clause]:
    """Skolem-normal-form clause set of a closed formula.

    Clauses come back canonicalized, deduplicated and with tautologies
    dropped; the set is equisatisfiable with f. Raises CnfBlowupError when
    the clause count would exceed max_clauses.
    """
    if free_vars(f):
        raise ValueError("formula has free variables")
    if namer is None:
        namer = SkolemNamer.starting_after([f])
    g = _standardize(nnf(f), {}, [0])
    prefix, matrix = _prenex(g)
    matrix = _skolemize(prefix, matrix, namer)
    out: list[Clause] = []
    seen = set()
    for lits in _distribute(matrix, max_clauses):
        c = canonicalize(Clause(tuple(lits)))
        if is_tautology(c) or c.literals in seen:
            continue
        seen.add(c.literals)
        out.append(c)
    return out


def build_theory_sets(
    nlt: Iterable[Formula],
    hypothesis: Formula,
    realize_fn: Optional[Callable[[Clause], str]] = None,
    max_clauses: int = MAX_CLAUSES_PER_FORMULA,
):
    """The two refutation targets for a judging task.

    T1 holds the theory plus the hypothesis, T2 the theory plus its negation.
    Theory clauses are normalized once with a shared Skolem namer and reused
    by both sets, so sk-names line up across the two proofs. The goal-side
    clauses carry origin NEGATED_HYPOTHESIS in both sets; they are the
    support set for the goal-directed search.
    """
    from .engine import TheorySet

    nlt = list(nlt)
    namer = SkolemNamer.starting_after([*nlt, hypothesis])
    theory_clauses: list[Clause] = []
    for f in nlt:
        theory_clauses.extend(to_clauses(f, namer, max_clauses))
    h_clauses = to_clauses(hypothesis, namer, max_clauses)
    neg_clauses = to_clauses(negate(hypothesis), namer, max_clauses)

    t1 = TheorySet(realize_fn=realize_fn)
    t2 = TheorySet(realize_fn=realize_fn)
    for c in theory_clauses:
        t1.add(c, origin=Origin.INPUT)
        t2.add(c, origin=Origin.INPUT)
    for c in h_clauses:
        t1.add(c, origin=Origin.NEGATED_HYPOTHESIS)
    for c in neg_clauses:
        t2.add(c, origin=Origin.NEGATED_HYPOTHESIS)
    return t1, t2
