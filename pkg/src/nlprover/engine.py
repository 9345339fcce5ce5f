"""Binary resolution with factoring and strategy-guided refutation search.

Two search modes share the same step recording:

* sos_linear (default): the first premise chain starts at a goal clause
  (origin NEGATED_HYPOTHESIS), every later step keeps the previous
  resolvent as one premise, and the other premise comes from the input
  clauses or an ancestor on the current chain. Dead ends backtrack
  depth-first to the most recent untried side clause; the budget bounds
  the length of one derivation chain.
* unrestricted: a fair first-in-first-out loop over all clause pairs; the
  budget bounds the number of accepted resolvents.

Either way steps_used reports reasoning steps: the found refutation's
length under sos_linear, the accepted-resolvent count under unrestricted.
"""

from __future__ import annotations

import sys
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

from .logic import (
    Clause,
    Origin,
    Subst,
    Var,
    canonical_key,
    canonicalize,
    clause_to_str,
    clause_vars,
    is_tautology,
    subst_clause,
    unify,
)

SOS_LINEAR = "sos_linear"
UNRESTRICTED = "unrestricted"
STRATEGIES = (SOS_LINEAR, UNRESTRICTED)

DEFAULT_BUDGET = 100

HALT_EMPTY = "empty_clause"
HALT_SATURATED = "saturated"
HALT_BUDGET = "budget_exhausted"
HALT_NO_PAIR = "no_valid_pair"


@dataclass
class TheorySet:
    """An ordered clause set with duplicate, tautology and support tracking.

    Insertion order is generation order; ids are 1-based and strictly
    increasing. No two stored clauses share a canonical form and no stored
    clause is a tautology. `realize_fn`, when given, supplies the natural
    language rendering kept alongside each clause (falling back to the
    clause's textual form when it cannot be realized).
    """

    realize_fn: Optional[Callable[[Clause], str]] = None
    clauses: list[Clause] = field(default_factory=list)
    nl: dict[int, str] = field(default_factory=dict)
    supported: set[int] = field(default_factory=set)
    _index: dict = field(default_factory=dict)
    _next_id: int = 1

    def add(
        self,
        clause: Clause,
        origin: Optional[Origin] = None,
        supported: bool = False,
    ) -> tuple[Optional[Clause], bool]:
        """Insert a clause, returning (stored clause, was_new).

        Tautologies are rejected with (None, False). A clause whose canonical
        form is already stored returns the existing copy; support marks are
        merged so the set stays closed under descent.
        """
        c = canonicalize(clause)
        if is_tautology(c):
            return None, False
        if origin is not None:
            c = replace(c, origin=origin)
        if origin == Origin.NEGATED_HYPOTHESIS:
            supported = True
        existing = self._index.get(c.literals)
        if existing is not None:
            if supported:
                self.supported.add(existing.id)
            return existing, False
        c = replace(c, id=self._next_id)
        self._next_id += 1
        self._index[c.literals] = c
        self.clauses.append(c)
        if supported:
            self.supported.add(c.id)
        self.nl[c.id] = self._render(c)
        return c, True

    def _render(self, c: Clause) -> str:
        if self.realize_fn is not None:
            try:
                return self.realize_fn(c)
            except Exception:
                return clause_to_str(c)
        return clause_to_str(c)

    def nl_of(self, cid: int) -> str:
        return self.nl[cid]

    def is_supported(self, cid: int) -> bool:
        return cid in self.supported


# ---------------------------------------------------------------------------
# Inference rules


def _rename_apart(c: Clause, prefix: str) -> Clause:
    ren = {v: Var(f"{prefix}{i}") for i, v in enumerate(clause_vars(c), start=1)}
    return subst_clause(ren, c) if ren else c


def _resolve_detailed(c1: Clause, c2: Clause) -> list[tuple[Clause, Subst]]:
    """All binary resolvents of c1 and c2 with the unifier used for each.

    Resolvents are canonicalized; tautologies and canonical duplicates are
    dropped. Order follows literal positions, so the result is deterministic.
    """
    a = _rename_apart(c1, "lv")
    b = _rename_apart(c2, "rv")
    out: list[tuple[Clause, Subst]] = []
    seen = set()
    for i, la in enumerate(a.literals):
        for j, lb in enumerate(b.literals):
            if la.positive == lb.positive:
                continue
            theta = unify(la, lb)
            if theta is None:
                continue
            rest = tuple(l for k, l in enumerate(a.literals) if k != i) + tuple(
                l for k, l in enumerate(b.literals) if k != j
            )
            res = canonicalize(subst_clause(theta, Clause(rest, origin=Origin.RESOLVENT)))
            if is_tautology(res) or res.literals in seen:
                continue
            seen.add(res.literals)
            out.append((res, theta))
    return out


def resolve(c1: Clause, c2: Clause) -> list[Clause]:
    """All binary resolvents over every complementary unifiable literal pair."""
    return [r for r, _ in _resolve_detailed(c1, c2)]


def can_resolve(c1: Clause, c2: Clause) -> bool:
    """Whether some literal of c1 and some literal of c2 have opposite
    polarity, the same predicate and unifiable argument lists."""
    a = _rename_apart(c1, "lv")
    b = _rename_apart(c2, "rv")
    for la in a.literals:
        for lb in b.literals:
            if la.positive != lb.positive and unify(la, lb) is not None:
                return True
    return False


def factor(c: Clause) -> list[Clause]:
    """Clauses obtained by unifying two same-polarity same-predicate literals
    of c and merging them. Tautologies dropped."""
    out: list[Clause] = []
    seen = set()
    lits = c.literals
    for i in range(len(lits)):
        for j in range(i + 1, len(lits)):
            if lits[i].positive != lits[j].positive:
                continue
            theta = unify(lits[i], lits[j])
            if theta is None:
                continue
            fc = canonicalize(subst_clause(theta, c))
            if is_tautology(fc) or fc.literals in seen or fc.literals == canonical_key(c):
                continue
            seen.add(fc.literals)
            out.append(fc)
    return out


def factor_closure(c: Clause) -> list[Clause]:
    """Every clause reachable from c by repeated factoring (c excluded)."""
    out: list[Clause] = []
    seen = {canonical_key(c)}
    queue = deque([c])
    while queue:
        cur = queue.popleft()
        for fc in factor(cur):
            if fc.literals in seen:
                continue
            seen.add(fc.literals)
            out.append(fc)
            queue.append(fc)
    return out


# ---------------------------------------------------------------------------
# Refutation search


@dataclass(frozen=True)
class ProofStep:
    premise_ids: tuple[int, int]
    premises_fol: tuple[str, str]
    premises_nl: tuple[str, str]
    conclusion_id: int
    conclusion_fol: str
    conclusion_nl: str
    mgu: Subst


@dataclass
class RefutationResult:
    refuted: bool
    steps_used: int
    proof: list[ProofStep]
    halt_reason: str


def format_proof(steps: list[ProofStep]) -> list[str]:
    """Line-oriented proof serialization."""
    lines = []
    for k, s in enumerate(steps, start=1):
        lines.append(
            f"STEP {k}: [{s.premise_ids[0]}] {s.premises_fol[0]}"
            f" | [{s.premise_ids[1]}] {s.premises_fol[1]}"
            f" => [{s.conclusion_id}] {s.conclusion_fol}"
            f" ;; NL: {s.premises_nl[0]} + {s.premises_nl[1]} => {s.conclusion_nl}"
        )
    return lines


class _BudgetExhausted(Exception):
    pass


def _make_step(tset: TheorySet, a: Clause, b: Clause, concl: Clause, mgu: Subst) -> ProofStep:
    return ProofStep(
        premise_ids=(a.id, b.id),
        premises_fol=(clause_to_str(a), clause_to_str(b)),
        premises_nl=(tset.nl_of(a.id), tset.nl_of(b.id)),
        conclusion_id=concl.id,
        conclusion_fol=clause_to_str(concl),
        conclusion_nl=tset.nl_of(concl.id),
        mgu=mgu,
    )


def refute(
    tset: TheorySet,
    strategy: str = SOS_LINEAR,
    budget: int = DEFAULT_BUDGET,
) -> RefutationResult:
    """Search for the empty clause, recording one ProofStep per accepted
    resolvent. The returned proof is the derivation of the empty clause
    (empty when no refutation was found); steps_used counts all accepted
    steps including abandoned branches."""
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}")
    if not tset.clauses:
        raise ValueError("empty theory set")
    if strategy == UNRESTRICTED:
        return _refute_unrestricted(tset, budget)
    if budget > 500:
        sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * budget + 1000))
    return _refute_sos_linear(tset, budget)


def _refute_unrestricted(tset: TheorySet, budget: int) -> RefutationResult:
    steps: list[ProofStep] = []
    by_conclusion: dict[int, ProofStep] = {}
    usable: list[Clause] = []
    queue = deque(tset.clauses)

    def accept(a: Clause, b: Clause, res: Clause, mgu: Subst) -> Optional[Clause]:
        # Returns the stored clause when it is new and within budget.
        if len(steps) >= budget:
            raise _BudgetExhausted
        supported = tset.is_supported(a.id) or tset.is_supported(b.id)
        stored, new = tset.add(res, origin=Origin.RESOLVENT, supported=supported)
        if stored is None or not new:
            return None
        step = _make_step(tset, a, b, stored, mgu)
        steps.append(step)
        by_conclusion[stored.id] = step
        return stored

    try:
        while queue:
            given = queue.popleft()
            for other in [*usable, given]:
                for res, mgu in _resolve_detailed(given, other):
                    stored = accept(given, other, res, mgu)
                    if stored is None:
                        continue
                    if stored.is_empty:
                        proof = _extract(by_conclusion, stored.id)
                        return RefutationResult(True, len(steps), proof, HALT_EMPTY)
                    queue.append(stored)
                    for fc in factor_closure(stored):
                        fstored = accept(given, other, fc, mgu)
                        if fstored is not None:
                            queue.append(fstored)
            usable.append(given)
    except _BudgetExhausted:
        return RefutationResult(False, len(steps), [], HALT_BUDGET)
    reason = HALT_NO_PAIR if not steps else HALT_SATURATED
    return RefutationResult(False, len(steps), [], reason)


def _extract(by_conclusion: dict[int, ProofStep], empty_id: int) -> list[ProofStep]:
    """Derivation of the empty clause: walk premise ids back through the
    step log, then order by conclusion id."""
    needed: dict[int, ProofStep] = {}
    stack = [empty_id]
    while stack:
        cid = stack.pop()
        step = by_conclusion.get(cid)
        if step is None or cid in needed:
            continue
        needed[cid] = step
        stack.extend(step.premise_ids)
    return [needed[cid] for cid in sorted(needed)]


# Resource guard for the backtracking search: pathological inputs could make
# the depth-first enumeration of bounded-length chains thrash exponentially,
# so cap the number of descents and report budget exhaustion past it.
_WORK_LIMIT = 50_000

# Cap on the saturation pre-check's clause store.
_SATURATE_CAP = 20_000

_REFUTABLE = "refutable"
_SATURATED_CLEAN = "saturated"
_INCONCLUSIVE = "inconclusive"


def _sos_saturate(tset: TheorySet, cap: int = _SATURATE_CAP) -> str:
    """Decision pre-check: exhaustive set-of-support saturation with global
    duplicate pruning. Every resolution involves a goal descendant, so on a
    consistent theory this decides refutability outright; the chain-shaped
    proof is left to the depth-first search. Local state only, the theory
    set is not touched."""
    seen = {c.literals for c in tset.clauses}
    others = list(tset.clauses)
    queue = deque(c for c in tset.clauses if tset.is_supported(c.id))
    if not queue:
        return _SATURATED_CLEAN
    while queue:
        given = queue.popleft()
        for other in [*others, given]:
            for res, _ in _resolve_detailed(given, other):
                for cand in (res, *factor_closure(res)):
                    if cand.literals in seen:
                        continue
                    if cand.is_empty:
                        return _REFUTABLE
                    seen.add(cand.literals)
                    others.append(cand)
                    queue.append(cand)
                    if len(seen) > cap:
                        return _INCONCLUSIVE
    return _SATURATED_CLEAN


def _refute_sos_linear(tset: TheorySet, budget: int) -> RefutationResult:
    """Iterative-deepening search over linear derivations of length <= budget.

    A set-of-support saturation pass decides refutability first; the
    deepening search then recovers a shortest-length chain, so steps_used is
    the found refutation's length (0 when none was found). Every node scans
    all candidate sides for an immediate empty resolvent before descending.
    """
    decision = _sos_saturate(tset)
    if decision == _SATURATED_CLEAN:
        return RefutationResult(False, 0, [], HALT_NO_PAIR)

    # Roots are the support clauses present at entry (goal clauses, plus any
    # theory clause a goal collapsed into at insertion).
    goals = [c for c in tset.clauses if tset.is_supported(c.id)]
    inputs = list(tset.clauses)
    state = {"work": 0, "truncated": False}
    trail: list[ProofStep] = []

    def candidates(center: Clause, ancestors: list[Clause]):
        sides = sorted(inputs + ancestors, key=lambda c: (len(c.literals), c.id))
        out = []
        for side in sides:
            for res, mgu in _resolve_detailed(center, side):
                out.append((side, res, mgu))
                for fc in factor_closure(res):
                    out.append((side, fc, mgu))
        return out

    def descend(center: Clause, path_keys: set, ancestors: list[Clause], depth_left: int) -> bool:
        cands = candidates(center, ancestors)
        for side, res, mgu in cands:
            if res.is_empty:
                stored, _ = tset.add(res, origin=Origin.RESOLVENT, supported=True)
                trail.append(_make_step(tset, center, side, stored, mgu))
                return True
        for side, res, mgu in cands:
            if res.is_empty or res.literals in path_keys:
                continue
            if depth_left <= 1:
                state["truncated"] = True
                continue
            state["work"] += 1
            if state["work"] > _WORK_LIMIT:
                raise _BudgetExhausted
            stored, _ = tset.add(res, origin=Origin.RESOLVENT, supported=True)
            if stored is None:
                continue
            trail.append(_make_step(tset, center, side, stored, mgu))
            path_keys.add(stored.literals)
            ancestors.append(stored)
            if descend(stored, path_keys, ancestors, depth_left - 1):
                return True
            ancestors.pop()
            path_keys.discard(stored.literals)
            trail.pop()
        return False

    limit = 1
    while limit <= budget:
        state["truncated"] = False
        for goal in goals:
            trail.clear()
            try:
                if descend(goal, {goal.literals}, [], limit):
                    return RefutationResult(True, len(trail), list(trail), HALT_EMPTY)
            except _BudgetExhausted:
                return RefutationResult(False, 0, [], HALT_BUDGET)
        if not state["truncated"]:
            # every chain bottomed out before the depth limit: deepening
            # further cannot help
            return RefutationResult(False, 0, [], HALT_NO_PAIR)
        limit += 1
    return RefutationResult(False, 0, [], HALT_BUDGET)
