"""Scoring protocol: per-step proof validity, entailment accuracy and full
accuracy, plus a reference implementation of the validity contrastive loss.

A predicted step is valid iff its conclusion is a binary resolvent of its
two premises (possibly followed by factoring); the check is symbolic, never
string matching, so a proof that takes a different valid route than the
gold proof still scores as correct.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .engine import factor_closure, resolve
from .judge import TRUE, UNKNOWN
from .language import DEFAULT_LEXICON, Lexicon, to_sentence
from .logic import ClauseFormatError, canonical_key, parse_clause
from .normalize import build_theory_sets


def check_step(premises: tuple[str, str], conclusion: str) -> bool:
    """Can the conclusion be derived from the two premises in one resolution
    step (with optional factoring of the resolvent)? Malformed clause text
    counts as an invalid step."""
    try:
        p1 = parse_clause(premises[0])
        p2 = parse_clause(premises[1])
        concl = parse_clause(conclusion)
    except ClauseFormatError:
        return False
    target = canonical_key(concl)
    for res in resolve(p1, p2):
        if canonical_key(res) == target:
            return True
        for fc in factor_closure(res):
            if canonical_key(fc) == target:
                return True
    return False


@dataclass
class PredictionRecord:
    """One scored instance: the original theory and hypothesis, the gold
    label, and the model's predicted label and proof (a list of
    ((premise_fol, premise_fol), conclusion_fol) triples)."""

    instance_id: str
    theory: list[str]
    hypothesis: str
    gold_label: str
    predicted_label: str
    predicted_proof: list[tuple[tuple[str, str], str]] = field(default_factory=list)
    lexicon: Optional[Lexicon] = None


def check_proof(rec: PredictionRecord, lexicon: Lexicon = DEFAULT_LEXICON) -> bool:
    """Proof validity for one record.

    An Unknown prediction carries no proof and counts as right exactly when
    the gold label is Unknown. Otherwise every step must be a valid
    resolution step, every premise must come from the predicted side's
    input clauses or an earlier conclusion, and the proof must end in the
    empty clause.
    """
    if rec.predicted_label == UNKNOWN:
        return rec.gold_label == UNKNOWN
    lex = rec.lexicon or lexicon
    try:
        theory_formulas = [to_sentence(t, lex).formula for t in rec.theory]
        h = to_sentence(rec.hypothesis, lex).formula
        t1, t2 = build_theory_sets(theory_formulas, h)
    except Exception:
        return False
    target = t2 if rec.predicted_label == TRUE else t1
    available = {c.literals for c in target.clauses}
    if not rec.predicted_proof:
        return False
    last = None
    for (p1, p2), concl in rec.predicted_proof:
        if not check_step((p1, p2), concl):
            return False
        try:
            keys = [canonical_key(parse_clause(p)) for p in (p1, p2)]
            concl_key = canonical_key(parse_clause(concl))
        except ClauseFormatError:
            return False
        if any(k not in available for k in keys):
            return False
        available.add(concl_key)
        last = concl_key
    return last == ()


@dataclass(frozen=True)
class Scores:
    entailment_accuracy: float
    full_accuracy: float
    n: int


def score(records: Sequence[PredictionRecord], lexicon: Lexicon = DEFAULT_LEXICON) -> Scores:
    """EA is the fraction of records with the right label; FA additionally
    requires a valid proof."""
    if not records:
        raise ValueError("cannot score an empty record list")
    ea_hits = 0
    fa_hits = 0
    for rec in records:
        if rec.predicted_label != rec.gold_label:
            continue
        ea_hits += 1
        if check_proof(rec, lexicon):
            fa_hits += 1
    n = len(records)
    return Scores(entailment_accuracy=ea_hits / n, full_accuracy=fa_hits / n, n=n)


class DegenerateContrastError(ValueError):
    """No positives or no negatives: the contrastive loss is undefined."""


def vce_loss(
    similarities: Sequence[float],
    positive_idx: Sequence[int],
    negative_idx: Sequence[int],
    clamp: str = "max",
) -> float:
    """Validity contrastive loss over one selection round.

        L = -(1/k) * sum_{j in P} log( exp(max(sim_j, 0.8))
                                       / sum_{i in R} exp(sim_i) )

    `clamp` selects how the 0.8 constant is applied to positive
    similarities: "max" (as the formula is printed) or "min" (capping the
    similarity at 0.8) for sensitivity checks.
    """
    if clamp not in ("max", "min"):
        raise ValueError(f"clamp must be 'max' or 'min', got {clamp!r}")
    pos = list(positive_idx)
    neg = list(negative_idx)
    if not pos or not neg:
        raise DegenerateContrastError("degenerate_contrast")
    if set(pos) & set(neg):
        raise ValueError("positive and negative index sets overlap")
    clamp_fn = max if clamp == "max" else min
    denom = sum(math.exp(similarities[i]) for i in neg)
    total = 0.0
    for j in pos:
        total += math.log(math.exp(clamp_fn(similarities[j], 0.8)) / denom)
    return -total / len(pos)
