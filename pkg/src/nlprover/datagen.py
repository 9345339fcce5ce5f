"""Synthetic labeled theories with gold refutation proofs, the training
record extractor, and the model-enumeration oracle used to check every
label independently of the resolution engine.

The oracle grounds each clause set over its Herbrand domain (the constants
that occur, plus one witness constant when none do) and decides
satisfiability by exhaustive assignment search with unit propagation. That
is a completely separate decision path from resolution, which is exactly
why it can arbitrate.
"""

from __future__ import annotations

import json
import random
import re
from dataclasses import dataclass
from itertools import product
from pathlib import Path
from typing import Iterable, Iterator, Optional

from .engine import DEFAULT_BUDGET, TheorySet
from .judge import (
    FALSE,
    SATISFIABLE,
    TRUE,
    UNKNOWN,
    UNSATISFIABLE,
    check_sat,
    judge,
    nl_renderer,
)
from .language import Lexicon, to_sentence
from .logic import Clause, Const, Func, clause_consts, clause_to_str, clause_vars, subst_clause
from .normalize import (
    Formula,
    SkolemNamer,
    _formula_consts,
    build_theory_sets,
    negate,
    to_clauses,
)

ORACLE_MAX_ATOMS = 24
MAX_EXISTENTIAL_FACTS = 2
_STALL_LIMIT = 2000

NAME_POOL = ("Bob", "Alan", "Erin", "Gary", "Dave", "Fiona")
ATTR_POOL = (
    "kind", "round", "rough", "tall", "happy", "big", "blue", "green",
    "quiet", "smart", "brave", "calm",
)

_SK_RE = re.compile(r"sk(\d+)\Z")


class OracleOverflowError(Exception):
    """Ground atom space too large to enumerate."""


class InconsistentTheoryError(Exception):
    """The theory entails both the hypothesis and its negation."""


class GenerationError(Exception):
    """Engine verdict disagreed with the oracle during generation."""


class GenerationStalledError(Exception):
    """Acceptance rate fell below the floor; names the failing constraint."""


# ---------------------------------------------------------------------------
# Model-enumeration oracle


def _force(clauses: list[frozenset], lit: int) -> list[frozenset]:
    out = []
    for c in clauses:
        if lit in c:
            continue
        if -lit in c:
            c = c - {-lit}
        out.append(c)
    return out


def _dpll(clauses: list[frozenset]) -> bool:
    while True:
        if any(not c for c in clauses):
            return False
        unit = next((next(iter(c)) for c in clauses if len(c) == 1), None)
        if unit is None:
            break
        clauses = _force(clauses, unit)
    if not clauses:
        return True
    v = min(abs(l) for c in clauses for l in c)
    return _dpll(_force(clauses, v)) or _dpll(_force(clauses, -v))


def _ground(clauses: Iterable[Clause], max_atoms: int) -> list[frozenset]:
    clauses = list(clauses)
    consts: dict[str, Const] = {}
    preds: dict[tuple[str, int], None] = {}
    for c in clauses:
        for lit in c.literals:
            preds.setdefault((lit.pred, len(lit.args)))
            for a in lit.args:
                if isinstance(a, Func):
                    raise OracleOverflowError(
                        "oracle_overflow: function terms are outside oracle reach"
                    )
        for k in clause_consts(c):
            consts.setdefault(k.name, k)
    domain = list(consts.values()) or [Const("c0")]
    n_atoms = sum(len(domain) ** arity for _, arity in preds)
    if n_atoms > max_atoms:
        raise OracleOverflowError(
            f"oracle_overflow: {n_atoms} ground atoms exceeds the cap of {max_atoms}"
        )
    atom_idx: dict = {}

    def index_of(pred: str, args: tuple) -> int:
        key = (pred, args)
        if key not in atom_idx:
            atom_idx[key] = len(atom_idx) + 1
        return atom_idx[key]

    ground: list[frozenset] = []
    seen = set()
    for c in clauses:
        vs = clause_vars(c)
        for assignment in product(domain, repeat=len(vs)):
            g = subst_clause(dict(zip(vs, assignment)), c)
            lits = set()
            tautology = False
            for lit in g.literals:
                idx = index_of(lit.pred, lit.args)
                signed = idx if lit.positive else -idx
                if -signed in lits:
                    tautology = True
                    break
                lits.add(signed)
            if tautology:
                continue
            fs = frozenset(lits)
            if fs not in seen:
                seen.add(fs)
                ground.append(fs)
    return ground


def oracle_sat(clauses: Iterable[Clause], max_atoms: int = ORACLE_MAX_ATOMS) -> bool:
    """Satisfiability by exhaustive search over ground-atom assignments."""
    return _dpll(_ground(clauses, max_atoms))


def oracle_entail(
    theory: Iterable[Clause],
    hypothesis: Formula,
    max_atoms: int = ORACLE_MAX_ATOMS,
) -> str:
    """True when every model of the theory satisfies the hypothesis, False
    when every model satisfies its negation, Unknown otherwise.

    Both checks run as satisfiability questions over the theory plus the
    clause form of the (negated) hypothesis, so universal hypotheses get
    their witness constant for free.
    """
    theory = list(theory)
    top = 0
    for c in theory:
        for k in clause_consts(c):
            m = _SK_RE.match(k.name)
            if m:
                top = max(top, int(m.group(1)))
    for k in _formula_consts(hypothesis):
        m = _SK_RE.match(k.name)
        if m:
            top = max(top, int(m.group(1)))
    namer = SkolemNamer(start=top + 1)
    h_clauses = to_clauses(hypothesis, namer)
    neg_clauses = to_clauses(negate(hypothesis), namer)
    sat_with_neg = oracle_sat(theory + neg_clauses, max_atoms)
    sat_with_h = oracle_sat(theory + h_clauses, max_atoms)
    if sat_with_h and sat_with_neg:
        return UNKNOWN
    if sat_with_h:
        return TRUE
    if sat_with_neg:
        return FALSE
    raise InconsistentTheoryError("theory is unsatisfiable on its own")


# ---------------------------------------------------------------------------
# Configuration and instances


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    n_entities: int = 4
    n_attributes: int = 6
    n_facts: int = 5
    n_rules: int = 5
    max_rule_body: int = 2
    p_negation: float = 0.25
    allow_existential: bool = False
    target_depth_range: tuple[int, int] = (0, 5)
    label_mix: tuple[float, float, float] = (1 / 3, 1 / 3, 1 / 3)

    def validate(self, rule_only: bool = False) -> None:
        for name in ("n_entities", "n_attributes", "n_facts", "n_rules", "max_rule_body"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")
        if self.n_entities > len(NAME_POOL):
            raise ValueError(f"n_entities capped at {len(NAME_POOL)} by the name pool")
        if self.n_attributes > len(ATTR_POOL):
            raise ValueError(f"n_attributes capped at {len(ATTR_POOL)} by the attribute pool")
        if self.max_rule_body >= self.n_attributes:
            raise ValueError("max_rule_body must leave at least one head attribute")
        if not 0.0 <= self.p_negation <= 1.0:
            raise ValueError("p_negation must be in [0, 1]")
        lo, hi = self.target_depth_range
        if lo < 0 or hi < lo:
            raise ValueError("target_depth_range must satisfy 0 <= lo <= hi")
        if len(self.label_mix) != 3 or any(p < 0 for p in self.label_mix):
            raise ValueError("label_mix needs three non-negative proportions")
        if abs(sum(self.label_mix) - 1.0) > 1e-9:
            raise ValueError("label_mix must sum to 1")
        # Rule-only theories ground over a single witness constant; judged
        # theories over every entity plus any existential sk-constants
        # (existential facts, plus one for an existential hypothesis).
        if rule_only:
            worst = 1
        else:
            worst = self.n_entities + (MAX_EXISTENTIAL_FACTS + 1 if self.allow_existential else 0)
        if worst * self.n_attributes > ORACLE_MAX_ATOMS:
            raise ValueError(
                "oracle_overflow: worst-case ground atoms "
                f"{worst * self.n_attributes} exceed {ORACLE_MAX_ATOMS}; "
                "shrink n_entities or n_attributes"
            )


@dataclass(frozen=True)
class GoldStep:
    premises_fol: tuple[str, str]
    premises_nl: tuple[str, str]
    conclusion_fol: str
    conclusion_nl: str


@dataclass
class Instance:
    id: str
    theory: list[str]
    theory_fol: list[str]
    hypothesis: str
    hypothesis_fol: str
    label: str
    depth: int
    gold_proof: list[GoldStep]
    meta: dict

    def lexicon(self) -> Lexicon:
        return Lexicon(
            entities=tuple(self.meta.get("entities", ())),
            attributes=tuple(self.meta.get("attributes", ())),
        )


def instance_to_dict(inst: Instance) -> dict:
    return {
        "id": inst.id,
        "theory": inst.theory,
        "theory_fol": inst.theory_fol,
        "hypothesis": inst.hypothesis,
        "hypothesis_fol": inst.hypothesis_fol,
        "label": inst.label,
        "depth": inst.depth,
        "gold_proof": [
            {
                "premises_fol": list(s.premises_fol),
                "premises_nl": list(s.premises_nl),
                "conclusion_fol": s.conclusion_fol,
                "conclusion_nl": s.conclusion_nl,
            }
            for s in inst.gold_proof
        ],
        "meta": inst.meta,
    }


def instance_from_dict(d: dict) -> Instance:
    return Instance(
        id=d["id"],
        theory=list(d["theory"]),
        theory_fol=list(d["theory_fol"]),
        hypothesis=d["hypothesis"],
        hypothesis_fol=d["hypothesis_fol"],
        label=d["label"],
        depth=d["depth"],
        gold_proof=[
            GoldStep(
                premises_fol=tuple(s["premises_fol"]),
                premises_nl=tuple(s["premises_nl"]),
                conclusion_fol=s["conclusion_fol"],
                conclusion_nl=s["conclusion_nl"],
            )
            for s in d["gold_proof"]
        ],
        meta=dict(d["meta"]),
    )


def write_jsonl(instances: Iterable[Instance], path) -> int:
    n = 0
    with open(path, "w") as fh:
        for inst in instances:
            fh.write(json.dumps(instance_to_dict(inst), ensure_ascii=False) + "\n")
            n += 1
    return n


def read_jsonl(path) -> list[Instance]:
    out = []
    for line in Path(path).read_text().splitlines():
        if line.strip():
            out.append(instance_from_dict(json.loads(line)))
    return out


# ---------------------------------------------------------------------------
# Theory sampling


def _capitalize(s: str) -> str:
    return s[0].upper() + s[1:]


def _render_rule(body: list[str], head: str, neg_head: bool, form: str) -> str:
    head_s = ("not " if neg_head else "") + head
    if form == "people":
        s = ", ".join(body) + f" people are {head_s}."
    elif form == "if":
        s = "if someone is " + " and ".join(body) + f" then they are {head_s}."
    else:
        s = "everyone is " + " or ".join(f"not {b}" for b in body) + f" or {head_s}."
    return _capitalize(s)


def _clause_key_of(text: str, lex: Lexicon):
    f = to_sentence(text, lex).formula
    cls = to_clauses(f, SkolemNamer(start=900))
    return tuple(c.literals for c in cls)


def _sample_theory(
    rng: random.Random, cfg: GenConfig, entities: list[str], attributes: list[str], lex: Lexicon
) -> Optional[list[str]]:
    texts: list[str] = []
    keys = set()
    n_exist = 0
    for _ in range(cfg.n_facts):
        for _attempt in range(30):
            existential = (
                cfg.allow_existential
                and n_exist < MAX_EXISTENTIAL_FACTS
                and rng.random() < 0.3
            )
            adj = rng.choice(attributes)
            neg = rng.random() < cfg.p_negation
            if existential:
                text = f"Someone is {'not ' if neg else ''}{adj}."
                key = ("exist", adj, neg, n_exist)
            else:
                ent = rng.choice(entities)
                text = f"{ent} is {'not ' if neg else ''}{adj}."
                key = _clause_key_of(text, lex)
            if text in texts or key in keys:
                continue
            texts.append(text)
            keys.add(key)
            n_exist += existential
            break
        else:
            return None
    for _ in range(cfg.n_rules):
        for _attempt in range(30):
            body_n = rng.randint(1, cfg.max_rule_body)
            body = rng.sample(attributes, body_n)
            head_pool = [a for a in attributes if a not in body]
            head = rng.choice(head_pool)
            neg = rng.random() < cfg.p_negation
            form = rng.choice(("people", "if", "everyone"))
            text = _render_rule(body, head, neg, form)
            key = _clause_key_of(text, lex)
            if text in texts or key in keys:
                continue
            texts.append(text)
            keys.add(key)
            break
        else:
            return None
    return texts


def _theory_clauses(texts: list[str], lex: Lexicon) -> tuple[list[Clause], list[str], SkolemNamer]:
    """One clause per template sentence, Skolem-named exactly as the judge
    will name them when it re-reads the same sentences."""
    formulas = [to_sentence(t, lex).formula for t in texts]
    namer = SkolemNamer.starting_after(formulas)
    clauses: list[Clause] = []
    for f in formulas:
        cls = to_clauses(f, namer)
        assert len(cls) == 1, "template sentences map to exactly one clause"
        clauses.append(cls[0])
    return clauses, [clause_to_str(c) for c in clauses], namer


def _candidate_hypotheses(
    rng: random.Random,
    entities: list[str],
    attributes: list[str],
    fact_texts: list[str],
    allow_existential: bool = False,
) -> list[str]:
    """Candidate hypotheses, shuffled but with atoms that are not already
    stated as facts first: those force the label through rule chains, which
    keeps refutation depths from collapsing to one step. In existential mode
    "Someone is ..." hypotheses join the pool; proving one of those is what
    pulls sk-constants into gold proofs."""
    cands = [
        (e, a, neg) for e in entities for a in attributes for neg in (False, True)
    ]
    if allow_existential:
        cands += [("Someone", a, neg) for a in attributes for neg in (False, True)]
    rng.shuffle(cands)
    stated = set()
    for t in fact_texts:
        words = t.rstrip(".").split()
        if len(words) >= 3 and words[1] == "is":
            stated.add((words[0], words[-1]))
    fresh = [c for c in cands if (c[0], c[1]) not in stated]
    direct = [c for c in cands if (c[0], c[1]) in stated]
    ordered = direct + fresh if rng.random() < 0.25 else fresh + direct
    return [f"{e} is {'not ' if neg else ''}{a}." for e, a, neg in ordered]


# ---------------------------------------------------------------------------
# Generators


def generate(
    config: GenConfig,
    budget: int = DEFAULT_BUDGET,
    max_candidates: int = 16,
) -> Iterator[Instance]:
    """Endless stream of labeled instances matching the config.

    Theories are rejection-sampled from the grammar, discarded when
    inconsistent, labeled by the oracle and proved by the engine; a label
    quota scheduler keeps every prefix of the stream as close to label_mix
    as arithmetic allows. Deterministic for a fixed config.
    """
    config.validate()
    rng = random.Random(config.seed)
    entities = list(NAME_POOL[: config.n_entities])
    attributes = list(ATTR_POOL[: config.n_attributes])
    lex = Lexicon(entities=tuple(entities), attributes=tuple(attributes))
    lo, hi = config.target_depth_range
    mix = dict(zip((TRUE, FALSE, UNKNOWN), config.label_mix))
    counts = {TRUE: 0, FALSE: 0, UNKNOWN: 0}
    order = (TRUE, FALSE, UNKNOWN)
    emitted = 0
    stalled = 0

    while True:
        need = min(
            (l for l in order if mix[l] > 0),
            key=lambda l: (counts[l] / mix[l], order.index(l)),
        )
        stalled += 1
        if stalled > _STALL_LIMIT:
            raise GenerationStalledError(
                f"generation_stalled: no instance with label {need} and depth in "
                f"[{lo}, {hi}] after {_STALL_LIMIT} attempts"
            )
        texts = _sample_theory(rng, config, entities, attributes, lex)
        if texts is None:
            continue
        try:
            clauses, theory_fol, namer = _theory_clauses(texts, lex)
            if not oracle_sat(clauses):
                continue
        except OracleOverflowError:
            continue
        sentences = [to_sentence(t, lex) for t in texts]
        candidates = _candidate_hypotheses(
            rng, entities, attributes, texts, config.allow_existential
        )
        for h_text in candidates[:max_candidates]:
            h_sentence = to_sentence(h_text, lex)
            try:
                label = oracle_entail(clauses, h_sentence.formula)
            except OracleOverflowError:
                break
            if label != need:
                continue
            verdict = judge(sentences, h_sentence, budget=budget, lexicon=lex)
            if verdict.label != label:
                raise GenerationError(
                    f"engine/oracle disagreement: oracle={label} "
                    f"engine={verdict.label} on theory={texts!r} h={h_text!r}"
                )
            depth = len(verdict.proof)
            if label != UNKNOWN and not (lo <= depth <= hi):
                continue
            # The namer is in its post-theory state, so the hypothesis
            # clause gets the same sk-names the judge would assign.
            h_cls = to_clauses(h_sentence.formula, namer)
            inst = Instance(
                id=f"gen-{config.seed}-{emitted:05d}",
                theory=list(texts),
                theory_fol=theory_fol,
                hypothesis=h_text,
                hypothesis_fol=clause_to_str(h_cls[0]),
                label=label,
                depth=depth,
                gold_proof=[
                    GoldStep(s.premises_fol, s.premises_nl, s.conclusion_fol, s.conclusion_nl)
                    for s in verdict.proof
                ],
                meta={
                    "seed": config.seed,
                    "entities": entities,
                    "attributes": attributes,
                    "existential": config.allow_existential,
                },
            )
            counts[label] += 1
            emitted += 1
            stalled = 0
            yield inst
            break


def generate_nlsat(
    config: GenConfig,
    fraction_unsat: float = 0.5,
    budget: int = DEFAULT_BUDGET,
) -> Iterator[Instance]:
    """Endless stream of rule-only theories labeled Satisfiable or
    Unsatisfiable. Unsatisfiable cases carry a refutation proof; their
    depth comes from a planted contradiction chain whose length is drawn
    from target_depth_range."""
    config.validate(rule_only=True)
    if not 0.0 <= fraction_unsat <= 1.0:
        raise ValueError("fraction_unsat must be in [0, 1]")
    rng = random.Random(config.seed)
    attributes = list(ATTR_POOL[: config.n_attributes])
    lex = Lexicon(entities=(), attributes=tuple(attributes))
    lo, hi = config.target_depth_range
    hi = max(1, min(hi, config.n_attributes))
    lo = max(1, min(lo, hi))
    mix = {UNSATISFIABLE: fraction_unsat, SATISFIABLE: 1.0 - fraction_unsat}
    counts = {UNSATISFIABLE: 0, SATISFIABLE: 0}
    order = (UNSATISFIABLE, SATISFIABLE)
    emitted = 0
    stalled = 0

    while True:
        need = min(
            (l for l in order if mix[l] > 0),
            key=lambda l: (counts[l] / mix[l], order.index(l)),
        )
        stalled += 1
        if stalled > _STALL_LIMIT:
            raise GenerationStalledError(
                f"generation_stalled: no {need} rule-only theory after {_STALL_LIMIT} attempts"
            )
        if need == UNSATISFIABLE:
            depth_target = rng.randint(lo, hi)
            chain = rng.sample(attributes, depth_target)
            texts = [_capitalize(f"everyone is {chain[0]}.")]
            for a, b in zip(chain, chain[1:]):
                texts.append(_render_rule([a], b, False, rng.choice(("people", "if", "everyone"))))
            texts.append(_capitalize(f"everyone is not {chain[-1]}."))
        else:
            texts = []
            for _ in range(config.n_rules):
                body_n = rng.randint(1, config.max_rule_body)
                body = rng.sample(attributes, body_n)
                head = rng.choice([a for a in attributes if a not in body])
                neg = rng.random() < config.p_negation
                texts.append(_render_rule(body, head, neg, rng.choice(("people", "if", "everyone"))))
        # distractor rules for both labels
        for _ in range(rng.randint(0, 2)):
            body = rng.sample(attributes, 1)
            head = rng.choice([a for a in attributes if a not in body])
            texts.append(_render_rule(body, head, rng.random() < 0.5, rng.choice(("people", "if"))))
        texts = list(dict.fromkeys(texts))
        rng.shuffle(texts)
        try:
            clauses, theory_fol, _ = _theory_clauses(texts, lex)
            satisfiable = oracle_sat(clauses)
        except OracleOverflowError:
            continue
        label = SATISFIABLE if satisfiable else UNSATISFIABLE
        if label != need:
            continue
        sentences = [to_sentence(t, lex) for t in texts]
        result = check_sat(sentences, budget=budget, lexicon=lex)
        if satisfiable:
            if result.status != SATISFIABLE:
                raise GenerationError(
                    f"engine refuted an oracle-satisfiable theory: {texts!r}"
                )
            proof = []
        else:
            if result.status != UNSATISFIABLE:
                # In-budget refutation is part of the dataset contract: the
                # instance must ship with a gold proof.
                continue
            proof = result.proof
        inst = Instance(
            id=f"nlsat-{config.seed}-{emitted:05d}",
            theory=list(texts),
            theory_fol=theory_fol,
            hypothesis="",
            hypothesis_fol="",
            label=label,
            depth=len(proof),
            gold_proof=[
                GoldStep(s.premises_fol, s.premises_nl, s.conclusion_fol, s.conclusion_nl)
                for s in proof
            ],
            meta={
                "seed": config.seed,
                "entities": [],
                "attributes": attributes,
                "kind": "nlsat",
            },
        )
        counts[label] += 1
        emitted += 1
        stalled = 0
        yield inst


# ---------------------------------------------------------------------------
# Training record extraction


def extract_training_samples(inst: Instance) -> list[dict]:
    """Four records per proof step: select-the-pair, select-the-partner in
    both directions, and compose-the-conclusion. The context grows as
    earlier conclusions merge into the theory set."""
    if inst.label == UNKNOWN:
        raise ValueError("no training records for an Unknown instance")
    lex = inst.lexicon()
    theory_formulas = [to_sentence(t, lex).formula for t in inst.theory]
    if inst.label in (TRUE, FALSE):
        h = to_sentence(inst.hypothesis, lex).formula
        t1, t2 = build_theory_sets(theory_formulas, h, realize_fn=nl_renderer(lex))
        target = t2 if inst.label == TRUE else t1
    else:  # rule-only unsatisfiable theory
        namer = SkolemNamer.starting_after(theory_formulas)
        target = TheorySet(realize_fn=nl_renderer(lex))
        for f in theory_formulas:
            for c in to_clauses(f, namer):
                target.add(c)
    context = [target.nl_of(c.id) for c in target.clauses]
    records: list[dict] = []
    for step in inst.gold_proof:
        ti, tj = step.premises_nl
        tk = step.conclusion_nl
        snapshot = list(context)
        records.append({"kind": "pre_s", "context": snapshot, "input": [], "target": [ti, tj]})
        records.append({"kind": "post_s", "context": snapshot, "input": [ti], "target": [tj]})
        records.append({"kind": "post_s", "context": snapshot, "input": [tj], "target": [ti]})
        records.append({"kind": "kc", "context": [], "input": [ti, tj], "target": [tk]})
        context.append(tk)
    return records


def write_training_records(records: Iterable[dict], path) -> int:
    n = 0
    with open(path, "w") as fh:
        for rec in records:
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")
            n += 1
    return n
