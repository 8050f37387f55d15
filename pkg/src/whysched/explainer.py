"""Contrastive explanation: answer a foil by exhibiting an alternative
schedule or by extracting a subset-minimal set of conflicting constraints.

The foil is a conjunction of literals over course-semester and selection
variables. If the knowledge base admits a model satisfying it, that model is
the answer. Otherwise the solver's unsat core over clause selectors seeds a
deletion-based minimization: clauses are dropped one at a time (ascending
constraint-id order, so results are deterministic) and kept exactly when the
remainder turns satisfiable. Blocking clauses carry no selectors and can
never appear in an explanation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

from .encoder import KBClause, LabeledKB
from .propcore import Literal, Sat, lit
from .scheduler import Schedule, decode_schedule


class ExplainerInternalError(RuntimeError):
    """A foil reached the explainer that no user path should produce."""


@dataclass(frozen=True)
class FoilItem:
    course: str
    semester: Union[int, str]  # zero-based index or "any"
    positive: bool


@dataclass(frozen=True)
class Foil:
    """Compiled contrastive hypothesis: a conjunction of literals."""

    items: tuple[FoilItem, ...]
    literals: tuple[Literal, ...]


@dataclass(frozen=True)
class Explanation:
    """Subset-minimal clause set inconsistent with the foil."""

    clauses: tuple[KBClause, ...]
    constraint_ids: tuple[str, ...]
    minimal: bool = True

    def labels(self) -> list[str]:
        out, seen = [], set()
        for kc in self.clauses:
            if kc.label not in seen:
                seen.add(kc.label)
                out.append(kc.label)
        return out

    def categories(self) -> list[str]:
        out, seen = [], set()
        for kc in self.clauses:
            if kc.category not in seen:
                seen.add(kc.category)
                out.append(kc.category)
        return out

    def to_document(self) -> dict:
        return {
            "constraint_ids": list(self.constraint_ids),
            "clause_labels": self.labels(),
            "categories": self.categories(),
            "minimal": self.minimal,
        }


@dataclass(frozen=True)
class AlternativeSchedule:
    schedule: Schedule


@dataclass(frozen=True)
class MinimalExplanation:
    explanation: Explanation


ExplainResult = Union[AlternativeSchedule, MinimalExplanation]


def _clause_order(kc: KBClause) -> tuple[str, int]:
    return (kc.constraint_id, kc.seq)


def explain(kb: LabeledKB, foil: Foil) -> ExplainResult:
    """Answer a foil: alternative schedule if feasible, else minimal conflict."""
    for l in foil.literals:
        if not 1 <= l.var <= kb.formula.num_vars or l.var in kb.selector_map:
            raise ExplainerInternalError(f"foil literal over unknown variable {l.var}")
    assumptions = kb.selector_literals() + list(foil.literals)
    res = kb.formula.solve(assumptions)
    if isinstance(res, Sat):
        return AlternativeSchedule(decode_schedule(res.model, kb))
    seed = [kb.selector_map[l.var] for l in res.core
            if l.positive and l.var in kb.selector_map]
    mus = extract_mus(kb, foil.literals, seed)
    if not mus:
        raise ExplainerInternalError("empty conflict: foil contradicts itself")
    cids = tuple(dict.fromkeys(kc.constraint_id for kc in mus))
    return MinimalExplanation(Explanation(clauses=tuple(mus), constraint_ids=cids))


def extract_mus(kb: LabeledKB, foil_literals: Sequence[Literal],
                seed: Sequence[KBClause]) -> list[KBClause]:
    """Deletion-based minimization of an unsatisfiable clause set.

    Precondition: seed clauses plus the foil are jointly unsatisfiable.
    Each candidate is dropped once; a satisfiable remainder proves it
    necessary, an unsatisfiable one removes it for good (shrinking further
    to the fresh core). The result is subset-minimal.
    """
    foil = list(foil_literals)
    current = sorted(seed, key=_clause_order)
    i = 0
    while i < len(current):
        rest = current[:i] + current[i + 1:]
        res = kb.formula.solve([lit(kc.selector) for kc in rest] + foil)
        if isinstance(res, Sat):
            i += 1
        else:
            keep = {l.var for l in res.core if l.positive}
            current = current[:i] + [kc for kc in rest[i:] if kc.selector in keep]
    return current
