"""Schedule generation, enumeration via blocking clauses, and an
independent validity checker.

Enumeration invariant: every returned schedule is maximal among the models
still admitted by the accumulated blocking clauses. Together with blocking
clauses that negate only the previous schedule's positive course-semester
literals, this enumerates every distinct valid schedule exactly once.
Blocking clauses are unlabeled and live behind a dedicated gate variable so
the explainer can ignore them entirely.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

from .catalog import Catalog
from .encoder import LabeledKB
from .propcore import Literal, Model, Unsat, lit


@dataclass(frozen=True)
class Schedule:
    """Assignment of selected courses to semesters, zero-based indices."""

    placements: dict[int, tuple[str, ...]]
    selected: frozenset[str]
    credits_per_semester: dict[int, int]

    def semester_of(self, code: str) -> Optional[int]:
        for s, codes in self.placements.items():
            if code in codes:
                return s
        return None

    def placement_pairs(self) -> frozenset[tuple[str, int]]:
        return frozenset((c, s) for s, codes in self.placements.items() for c in codes)

    def to_document(self, catalog: Catalog) -> dict:
        semesters = []
        for s in range(catalog.requirements.num_semesters):
            entries = [
                {"code": c, "title": catalog.courses[c].title,
                 "credits": catalog.courses[c].credits}
                for c in self.placements.get(s, ())
            ]
            semesters.append(entries)
        return {"semesters": semesters}


@dataclass(frozen=True)
class Infeasible:
    pass


@dataclass(frozen=True)
class Exhausted:
    pass


def decode_schedule(model: Model, kb: LabeledKB) -> Schedule:
    catalog = kb.catalog
    placements: dict[int, list[str]] = {}
    for (code, s), var in kb.varmap.course_sem.items():
        if model[var]:
            placements.setdefault(s, []).append(code)
    placements_t = {s: tuple(sorted(cs)) for s, cs in sorted(placements.items())}
    selected = frozenset(c for cs in placements_t.values() for c in cs)
    credits = {s: sum(catalog.courses[c].credits for c in cs)
               for s, cs in placements_t.items()}
    return Schedule(placements=placements_t, selected=selected,
                    credits_per_semester=credits)


def _scheduling_assumptions(kb: LabeledKB) -> list[Literal]:
    assumptions = kb.selector_literals()
    if kb.enum_gate is not None:
        assumptions.append(lit(kb.enum_gate))
    return assumptions


def _grow_maximal(kb: LabeledKB, model: Model) -> Schedule:
    """Extend a model's placements until no valid strict superset remains."""
    current = decode_schedule(model, kb)
    base = _scheduling_assumptions(kb)
    while True:
        placed = current.placement_pairs()
        absent = [v for (pair, v) in
                  ((key, kb.varmap.course_sem[key]) for key in sorted(kb.varmap.course_sem))
                  if pair not in placed]
        if not absent:
            return current
        gate = kb.formula.new_var()
        kb.formula.add_clause([lit(gate, False)] + [lit(v) for v in absent])
        assumptions = base + [lit(kb.course_var(c, s)) for c, s in sorted(placed)]
        assumptions.append(lit(gate))
        res = kb.formula.solve(assumptions)
        kb.formula.add_clause([lit(gate, False)])  # retire the probe clause
        if isinstance(res, Unsat):
            return current
        current = decode_schedule(res.model, kb)


def generate_schedule(kb: LabeledKB) -> Union[Schedule, Infeasible]:
    """Solve the KB and decode a (maximal) schedule, or report infeasibility."""
    res = kb.formula.solve(_scheduling_assumptions(kb))
    if isinstance(res, Unsat):
        return Infeasible()
    return _grow_maximal(kb, res.model)


def blocking_literals(kb: LabeledKB, previous: Schedule) -> list[Literal]:
    """Negations of the previous schedule's positive course-semester literals."""
    return [lit(kb.course_var(c, s), False) for c, s in sorted(previous.placement_pairs())]


def next_schedule(kb: LabeledKB, previous: Schedule) -> Union[Schedule, Exhausted]:
    """Block ``previous`` and look for a different schedule."""
    if kb.enum_gate is None:
        kb.enum_gate = kb.formula.new_var()
    block = blocking_literals(kb, previous)
    kb.formula.add_clause([lit(kb.enum_gate, False)] + block)
    res = kb.formula.solve(_scheduling_assumptions(kb))
    if isinstance(res, Unsat):
        return Exhausted()
    return _grow_maximal(kb, res.model)


def check_schedule(schedule: Schedule, catalog: Catalog) -> list[str]:
    """Validate a schedule directly against the catalog, no solver involved.

    Returns every violation found: unknown courses, duplicate placement,
    selection mismatches, prerequisite order, active-semester credit ranges,
    required courses, category minimums, and the total minimum.
    """
    reqs = catalog.requirements
    violations: list[str] = []
    seen: dict[str, int] = {}
    for s, codes in sorted(schedule.placements.items()):
        if not 0 <= s < reqs.num_semesters:
            violations.append(f"semester {s} out of range")
        for c in codes:
            if c not in catalog.courses:
                violations.append(f"unknown course {c}")
                continue
            if c in seen:
                violations.append(f"{c} placed in semester {seen[c]} and {s}")
            seen[c] = s
    placed = set(seen)
    if placed != set(schedule.selected):
        extra = sorted(set(schedule.selected) - placed)
        missing = sorted(placed - set(schedule.selected))
        if extra:
            violations.append(f"selected but never placed: {', '.join(extra)}")
        if missing:
            violations.append(f"placed but not selected: {', '.join(missing)}")
    for c, s in sorted(seen.items()):
        if c not in catalog.courses:
            continue
        for p in catalog.courses[c].prerequisites:
            t = seen.get(p)
            if t is None or t >= s:
                violations.append(f"{p} not before {c}")
    credit_of = lambda c: catalog.courses[c].credits if c in catalog.courses else 0
    for s in range(reqs.num_semesters):
        codes = schedule.placements.get(s, ())
        total = sum(credit_of(c) for c in codes)
        declared = schedule.credits_per_semester.get(s, 0)
        if codes and declared != total:
            violations.append(f"semester {s}: declared {declared} credits, actual {total}")
        if total > reqs.semester_credit_max:
            violations.append(
                f"semester {s}: {total} credits exceeds maximum {reqs.semester_credit_max}")
        if codes and total < reqs.semester_credit_min:
            violations.append(
                f"semester {s}: {total} credits below minimum {reqs.semester_credit_min}")
    total_credits = sum(credit_of(c) for c in placed)
    if total_credits < reqs.total_credit_min:
        violations.append(
            f"total credits {total_credits} below minimum {reqs.total_credit_min}")
    for cat, minimum in sorted(reqs.category_credit_min.items()):
        got = sum(credit_of(c) for c in placed
                  if c in catalog.courses and catalog.courses[c].category == cat)
        if got < minimum:
            violations.append(f"category {cat}: {got} credits below minimum {minimum}")
    for c in sorted(reqs.required_courses):
        if c not in placed:
            violations.append(f"required course {c} missing")
    return violations
