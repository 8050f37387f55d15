"""Compile a catalog into a labeled knowledge base.

Every constraint becomes one or more CNF clauses, each guarded by a fresh
selector variable and carrying an English label plus a category tag.
Constraint ids follow a stable scheme used by the explainer and refiner:

    prereq/<course>/<prereq>/<semester>
    placement/<course>
    credits/sem/<semester>
    credits/cat/<category>
    credits/total
    required/<course>

Credit sums use a sequential weighted counter: unary partial-sum variables
with thresholds, scaled down by the gcd of the weights. Auxiliary clauses
(counters, semester-activity definitions) are labeled with their parent
bound's sentence so a conflict core containing only auxiliaries still reads
meaningfully; downstream grouping de-duplicates by constraint id.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .catalog import CATEGORY_DISPLAY, Catalog
from .propcore import Clause, Formula, Literal, lit


@dataclass
class VarMap:
    """Variable registry: course-semester, selection, and counter variables."""

    course_sem: dict[tuple[str, int], int] = field(default_factory=dict)
    selected: dict[str, int] = field(default_factory=dict)
    auxiliaries: dict[tuple[str, str], int] = field(default_factory=dict)


@dataclass
class KBClause:
    """A stored clause handle plus its parent constraint id."""

    clause: Clause
    constraint_id: str
    seq: int

    @property
    def literals(self) -> tuple[Literal, ...]:
        return self.clause.literals

    @property
    def label(self) -> str:
        return self.clause.label or ""

    @property
    def category(self) -> str:
        return self.clause.category or ""

    @property
    def selector(self) -> int:
        assert self.clause.selector is not None
        return self.clause.selector


class LabeledKB:
    """Formula plus labeled clause metadata and the variable map."""

    def __init__(self, formula: Formula, varmap: Optional[VarMap] = None,
                 catalog: Optional[Catalog] = None):
        self.formula = formula
        self.varmap = varmap or VarMap()
        self.catalog = catalog
        self.clauses: list[KBClause] = []
        self.category_index: dict[str, list[KBClause]] = {}
        self.selector_map: dict[int, KBClause] = {}
        self.by_constraint: dict[str, list[KBClause]] = {}
        self.enum_gate: Optional[int] = None
        self._seq: dict[str, int] = {}

    def add(self, literals: Sequence[Literal], constraint_id: str,
            label: str, category: str) -> KBClause:
        selector = self.formula.new_var()
        handle = self.formula.add_clause(literals, label=label, category=category,
                                         selector=selector)
        seq = self._seq.get(constraint_id, 0)
        self._seq[constraint_id] = seq + 1
        kc = KBClause(clause=handle, constraint_id=constraint_id, seq=seq)
        self.clauses.append(kc)
        self.category_index.setdefault(category, []).append(kc)
        self.selector_map[selector] = kc
        self.by_constraint.setdefault(constraint_id, []).append(kc)
        return kc

    def selector_literals(self) -> list[Literal]:
        """Assumptions that switch every labeled constraint on."""
        return [lit(kc.selector) for kc in self.clauses]

    def course_var(self, code: str, semester: int) -> int:
        return self.varmap.course_sem[(code, semester)]

    def sel_var(self, code: str) -> int:
        return self.varmap.selected[code]

    def clone(self) -> "LabeledKB":
        """Fresh KB with identical encoding (blocking state not carried over)."""
        if self.catalog is None:
            raise ValueError("only catalog-backed KBs can be cloned")
        return encode(self.catalog)


def encode(catalog: Catalog) -> LabeledKB:
    """Build the complete knowledge base for a validated catalog."""
    formula = Formula()
    kb = LabeledKB(formula, VarMap(), catalog)
    reqs = catalog.requirements
    codes = catalog.sorted_codes()
    for code in codes:
        for s in range(reqs.num_semesters):
            kb.varmap.course_sem[(code, s)] = formula.new_var(phase_hint=True)
    for code in codes:
        kb.varmap.selected[code] = formula.new_var(phase_hint=True)
    for code in sorted(reqs.required_courses):
        encode_required(kb, code)
    for code in codes:
        for p in sorted(catalog.courses[code].prerequisites):
            encode_prerequisite(kb, code, p)
    for code in codes:
        encode_placement(kb, code)
    encode_credit_bounds(kb)
    return kb


def encode_required(kb: LabeledKB, code: str) -> KBClause:
    """Unit clause forcing a core course into the schedule."""
    return kb.add([lit(kb.sel_var(code))], f"required/{code}",
                  f"{code} is a required core course.", "Requirement")


def encode_prerequisite(kb: LabeledKB, course: str, prereq: str) -> list[KBClause]:
    """For each semester s: course-at-s implies prereq at some t < s."""
    num_semesters = kb.catalog.requirements.num_semesters
    label = f"{prereq} must be completed before {course}."
    out = []
    for s in range(num_semesters):
        literals = [lit(kb.course_var(course, s), False)]
        literals.extend(lit(kb.course_var(prereq, t)) for t in range(s))
        out.append(kb.add(literals, f"prereq/{course}/{prereq}/{s}", label, "Prerequisite"))
    return out


def encode_placement(kb: LabeledKB, code: str) -> list[KBClause]:
    """sel(c) holds iff c sits in exactly one semester."""
    num_semesters = kb.catalog.requirements.num_semesters
    cid = f"placement/{code}"
    label = f"{code} is scheduled in exactly one semester."
    sel = kb.sel_var(code)
    vs = [kb.course_var(code, s) for s in range(num_semesters)]
    out = [kb.add([lit(sel, False)] + [lit(v) for v in vs], cid, label, "Placement")]
    for v in vs:
        out.append(kb.add([lit(v, False), lit(sel)], cid, label, "Placement"))
    for i in range(len(vs)):
        for j in range(i + 1, len(vs)):
            out.append(kb.add([lit(vs[i], False), lit(vs[j], False)], cid, label, "Placement"))
    return out


def _bound_sentence(lo: int, hi: Optional[int], subject: str) -> str:
    if hi is None:
        return f"{subject} must include at least {lo} credits."
    if lo > 0:
        return f"{subject} must carry between {lo} and {hi} credits."
    return f"{subject} must carry at most {hi} credits."


def encode_credit_bounds(kb: LabeledKB) -> list[KBClause]:
    """Per-semester ranges, per-category minimums, and the total minimum."""
    catalog = kb.catalog
    reqs = catalog.requirements
    codes = catalog.sorted_codes()
    out: list[KBClause] = []
    for s in range(reqs.num_semesters):
        cid = f"credits/sem/{s}"
        label = _bound_sentence(reqs.semester_credit_min, reqs.semester_credit_max,
                                f"Semester {s + 1}")
        act = kb.formula.new_var(phase_hint=True)
        kb.varmap.auxiliaries[(cid, "act")] = act
        vs = [kb.course_var(c, s) for c in codes]
        if vs:
            for v in vs:
                out.append(kb.add([lit(v, False), lit(act)], cid, label, "CreditBound"))
            out.append(kb.add([lit(act, False)] + [lit(v) for v in vs],
                              cid, label, "CreditBound"))
        else:
            out.append(kb.add([lit(act, False)], cid, label, "CreditBound"))
        weights = [catalog.courses[c].credits for c in codes]
        out.extend(_weighted_counter(
            kb, cid, label, [lit(v) for v in vs], weights,
            at_most=reqs.semester_credit_max,
            at_least=reqs.semester_credit_min if reqs.semester_credit_min > 0 else None,
            condition=lit(act, False)))
    for cat, minimum in sorted(reqs.category_credit_min.items()):
        if minimum <= 0:
            continue
        cid = f"credits/cat/{cat}"
        display = CATEGORY_DISPLAY.get(cat, cat)
        label = f"The total credits for {display} must sum to {minimum} credits."
        members = [c for c in codes if catalog.courses[c].category == cat]
        weights = [catalog.courses[c].credits for c in members]
        out.extend(_weighted_counter(
            kb, cid, label, [lit(kb.sel_var(c)) for c in members], weights,
            at_most=None, at_least=minimum, condition=None))
    if reqs.total_credit_min > 0:
        cid = "credits/total"
        label = f"The schedule must include at least {reqs.total_credit_min} total credits."
        weights = [catalog.courses[c].credits for c in codes]
        out.extend(_weighted_counter(
            kb, cid, label, [lit(kb.sel_var(c)) for c in codes], weights,
            at_most=None, at_least=reqs.total_credit_min, condition=None))
    return out


def _weighted_counter(kb: LabeledKB, cid: str, label: str,
                      literals: list[Literal], weights: list[int],
                      at_most: Optional[int], at_least: Optional[int],
                      condition: Optional[Literal]) -> list[KBClause]:
    """Sequential weighted counter for sum(w_i * l_i) bounds.

    Partial-sum variable S(i, j) means the weighted sum of the first i
    literals is at least j. Both implication directions are encoded so
    bounds propagate without search near the boundary. ``condition``, when
    given, weakens the at-least side to fire only under that literal (used
    for the semester-activity conditioning).
    """
    out: list[KBClause] = []
    n = len(literals)

    def emit(ls: Iterable[Literal]) -> None:
        out.append(kb.add(list(ls), cid, label, "CreditBound"))

    if at_least is not None and n == 0:
        _emit_falsum(kb, out, cid, label, condition)
        return out
    if n == 0:
        return out
    g = math.gcd(*weights) if weights else 1
    w = [wi // g for wi in weights]
    k = at_most // g if at_most is not None else None
    m = math.ceil(at_least / g) if at_least is not None else None
    prefix = [0]
    for wi in w:
        prefix.append(prefix[-1] + wi)
    cap = max(m or 0, k or 0)
    if cap == 0:
        # at_most == 0: every literal with weight is forbidden outright.
        if k == 0:
            for i in range(n):
                if w[i] > 0:
                    emit([~literals[i]])
        return out

    svar: dict[tuple[int, int], int] = {}

    def s_true(i: int, j: int) -> bool:
        return j <= 0

    def s_false(i: int, j: int) -> bool:
        return j > min(prefix[i], cap)

    def s_lit(i: int, j: int, positive: bool) -> Literal:
        v = svar[(i, j)]
        return lit(v, positive)

    for i in range(1, n + 1):
        for j in range(1, min(prefix[i], cap) + 1):
            v = kb.formula.new_var()
            svar[(i, j)] = v
            kb.varmap.auxiliaries[(cid, f"ge{j}@{i}")] = v
    for i in range(1, n + 1):
        li = literals[i - 1]
        wi = w[i - 1]
        for j in range(1, min(prefix[i], cap) + 1):
            here = s_lit(i, j, True)
            # Carry: S(i-1, j) -> S(i, j)
            if not s_false(i - 1, j) and not s_true(i - 1, j):
                emit([s_lit(i - 1, j, False), here])
            # Add: l_i and S(i-1, j - w_i) -> S(i, j)
            if wi > 0 and not s_false(i - 1, j - wi):
                if s_true(i - 1, j - wi):
                    emit([~li, here])
                else:
                    emit([~li, s_lit(i - 1, j - wi, False), here])
            # Support: S(i, j) -> S(i-1, j) or l_i
            terms = [~here]
            if s_true(i - 1, j):
                continue
            if not s_false(i - 1, j):
                terms.append(s_lit(i - 1, j, True))
            if wi > 0:
                terms.append(li)
            emit(terms)
            # Support: S(i, j) -> S(i-1, j) or S(i-1, j - w_i)
            if wi > 0 and not s_true(i - 1, j - wi):
                terms = [~here]
                if not s_false(i - 1, j):
                    terms.append(s_lit(i - 1, j, True))
                terms.append(s_lit(i - 1, j - wi, True))
                emit(terms)
    if k is not None:
        # Overflow caps: l_{i+1} forbidden once the prefix reaches k - w + 1.
        for i in range(n):
            wi = w[i]
            if wi == 0:
                continue
            t = k - wi + 1
            if s_true(i, t):
                emit([~literals[i]])
            elif not s_false(i, t):
                emit([s_lit(i, t, False), ~literals[i]])
    if m is not None:
        if s_false(n, m):
            _emit_falsum(kb, out, cid, label, condition)
        elif s_true(n, m):
            pass
        elif condition is not None:
            emit([condition, s_lit(n, m, True)])
        else:
            emit([s_lit(n, m, True)])
    return out


def _emit_falsum(kb: LabeledKB, out: list, cid: str, label: str,
                 condition: Optional[Literal]) -> None:
    if condition is not None:
        out.append(kb.add([condition], cid, label, "CreditBound"))
    else:
        f = kb.formula.new_var()
        kb.varmap.auxiliaries[(cid, "falsum")] = f
        out.append(kb.add([lit(f)], cid, label, "CreditBound"))
        out.append(kb.add([lit(f, False)], cid, label, "CreditBound"))
