"""Explanation generation: alternatives, minimal conflicts, MUS exactness."""

import random

from whysched.catalog import build_catalog
from whysched.encoder import LabeledKB, encode
from whysched.explainer import (AlternativeSchedule, Foil, FoilItem,
                                MinimalExplanation, explain, extract_mus)
from whysched.propcore import Formula, Sat, Unsat, lit
from whysched.scheduler import check_schedule, generate_schedule

from util import (clause_masks, literal_mask, loose_requirements, make_course)


def foil_single(kb, code, semester, positive=True):
    if semester == "any":
        literal = lit(kb.sel_var(code), positive)
    else:
        literal = lit(kb.course_var(code, semester), positive)
    return Foil(items=(FoilItem(code, semester, positive),), literals=(literal,))


def assert_explanation_invariants(kb, foil, result):
    """Entailment and minimality via direct solver calls."""
    eps = result.explanation.clauses
    selectors = [lit(kc.selector) for kc in eps]
    res = kb.formula.solve(selectors + list(foil.literals))
    assert isinstance(res, Unsat), "explanation does not refute the foil"
    for drop in eps:
        rest = [lit(kc.selector) for kc in eps if kc is not drop]
        res = kb.formula.solve(rest + list(foil.literals))
        assert isinstance(res, Sat), f"clause {drop.constraint_id} is redundant"
    foil_vars = {l.var for l in foil.literals}
    for kc in eps:
        assert kc.selector in kb.selector_map  # selectable KB clause, not blocking


class TestExplainSampleCatalog:
    def test_prerequisite_conflict_names_unit_clause(self, sample_kb):
        foil = foil_single(sample_kb, "WJW R89", 0)
        result = explain(sample_kb, foil)
        assert isinstance(result, MinimalExplanation)
        assert "prereq/WJW R89/XOX R89/0" in result.explanation.constraint_ids
        assert_explanation_invariants(sample_kb, foil, result)

    def test_required_course_single_clause(self, sample_kb):
        foil = foil_single(sample_kb, "VPC Z88", "any", positive=False)
        result = explain(sample_kb, foil)
        assert isinstance(result, MinimalExplanation)
        assert result.explanation.constraint_ids == ("required/VPC Z88",)
        assert len(result.explanation.clauses) == 1
        assert_explanation_invariants(sample_kb, foil, result)

    def test_feasible_swap_yields_alternative(self):
        courses = [make_course("AAA A01", category="CSElective"),
                   make_course("BBB B02", category="CSElective")]
        reqs = loose_requirements(num_semesters=1, total_credit_min=3,
                                  semester_credit_max=3)
        kb = encode(build_catalog(courses, reqs))
        schedule = generate_schedule(kb)
        (placed,) = schedule.selected
        other = "BBB B02" if placed == "AAA A01" else "AAA A01"
        foil = Foil(items=(FoilItem(other, 0, True), FoilItem(placed, 0, False)),
                    literals=(lit(kb.course_var(other, 0)),
                              lit(kb.course_var(placed, 0), False)))
        result = explain(kb, foil)
        assert isinstance(result, AlternativeSchedule)
        alt = result.schedule
        assert check_schedule(alt, kb.catalog) == []
        assert other in alt.placements[0]
        assert placed not in alt.selected

    def test_alternative_satisfies_every_foil_literal(self, sample_kb, sample_schedule):
        spare = sorted(set(sample_kb.catalog.courses) - sample_schedule.selected)[0]
        foil = foil_single(sample_kb, spare, "any")
        result = explain(sample_kb, foil)
        assert isinstance(result, AlternativeSchedule)
        assert spare in result.schedule.selected
        assert check_schedule(result.schedule, sample_kb.catalog) == []


def synthetic_kb(clause_literals, formula=None, num_vars=0):
    f = formula or Formula()
    for _ in range(num_vars - f.num_vars):
        f.new_var()
    kb = LabeledKB(f)
    for i, literals in enumerate(clause_literals):
        kb.add(literals, f"c/{i:02d}", f"clause {i}", "Test")
    return kb


class TestExtractMus:
    def test_irrelevant_clause_dropped(self):
        f = Formula()
        a, b = f.new_var(), f.new_var()
        kb = synthetic_kb([[lit(a)], [lit(a, False)], [lit(b)]], formula=f)
        mus = extract_mus(kb, [], list(kb.clauses))
        assert [kc.constraint_id for kc in mus] == ["c/00", "c/01"]

    def test_fixed_point_costs_core_many_solves(self):
        f = Formula()
        a = f.new_var()
        kb = synthetic_kb([[lit(a)], [lit(a, False)]], formula=f)
        before = f.stats["solves"]
        mus = extract_mus(kb, [], list(kb.clauses))
        assert len(mus) == 2
        assert f.stats["solves"] - before == 2

    def test_random_kbs_subset_minimal(self):
        rng = random.Random(271828)
        done = 0
        while done < 120:
            num_vars = rng.randint(2, 6)
            n_clauses = rng.randint(2, 12)
            clause_literals = []
            for _ in range(n_clauses):
                width = rng.randint(1, min(3, num_vars))
                vs = rng.sample(range(1, num_vars + 1), width)
                clause_literals.append(tuple(lit(v, rng.random() < 0.5) for v in vs))
            n_foil = rng.randint(0, 2)
            foil = tuple(lit(v, rng.random() < 0.5)
                         for v in rng.sample(range(1, num_vars + 1), n_foil))
            fmask = literal_mask(num_vars, foil)
            masks = clause_masks(num_vars, clause_literals)
            full = fmask
            for m in masks:
                full &= m
            if full != 0:
                continue  # satisfiable with foil; nothing to explain
            done += 1
            kb = synthetic_kb(clause_literals, num_vars=num_vars)
            res = kb.formula.solve(kb.selector_literals() + list(foil))
            assert isinstance(res, Unsat)
            seed = [kb.selector_map[l.var] for l in res.core
                    if l.positive and l.var in kb.selector_map]
            mus = extract_mus(kb, foil, seed)
            mus_masks = [masks[kb.clauses.index(kc)] for kc in mus]
            # Oracle: the MUS with the foil is unsatisfiable...
            acc = fmask
            for m in mus_masks:
                acc &= m
            assert acc == 0
            # ...and every proper subset is satisfiable (exhaustive check).
            for subset in range((1 << len(mus)) - 1):
                acc = fmask
                for i, m in enumerate(mus_masks):
                    if subset >> i & 1:
                        acc &= m
                assert acc != 0, f"proper subset {subset:b} still unsat"
