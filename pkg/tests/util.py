"""Shared helpers: catalog builders, brute-force oracles, schedule factories."""

from __future__ import annotations

import itertools
import random

from whysched.catalog import (CATEGORIES, Catalog, CatalogValidationError, Course,
                              RequirementSet, build_catalog, normalize_code)
from whysched.propcore import Literal
from whysched.scheduler import Schedule, check_schedule


def make_course(code, prereqs=(), category="GenEd", credits=3, title=None):
    return Course(code=normalize_code(code), title=title or code.title(),
                  credits=credits,
                  prerequisites=tuple(normalize_code(p) for p in prereqs),
                  category=category)


def loose_requirements(**kw):
    base = dict(num_semesters=4, total_credit_min=0, category_credit_min={},
                semester_credit_min=0, semester_credit_max=99,
                required_courses=frozenset())
    base.update(kw)
    return RequirementSet(**base)


def make_schedule(placements: dict[int, tuple[str, ...]], catalog: Catalog) -> Schedule:
    placements_t = {s: tuple(sorted(cs)) for s, cs in placements.items() if cs}
    selected = frozenset(c for cs in placements_t.values() for c in cs)
    credits = {s: sum(catalog.courses[c].credits for c in cs)
               for s, cs in placements_t.items()}
    return Schedule(placements=placements_t, selected=selected,
                    credits_per_semester=credits)


def random_catalog(rng: random.Random, max_courses=5, max_semesters=3) -> Catalog:
    """A small random but valid catalog; retries until validation passes."""
    while True:
        n = rng.randint(1, max_courses)
        num_semesters = rng.randint(1, max_semesters)
        codes = [f"CRS A{i:02d}" for i in range(n)]
        courses = []
        for i, code in enumerate(codes):
            prereqs = [codes[j] for j in range(i) if rng.random() < 0.25]
            courses.append(Course(
                code=code, title=f"Course {i}", credits=rng.randint(1, 4),
                prerequisites=tuple(prereqs),
                category=rng.choice(CATEGORIES)))
        sem_max = rng.randint(3, 10)
        sem_min = rng.choice([0, 0, rng.randint(1, sem_max)])
        max_total = num_semesters * sem_max
        total_min = rng.choice([0, 0, rng.randint(1, max(1, min(
            sum(c.credits for c in courses), max_total)))])
        required = frozenset(c.code for c in courses if rng.random() < 0.25)
        cat_min = {}
        if rng.random() < 0.3:
            cat = rng.choice(CATEGORIES)
            pool = sum(c.credits for c in courses if c.category == cat)
            if pool:
                cat_min[cat] = rng.randint(1, pool)
        reqs = RequirementSet(
            num_semesters=num_semesters, total_credit_min=total_min,
            category_credit_min=cat_min, semester_credit_min=sem_min,
            semester_credit_max=sem_max, required_courses=required)
        try:
            return build_catalog(courses, reqs)
        except CatalogValidationError:
            continue


def brute_force_schedules(catalog: Catalog) -> list[Schedule]:
    """Every valid schedule by exhaustive placement enumeration."""
    codes = catalog.sorted_codes()
    num_semesters = catalog.requirements.num_semesters
    out = []
    for combo in itertools.product(range(num_semesters + 1), repeat=len(codes)):
        placements: dict[int, list[str]] = {}
        for code, slot in zip(codes, combo):
            if slot < num_semesters:
                placements.setdefault(slot, []).append(code)
        schedule = make_schedule({s: tuple(cs) for s, cs in placements.items()},
                                 catalog)
        if not check_schedule(schedule, catalog):
            out.append(schedule)
    return out


def schedule_key(schedule: Schedule):
    return schedule.placement_pairs()


def clause_masks(num_vars: int, clauses_literals: list[tuple[Literal, ...]]) -> list[int]:
    """Bitmask per clause over all 2^num_vars assignments (bit a = assignment a)."""
    masks = []
    for literals in clauses_literals:
        mask = 0
        for a in range(1 << num_vars):
            if any(((a >> (l.var - 1)) & 1) == (1 if l.positive else 0)
                   for l in literals):
                mask |= 1 << a
        masks.append(mask)
    return masks


def literal_mask(num_vars: int, literals) -> int:
    mask = 0
    for a in range(1 << num_vars):
        if all(((a >> (l.var - 1)) & 1) == (1 if l.positive else 0)
               for l in literals):
            mask |= 1 << a
    return mask
