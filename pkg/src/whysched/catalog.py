"""Course catalog and degree requirements: loading, validation, fuzzy lookup.

The catalog file is a JSON document with two top-level keys, ``courses`` and
``requirements`` (see README for the schema). Catalogs are immutable after
load and safe to share across sessions.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

CATEGORIES = ("Core", "CSElective", "ScienceElective", "SocialHumanities", "GenEd")

CATEGORY_DISPLAY = {
    "Core": "core courses",
    "CSElective": "CS electives",
    "ScienceElective": "science electives",
    "SocialHumanities": "social sciences and humanities",
    "GenEd": "general education",
}

# Similarity threshold for fuzzy course resolution and result cap.
MATCH_THRESHOLD = 0.6
MAX_MATCHES = 5


class CatalogError(ValueError):
    """Base error for catalog loading and validation."""


class CatalogParseError(CatalogError):
    """Malformed catalog document; message carries location/field info."""


class CatalogValidationError(CatalogError):
    """Semantic violations; ``problems`` lists every one found."""

    def __init__(self, problems: list[str]):
        super().__init__("; ".join(problems))
        self.problems = problems


def normalize_code(text: str) -> str:
    """Canonical course code: upper case, underscores to spaces, single spaces."""
    return re.sub(r"\s+", " ", text.replace("_", " ")).strip().upper()


@dataclass(frozen=True)
class Course:
    code: str
    title: str
    credits: int
    prerequisites: tuple[str, ...] = ()
    category: str = "GenEd"


@dataclass(frozen=True)
class RequirementSet:
    num_semesters: int = 8
    total_credit_min: int = 120
    category_credit_min: dict[str, int] = field(default_factory=dict)
    semester_credit_min: int = 9
    semester_credit_max: int = 15
    required_courses: frozenset[str] = frozenset()


@dataclass(frozen=True)
class Catalog:
    courses: dict[str, Course]
    requirements: RequirementSet

    def course(self, code: str) -> Course:
        return self.courses[normalize_code(code)]

    def sorted_codes(self) -> list[str]:
        return sorted(self.courses)


def _require(obj: dict, key: str, kind, where: str):
    if key not in obj:
        raise CatalogParseError(f"{where}: missing field '{key}'")
    value = obj[key]
    if kind is int and isinstance(value, bool) or not isinstance(value, kind):
        raise CatalogParseError(f"{where}: field '{key}' must be {kind.__name__}")
    return value


def _parse_course(raw: dict, pos: int) -> Course:
    where = f"courses[{pos}]"
    code = normalize_code(_require(raw, "code", str, where))
    title = _require(raw, "title", str, where)
    credits = _require(raw, "credits", int, where)
    category = _require(raw, "category", str, where)
    if category not in CATEGORIES:
        raise CatalogParseError(
            f"{where}: unknown category '{category}' (expected one of {', '.join(CATEGORIES)})")
    prereqs = raw.get("prerequisites", [])
    if not isinstance(prereqs, list) or not all(isinstance(p, str) for p in prereqs):
        raise CatalogParseError(f"{where}: field 'prerequisites' must be a list of strings")
    return Course(code=code, title=title, credits=credits,
                  prerequisites=tuple(normalize_code(p) for p in prereqs),
                  category=category)


def _parse_requirements(raw: dict) -> RequirementSet:
    where = "requirements"
    cat_min = raw.get("category_credit_min", {})
    if not isinstance(cat_min, dict):
        raise CatalogParseError(f"{where}: 'category_credit_min' must be a mapping")
    for k, v in cat_min.items():
        if k not in CATEGORIES or isinstance(v, bool) or not isinstance(v, int):
            raise CatalogParseError(f"{where}: bad category minimum {k!r}: {v!r}")
    required = raw.get("required_courses", [])
    if not isinstance(required, list) or not all(isinstance(c, str) for c in required):
        raise CatalogParseError(f"{where}: 'required_courses' must be a list of strings")
    defaults = RequirementSet()

    def opt_int(key: str, dflt: int) -> int:
        v = raw.get(key, dflt)
        if isinstance(v, bool) or not isinstance(v, int):
            raise CatalogParseError(f"{where}: field '{key}' must be int")
        return v

    return RequirementSet(
        num_semesters=opt_int("num_semesters", defaults.num_semesters),
        total_credit_min=opt_int("total_credit_min", defaults.total_credit_min),
        category_credit_min=dict(cat_min),
        semester_credit_min=opt_int("semester_credit_min", defaults.semester_credit_min),
        semester_credit_max=opt_int("semester_credit_max", defaults.semester_credit_max),
        required_courses=frozenset(normalize_code(c) for c in required),
    )


def validate_catalog(courses: dict[str, Course], reqs: RequirementSet) -> list[str]:
    """Return every violation found; empty list means the catalog is valid."""
    problems = []
    for code, course in courses.items():
        if course.credits < 1:
            problems.append(f"course {code}: credits must be >= 1, got {course.credits}")
        for p in course.prerequisites:
            if p == code:
                problems.append(f"course {code}: lists itself as a prerequisite")
            elif p not in courses:
                problems.append(f"course {code}: unknown prerequisite {p}")
    cycle = _find_cycle(courses)
    if cycle:
        problems.append("prerequisite cycle: " + " -> ".join(cycle))
    if reqs.num_semesters < 1:
        problems.append("requirements: num_semesters must be >= 1")
    if reqs.semester_credit_min > reqs.semester_credit_max:
        problems.append("requirements: semester_credit_min exceeds semester_credit_max")
    if reqs.total_credit_min > reqs.num_semesters * reqs.semester_credit_max:
        problems.append("requirements: total_credit_min unreachable within "
                        f"{reqs.num_semesters} semesters of {reqs.semester_credit_max} credits")
    for code in sorted(reqs.required_courses):
        if code not in courses:
            problems.append(f"requirements: required course {code} not in catalog")
    for cat, minimum in sorted(reqs.category_credit_min.items()):
        if minimum > 0 and not any(c.category == cat for c in courses.values()):
            problems.append(f"requirements: category {cat} has a minimum but no courses")
    return problems


def _find_cycle(courses: dict[str, Course]) -> Optional[list[str]]:
    """Kahn-style topological sort; on failure return one cycle's members."""
    indeg = {c: 0 for c in courses}
    for course in courses.values():
        for p in course.prerequisites:
            if p in indeg and p != course.code:
                indeg[course.code] += 1
    queue = sorted(c for c, d in indeg.items() if d == 0)
    seen = 0
    dependents: dict[str, list[str]] = {c: [] for c in courses}
    for course in courses.values():
        for p in course.prerequisites:
            if p in dependents and p != course.code:
                dependents[p].append(course.code)
    while queue:
        code = queue.pop()
        seen += 1
        for d in sorted(dependents[code], reverse=True):
            indeg[d] -= 1
            if indeg[d] == 0:
                queue.append(d)
    if seen == len(courses):
        return None
    return sorted(c for c, d in indeg.items() if d > 0)


def build_catalog(courses: list[Course], requirements: RequirementSet) -> Catalog:
    """Index and validate an in-memory course list."""
    by_code: dict[str, Course] = {}
    for c in courses:
        if c.code in by_code:
            raise CatalogValidationError([f"duplicate course code {c.code}"])
        by_code[c.code] = c
    problems = validate_catalog(by_code, requirements)
    if problems:
        raise CatalogValidationError(problems)
    return Catalog(courses=by_code, requirements=requirements)


def load_catalog(path: Union[str, Path]) -> Catalog:
    """Load and validate a catalog document from ``path``."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise CatalogParseError(f"line {e.lineno}, column {e.colno}: {e.msg}") from e
    if not isinstance(doc, dict):
        raise CatalogParseError("top level must be an object")
    raw_courses = _require(doc, "courses", list, "document")
    raw_reqs = _require(doc, "requirements", dict, "document")
    courses = [_parse_course(c, i) for i, c in enumerate(raw_courses)]
    reqs = _parse_requirements(raw_reqs)
    return build_catalog(courses, reqs)


def save_catalog(catalog: Catalog, path: Union[str, Path]) -> None:
    """Write the canonical form: courses sorted by code, explicit requirements."""
    doc = {
        "courses": [
            {
                "code": c.code,
                "title": c.title,
                "credits": c.credits,
                "prerequisites": list(c.prerequisites),
                "category": c.category,
            }
            for c in (catalog.courses[k] for k in catalog.sorted_codes())
        ],
        "requirements": {
            "num_semesters": catalog.requirements.num_semesters,
            "total_credit_min": catalog.requirements.total_credit_min,
            "category_credit_min": dict(sorted(catalog.requirements.category_credit_min.items())),
            "semester_credit_min": catalog.requirements.semester_credit_min,
            "semester_credit_max": catalog.requirements.semester_credit_max,
            "required_courses": sorted(catalog.requirements.required_courses),
        },
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def _levenshtein_similarity(a: str, b: str) -> float:
    if a == b:
        return 1.0
    if not a or not b:
        return 0.0
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return 1.0 - prev[-1] / max(len(a), len(b))


def _title_tokens(title: str) -> frozenset[str]:
    return frozenset(re.findall(r"[a-z0-9]+", title.lower()))


def resolve_course(text: str, catalog: Catalog) -> list[tuple[str, float]]:
    """Rank catalog courses by similarity to ``text``.

    Exact normalized code match scores 1.0 and wins outright; otherwise the
    score is the best of edit-distance similarity on the code (whole or
    per token) and token overlap on the title, both capped below 1.0.
    Returns at most MAX_MATCHES entries scoring >= MATCH_THRESHOLD.
    """
    if not catalog.courses:
        raise CatalogError("cannot resolve against an empty catalog")
    query = normalize_code(text)
    query_tokens = _title_tokens(text)
    scored = []
    for code in catalog.sorted_codes():
        course = catalog.courses[code]
        if query == code:
            scored.append((code, 1.0))
            continue
        code_sim = _levenshtein_similarity(query, code)
        for token in code.split():
            code_sim = max(code_sim, 0.9 * _levenshtein_similarity(query, token))
        title_tokens = _title_tokens(course.title)
        union = query_tokens | title_tokens
        title_sim = len(query_tokens & title_tokens) / len(union) if union else 0.0
        score = min(max(code_sim, title_sim), 0.99)
        if score >= MATCH_THRESHOLD:
            scored.append((code, round(score, 4)))
    scored.sort(key=lambda pair: (-pair[1], pair[0]))
    return scored[:MAX_MATCHES]
