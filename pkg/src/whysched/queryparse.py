"""Contrastive query parsing: grammar path, optional LLM path, restatement.

Supported surface forms (case-insensitive, joined by "and" for multi-course
queries):

    Why COURSE?
    Why not COURSE?
    Why [not] COURSE in semester N?
    Why [not] COURSE instead of COURSE [in semester N]?

Semesters are one-based in user text and zero-based internally; this module
is the only place that boundary is crossed. A "not" item reads as a wish for
the opposite of the current state; instead-of pairs are always (wanted,
displaced) regardless of negation. Compilation to a foil contrasts each item
against the current schedule: a literal that already holds is flipped, so
"Why X?" about a scheduled course asks what breaks if X is dropped.
"""

from __future__ import annotations

import re
import secrets
from dataclasses import dataclass, replace
from typing import Optional, Union

from . import llm_gateway
from .catalog import Catalog, resolve_course
from .encoder import LabeledKB
from .explainer import Foil, FoilItem
from .propcore import lit
from .resources import prompt_path
from .scheduler import Schedule

SUPPORTED_FORMS = (
    '"Why COURSE?"',
    '"Why not COURSE?"',
    '"Why [not] COURSE in semester N?"',
    '"Why [not] COURSE instead of COURSE [in semester N]?"',
    'conjunctions of the above joined by "and"',
)


class QueryError(Exception):
    """Base for structured parse errors; ``kind`` names the variant."""

    kind = "error"

    def payload(self) -> dict:
        return {"error": self.kind, "message": str(self)}


class NoMatch(QueryError):
    kind = "no_match"

    def __init__(self, detail: str):
        super().__init__(
            f"{detail}. Supported forms: {'; '.join(SUPPORTED_FORMS)}")


class UnknownCourse(QueryError):
    kind = "unknown_course"

    def __init__(self, text: str):
        super().__init__(f"no course matches '{text}'")
        self.text = text


class AmbiguousCourse(QueryError):
    kind = "ambiguous_course"

    def __init__(self, text: str, candidates: list[tuple[str, float]]):
        names = ", ".join(c for c, _ in candidates)
        super().__init__(f"'{text}' matches several courses: {names}")
        self.text = text
        self.candidates = candidates

    def payload(self) -> dict:
        out = super().payload()
        out["candidates"] = [{"code": c, "score": s} for c, s in self.candidates]
        return out


class CourseNotInSchedule(QueryError):
    kind = "course_not_in_schedule"

    def __init__(self, course: str):
        super().__init__(
            f"{course} is not in the current schedule, so 'current semester' "
            "does not resolve")
        self.course = course


@dataclass(frozen=True)
class QueryItem:
    course: str
    target: Union[int, str]  # zero-based semester, "current", or "any"
    condition: str  # "positive" | "negative"


@dataclass(frozen=True)
class ParsedQuery:
    items: tuple[QueryItem, ...]
    source: str  # "grammar" | "llm"
    fallback_reason: Optional[str] = None

    @property
    def complexity(self) -> int:
        return len({i.course for i in self.items})

    def to_document(self) -> dict:
        return {
            "items": [
                {"course": i.course,
                 "semester": i.target + 1 if isinstance(i.target, int) else i.target,
                 "condition": i.condition}
                for i in self.items
            ],
            "source": self.source,
            "complexity": self.complexity,
            "llm_fallback": self.fallback_reason is not None,
        }


@dataclass(frozen=True)
class Restatement:
    text: str
    token: str


_WHY_RE = re.compile(r"\s*(?:how\s+come|why)\b(.*)$", re.IGNORECASE | re.DOTALL)
_NOT_RE = re.compile(r"\s*not\s+(.*)$", re.IGNORECASE | re.DOTALL)
_SEM_RE = re.compile(r"^(.*?)[\s,]+in\s+(?:the\s+)?semester\s+(\d+)\s*$", re.IGNORECASE)
_INSTEAD_RE = re.compile(r"\s+instead\s+of\s+", re.IGNORECASE)
_AND_RE = re.compile(r"\s+and\s+", re.IGNORECASE)


def _resolve_one(text: str, catalog: Catalog) -> str:
    text = text.strip(" .,!?")
    if not text:
        raise NoMatch("missing course name")
    matches = resolve_course(text, catalog)
    if not matches:
        raise UnknownCourse(text)
    if matches[0][1] >= 0.999 or len(matches) == 1:
        return matches[0][0]
    if matches[0][1] - matches[1][1] >= 0.2:
        return matches[0][0]
    raise AmbiguousCourse(text, matches)


def _strip_semester(text: str, catalog: Catalog) -> tuple[str, Optional[int]]:
    m = _SEM_RE.match(text)
    if not m:
        return text, None
    one_based = int(m.group(2))
    if not 1 <= one_based <= catalog.requirements.num_semesters:
        raise NoMatch(
            f"semester {one_based} out of range 1..{catalog.requirements.num_semesters}")
    return m.group(1), one_based - 1


def _state_holds(course: str, target: Union[int, str], schedule: Schedule) -> bool:
    if isinstance(target, int):
        return course in schedule.placements.get(target, ())
    return course in schedule.selected


def _parse_conjunct(conj: str, schedule: Schedule, catalog: Catalog) -> list[QueryItem]:
    negated = False
    m = _NOT_RE.match(conj)
    if m:
        negated = True
        conj = m.group(1)
    parts = _INSTEAD_RE.split(conj, maxsplit=1)
    if len(parts) == 2:
        left_text, s_left = _strip_semester(parts[0], catalog)
        right_text, s_right = _strip_semester(parts[1], catalog)
        wanted = _resolve_one(left_text, catalog)
        displaced = _resolve_one(right_text, catalog)
        if s_left is not None or s_right is not None:
            t_wanted = s_left if s_left is not None else s_right
            t_displaced = s_right if s_right is not None else s_left
        else:
            current = schedule.semester_of(displaced)
            t_wanted = t_displaced = current if current is not None else "any"
        return [QueryItem(wanted, t_wanted, "positive"),
                QueryItem(displaced, t_displaced, "negative")]
    text, sem = _strip_semester(conj, catalog)
    course = _resolve_one(text, catalog)
    target: Union[int, str] = sem if sem is not None else "any"
    if negated:
        condition = "negative" if _state_holds(course, target, schedule) else "positive"
    else:
        condition = "positive"
    return [QueryItem(course, target, condition)]


def parse(text: str, schedule: Schedule, catalog: Catalog) -> ParsedQuery:
    """Grammar path: deterministic parse of the canonical query forms."""
    m = _WHY_RE.match(text)
    if not m:
        raise NoMatch("query must start with 'Why'")
    rest = m.group(1).strip().rstrip("?.!").strip()
    if not rest:
        raise NoMatch("empty query")
    items: list[QueryItem] = []
    for conj in _AND_RE.split(rest):
        items.extend(_parse_conjunct(conj, schedule, catalog))
    deduped: dict[tuple[str, Union[int, str]], QueryItem] = {}
    for item in items:
        key = (item.course, item.target)
        prior = deduped.get(key)
        if prior is not None and prior.condition != item.condition:
            raise NoMatch(f"{item.course} is mentioned twice with conflicting conditions")
        deduped[key] = item
    return ParsedQuery(items=tuple(deduped.values()), source="grammar")


def to_foil(query: ParsedQuery, schedule: Schedule, kb: LabeledKB) -> Foil:
    """Compile a verified query into a foil, contrasting with the schedule.

    Mechanical reading first: positive/negative over var(c,s) or sel(c);
    a literal the current schedule already satisfies is inverted, which is
    what makes "why is X here" questions test dropping X.
    """
    literals = []
    fitems = []
    for item in query.items:
        target = item.target
        if target == "current":
            cur = schedule.semester_of(item.course)
            if cur is None:
                raise CourseNotInSchedule(item.course)
            target = cur
        want = item.condition == "positive"
        holds = _state_holds(item.course, target, schedule)
        polarity = want if holds != want else not want
        var = (kb.course_var(item.course, target) if isinstance(target, int)
               else kb.sel_var(item.course))
        literals.append(lit(var, polarity))
        fitems.append(FoilItem(item.course, target, polarity))
    return Foil(items=tuple(fitems), literals=tuple(literals))


def _describe(item: QueryItem, schedule: Schedule) -> str:
    target = item.target
    if target == "current":
        cur = schedule.semester_of(item.course)
        target = cur if cur is not None else "any"
    present = _state_holds(item.course, target, schedule)
    verb = "IS scheduled" if present else "is NOT scheduled"
    where = f" in semester {target + 1}" if isinstance(target, int) else ""
    return f"{item.course} {verb}{where}"


def restate(query: ParsedQuery, schedule: Schedule) -> Restatement:
    """One-sentence rendering of the parsed query for user verification."""
    items = query.items
    if (len(items) == 2 and items[0].target == items[1].target
            and items[0].condition != items[1].condition):
        first = _describe(items[0], schedule)
        target = items[1].target
        if target == "current":
            cur = schedule.semester_of(items[1].course)
            target = cur if cur is not None else "any"
        second_present = _state_holds(items[1].course, target, schedule)
        second = f"{items[1].course} {'IS' if second_present else 'is NOT'}"
        text = f"You are asking why {first} while {second}."
    else:
        text = "You are asking why " + " and ".join(
            _describe(i, schedule) for i in items) + "."
    return Restatement(text=text, token=secrets.token_hex(8))


# ----------------------------------------------------------------------
# LLM path
# ----------------------------------------------------------------------

_LINE_RE = re.compile(r"^(COURSE|SEMESTER|CONDITION):\s*(.+?)\s*$")


def _render_schedule(schedule: Schedule, catalog: Catalog) -> str:
    lines = []
    for s in range(catalog.requirements.num_semesters):
        codes = schedule.placements.get(s, ())
        lines.append(f"Semester {s + 1}: {', '.join(codes) if codes else '(empty)'}")
    return "\n".join(lines)


def build_parser_prompt(text: str, schedule: Schedule, catalog: Catalog) -> str:
    template = prompt_path("query_parser.txt").read_text(encoding="utf-8")
    return template.format(
        num_semesters=catalog.requirements.num_semesters,
        schedule=_render_schedule(schedule, catalog),
        query=text.strip(),
    )


def _items_from_llm_lines(response: str, schedule: Schedule,
                          catalog: Catalog) -> list[QueryItem]:
    fields: list[dict[str, str]] = []
    for raw in response.splitlines():
        raw = raw.strip()
        if not raw:
            continue
        m = _LINE_RE.match(raw)
        if not m:
            raise NoMatch(f"unexpected line in structured output: '{raw}'")
        key, value = m.group(1), m.group(2)
        if key == "COURSE":
            fields.append({"COURSE": value})
        else:
            if not fields or key in fields[-1]:
                raise NoMatch(f"misplaced {key} line in structured output")
            fields[-1][key] = value
    if not fields:
        raise NoMatch("structured output contained no items")
    items = []
    for block in fields:
        if set(block) != {"COURSE", "SEMESTER", "CONDITION"}:
            raise NoMatch("incomplete structured item")
        course = _resolve_one(block["COURSE"], catalog)
        sem_text = block["SEMESTER"].lower()
        target: Union[int, str]
        if sem_text in ("current", "any"):
            target = sem_text
        elif sem_text.isdigit() and 1 <= int(sem_text) <= catalog.requirements.num_semesters:
            target = int(sem_text) - 1
        else:
            raise NoMatch(f"bad SEMESTER value '{block['SEMESTER']}'")
        condition = block["CONDITION"].lower()
        if condition not in ("positive", "negative"):
            raise NoMatch(f"bad CONDITION value '{block['CONDITION']}'")
        items.append(QueryItem(course, target, condition))
    return items


def parse_llm(text: str, schedule: Schedule, catalog: Catalog,
              gateway: "llm_gateway.GatewayConfig") -> ParsedQuery:
    """LLM path: prompt with the output contract, validate, fall back on failure."""
    if gateway.mode == "disabled":
        return parse(text, schedule, catalog)
    prompt = build_parser_prompt(text, schedule, catalog)
    try:
        response = llm_gateway.complete(gateway, prompt)
        items = _items_from_llm_lines(response, schedule, catalog)
        return ParsedQuery(items=tuple(items), source="llm")
    except (llm_gateway.GatewayError, QueryError) as e:
        fallback = parse(text, schedule, catalog)
        return replace(fallback, fallback_reason=f"{type(e).__name__}: {e}")
