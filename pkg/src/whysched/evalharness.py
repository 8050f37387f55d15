"""Desk-scale rerun of the correctness evaluation protocol.

Generates contrastive queries at fixed complexity levels (the number of
distinct courses mentioned), pushes each through parse -> foil -> explain ->
template refinement, and scores the outcome with the independent oracle
only: solver entailment/minimality checks for explanations, the non-SAT
schedule checker plus foil satisfaction for alternatives. The report mirrors
the familiar level/accuracy/words/runtime table, as CSV plus bar-chart
figures rendered next to it.
"""

from __future__ import annotations

import csv
import logging
import random
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Protocol, Sequence, Union

from .catalog import Catalog
from .encoder import LabeledKB, encode
from .explainer import AlternativeSchedule, MinimalExplanation, explain
from .propcore import Sat, Unsat, lit
from .queryparse import parse, to_foil
from .refiner import refine_template
from .scheduler import Schedule, check_schedule, generate_schedule

logger = logging.getLogger(__name__)

LEVELS = (1, 2, 4, 6)

# Fixed sentence counted for feasible foils, which are answered with a
# schedule rather than a constraint explanation.
ALTERNATIVE_TEXT = ("The request is feasible; here is an alternative schedule "
                    "that satisfies it.")


class EvalError(ValueError):
    pass


@dataclass(frozen=True)
class EvalRow:
    level: Union[int, str]
    n: int
    accuracy_pct: float
    avg_words: float
    avg_runtime_sec: float


@dataclass(frozen=True)
class EvalReport:
    rows: tuple[EvalRow, ...]
    mode: str
    seed: int

    def overall(self) -> Optional[EvalRow]:
        for row in self.rows:
            if row.level == "overall":
                return row
        return None

    def to_csv(self, path: Union[str, Path]) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fp:
            writer = csv.writer(fp)
            writer.writerow(["level", "n", "accuracy_pct", "avg_words",
                             "avg_runtime_sec"])
            for row in self.rows:
                writer.writerow([row.level, row.n, f"{row.accuracy_pct:.1f}",
                                 f"{row.avg_words:.1f}", f"{row.avg_runtime_sec:.3f}"])


def generate_queries(schedule: Schedule, catalog: Catalog, level: int, n: int,
                     seed: int) -> list[str]:
    """``n`` canonical query texts, each naming exactly ``level`` distinct courses."""
    if level not in LEVELS:
        raise EvalError(f"level must be one of {LEVELS}, got {level}")
    codes = catalog.sorted_codes()
    if len(codes) < level:
        raise EvalError(f"catalog has {len(codes)} courses; level {level} "
                        "queries need more")
    rng = random.Random(seed * 10007 + level)
    num_semesters = catalog.requirements.num_semesters
    scheduled = sorted(schedule.selected)
    unscheduled = sorted(set(codes) - schedule.selected)

    def pick_courses(k: int) -> list[str]:
        # Mix scheduled and unscheduled mentions so both feasible and
        # refutable foils occur in the corpus.
        chosen: list[str] = []
        pool_s, pool_u = list(scheduled), list(unscheduled)
        for _ in range(k):
            use_scheduled = pool_s and (not pool_u or rng.random() < 0.7)
            pool = pool_s if use_scheduled else pool_u
            course = pool.pop(rng.randrange(len(pool)))
            chosen.append(course)
        return chosen

    def sem() -> int:
        return rng.randint(1, num_semesters)

    queries = []
    for _ in range(n):
        courses = pick_courses(level)
        if level == 1:
            c = courses[0]
            form = rng.randrange(4)
            if form == 0:
                queries.append(f"Why not {c}?")
            elif form == 1:
                queries.append(f"Why {c}?")
            elif form == 2:
                queries.append(f"Why not {c} in semester {sem()}?")
            else:
                queries.append(f"Why {c} in semester {sem()}?")
        elif level == 2 and rng.random() < 0.5:
            c1, c2 = courses
            if rng.random() < 0.5:
                queries.append(f"Why not {c1} instead of {c2}?")
            else:
                queries.append(f"Why {c1} instead of {c2} in semester {sem()}?")
        else:
            parts = []
            for c in courses:
                negate = "not " if rng.random() < 0.3 else ""
                where = f" in semester {sem()}" if rng.random() < 0.7 else ""
                parts.append(f"{negate}{c}{where}")
            queries.append("Why " + " and ".join(parts) + "?")
    return queries


def _oracle_check(kb: LabeledKB, foil, result) -> bool:
    """Score a pipeline outcome using only solver calls and the checker."""
    if isinstance(result, AlternativeSchedule):
        schedule = result.schedule
        if check_schedule(schedule, kb.catalog):
            return False
        for literal, item in zip(foil.literals, foil.items):
            if item.semester == "any":
                holds = item.course in schedule.selected
            else:
                holds = item.course in schedule.placements.get(item.semester, ())
            if holds != item.positive:
                return False
        return True
    if isinstance(result, MinimalExplanation):
        eps = result.explanation.clauses
        if not eps:
            return False
        for kc in eps:
            if kc.selector not in kb.selector_map:
                return False
        selectors = [lit(kc.selector) for kc in eps]
        if not isinstance(kb.formula.solve(selectors + list(foil.literals)), Unsat):
            return False
        for drop in eps:
            rest = [lit(kc.selector) for kc in eps if kc is not drop]
            if not isinstance(kb.formula.solve(rest + list(foil.literals)), Sat):
                return False
        return True
    return False


def run_eval(catalog: Catalog, levels: Sequence[int], n_per_level: Union[int, Sequence[int]],
             seed: int = 7, mode: str = "disabled",
             progress: Optional[Callable[[int, int], None]] = None) -> EvalReport:
    """Full pipeline over generated queries; accuracy from the oracle only."""
    if mode not in ("stub", "disabled"):
        raise EvalError("run_eval supports stub or disabled LLM modes only")
    levels = list(levels)
    if isinstance(n_per_level, int):
        counts = [n_per_level] * len(levels)
    else:
        counts = list(n_per_level)
        if len(counts) != len(levels):
            raise EvalError("n_per_level list must match levels")
    kb = encode(catalog)
    schedule = generate_schedule(kb)
    if not isinstance(schedule, Schedule):
        raise EvalError("catalog is infeasible; nothing to evaluate")
    rows = []
    all_passed = all_words = all_runtime = 0.0
    all_n = 0
    done_so_far = 0
    total_queries = sum(counts)
    for level, n in zip(levels, counts):
        texts = generate_queries(schedule, catalog, level, n, seed)
        passed = 0
        words = 0.0
        runtime = 0.0
        for text in texts:
            try:
                query = parse(text, schedule, catalog)
                foil = to_foil(query, schedule, kb)
                t0 = time.perf_counter()
                result = explain(kb, foil)
                if isinstance(result, MinimalExplanation):
                    refined = refine_template(result.explanation, schedule, catalog)
                    words += refined.word_count()
                else:
                    words += len(ALTERNATIVE_TEXT.split())
                runtime += time.perf_counter() - t0
                if _oracle_check(kb, foil, result):
                    passed += 1
                else:
                    logger.error("oracle rejected result for query: %s", text)
            except Exception:
                logger.exception("pipeline failure for query: %s", text)
            done_so_far += 1
            if progress:
                progress(done_so_far, total_queries)
        rows.append(EvalRow(level=level, n=n,
                            accuracy_pct=100.0 * passed / n if n else 0.0,
                            avg_words=words / n if n else 0.0,
                            avg_runtime_sec=runtime / n if n else 0.0))
        all_passed += passed
        all_words += words
        all_runtime += runtime
        all_n += n
    if levels:
        rows.append(EvalRow(level="overall", n=all_n,
                            accuracy_pct=100.0 * all_passed / all_n if all_n else 0.0,
                            avg_words=all_words / all_n if all_n else 0.0,
                            avg_runtime_sec=all_runtime / all_n if all_n else 0.0))
    return EvalReport(rows=tuple(rows), mode=mode, seed=seed)


def split_total(total: int, levels: Sequence[int]) -> list[int]:
    """Split a query budget across levels as evenly as possible."""
    base, extra = divmod(total, len(levels))
    return [base + (1 if i < extra else 0) for i in range(len(levels))]


def render_report_figures(report: EvalReport, csv_path: Union[str, Path]) -> list[Path]:
    """Bar charts per metric, written alongside the CSV."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    stem = Path(csv_path).with_suffix("")
    level_rows = [r for r in report.rows if r.level != "overall"]
    labels = [str(r.level) for r in level_rows]
    out = []
    metrics = [
        ("accuracy", [r.accuracy_pct for r in level_rows], "Accuracy (%)", (0, 105)),
        ("avg_words", [r.avg_words for r in level_rows], "Average words", None),
        ("avg_runtime", [r.avg_runtime_sec for r in level_rows],
         "Average runtime (s)", None),
    ]
    for name, values, ylabel, ylim in metrics:
        fig, ax = plt.subplots(figsize=(4.2, 3.0))
        ax.bar(labels, values, color="#3b6ea5")
        ax.set_xlabel("Query complexity level")
        ax.set_ylabel(ylabel)
        if ylim:
            ax.set_ylim(*ylim)
        ax.set_title(f"{ylabel} by complexity")
        fig.tight_layout()
        path = Path(f"{stem}_{name}.png")
        fig.savefig(path, dpi=120)
        plt.close(fig)
        out.append(path)
    return out


class BaselineAdapter(Protocol):
    """Adapter slot for a direct text-to-text baseline (not a CI target)."""

    def explain_text(self, query: str, schedule: Schedule, catalog: Catalog) -> str:
        ...


class StubBaseline:
    """Canned baseline used to exercise the adapter wiring in tests."""

    def __init__(self, canned: str = "All constraints considered, no change is possible."):
        self.canned = canned

    def explain_text(self, query: str, schedule: Schedule, catalog: Catalog) -> str:
        return self.canned
