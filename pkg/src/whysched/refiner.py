"""Render a minimal explanation as concise English.

Template mode groups the explanation's clauses by parent constraint id,
emits one sentence per group from the clause labels, and merges runs of
prerequisite constraints that share courses into a single chain sentence.
LLM mode asks the gateway to polish those sentences but re-validates the
result structurally (every course code present, every constraint family
still mentioned) and falls back to the template on any miss: fluency from
the model, content from the constraints.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from . import llm_gateway
from .catalog import Catalog
from .explainer import Explanation
from .queryparse import _render_schedule
from .resources import prompt_path
from .scheduler import Schedule

# Phrases that anchor each constraint family in rendered text; all are
# substrings of the corresponding clause labels.
CATEGORY_KEY_PHRASES = {
    "Prerequisite": "must be completed before",
    "CreditBound": "credits",
    "Placement": "exactly one semester",
    "Requirement": "required",
}


@dataclass(frozen=True)
class RefinedExplanation:
    text: str
    sources: tuple[str, ...]
    mode: str  # "template" | "llm"
    fallback_reason: Optional[str] = None

    def word_count(self) -> int:
        return len(self.text.split())

    def to_document(self) -> dict:
        return {"text": self.text, "sources": list(self.sources), "mode": self.mode,
                "llm_fallback": self.fallback_reason is not None}


_PREREQ_ID = re.compile(r"^prereq/(.+)/(.+)/(\d+)$")


def _groups(explanation: Explanation) -> list[tuple[str, str, str]]:
    """Distinct (category, constraint_id, label) triples, sorted."""
    seen = {}
    for kc in explanation.clauses:
        seen.setdefault(kc.constraint_id, (kc.category, kc.constraint_id, kc.label))
    return sorted(seen.values())


def _prereq_sentences(edges: list[tuple[str, str]]) -> list[tuple[str, list[str]]]:
    """Sentences for prerequisite edges; linear runs merge into chains.

    Returns (sentence, [edge ids rendered]) pairs. ``edges`` are (course,
    prerequisite) pairs, already de-duplicated.
    """
    outgoing: dict[str, list[str]] = {}
    incoming: dict[str, list[str]] = {}
    for c, p in edges:
        outgoing.setdefault(c, []).append(p)
        incoming.setdefault(p, []).append(c)
    consumed: set[tuple[str, str]] = set()
    sentences: list[tuple[str, list[str]]] = []

    def single_edge(c: str, p: str) -> tuple[str, list[str]]:
        return (f"{c} cannot be scheduled because its prerequisite {p} "
                "has not been completed.", [f"{c}->{p}"])

    # Maximal linear chains first, walked from courses nothing else requires.
    for c, p in edges:
        if (c, p) in consumed or c in incoming or len(outgoing[c]) != 1:
            continue
        chain = [c, p]
        consumed.add((c, p))
        cur = p
        while (len(outgoing.get(cur, [])) == 1 and len(incoming.get(cur, [])) == 1
               and (cur, outgoing[cur][0]) not in consumed):
            nxt = outgoing[cur][0]
            consumed.add((cur, nxt))
            chain.append(nxt)
            cur = nxt
        if len(chain) == 2:
            sentences.append(single_edge(chain[0], chain[1]))
        else:
            body = f"{chain[0]} requires {chain[1]}"
            body += "".join(f", which requires {code}" for code in chain[2:])
            sentences.append((body + ".",
                              [f"{a}->{b}" for a, b in zip(chain, chain[1:])]))
    # Whatever branching structure remains renders edge by edge.
    for c, p in edges:
        if (c, p) not in consumed:
            sentences.append(single_edge(c, p))
    return sentences


def refine_template(explanation: Explanation, schedule: Schedule,
                    catalog: Catalog) -> RefinedExplanation:
    """Deterministic rendering from clause labels, one sentence per group."""
    groups = _groups(explanation)
    prereq_edges: list[tuple[str, str]] = []
    prereq_ids: dict[str, list[str]] = {}
    sentences: list[str] = []
    sources: list[str] = []
    for category, cid, label in groups:
        m = _PREREQ_ID.match(cid)
        if m:
            edge = (m.group(1), m.group(2))
            if edge not in prereq_edges:
                prereq_edges.append(edge)
            prereq_ids.setdefault(f"{edge[0]}->{edge[1]}", []).append(cid)
            continue
        sentences.append(label)
        sources.append(cid)
    for sentence, edge_keys in _prereq_sentences(prereq_edges):
        sentences.append(sentence)
        for key in edge_keys:
            sources.extend(prereq_ids.get(key, []))
    return RefinedExplanation(text=" ".join(sentences), sources=tuple(sources),
                              mode="template")


def _codes_in_labels(explanation: Explanation, catalog: Catalog) -> list[str]:
    labels = " ".join(kc.label for kc in explanation.clauses)
    return [code for code in catalog.sorted_codes() if code in labels]


def validate_refined(text: str, explanation: Explanation,
                     catalog: Catalog) -> Optional[str]:
    """None when the text preserves the explanation's content, else a reason."""
    lower = text.lower()
    for code in _codes_in_labels(explanation, catalog):
        if code.lower() not in lower:
            return f"course code {code} missing from refined text"
    for category in {kc.category for kc in explanation.clauses}:
        phrase = CATEGORY_KEY_PHRASES.get(category)
        if phrase and phrase.lower() not in lower:
            return f"constraint family '{category}' not represented"
    return None


def build_refiner_prompt(explanation: Explanation, schedule: Schedule,
                         catalog: Catalog) -> str:
    template = prompt_path("refiner.txt").read_text(encoding="utf-8")
    labels = "\n".join(f"- {label}" for label in explanation.labels())
    courses = "\n".join(
        f"- {code}: {catalog.courses[code].title}"
        for code in _codes_in_labels(explanation, catalog))
    return template.format(labels=labels,
                           schedule=_render_schedule(schedule, catalog),
                           courses=courses or "- (none)")


def refine_llm(explanation: Explanation, schedule: Schedule, catalog: Catalog,
               gateway: "llm_gateway.GatewayConfig") -> RefinedExplanation:
    """Polish via the gateway; structural validation guards the content."""
    template_result = refine_template(explanation, schedule, catalog)
    if gateway.mode == "disabled":
        return template_result
    prompt = build_refiner_prompt(explanation, schedule, catalog)
    try:
        text = llm_gateway.complete(gateway, prompt).strip()
    except llm_gateway.GatewayError as e:
        return RefinedExplanation(text=template_result.text,
                                  sources=template_result.sources,
                                  mode="template",
                                  fallback_reason=f"{type(e).__name__}: {e}")
    problem = validate_refined(text, explanation, catalog)
    if problem is not None:
        return RefinedExplanation(text=template_result.text,
                                  sources=template_result.sources,
                                  mode="template", fallback_reason=problem)
    return RefinedExplanation(text=text, sources=template_result.sources, mode="llm")
