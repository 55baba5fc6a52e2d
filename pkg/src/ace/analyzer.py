"""Prompt quality measures: clarity rubric (0-5) and specificity counts.

The measures follow a frozen, documented rule set (see docs/analyzer.md)
rather than human judgment, so results are reproducible: clarity looks for
cue phrases per slot, specificity counts descriptive words against a
bundled lexicon, directive sentences, and exemplar markers. All rules and
word lists live under ``assets/analyzer/`` as editable plain-text files.

Heuristic mode is a pure function of the prompt text. Judge mode swaps the
clarity slot detection for one LLM call with a fixed rubric; specificity
counts stay heuristic either way.

Every evidence entry is ``{"text", "start"}`` and re-slices faithfully:
``prompt_body[start : start + len(text)] == text``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path

from . import errors
from .gateway import request

ASSETS = Path(__file__).parent / "assets" / "analyzer"

CLARITY_SLOTS = ("task", "context", "role", "audience", "output_style")

CONSTRAINT_MARKERS = (
    "must",
    "should",
    "always",
    "never",
    "do not",
    "don't",
    "avoid",
    "ensure",
    "keep",
    "limit",
    "only use",
    "use only",
)

# Scanned longest-first so "for example:" counts once, not twice.
EXAMPLE_MARKERS = ("for instance", "for example", "example:", "such as", "e.g.")

TOKEN_RE = re.compile(r"\w+(?:-\w+)*", re.UNICODE)
BULLET_RE = re.compile(r"^(\s*)(?:[-*•]|\d+[.)])\s+")
SENTENCE_END_RE = re.compile(r"[.!?]+(?=\s|$)")
FENCE_RE = re.compile(r"^\s*```")
QUOTE_RE = re.compile(r"^\s*>")


def _load_lines(name: str) -> list[str]:
    lines = []
    for raw in (ASSETS / name).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if line and not line.startswith("#"):
            lines.append(line)
    return lines


def _compile_rules(name: str) -> list[re.Pattern]:
    rules = []
    for line in _load_lines(name):
        if line.startswith("re:"):
            rules.append(re.compile(line[3:], re.IGNORECASE))
        else:
            rules.append(re.compile(re.escape(line), re.IGNORECASE))
    return rules


CLARITY_RULES = {slot: _compile_rules(f"clarity_{slot}.txt") for slot in CLARITY_SLOTS}
LEXICON = frozenset(_load_lines("descriptive_lexicon.txt"))
LY_STOPLIST = frozenset(_load_lines("ly_stoplist.txt"))
DIRECTIVE_VERBS = frozenset(_load_lines("directive_verbs.txt"))

MARKER_RES = [
    re.compile(r"\bdon[’']t\b", re.IGNORECASE)
    if marker == "don't"
    else re.compile(r"\b" + re.escape(marker) + r"\b", re.IGNORECASE)
    for marker in CONSTRAINT_MARKERS
]

JUDGE_INSTRUCTION = (
    "You grade a robot behavior prompt for clarity. Award one point each for "
    "whether the prompt describes: the robot's task, relevant task context, "
    "the robot's role, the audience, and the desired output style. Reply with "
    "only a JSON object of five booleans, keys: task, context, role, "
    "audience, output_style."
)
JUDGE_REPAIR = (
    "That reply was not valid. Respond with only a JSON object containing "
    "exactly the boolean keys task, context, role, audience, output_style."
)


@dataclass
class ClarityReport:
    slots: dict
    score: int
    evidence: dict
    mode: str

    def to_doc(self) -> dict:
        return {
            "slots": dict(self.slots),
            "score": self.score,
            "evidence": {k: list(v) for k, v in self.evidence.items()},
            "mode": self.mode,
        }


@dataclass
class SpecificityReport:
    descriptive_words: int
    descriptive_evidence: list
    constraints: int
    constraint_evidence: list
    examples: int
    example_evidence: list

    def to_doc(self) -> dict:
        return {
            "descriptive_words": {
                "count": self.descriptive_words,
                "evidence": list(self.descriptive_evidence),
            },
            "constraints": {
                "count": self.constraints,
                "evidence": list(self.constraint_evidence),
            },
            "examples": {
                "count": self.examples,
                "evidence": list(self.example_evidence),
            },
        }


@dataclass
class AnalysisReport:
    clarity: ClarityReport
    specificity: SpecificityReport

    def to_doc(self) -> dict:
        return {
            "mode": self.clarity.mode,
            "clarity": self.clarity.to_doc(),
            "specificity": self.specificity.to_doc(),
        }


# -- clarity -------------------------------------------------------------------


def _scan_rules(text: str, rules: list[re.Pattern]) -> list[dict]:
    hits = {}
    for rule in rules:
        for m in rule.finditer(text):
            if m.start() < m.end():
                hits[(m.start(), m.group(0))] = {"text": m.group(0), "start": m.start()}
    return [hits[key] for key in sorted(hits)]


def analyze_clarity(prompt_body: str, mode: str = "heuristic", gateway=None) -> ClarityReport:
    if mode not in ("heuristic", "judge"):
        raise ValueError(f"unknown analyzer mode {mode!r}")
    if mode == "judge":
        return _judge_clarity(prompt_body, gateway)
    slots, evidence = {}, {}
    for slot in CLARITY_SLOTS:
        matches = _scan_rules(prompt_body, CLARITY_RULES[slot])
        slots[slot] = bool(matches)
        evidence[slot] = matches
    return ClarityReport(
        slots=slots, score=sum(slots.values()), evidence=evidence, mode="heuristic"
    )


def _parse_judge_reply(reply: str):
    try:
        doc = json.loads(reply)
    except ValueError:
        m = re.search(r"\{.*\}", reply, re.DOTALL)
        if not m:
            return None
        try:
            doc = json.loads(m.group(0))
        except ValueError:
            return None
    if not isinstance(doc, dict):
        return None
    slots = {}
    for slot in CLARITY_SLOTS:
        value = doc.get(slot)
        if not isinstance(value, bool):
            return None
        slots[slot] = value
    return slots


def _judge_clarity(prompt_body: str, gateway) -> ClarityReport:
    empty_evidence = {slot: [] for slot in CLARITY_SLOTS}
    if not prompt_body:
        slots = {slot: False for slot in CLARITY_SLOTS}
        return ClarityReport(slots=slots, score=0, evidence=empty_evidence, mode="judge")
    first = request(
        [("system", JUDGE_INSTRUCTION), ("user", prompt_body)],
        label="analyze.judge",
    )
    reply = gateway.complete(first)
    slots = _parse_judge_reply(reply)
    if slots is None:
        retry = request(
            [
                ("system", JUDGE_INSTRUCTION),
                ("user", prompt_body),
                ("assistant", reply),
                ("user", JUDGE_REPAIR),
            ],
            label="analyze.judge.repair",
        )
        reply = gateway.complete(retry)
        slots = _parse_judge_reply(reply)
        if slots is None:
            raise errors.JudgeParseError("judge reply unparseable after retry")
    return ClarityReport(
        slots=slots, score=sum(slots.values()), evidence=empty_evidence, mode="judge"
    )


# -- specificity -----------------------------------------------------------------


def count_descriptive_words(prompt_body: str):
    evidence = []
    for m in TOKEN_RE.finditer(prompt_body):
        token = m.group(0).lower()
        if token in LEXICON or (
            len(token) > 2 and token.endswith("ly") and token not in LY_STOPLIST
        ):
            evidence.append({"text": m.group(0), "start": m.start()})
    return len(evidence), evidence


@dataclass
class _Unit:
    text: str
    start: int
    head: str  # text with any bullet marker removed, for the verb check


def _trimmed(text: str, start: int):
    left = len(text) - len(text.lstrip())
    trimmed = text.strip()
    return trimmed, start + left


def _split_units(prompt_body: str) -> list[_Unit]:
    """Bullet or numbered lines are one unit each; other text splits into
    sentences at terminal punctuation."""
    units: list[_Unit] = []
    paragraph: list[tuple[str, int]] = []  # (line, offset) runs between bullets/blanks

    def flush_paragraph():
        if not paragraph:
            return
        start = paragraph[0][1]
        end = paragraph[-1][1] + len(paragraph[-1][0])
        block = prompt_body[start:end]
        pos = 0
        for m in SENTENCE_END_RE.finditer(block):
            sentence, s_start = _trimmed(block[pos : m.end()], start + pos)
            if sentence:
                units.append(_Unit(sentence, s_start, sentence))
            pos = m.end()
        tail, t_start = _trimmed(block[pos:], start + pos)
        if tail:
            units.append(_Unit(tail, t_start, tail))
        paragraph.clear()

    offset = 0
    for raw in prompt_body.splitlines(keepends=True):
        line = raw.rstrip("\r\n")
        bullet = BULLET_RE.match(line)
        if bullet:
            flush_paragraph()
            text, start = _trimmed(line, offset)
            if text:
                units.append(_Unit(text, start, line[bullet.end() :]))
        elif not line.strip():
            flush_paragraph()
        else:
            paragraph.append((line, offset))
        offset += len(raw)
    flush_paragraph()
    return units


def _is_constraint(unit: _Unit) -> bool:
    for marker_re in MARKER_RES:
        if marker_re.search(unit.text):
            return True
    first = TOKEN_RE.search(unit.head)
    return bool(first) and first.group(0).lower() in DIRECTIVE_VERBS


def count_constraints(prompt_body: str):
    evidence = [
        {"text": u.text, "start": u.start}
        for u in _split_units(prompt_body)
        if _is_constraint(u)
    ]
    return len(evidence), evidence


def _word_char(ch: str) -> bool:
    return bool(TOKEN_RE.match(ch))


def _marker_occurrences(prompt_body: str) -> list[dict]:
    lower = prompt_body.lower()
    by_length = sorted(EXAMPLE_MARKERS, key=len, reverse=True)
    found = []
    i = 0
    while i < len(lower):
        hit = None
        for marker in by_length:
            if not lower.startswith(marker, i):
                continue
            if i > 0 and _word_char(marker[0]) and _word_char(lower[i - 1]):
                continue  # "counterexample:" is not a marker
            hit = marker
            break
        if hit:
            found.append({"text": prompt_body[i : i + len(hit)], "start": i})
            i += len(hit)
        else:
            i += 1
    return found


def _labeled_blocks(prompt_body: str, marker_hits: list[dict]) -> list[dict]:
    """Fenced code blocks and blockquote runs labeled as examples.

    A block counts when its opening fence line, or the nearest preceding
    non-empty line, mentions "example" and that label line carries no counted
    marker occurrence (so an "Example:" label does not count twice).
    """
    lines = []
    offset = 0
    for raw in prompt_body.splitlines(keepends=True):
        lines.append((raw.rstrip("\r\n"), offset))
        offset += len(raw)

    def has_marker(line_start: int, line_text: str) -> bool:
        line_end = line_start + len(line_text)
        return any(line_start <= h["start"] < line_end for h in marker_hits)

    def label_ok(idx: int) -> bool:
        text, start = lines[idx]
        if "example" in text.lower():
            return not has_marker(start, text)
        return False

    blocks = []
    in_fence = False
    i = 0
    while i < len(lines):
        text, start = lines[i]
        if FENCE_RE.match(text):
            if not in_fence:
                if "example" in text.lower():
                    labeled = label_ok(i)
                else:
                    labeled = False
                    for j in range(i - 1, -1, -1):
                        if lines[j][0].strip():
                            labeled = label_ok(j)
                            break
                if labeled:
                    blocks.append({"text": text, "start": start})
            in_fence = not in_fence
            i += 1
            continue
        if not in_fence and QUOTE_RE.match(text):
            run_start = i
            while i < len(lines) and QUOTE_RE.match(lines[i][0]):
                i += 1
            labeled = False
            for j in range(run_start - 1, -1, -1):
                if lines[j][0].strip():
                    labeled = label_ok(j)
                    break
            if labeled:
                blocks.append({"text": lines[run_start][0], "start": lines[run_start][1]})
            continue
        i += 1
    return blocks


def count_examples(prompt_body: str):
    markers = _marker_occurrences(prompt_body)
    evidence = sorted(
        markers + _labeled_blocks(prompt_body, markers), key=lambda h: h["start"]
    )
    return len(evidence), evidence


def analyze(prompt_body: str, mode: str = "heuristic", gateway=None) -> AnalysisReport:
    clarity = analyze_clarity(prompt_body, mode=mode, gateway=gateway)
    dw_count, dw_evidence = count_descriptive_words(prompt_body)
    c_count, c_evidence = count_constraints(prompt_body)
    e_count, e_evidence = count_examples(prompt_body)
    return AnalysisReport(
        clarity=clarity,
        specificity=SpecificityReport(
            descriptive_words=dw_count,
            descriptive_evidence=dw_evidence,
            constraints=c_count,
            constraint_evidence=c_evidence,
            examples=e_count,
            example_evidence=e_evidence,
        ),
    )
