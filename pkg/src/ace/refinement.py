"""Feedback digest -> suggestion set -> refined prompt draft.

Two separate gateway calls keep the intermediate visible and editable: the
first organizes grounded feedback into four fixed bullet lists, the second
rewrites the whole prompt from those lists. Every artifact is persisted, so
a committed refined version traces back to its suggestion set, digest hash,
transcript, and annotations.
"""

from __future__ import annotations

import hashlib
import json
import re

from . import annotations, errors
from .gateway import LLMGateway, request
from .runtime import render_transcript_text
from .store import SCHEMA_VERSION, PromptVersion, Store

CATEGORIES = (
    ("Essential Behaviors to Maintain", "maintain"),
    ("Behaviors to Reduce or Avoid", "reduce_avoid"),
    ("Positive Engagement Cues", "positive_cues"),
    ("Recommended Adjustments", "adjustments"),
)

BULLET_LIMIT = 280

HEADING_RE = re.compile(r"^\s*#{0,6}\s*(.+?)\s*:?\s*$")
BULLET_RE = re.compile(r"^\s*[-*•]\s+(.*\S)\s*$")

SUGGEST_INSTRUCTION = """\
You improve a social robot's behavior prompt using designer feedback on a \
test conversation.

Read the current prompt, the conversation, and the feedback, then propose \
behavioral refinements organized into exactly these four sections, in this \
order, each as a heading line followed by "- " bullets:

Essential Behaviors to Maintain
Behaviors to Reduce or Avoid
Positive Engagement Cues
Recommended Adjustments

Keep each bullet to one short sentence under 280 characters. A section may \
be empty, but every heading must appear. Output only the sections and \
bullets, nothing else."""

DRAFT_INSTRUCTION = """\
You rewrite a social robot's behavior prompt by applying agreed refinement \
suggestions.

Produce the full replacement prompt: keep everything under Essential \
Behaviors to Maintain, turn each Behaviors to Reduce or Avoid item into an \
affirmative rule about what to do instead, fold in the Positive Engagement \
Cues and Recommended Adjustments, and be clear and specific throughout. \
Where a suggestion concerns content or style, anchor it with at least one \
concrete sample reply introduced with "For example,". Output only the new \
prompt text."""


def digest_hash(digest: str) -> str:
    return hashlib.sha256(digest.encode("utf-8")).hexdigest()


def truncate_bullet(text: str):
    """Cap at BULLET_LIMIT characters, cutting at a word boundary."""
    if len(text) <= BULLET_LIMIT:
        return text, False
    cut = text[: BULLET_LIMIT - 1]
    space = cut.rfind(" ")
    if space > 0:
        cut = cut[:space]
    return cut.rstrip() + "…", True


def parse_suggestions(text: str):
    """Parse the four-section reply.

    Returns (lists, None) on success or (None, problem). Strict by design:
    unknown headings, renamed categories, or stray prose are rejected so the
    repair loop can quote the exact violation.
    """
    titles = {title: key for title, key in CATEGORIES}
    lists = {key: [] for _, key in CATEGORIES}
    seen = []
    current = None
    for line in text.splitlines():
        if not line.strip():
            continue
        bullet = BULLET_RE.match(line)
        if bullet:
            if current is None:
                return None, f"bullet before any section heading: {line.strip()!r}"
            lists[current].append(bullet.group(1))
            continue
        heading = HEADING_RE.match(line)
        title = heading.group(1) if heading else None
        if title in titles:
            if title in seen:
                return None, f"duplicate section {title!r}"
            seen.append(title)
            current = titles[title]
            continue
        return None, f"unrecognized line (not a known heading or bullet): {line.strip()!r}"
    missing = [title for title, _ in CATEGORIES if title not in seen]
    if missing:
        return None, f"missing sections: {missing}"
    if not any(lists.values()):
        return None, "no bullets in any section"
    return lists, None


def render_sections(lists: dict) -> str:
    lines = []
    for title, key in CATEGORIES:
        lines.append(title)
        for bullet in lists[key]:
            lines.append(f"- {bullet}")
        lines.append("")
    return "\n".join(lines).rstrip() + "\n"


def _apply_bullet_limits(lists: dict):
    capped = {key: [] for _, key in CATEGORIES}
    truncated = []
    for _, key in CATEGORIES:
        for i, bullet in enumerate(lists[key]):
            text, cut = truncate_bullet(bullet)
            capped[key].append(text)
            if cut:
                truncated.append([key, i])
    return capped, truncated


def _repair_text(problem: str) -> str:
    return json.dumps(
        {
            "error": "invalid_suggestions",
            "violation": problem,
            "instruction": (
                "Resend only the four sections Essential Behaviors to "
                "Maintain, Behaviors to Reduce or Avoid, Positive Engagement "
                "Cues, Recommended Adjustments, each heading followed by "
                '"- " bullets.'
            ),
        },
        sort_keys=True,
    )


def generate_suggestions(
    store: Store, gateway: LLMGateway, prompt_version_id: str, transcript_id: str
) -> dict:
    version = store.get_version(prompt_version_id)
    transcript = store.get_transcript(transcript_id)
    digest = annotations.render_feedback_digest(store, transcript_id)
    user_content = (
        f"Current prompt:\n{version.body}\n\n"
        f"Test conversation:\n{render_transcript_text(transcript)}\n\n{digest}"
    )
    messages = [("system", SUGGEST_INSTRUCTION), ("user", user_content)]
    raw = gateway.complete(request(messages, label="refine.suggestions"))
    lists, problem = parse_suggestions(raw)
    if problem is not None:
        retry = messages + [("assistant", raw), ("user", _repair_text(problem))]
        raw = gateway.complete(request(retry, label="refine.suggestions.repair"))
        lists, problem = parse_suggestions(raw)
        if problem is not None:
            raise errors.MalformedSuggestions(f"suggestions invalid after retry: {problem}")
    capped, truncated = _apply_bullet_limits(lists)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "id": store.ids.new("sug"),
        "project_id": version.project_id,
        "prompt_version_id": prompt_version_id,
        "source_transcript_id": transcript_id,
        "source_annotation_digest_hash": digest_hash(digest),
        "maintain": capped["maintain"],
        "reduce_avoid": capped["reduce_avoid"],
        "positive_cues": capped["positive_cues"],
        "adjustments": capped["adjustments"],
        "truncated": truncated,
        "designer_edited": False,
        "created_at": store.clock.now(),
    }
    store.save_suggestions(version.project_id, doc)
    return doc


def edit_suggestions(store: Store, suggestion_set_id: str, edits: dict) -> dict:
    """Designer-edited copy: new set, same provenance, designer_edited=true."""
    source = store.get_suggestions(suggestion_set_id)
    lists = {}
    for _, key in CATEGORIES:
        value = edits.get(key, source[key])
        if not isinstance(value, list) or any(
            not isinstance(b, str) or not b.strip() for b in value
        ):
            raise errors.InvalidRequest(f"{key} must be a list of non-empty bullets")
        lists[key] = [b.strip() for b in value]
    if not any(lists.values()):
        raise errors.InvalidRequest("at least one bullet is required overall")
    capped, truncated = _apply_bullet_limits(lists)
    doc = dict(source)
    doc.update(capped)
    doc["id"] = store.ids.new("sug")
    doc["truncated"] = truncated
    doc["designer_edited"] = True
    doc["created_at"] = store.clock.now()
    store.save_suggestions(source["project_id"], doc)
    return doc


def generate_refined_prompt(
    store: Store, gateway: LLMGateway, prompt_version_id: str, suggestion_set_id: str
) -> dict:
    version = store.get_version(prompt_version_id)
    suggestions = store.get_suggestions(suggestion_set_id)
    lists = {key: suggestions[key] for _, key in CATEGORIES}
    user_content = (
        f"Current prompt:\n{version.body}\n\n"
        f"Agreed refinements:\n{render_sections(lists)}"
    )
    messages = [("system", DRAFT_INSTRUCTION), ("user", user_content)]
    raw = gateway.complete(request(messages, label="refine.prompt"))
    body = raw.strip()
    if not body:
        retry = messages + [
            ("assistant", raw),
            ("user", "The prompt was empty. Send the complete replacement prompt text."),
        ]
        body = gateway.complete(request(retry, label="refine.prompt.repair")).strip()
        if not body:
            raise errors.MalformedDraft("refined prompt empty after retry")
    doc = {
        "schema_version": SCHEMA_VERSION,
        "id": store.ids.new("drf"),
        "body": body,
        "based_on_version_id": prompt_version_id,
        "suggestion_set_id": suggestion_set_id,
        "created_at": store.clock.now(),
    }
    store.save_draft(version.project_id, doc)
    return doc


def commit_refinement(store: Store, draft_id: str, edited_body=None) -> PromptVersion:
    draft = store.get_draft(draft_id)
    base = store.get_version(draft["based_on_version_id"])
    suggestions = store.get_suggestions(draft["suggestion_set_id"])
    body = draft["body"] if edited_body is None else edited_body
    transcript_id = suggestions["source_transcript_id"]
    return store.commit_version(
        base.project_id,
        body=body,
        origin="refined",
        parent_id=base.id,
        links={
            "transcript_ids": [transcript_id],
            "annotation_set_ids": [transcript_id],
            "suggestion_set_ids": [suggestions["id"]],
        },
        designer_edited=edited_body is not None and edited_body != draft["body"],
    )
