"""Span annotations over transcripts and their feedback digest.

Designers highlight stretches of utterance text and tag them from a closed
14-tag taxonomy, optionally adding a comment. Contradictory feedback is
allowed and surfaced (never blocked): overlapping spans tagged with an
antonym pair show up in ``detect_conflicts`` and at the bottom of the
digest that feeds the refinement pipeline.

Offsets count Unicode scalar values (plain Python string indices), not
bytes and not grapheme clusters.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import errors
from .store import SCHEMA_VERSION, Store

# Canonical taxonomy order; digests and stored docs list tags in this order.
TAGS = (
    "liked",
    "disliked",
    "necessary",
    "unnecessary",
    "clear",
    "ambiguous",
    "informative",
    "redundant",
    "concise",
    "wordy",
    "on_topic",
    "off_topic",
    "helpful",
    "confusing",
)

_TAG_RANK = {tag: i for i, tag in enumerate(TAGS)}

ANTONYMS = (
    ("liked", "disliked"),
    ("necessary", "unnecessary"),
    ("clear", "ambiguous"),
    ("informative", "redundant"),
    ("concise", "wordy"),
    ("on_topic", "off_topic"),
    ("helpful", "confusing"),
)


def canonical_tags(tags) -> list[str]:
    return sorted(set(tags), key=_TAG_RANK.__getitem__)


@dataclass(frozen=True)
class Span:
    utterance_index: int
    start: int
    end: int


@dataclass
class Annotation:
    id: str
    transcript_id: str
    span: Span
    tags: list[str]  # canonical order
    comment: Optional[str]
    created_at: str

    def sort_key(self):
        # Content before id: renders the same annotation set identically no
        # matter the insertion order or id scheme. The id only breaks full
        # ties, where the rendered entries are indistinguishable anyway.
        return (
            self.span.utterance_index,
            self.span.start,
            self.span.end,
            tuple(self.tags),
            self.comment or "",
            self.id,
        )

    def to_doc(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "id": self.id,
            "transcript_id": self.transcript_id,
            "span": {
                "utterance_index": self.span.utterance_index,
                "start": self.span.start,
                "end": self.span.end,
            },
            "tags": list(self.tags),
            "comment": self.comment,
            "created_at": self.created_at,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "Annotation":
        span = doc["span"]
        return cls(
            id=doc["id"],
            transcript_id=doc["transcript_id"],
            span=Span(span["utterance_index"], span["start"], span["end"]),
            tags=list(doc["tags"]),
            comment=doc.get("comment"),
            created_at=doc["created_at"],
        )


def _utterances(store: Store, transcript_id: str) -> list[dict]:
    return store.get_transcript(transcript_id)["utterances"]


def add_annotation(
    store: Store,
    transcript_id: str,
    span: Span,
    tags,
    comment: Optional[str] = None,
) -> Annotation:
    utterances = _utterances(store, transcript_id)
    if not (0 <= span.utterance_index < len(utterances)):
        raise errors.InvalidSpan(
            f"utterance index {span.utterance_index} out of range 0..{len(utterances) - 1}"
        )
    text = utterances[span.utterance_index]["text"]
    if not (0 <= span.start < span.end <= len(text)):
        raise errors.InvalidSpan(
            f"span [{span.start}, {span.end}) invalid for utterance of length {len(text)}"
        )
    tag_list = list(tags)
    if not tag_list:
        raise errors.EmptyTagSet("at least one tag required")
    for tag in tag_list:
        if tag not in _TAG_RANK:
            raise errors.UnknownTag(f"unknown tag {tag!r}")
    annotation = Annotation(
        id=store.ids.new("ann"),
        transcript_id=transcript_id,
        span=span,
        tags=canonical_tags(tag_list),
        comment=comment,
        created_at=store.clock.now(),
    )
    project_id = store.owner_of(transcript_id)
    with store.lock_for(project_id):
        docs = store.get_annotations(transcript_id)
        docs.append(annotation.to_doc())
        store.save_annotations(transcript_id, docs)
    return annotation


def list_annotations(store: Store, transcript_id: str) -> list[Annotation]:
    return [Annotation.from_doc(d) for d in store.get_annotations(transcript_id)]


def _overlap(a: Span, b: Span) -> bool:
    return a.utterance_index == b.utterance_index and a.start < b.end and b.start < a.end


def _antonyms_between(tags_a, tags_b) -> list[tuple[str, str]]:
    hits = []
    for left, right in ANTONYMS:
        if (left in tags_a and right in tags_b) or (right in tags_a and left in tags_b):
            hits.append((left, right))
    return hits


def detect_conflicts(store: Store, transcript_id: str) -> list[dict]:
    """Unordered annotation pairs with overlapping spans and antonym tags.

    Each pair is reported once, ordered by the digest sort key of its
    members; the pair members themselves are ordered the same way.
    """
    annotations = sorted(list_annotations(store, transcript_id), key=Annotation.sort_key)
    conflicts = []
    for i, a in enumerate(annotations):
        for b in annotations[i + 1 :]:
            if not _overlap(a.span, b.span):
                continue
            hits = _antonyms_between(a.tags, b.tags)
            if not hits:
                continue
            conflicts.append(
                {
                    "a_id": a.id,
                    "b_id": b.id,
                    "utterance_index": a.span.utterance_index,
                    "antonyms": [list(pair) for pair in hits],
                }
            )
    return conflicts


def render_feedback_digest(store: Store, transcript_id: str) -> str:
    """Deterministic plain-text summary of all annotations on one transcript.

    Input text for the refinement pipeline. Ordering is (utterance_index,
    start, end, id) regardless of insertion order, so equal annotation sets
    render byte-identically. The text carries no store ids, so it hashes the
    same no matter which id scheme produced the transcript.
    """
    annotations = sorted(list_annotations(store, transcript_id), key=Annotation.sort_key)
    if not annotations:
        raise errors.NoAnnotations(f"transcript {transcript_id} has no annotations")
    utterances = _utterances(store, transcript_id)
    by_id = {a.id: a for a in annotations}

    lines = ["Designer feedback on the test conversation", ""]
    for n, a in enumerate(annotations, start=1):
        utt = utterances[a.span.utterance_index]
        excerpt = utt["text"][a.span.start : a.span.end]
        lines.append(f'{n}. [utterance {a.span.utterance_index}, {utt["speaker"]}] "{excerpt}"')
        lines.append(f"   tags: {', '.join(a.tags)}")
        if a.comment:
            lines.append(f"   comment: {a.comment}")
    lines.append("")
    conflicts = detect_conflicts(store, transcript_id)
    lines.append(f"Contradictory feedback: {len(conflicts)}")
    for c in conflicts:
        a, b = by_id[c["a_id"]], by_id[c["b_id"]]
        utt_text = utterances[c["utterance_index"]]["text"]
        pairs = "; ".join(f"{x} vs {y}" for x, y in c["antonyms"])
        lines.append(
            f'- {pairs} on utterance {c["utterance_index"]}: '
            f'"{utt_text[a.span.start : a.span.end]}" overlaps '
            f'"{utt_text[b.span.start : b.span.end]}"'
        )
    return "\n".join(lines) + "\n"
