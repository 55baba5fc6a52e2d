"""Test sessions: run a prompt version as the simulated robot.

The designer's behavior prompt is composed with a fixed robot-compatibility
block (``assets/robot_compat_prompt.txt``) instructing the model to reply
as a JSON array of speech segments, each tagged with a facial expression
and head position from closed banks. Parsing is strict; a bad reply gets up
to two machine-readable repair re-asks, after which the raw text is kept as
one fallback segment so persisted transcripts are always bank-valid.

Idle behaviors (breathing, blinking) are ambient: they attach to the
session as metadata, never to individual segments.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import errors
from .gateway import CONVERSATION_TEMPERATURE, LLMGateway, request
from .store import SCHEMA_VERSION, Store

FACIAL_BANK = ("happy", "satisfied", "excited", "interested", "surprised", "thinking")
HEAD_BANK = ("left_gaze", "right_gaze", "look_at_screen", "left_nod", "right_nod", "thinking")
IDLE_BEHAVIORS = ("breathing", "blinking")

FALLBACK_FACIAL = "interested"
FALLBACK_HEAD = "look_at_screen"

SEGMENT_KEYS = {"speech", "facial_expression", "head_position"}

COMPAT_BLOCK = (Path(__file__).parent / "assets" / "robot_compat_prompt.txt").read_text(
    encoding="utf-8"
)

MAX_GATEWAY_CALLS_PER_TURN = 3  # one ask plus at most two repairs


def compose_effective_prompt(behavior_prompt: str) -> str:
    if not behavior_prompt.strip():
        raise errors.EmptyPrompt("behavior prompt must be non-empty")
    return behavior_prompt + "\n\n" + COMPAT_BLOCK


@dataclass(frozen=True)
class RobotSegment:
    speech: str
    facial_expression: str
    head_position: str

    def to_doc(self) -> dict:
        return {
            "speech": self.speech,
            "facial_expression": self.facial_expression,
            "head_position": self.head_position,
        }


def parse_segments(reply: str):
    """Strictly parse a robot reply into segments.

    Returns (segments, None) on success or (None, violation) where the
    violation string quotes the first problem found.
    """
    try:
        doc = json.loads(reply)
    except ValueError as exc:
        return None, f"reply is not valid JSON: {exc}"
    if not isinstance(doc, list) or not doc:
        return None, "reply must be a non-empty JSON array of segment objects"
    segments = []
    for i, item in enumerate(doc):
        if not isinstance(item, dict):
            return None, f"segment {i} is not an object"
        keys = set(item)
        if keys != SEGMENT_KEYS:
            extra = sorted(keys - SEGMENT_KEYS)
            missing = sorted(SEGMENT_KEYS - keys)
            detail = []
            if missing:
                detail.append(f"missing keys {missing}")
            if extra:
                detail.append(f"unexpected keys {extra}")
            return None, f"segment {i}: {' and '.join(detail)}"
        speech = item["speech"]
        if not isinstance(speech, str) or not speech.strip():
            return None, f"segment {i}: speech must be non-empty text"
        if "\n" in speech or "\r" in speech:
            return None, f"segment {i}: speech contains a line break"
        facial = item["facial_expression"]
        if facial not in FACIAL_BANK:
            return None, f"segment {i}: facial_expression {facial!r} not in bank"
        head = item["head_position"]
        if head not in HEAD_BANK:
            return None, f"segment {i}: head_position {head!r} not in bank"
        segments.append(RobotSegment(speech, facial, head))
    return segments, None


def repair_message(violation: str) -> str:
    return json.dumps(
        {
            "error": "invalid_robot_reply",
            "violation": violation,
            "instruction": (
                "Resend your last answer as only a JSON array of objects with "
                "exactly the keys speech, facial_expression, head_position, "
                "using only the vocabulary tokens from the system prompt."
            ),
        },
        sort_keys=True,
    )


def fallback_segments(reply: str) -> list[RobotSegment]:
    speech = " ".join(reply.split()) or "..."
    return [RobotSegment(speech, FALLBACK_FACIAL, FALLBACK_HEAD)]


@dataclass
class TestSession:
    id: str
    project_id: str
    prompt_version_id: str
    effective_prompt: str
    started_at: str
    status: str = "active"  # active | ended
    utterances: list = field(default_factory=list)
    raw_replies: list = field(default_factory=list)  # provider text, for chat history
    turn_lock: threading.Lock = field(default_factory=threading.Lock)

    def to_doc(self) -> dict:
        return {
            "id": self.id,
            "project_id": self.project_id,
            "prompt_version_id": self.prompt_version_id,
            "status": self.status,
            "utterances": list(self.utterances),
        }


class Runtime:
    """Owns live test sessions; one active session per project."""

    def __init__(self, store: Store, gateway: LLMGateway):
        self.store = store
        self.gateway = gateway
        self.sessions: dict[str, TestSession] = {}
        self._guard = threading.Lock()

    def _history_messages(self, session: TestSession) -> list[tuple[str, str]]:
        messages = [("system", session.effective_prompt)]
        reply_iter = iter(session.raw_replies)
        for utt in session.utterances:
            if utt["speaker"] == "user":
                messages.append(("user", utt["text"]))
            else:
                messages.append(("assistant", next(reply_iter)))
        return messages

    def _log(self, session: TestSession, speaker: str, text: str, segments) -> dict:
        utterance = {
            "index": len(session.utterances),
            "speaker": speaker,
            "text": text,
            "segments": [s.to_doc() for s in segments],
            "timestamp": self.store.clock.now(),
        }
        session.utterances.append(utterance)
        return utterance

    def start_session(self, prompt_version_id: str) -> TestSession:
        version = self.store.get_version(prompt_version_id)
        effective = compose_effective_prompt(version.body)
        with self._guard:
            for other in self.sessions.values():
                if other.project_id == version.project_id and other.status == "active":
                    raise errors.SessionAlreadyActive(
                        f"project {version.project_id} already has active session {other.id}"
                    )
            session = TestSession(
                id=self.store.ids.new("ses"),
                project_id=version.project_id,
                prompt_version_id=prompt_version_id,
                effective_prompt=effective,
                started_at=self.store.clock.now(),
            )
            self.sessions[session.id] = session
        greeting = self.gateway.complete(
            request(
                [("system", effective)],
                temperature=CONVERSATION_TEMPERATURE,
                label="chat.greeting",
            )
        )
        segments, violation = parse_segments(greeting)
        if violation is not None:
            segments = fallback_segments(greeting)
        session.raw_replies.append(greeting)
        self._log(session, "robot", " ".join(s.speech for s in segments), segments)
        return session

    def get_session(self, session_id: str) -> TestSession:
        session = self.sessions.get(session_id)
        if session is None:
            raise errors.UnknownSession(f"no test session {session_id!r}")
        return session

    def user_turn(self, session_id: str, text: str) -> dict:
        session = self.get_session(session_id)
        if session.status != "active":
            raise errors.SessionEnded(f"session {session_id} already ended")
        if not text.strip():
            raise errors.EmptyUserText("user turn text must be non-empty")
        if not session.turn_lock.acquire(blocking=False):
            raise errors.TurnInFlight(f"session {session_id} has a turn in flight")
        try:
            base = self._history_messages(session) + [("user", text)]
            self._log(session, "user", text, [])
            asked = list(base)
            reply = ""
            segments = None
            for attempt in range(MAX_GATEWAY_CALLS_PER_TURN):
                reply = self.gateway.complete(
                    request(
                        asked,
                        temperature=CONVERSATION_TEMPERATURE,
                        label="chat.turn" if attempt == 0 else "chat.turn.repair",
                    )
                )
                segments, violation = parse_segments(reply)
                if violation is None:
                    break
                segments = None
                asked = asked + [("assistant", reply), ("user", repair_message(violation))]
            if segments is None:
                segments = fallback_segments(reply)
            session.raw_replies.append(reply)
            return self._log(session, "robot", " ".join(s.speech for s in segments), segments)
        finally:
            session.turn_lock.release()

    def end_session(self, session_id: str) -> dict:
        session = self.get_session(session_id)
        if session.status != "active":
            raise errors.SessionEnded(f"session {session_id} already ended")
        session.status = "ended"
        transcript = {
            "schema_version": SCHEMA_VERSION,
            "id": self.store.ids.new("tr"),
            "project_id": session.project_id,
            "prompt_version_id": session.prompt_version_id,
            "started_at": session.started_at,
            "ended_at": self.store.clock.now(),
            "idle_behaviors": list(IDLE_BEHAVIORS),
            "utterances": list(session.utterances),
        }
        self.store.save_transcript(session.project_id, transcript)
        self.store.link(session.prompt_version_id, transcript_id=transcript["id"])
        return transcript


def render_transcript_text(transcript: dict) -> str:
    """Speaker-labeled plain text, the LLM-facing view of a transcript."""
    return "\n".join(f'{u["speaker"]}: {u["text"]}' for u in transcript["utterances"])
