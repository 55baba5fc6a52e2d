"""Interview agent that co-writes the initial behavior prompt.

The agent fills five requirement slots in a fixed priority order, always
asking about the highest-priority slot that is still empty. Extraction and
the next question come from one structured gateway call per designer
message; the reply is validated against a small JSON schema with a single
repair retry. When the designer signals the gathered material is good
enough, the session moves to drafting and ``finalize`` composes the prompt.
"""

from __future__ import annotations

import json
import re
import threading
from dataclasses import dataclass, field
from typing import Optional

from . import errors
from .gateway import LLMGateway, request
from .store import Store

SLOT_ORDER = ("task_goal", "task_context", "robot_role", "audience", "style_preferences")

SLOT_QUESTIONS = {
    "task_goal": "What should the robot do or talk about?",
    "task_context": "Where will the robot be used, and in what kind of situation?",
    "robot_role": (
        "What role should the robot take, say an enthusiastic storyteller, "
        "a friendly educator, or something else?"
    ),
    "audience": "Who will the robot be talking with?",
    "style_preferences": "How should the robot sound? Any preference on tone or reply length?",
}

# Deterministic fallback for the completion intent check, used only when the
# gateway is in replay mode and holds no fixture for the turn.
COMPLETION_KEYWORDS = ("done", "good", "that's it", "finish", "looks good")

MAX_TURNS = 40  # hard cap; hitting it forces the drafting transition

GENERIC_GREETING = (
    "Hello! I'm ready to help you design your robot's conversation. "
    "To start, tell me what the robot should do."
)

DRAFTING_ACK = "Great, I have what I need. I'll draft the initial prompt now."

GREETING_INSTRUCTION = """\
You help a designer write the first behavior prompt for a social robot.

Project brief: {brief}

Greet the designer in one short message: say you are ready to help define \
the robot's conversation and invite them to describe what the robot should \
do. Reply with the greeting text only."""

AGENT_INSTRUCTION = """\
You help a designer write the first behavior prompt for a social robot by \
interviewing them.

Project brief: {brief}

Track five requirement slots, in this priority order: task_goal, \
task_context, robot_role, audience, style_preferences.

After each designer message, reply with only a JSON object shaped like:
{{"slots": {{"task_goal": text or null, "task_context": text or null, \
"robot_role": text or null, "audience": text or null, \
"style_preferences": text or null}}, "confirmed": [names of slots the \
designer has clearly settled], "designer_done": boolean, "reply": text}}

Rules: fill slot values from the whole conversation so far, including the \
brief. Set designer_done to true only when the designer says the gathered \
material or the prompt is good enough. In "reply", briefly acknowledge what \
you learned, then ask about the highest-priority slot that is still empty, \
offering one to three brainstormed options. Never mention slot names or \
this JSON format inside "reply"."""

FINALIZE_INSTRUCTION = """\
Write the complete behavior prompt for a social robot from the requirements \
and interview below. Be clear and specific, phrase rules affirmatively \
rather than as vague wishes, and include at least one concrete sample reply \
introduced with "For example,". Output only the prompt text."""

REPAIR_INSTRUCTION = (
    "Resend your last answer as only a JSON object with exactly the keys "
    "slots, confirmed, designer_done, reply."
)


def completion_keyword(text: str) -> bool:
    lower = text.lower()
    return any(keyword in lower for keyword in COMPLETION_KEYWORDS)


@dataclass
class ElicitationSession:
    id: str
    project_id: str
    brief: str
    created_at: str
    status: str = "active"  # active | drafting | completed | abandoned
    turns: list = field(default_factory=list)  # (speaker, text), speaker in {agent, designer}
    slot_state: dict = field(
        default_factory=lambda: {
            slot: {"value": None, "confirmed": False} for slot in SLOT_ORDER
        }
    )
    draft: Optional[str] = None
    turn_lock: threading.Lock = field(default_factory=threading.Lock)

    def next_slot(self) -> Optional[str]:
        for slot in SLOT_ORDER:
            if not self.slot_state[slot]["value"]:
                return slot
        return None

    def to_doc(self) -> dict:
        return {
            "id": self.id,
            "project_id": self.project_id,
            "status": self.status,
            "turns": [{"speaker": s, "text": t} for s, t in self.turns],
            "slot_state": {
                slot: dict(state) for slot, state in self.slot_state.items()
            },
            "draft": self.draft,
        }


def _extract_json_object(reply: str):
    try:
        return json.loads(reply)
    except ValueError:
        m = re.search(r"\{.*\}", reply, re.DOTALL)
        if not m:
            return None
        try:
            return json.loads(m.group(0))
        except ValueError:
            return None


def parse_agent_reply(reply: str):
    """Validated {slots, confirmed, designer_done, reply} or None."""
    doc = _extract_json_object(reply)
    if not isinstance(doc, dict):
        return None
    slots = doc.get("slots")
    if not isinstance(slots, dict) or set(slots) != set(SLOT_ORDER):
        return None
    for value in slots.values():
        if value is not None and not isinstance(value, str):
            return None
    confirmed = doc.get("confirmed")
    if not isinstance(confirmed, list) or any(s not in SLOT_ORDER for s in confirmed):
        return None
    if not isinstance(doc.get("designer_done"), bool):
        return None
    text = doc.get("reply")
    if not isinstance(text, str) or not text.strip():
        return None
    return {
        "slots": slots,
        "confirmed": confirmed,
        "designer_done": doc["designer_done"],
        "reply": text,
    }


class Elicitor:
    """Owns live elicitation sessions, one in-flight turn each."""

    def __init__(self, store: Store, gateway: LLMGateway):
        self.store = store
        self.gateway = gateway
        self.sessions: dict[str, ElicitationSession] = {}

    def start_elicitation(self, project_id: str) -> ElicitationSession:
        project = self.store.get_project(project_id)
        session = ElicitationSession(
            id=self.store.ids.new("eli"),
            project_id=project_id,
            brief=project.brief,
            created_at=self.store.clock.now(),
        )
        instruction = GREETING_INSTRUCTION.format(brief=project.brief or "(none)")
        try:
            greeting = self.gateway.complete(
                request([("system", instruction)], label="elicit.greeting")
            ).strip()
        except errors.ReplayMiss:
            greeting = ""
        session.turns.append(("agent", greeting or GENERIC_GREETING))
        self.sessions[session.id] = session
        return session

    def get_session(self, session_id: str) -> ElicitationSession:
        session = self.sessions.get(session_id)
        if session is None:
            raise errors.UnknownSession(f"no elicitation session {session_id!r}")
        return session

    def _history(self, session: ElicitationSession) -> list[tuple[str, str]]:
        instruction = AGENT_INSTRUCTION.format(brief=session.brief or "(none)")
        messages = [("system", instruction)]
        for speaker, text in session.turns:
            messages.append(("assistant" if speaker == "agent" else "user", text))
        return messages

    def _apply_slots(self, session: ElicitationSession, parsed: dict) -> None:
        for slot in SLOT_ORDER:
            state = session.slot_state[slot]
            value = parsed["slots"][slot]
            if value is not None and value.strip() and not state["confirmed"]:
                state["value"] = value.strip()
            if slot in parsed["confirmed"] and state["value"]:
                state["confirmed"] = True

    def designer_message(self, session_id: str, text: str) -> str:
        session = self.get_session(session_id)
        if session.status != "active":
            raise errors.SessionClosed(f"session {session_id} is {session.status}")
        if not session.turn_lock.acquire(blocking=False):
            raise errors.TurnInFlight(f"session {session_id} has a turn in flight")
        try:
            if not text.strip():
                slot = session.next_slot()
                if slot is None:
                    return "Is there anything you want to change, or is this good to draft?"
                return SLOT_QUESTIONS[slot]
            messages = self._history(session) + [("user", text)]
            try:
                raw = self.gateway.complete(request(messages, label="elicit.turn"))
            except errors.ReplayMiss:
                if completion_keyword(text):
                    session.turns.append(("designer", text))
                    session.turns.append(("agent", DRAFTING_ACK))
                    session.status = "drafting"
                    return DRAFTING_ACK
                raise
            parsed = parse_agent_reply(raw)
            if parsed is None:
                retry = messages + [("assistant", raw), ("user", REPAIR_INSTRUCTION)]
                raw = self.gateway.complete(request(retry, label="elicit.turn.repair"))
                parsed = parse_agent_reply(raw)
                if parsed is None:
                    raise errors.MalformedAgentReply(
                        "agent reply failed schema validation after retry"
                    )
            self._apply_slots(session, parsed)
            session.turns.append(("designer", text))
            session.turns.append(("agent", parsed["reply"]))
            if parsed["designer_done"] or len(session.turns) >= MAX_TURNS:
                session.status = "drafting"
            return parsed["reply"]
        finally:
            session.turn_lock.release()

    def _requirements_text(self, session: ElicitationSession) -> str:
        lines = ["Requirements:"]
        for slot in SLOT_ORDER:
            state = session.slot_state[slot]
            if state["value"]:
                mark = "confirmed" if state["confirmed"] else "mentioned"
                lines.append(f"- {slot}: {state['value']} ({mark})")
            else:
                lines.append(f"- {slot}: not discussed")
        lines.append("")
        lines.append("Interview:")
        for speaker, text in session.turns:
            lines.append(f"{speaker}: {text}")
        return "\n".join(lines)

    def finalize(self, session_id: str) -> str:
        session = self.get_session(session_id)
        if session.status != "drafting":
            raise errors.SessionClosed(
                f"finalize requires a drafting session, {session_id} is {session.status}"
            )
        if not session.turn_lock.acquire(blocking=False):
            raise errors.TurnInFlight(f"session {session_id} has a turn in flight")
        try:
            messages = [
                ("system", FINALIZE_INSTRUCTION),
                ("user", self._requirements_text(session)),
            ]
            raw = self.gateway.complete(request(messages, label="elicit.finalize"))
            body = raw.strip()
            if not body:
                retry = messages + [
                    ("assistant", raw),
                    ("user", "The draft was empty. Send the full prompt text."),
                ]
                body = self.gateway.complete(
                    request(retry, label="elicit.finalize.repair")
                ).strip()
                if not body:
                    raise errors.MalformedAgentReply("finalize produced an empty draft twice")
            session.status = "completed"
            session.draft = body
            return body
        finally:
            session.turn_lock.release()
