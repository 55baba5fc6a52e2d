"""One object wiring the whole design loop; the CLI and HTTP layer are
thin shells over it.

Elicitation and test sessions are process-local; everything else lives in
the store. Injecting a fixed clock and sequential ids makes a full loop
byte-reproducible under replay.
"""

from __future__ import annotations

from typing import Optional

from . import analyzer, annotations, errors, refinement
from .annotations import Span
from .config import Config
from .elicitation import Elicitor
from .gateway import LLMGateway
from .runtime import Runtime
from .store import PromptVersion, Store


class Engine:
    def __init__(self, store: Store, gateway: LLMGateway):
        self.store = store
        self.gateway = gateway
        self.elicitor = Elicitor(store, gateway)
        self.runtime = Runtime(store, gateway)

    @classmethod
    def from_config(cls, config: Config, clock=None, ids=None, transport=None) -> "Engine":
        store = Store(config.store_path, clock=clock, ids=ids)
        gateway = LLMGateway(
            mode=config.mode,
            fixtures_dir=config.fixtures_dir,
            base_url=config.base_url,
            api_key=config.api_key,
            model=config.model,
            transport=transport,
            clock=clock,
        )
        return cls(store, gateway)

    # -- projects and versions ----------------------------------------------

    def create_project(self, name: str, brief: str = ""):
        return self.store.create_project(name, brief)

    def commit_version(
        self,
        project_id: str,
        body: str,
        origin: str = "manual",
        parent_id: Optional[str] = None,
    ) -> PromptVersion:
        return self.store.commit_version(project_id, body, origin, parent_id=parent_id)

    def revert(self, version_id: str) -> PromptVersion:
        return self.store.revert(version_id)

    def lineage(self, version_id: str) -> list[PromptVersion]:
        return self.store.get_lineage(version_id)

    def diff(self, version_a: str, version_b: str) -> str:
        return self.store.diff(version_a, version_b)

    # -- elicitation -----------------------------------------------------------

    def start_elicitation(self, project_id: str):
        return self.elicitor.start_elicitation(project_id)

    def elicitation_message(self, session_id: str, text: str) -> str:
        return self.elicitor.designer_message(session_id, text)

    def elicitation_finalize(self, session_id: str) -> str:
        return self.elicitor.finalize(session_id)

    def abandon_elicitation(self, session_id: str) -> None:
        session = self.elicitor.get_session(session_id)
        if session.status in ("active", "drafting"):
            session.status = "abandoned"

    # -- test sessions ------------------------------------------------------------

    def start_session(self, prompt_version_id: str):
        return self.runtime.start_session(prompt_version_id)

    def user_turn(self, session_id: str, text: str) -> dict:
        return self.runtime.user_turn(session_id, text)

    def end_session(self, session_id: str) -> dict:
        return self.runtime.end_session(session_id)

    # -- annotations -----------------------------------------------------------------

    def add_annotation(
        self,
        transcript_id: str,
        utterance_index: int,
        start: int,
        end: int,
        tags,
        comment: Optional[str] = None,
    ):
        span = Span(utterance_index, start, end)
        return annotations.add_annotation(self.store, transcript_id, span, tags, comment)

    def list_annotations(self, transcript_id: str) -> list[dict]:
        return self.store.get_annotations(transcript_id)

    def conflicts(self, transcript_id: str) -> list[dict]:
        return annotations.detect_conflicts(self.store, transcript_id)

    def feedback_digest(self, transcript_id: str) -> str:
        return annotations.render_feedback_digest(self.store, transcript_id)

    # -- refinement ----------------------------------------------------------------------

    def generate_suggestions(self, prompt_version_id: str, transcript_id: str) -> dict:
        return refinement.generate_suggestions(
            self.store, self.gateway, prompt_version_id, transcript_id
        )

    def edit_suggestions(self, suggestion_set_id: str, edits: dict) -> dict:
        return refinement.edit_suggestions(self.store, suggestion_set_id, edits)

    def generate_refined_prompt(
        self, prompt_version_id: str, suggestion_set_id: str
    ) -> dict:
        return refinement.generate_refined_prompt(
            self.store, self.gateway, prompt_version_id, suggestion_set_id
        )

    def commit_refinement(
        self, draft_id: str, edited_body: Optional[str] = None
    ) -> PromptVersion:
        return refinement.commit_refinement(self.store, draft_id, edited_body)

    # -- analysis ----------------------------------------------------------------------------

    def analyze_text(self, body: str, mode: str = "heuristic") -> dict:
        if mode not in ("heuristic", "judge"):
            raise errors.InvalidRequest(f"mode must be heuristic or judge, got {mode!r}")
        return analyzer.analyze(body, mode=mode, gateway=self.gateway).to_doc()

    def analyze_version(self, version_id: str, mode: str = "heuristic") -> dict:
        version = self.store.get_version(version_id)
        report = self.analyze_text(version.body, mode=mode)
        report["version_id"] = version_id
        return report
