"""Domain errors with stable machine codes.

Every error that can cross the API boundary maps to exactly one frozen
``code`` string and an HTTP status. The CLI and HTTP layer both rely on
these codes; tests assert the full set, so treat the strings as frozen.
"""

from __future__ import annotations


class AceError(Exception):
    """Base class for all domain errors."""

    code = "internal_error"
    http_status = 500

    def __init__(self, message: str = ""):
        super().__init__(message or self.__class__.__name__)
        self.message = message or self.__class__.__name__


# --- lookup / existence -------------------------------------------------

class UnknownProject(AceError):
    code = "unknown_project"
    http_status = 404


class UnknownVersion(AceError):
    code = "unknown_version"
    http_status = 404


class UnknownParent(AceError):
    code = "unknown_parent"
    http_status = 404


class UnknownTranscript(AceError):
    code = "unknown_transcript"
    http_status = 404


class UnknownSession(AceError):
    code = "unknown_session"
    http_status = 404


class UnknownSuggestionSet(AceError):
    code = "unknown_suggestion_set"
    http_status = 404


class UnknownDraft(AceError):
    code = "unknown_draft"
    http_status = 404


# --- history store ------------------------------------------------------

class DuplicateName(AceError):
    code = "duplicate_name"
    http_status = 409


class EmptyName(AceError):
    code = "empty_name"
    http_status = 400


class InvalidRequest(AceError):
    """Structurally bad input: wrong types, unknown enum values, missing fields."""

    code = "invalid_request"
    http_status = 400


class EmptyBody(AceError):
    code = "empty_body"
    http_status = 400


class SecondRoot(AceError):
    code = "second_root"
    http_status = 409


class MissingRootViolation(AceError):
    code = "missing_root"
    http_status = 409


class CrossProjectDiff(AceError):
    code = "cross_project_diff"
    http_status = 400


class StoreError(AceError):
    code = "store_error"
    http_status = 500


# --- annotation engine ---------------------------------------------------

class InvalidSpan(AceError):
    code = "invalid_span"
    http_status = 400


class UnknownTag(AceError):
    code = "unknown_tag"
    http_status = 400


class EmptyTagSet(AceError):
    code = "empty_tag_set"
    http_status = 400


class NoAnnotations(AceError):
    code = "no_annotations"
    http_status = 409


# --- sessions (elicitation + test runs) ----------------------------------

class SessionClosed(AceError):
    """Elicitation session is no longer accepting the requested operation."""

    code = "session_closed"
    http_status = 409


class SessionEnded(AceError):
    """Test session has already ended."""

    code = "session_ended"
    http_status = 409


class SessionAlreadyActive(AceError):
    code = "session_already_active"
    http_status = 409


class TurnInFlight(AceError):
    """A turn is already being processed for this session."""

    code = "turn_in_flight"
    http_status = 409


class EmptyUserText(AceError):
    code = "empty_user_text"
    http_status = 400


class EmptyPrompt(AceError):
    code = "empty_prompt"
    http_status = 400


# --- LLM gateway ----------------------------------------------------------

class ReplayMiss(AceError):
    """Replay mode has no recorded fixture for the request digest."""

    code = "replay_miss"
    http_status = 424

    def __init__(self, digest: str):
        super().__init__(f"no fixture recorded for digest {digest}")
        self.digest = digest


class ProviderError(AceError):
    code = "provider_error"
    http_status = 502

    def __init__(self, message: str, status: int | None = None):
        super().__init__(message)
        self.status = status


class ConfigError(AceError):
    code = "config_error"
    http_status = 500


# --- structured-output parsing after repair retries ----------------------

class MalformedAgentReply(AceError):
    code = "malformed_agent_reply"
    http_status = 502


class MalformedSuggestions(AceError):
    code = "malformed_suggestions"
    http_status = 502


class MalformedDraft(AceError):
    code = "malformed_draft"
    http_status = 502


class JudgeParseError(AceError):
    code = "judge_parse_error"
    http_status = 502


# --- service -------------------------------------------------------------

class BindError(AceError):
    code = "bind_error"
    http_status = 500


#: Frozen set of every stable error code, used by the parity tests and to
#: guard against accidental renames.
ALL_ERROR_CODES = {
    cls.code
    for cls in list(globals().values())
    if isinstance(cls, type) and issubclass(cls, AceError)
}
