"""Versioned store for prompts, transcripts, annotation sets, and suggestions.

Each project owns a branching tree of immutable prompt versions plus the
artifacts produced while testing them. Everything is persisted as one JSON
document per entity under the project directory:

    <root>/projects/<pid>/project.json
    <root>/projects/<pid>/prompts/<version_id>.json
    <root>/projects/<pid>/transcripts/<transcript_id>.json
    <root>/projects/<pid>/annotations/<transcript_id>.json
    <root>/projects/<pid>/suggestions/<suggestion_set_id>.json
    <root>/projects/<pid>/drafts/<draft_id>.json

Documents carry ``schema_version`` (currently "1"). Writes are atomic
(temp file + rename) and commits are serialized per project; reads are
lock-free.
"""

from __future__ import annotations

import difflib
import json
import os
import tempfile
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import errors
from .ids import SystemClock, UuidIds

SCHEMA_VERSION = "1"

ORIGINS = ("elicited", "manual", "refined", "revert")


def write_json_atomic(path: Path, doc: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    data = json.dumps(doc, ensure_ascii=False, indent=2, sort_keys=True) + "\n"
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(data)
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def read_json(path: Path) -> dict:
    return json.loads(path.read_text(encoding="utf-8"))


@dataclass
class Project:
    id: str
    name: str
    brief: str
    created_at: str

    def to_doc(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "id": self.id,
            "name": self.name,
            "brief": self.brief,
            "created_at": self.created_at,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "Project":
        return cls(id=doc["id"], name=doc["name"], brief=doc["brief"], created_at=doc["created_at"])


@dataclass
class PromptVersion:
    id: str
    project_id: str
    parent_id: Optional[str]
    body: str
    origin: str
    designer_edited: bool
    created_at: str
    seq: int  # per-project commit order; "current" = highest seq
    revert_of: Optional[str] = None
    links: dict = field(
        default_factory=lambda: {
            "transcript_ids": [],
            "annotation_set_ids": [],
            "suggestion_set_ids": [],
        }
    )

    def to_doc(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "id": self.id,
            "project_id": self.project_id,
            "parent_id": self.parent_id,
            "body": self.body,
            "origin": self.origin,
            "designer_edited": self.designer_edited,
            "created_at": self.created_at,
            "seq": self.seq,
            "revert_of": self.revert_of,
            "links": self.links,
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "PromptVersion":
        return cls(
            id=doc["id"],
            project_id=doc["project_id"],
            parent_id=doc["parent_id"],
            body=doc["body"],
            origin=doc["origin"],
            designer_edited=doc["designer_edited"],
            created_at=doc["created_at"],
            seq=doc["seq"],
            revert_of=doc.get("revert_of"),
            links=doc.get("links") or {
                "transcript_ids": [], "annotation_set_ids": [], "suggestion_set_ids": []
            },
        )


class Store:
    """File-backed design history for any number of projects.

    Single writer per project (commits and link updates take the project
    lock); cross-project operations are fully concurrent.
    """

    def __init__(self, root: str | Path, clock=None, ids=None):
        self.root = Path(root)
        self.clock = clock or SystemClock()
        self.ids = ids or UuidIds()
        self._projects: dict[str, Project] = {}
        self._versions: dict[str, PromptVersion] = {}
        self._transcripts: dict[str, dict] = {}
        self._annotations: dict[str, list[dict]] = {}  # transcript_id -> annotation docs
        self._suggestions: dict[str, dict] = {}
        self._drafts: dict[str, dict] = {}
        self._owner: dict[str, str] = {}  # any entity id -> project id
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()
        if self.root.exists():
            self._load()

    # -- internals ----------------------------------------------------------

    def _lock(self, project_id: str) -> threading.Lock:
        with self._locks_guard:
            if project_id not in self._locks:
                self._locks[project_id] = threading.Lock()
            return self._locks[project_id]

    def lock_for(self, project_id: str) -> threading.Lock:
        """Project write lock, for callers that batch several writes."""
        return self._lock(project_id)

    def _project_dir(self, project_id: str) -> Path:
        return self.root / "projects" / project_id

    def _load(self) -> None:
        projects_dir = self.root / "projects"
        if not projects_dir.exists():
            return
        for pdir in sorted(projects_dir.iterdir()):
            pj_file = pdir / "project.json"
            if not pj_file.exists():
                continue
            project = Project.from_doc(read_json(pj_file))
            self._projects[project.id] = project
            for vfile in sorted((pdir / "prompts").glob("*.json")) if (pdir / "prompts").exists() else []:
                version = PromptVersion.from_doc(read_json(vfile))
                self._versions[version.id] = version
                self._owner[version.id] = project.id
            for sub, target in (
                ("transcripts", self._transcripts),
                ("suggestions", self._suggestions),
                ("drafts", self._drafts),
            ):
                d = pdir / sub
                if not d.exists():
                    continue
                for f in sorted(d.glob("*.json")):
                    doc = read_json(f)
                    target[doc["id"]] = doc
                    self._owner[doc["id"]] = project.id
            adir = pdir / "annotations"
            if adir.exists():
                for f in sorted(adir.glob("*.json")):
                    doc = read_json(f)
                    self._annotations[doc["transcript_id"]] = doc["annotations"]

    def _require_project(self, project_id: str) -> Project:
        project = self._projects.get(project_id)
        if project is None:
            raise errors.UnknownProject(f"no project {project_id!r}")
        return project

    # -- projects -------------------------------------------------------------

    def create_project(self, name: str, brief: str = "") -> Project:
        if not name.strip():
            raise errors.EmptyName("project name must be non-empty")
        if any(p.name == name for p in self._projects.values()):
            raise errors.DuplicateName(f"project named {name!r} already exists")
        project = Project(
            id=self.ids.new("prj"), name=name, brief=brief, created_at=self.clock.now()
        )
        self._projects[project.id] = project
        write_json_atomic(self._project_dir(project.id) / "project.json", project.to_doc())
        return project

    def get_project(self, project_id: str) -> Project:
        return self._require_project(project_id)

    def list_projects(self) -> list[Project]:
        return sorted(self._projects.values(), key=lambda p: p.id)

    # -- versions ---------------------------------------------------------------

    def versions_of(self, project_id: str) -> list[PromptVersion]:
        self._require_project(project_id)
        versions = [v for v in self._versions.values() if v.project_id == project_id]
        return sorted(versions, key=lambda v: v.seq)

    def current_version(self, project_id: str) -> Optional[PromptVersion]:
        versions = self.versions_of(project_id)
        return versions[-1] if versions else None

    def get_version(self, version_id: str) -> PromptVersion:
        version = self._versions.get(version_id)
        if version is None:
            raise errors.UnknownVersion(f"no prompt version {version_id!r}")
        return version

    def commit_version(
        self,
        project_id: str,
        body: str,
        origin: str,
        parent_id: Optional[str] = None,
        links: Optional[dict] = None,
        designer_edited: bool = False,
        revert_of: Optional[str] = None,
    ) -> PromptVersion:
        self._require_project(project_id)
        if origin not in ORIGINS:
            raise errors.InvalidRequest(f"origin must be one of {ORIGINS}")
        if not body.strip():
            raise errors.EmptyBody("prompt body must be non-empty")
        with self._lock(project_id):
            existing = self.versions_of(project_id)
            if not existing and parent_id is not None:
                raise errors.MissingRootViolation("first commit must have no parent")
            if existing and parent_id is None:
                raise errors.SecondRoot("project already has a root version")
            if parent_id is not None:
                parent = self._versions.get(parent_id)
                if parent is None or parent.project_id != project_id:
                    raise errors.UnknownParent(f"no parent version {parent_id!r} in project")
            merged_links = {
                "transcript_ids": list((links or {}).get("transcript_ids", [])),
                "annotation_set_ids": list((links or {}).get("annotation_set_ids", [])),
                "suggestion_set_ids": list((links or {}).get("suggestion_set_ids", [])),
            }
            version = PromptVersion(
                id=self.ids.new("ver"),
                project_id=project_id,
                parent_id=parent_id,
                body=body,
                origin=origin,
                designer_edited=designer_edited,
                created_at=self.clock.now(),
                seq=(existing[-1].seq + 1) if existing else 1,
                revert_of=revert_of,
                links=merged_links,
            )
            self._versions[version.id] = version
            self._owner[version.id] = project_id
            self._save_version(version)
            return version

    def _save_version(self, version: PromptVersion) -> None:
        path = self._project_dir(version.project_id) / "prompts" / f"{version.id}.json"
        write_json_atomic(path, version.to_doc())

    def revert(self, version_id: str) -> PromptVersion:
        target = self.get_version(version_id)
        leaf = self.current_version(target.project_id)
        assert leaf is not None  # target exists, so the project has versions
        return self.commit_version(
            target.project_id,
            body=target.body,
            origin="revert",
            parent_id=leaf.id,
            revert_of=target.id,
        )

    def get_lineage(self, version_id: str) -> list[PromptVersion]:
        """Root-to-version ancestor path."""
        version = self.get_version(version_id)
        chain = [version]
        while version.parent_id is not None:
            version = self.get_version(version.parent_id)
            chain.append(version)
        chain.reverse()
        return chain

    def link(
        self,
        version_id: str,
        transcript_id: Optional[str] = None,
        annotation_set_id: Optional[str] = None,
        suggestion_set_id: Optional[str] = None,
    ) -> PromptVersion:
        """Attach rationale links to a committed version (bodies stay immutable)."""
        version = self.get_version(version_id)
        with self._lock(version.project_id):
            for key, value in (
                ("transcript_ids", transcript_id),
                ("annotation_set_ids", annotation_set_id),
                ("suggestion_set_ids", suggestion_set_id),
            ):
                if value and value not in version.links[key]:
                    version.links[key].append(value)
            self._save_version(version)
        return version

    def diff(self, version_a: str, version_b: str) -> str:
        a = self.get_version(version_a)
        b = self.get_version(version_b)
        if a.project_id != b.project_id:
            raise errors.CrossProjectDiff("versions belong to different projects")
        lines = difflib.unified_diff(
            a.body.splitlines(),
            b.body.splitlines(),
            fromfile=a.id,
            tofile=b.id,
            lineterm="",
        )
        return "\n".join(lines)

    # -- design cycle projection -----------------------------------------------

    def design_cycles(self, project_id: str) -> list[dict]:
        """Read-only view: one row per version with its tested artifacts."""
        rows = []
        for version in self.versions_of(project_id):
            children = [
                v.id for v in self.versions_of(project_id) if v.parent_id == version.id
            ]
            rows.append(
                {
                    "version_id": version.id,
                    "origin": version.origin,
                    "transcripts": list(version.links["transcript_ids"]),
                    "annotation_sets": list(version.links["annotation_set_ids"]),
                    "suggestion_sets": list(version.links["suggestion_set_ids"]),
                    "children": children,
                }
            )
        return rows

    def cycle_count(self, project_id: str) -> int:
        return sum(
            1 for v in self.versions_of(project_id) if v.links["transcript_ids"]
        )

    # -- transcripts / annotations / suggestions / drafts ------------------------

    def save_transcript(self, project_id: str, doc: dict) -> None:
        self._require_project(project_id)
        self._transcripts[doc["id"]] = doc
        self._owner[doc["id"]] = project_id
        path = self._project_dir(project_id) / "transcripts" / f"{doc['id']}.json"
        write_json_atomic(path, doc)

    def get_transcript(self, transcript_id: str) -> dict:
        doc = self._transcripts.get(transcript_id)
        if doc is None:
            raise errors.UnknownTranscript(f"no transcript {transcript_id!r}")
        return doc

    def owner_of(self, entity_id: str) -> str:
        project_id = self._owner.get(entity_id)
        if project_id is None:
            raise errors.UnknownTranscript(f"no stored entity {entity_id!r}")
        return project_id

    def save_annotations(self, transcript_id: str, annotation_docs: list[dict]) -> None:
        project_id = self.owner_of(transcript_id)
        self._annotations[transcript_id] = annotation_docs
        doc = {
            "schema_version": SCHEMA_VERSION,
            "transcript_id": transcript_id,
            "annotations": annotation_docs,
        }
        path = self._project_dir(project_id) / "annotations" / f"{transcript_id}.json"
        write_json_atomic(path, doc)

    def get_annotations(self, transcript_id: str) -> list[dict]:
        self.get_transcript(transcript_id)  # raises UnknownTranscript
        return list(self._annotations.get(transcript_id, []))

    def save_suggestions(self, project_id: str, doc: dict) -> None:
        self._require_project(project_id)
        self._suggestions[doc["id"]] = doc
        self._owner[doc["id"]] = project_id
        path = self._project_dir(project_id) / "suggestions" / f"{doc['id']}.json"
        write_json_atomic(path, doc)

    def get_suggestions(self, suggestion_set_id: str) -> dict:
        doc = self._suggestions.get(suggestion_set_id)
        if doc is None:
            raise errors.UnknownSuggestionSet(f"no suggestion set {suggestion_set_id!r}")
        return doc

    def save_draft(self, project_id: str, doc: dict) -> None:
        self._require_project(project_id)
        self._drafts[doc["id"]] = doc
        self._owner[doc["id"]] = project_id
        path = self._project_dir(project_id) / "drafts" / f"{doc['id']}.json"
        write_json_atomic(path, doc)

    def get_draft(self, draft_id: str) -> dict:
        doc = self._drafts.get(draft_id)
        if doc is None:
            raise errors.UnknownDraft(f"no draft {draft_id!r}")
        return doc

    # -- integrity ---------------------------------------------------------------

    def validate_project(self, project_id: str) -> None:
        """Raise if graph invariants are broken (acyclic, single root, links resolve)."""
        versions = self.versions_of(project_id)
        roots = [v for v in versions if v.parent_id is None]
        if versions and len(roots) != 1:
            raise errors.StoreError(f"project {project_id} has {len(roots)} roots")
        by_id = {v.id: v for v in versions}
        for version in versions:
            seen = {version.id}
            cursor = version
            while cursor.parent_id is not None:
                if cursor.parent_id in seen:
                    raise errors.StoreError("cycle detected in version graph")
                cursor = by_id[cursor.parent_id]
                seen.add(cursor.id)
            if version.revert_of is not None:
                if version.revert_of not in by_id:
                    raise errors.StoreError("revert_of does not resolve")
                if by_id[version.revert_of].body != version.body:
                    raise errors.StoreError("revert body differs from target")
            for tid in version.links["transcript_ids"]:
                if tid not in self._transcripts:
                    raise errors.StoreError(f"dangling transcript link {tid}")
            for aid in version.links["annotation_set_ids"]:
                if aid not in self._annotations:
                    raise errors.StoreError(f"dangling annotation link {aid}")
            for sid in version.links["suggestion_set_ids"]:
                if sid not in self._suggestions:
                    raise errors.StoreError(f"dangling suggestion link {sid}")
