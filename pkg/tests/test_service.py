import json

import pytest
from fastapi.testclient import TestClient

from ace import errors
from ace.elicitation import SLOT_ORDER
from ace.engine import Engine
from ace.ids import FixedClock, SequentialIds
from ace.service import check_store_writable, create_app
from ace.store import Store

PROMPT = "You are a museum robot. Share fun space facts with kids."


class FakeGateway:
    def __init__(self):
        self.replies = []

    def push(self, *replies):
        self.replies.extend(replies)

    def complete(self, req):
        item = self.replies.pop(0)
        if isinstance(item, Exception):
            raise item
        return item


def robot_reply(*speeches):
    return json.dumps(
        [{"speech": s, "facial_expression": "happy", "head_position": "left_nod"}
         for s in speeches]
    )


def agent_reply(reply="Next question.", done=False, **slots):
    return json.dumps({
        "slots": {slot: slots.get(slot) for slot in SLOT_ORDER},
        "confirmed": [],
        "designer_done": done,
        "reply": reply,
    })


SECTIONS = """\
Essential Behaviors to Maintain
- Keep the greeting.
Behaviors to Reduce or Avoid
- Avoid rambling.
Positive Engagement Cues
- Kids liked the moon fact.
Recommended Adjustments
- Add an example about Saturn.
"""


@pytest.fixture()
def world(tmp_path):
    store = Store(tmp_path / "store", clock=FixedClock(), ids=SequentialIds())
    gateway = FakeGateway()
    engine = Engine(store, gateway)
    client = TestClient(create_app(engine))
    return client, gateway, engine


def make_project(client, name="museum"):
    return client.post("/projects", json={"name": name, "brief": "space facts"}).json()


def make_version(client, project_id, body=PROMPT, parent_id=None):
    payload = {"body": body}
    if parent_id:
        payload["parent_id"] = parent_id
    return client.post(f"/projects/{project_id}/versions", json=payload).json()


def run_session(client, gateway, project_id, version_id, turns=("hi",)):
    gateway.push(robot_reply("Welcome!"))
    session = client.post(f"/projects/{project_id}/sessions",
                          json={"prompt_version_id": version_id}).json()
    for text in turns:
        gateway.push(robot_reply(f"Fact about {text}."))
        client.post(f"/sessions/{session['id']}/turns", json={"text": text})
    return client.post(f"/sessions/{session['id']}/end").json()


def annotate(client, transcript_id, utterance_index=0, start=0, end=5, tags=("liked",)):
    return client.post(
        f"/transcripts/{transcript_id}/annotations",
        json={"span": {"utterance_index": utterance_index, "start": start, "end": end},
              "tags": list(tags)},
    )


def test_healthz(world):
    client, _, _ = world
    response = client.get("/healthz")
    assert response.status_code == 200
    assert response.json() == {"status": "ok"}


def test_project_crud(world):
    client, _, _ = world
    created = make_project(client)
    assert created["name"] == "museum"
    assert client.get(f"/projects/{created['id']}").json() == created
    listing = client.get("/projects").json()
    assert [p["id"] for p in listing] == [created["id"]]
    dup = client.post("/projects", json={"name": "museum"})
    assert dup.status_code == 409
    assert dup.json()["error"]["code"] == "duplicate_name"


def test_error_shape_and_codes(world):
    client, _, _ = world
    missing = client.get("/projects/prj-none")
    assert missing.status_code == 404
    assert set(missing.json()["error"]) == {"code", "message"}
    assert missing.json()["error"]["code"] == "unknown_project"

    bad_body = client.post("/projects", json={"brief": "no name"})
    assert bad_body.status_code == 400
    assert bad_body.json()["error"]["code"] == "invalid_request"

    not_json = client.post("/projects", content=b"name=x",
                           headers={"content-type": "application/json"})
    assert not_json.status_code == 400
    assert not_json.json()["error"]["code"] == "invalid_request"


def test_version_endpoints(world):
    client, _, _ = world
    project = make_project(client)
    v1 = make_version(client, project["id"])
    v2 = make_version(client, project["id"], body=PROMPT + "\nBe brief.",
                      parent_id=v1["id"])
    assert client.get(f"/versions/{v1['id']}").json() == v1
    listing = client.get(f"/projects/{project['id']}/versions").json()
    assert [v["id"] for v in listing] == [v1["id"], v2["id"]]

    lineage = client.get(f"/versions/{v2['id']}/lineage").json()
    assert [v["id"] for v in lineage] == [v1["id"], v2["id"]]

    diff = client.get(f"/versions/{v1['id']}/diff/{v2['id']}").json()["diff"]
    assert "+Be brief." in diff

    reverted = client.post(f"/versions/{v1['id']}/revert").json()
    assert reverted["origin"] == "revert"
    assert reverted["revert_of"] == v1["id"]
    assert reverted["body"] == v1["body"]

    second_root = client.post(f"/projects/{project['id']}/versions",
                              json={"body": "rogue"})
    assert second_root.status_code == 409
    assert second_root.json()["error"]["code"] == "second_root"


def test_analysis_endpoint(world):
    client, _, _ = world
    project = make_project(client)
    version = make_version(client, project["id"])
    report = client.get(f"/versions/{version['id']}/analysis").json()
    assert report["version_id"] == version["id"]
    assert report["mode"] == "heuristic"
    assert report["clarity"]["score"] >= 2
    bad = client.get(f"/versions/{version['id']}/analysis?mode=vibes")
    assert bad.status_code == 400
    assert bad.json()["error"]["code"] == "invalid_request"


def test_elicitation_flow(world):
    client, gateway, _ = world
    project = make_project(client)
    gateway.push("Hello! What should your robot do?")
    session = client.post(f"/projects/{project['id']}/elicitation").json()
    assert session["status"] == "active"
    assert session["turns"][0]["speaker"] == "agent"

    gateway.push(agent_reply(task_goal="share space facts", done=True))
    response = client.post(
        f"/projects/{project['id']}/elicitation/{session['id']}/messages",
        json={"text": "share space facts, that's it"},
    ).json()
    assert response["session"]["status"] == "drafting"
    assert response["session"]["slot_state"]["task_goal"]["value"] == "share space facts"

    gateway.push(PROMPT)
    final = client.post(
        f"/projects/{project['id']}/elicitation/{session['id']}/finalize"
    ).json()
    assert final["draft"] == PROMPT
    assert final["session"]["status"] == "completed"

    closed = client.post(
        f"/projects/{project['id']}/elicitation/{session['id']}/messages",
        json={"text": "more"},
    )
    assert closed.status_code == 409
    assert closed.json()["error"]["code"] == "session_closed"


def test_session_and_transcript_flow(world):
    client, gateway, _ = world
    project = make_project(client)
    version = make_version(client, project["id"])

    gateway.push(robot_reply("Welcome to the museum!"))
    session = client.post(f"/projects/{project['id']}/sessions",
                          json={"prompt_version_id": version["id"]}).json()
    assert session["status"] == "active"
    assert session["utterances"][0]["speaker"] == "robot"

    gateway.push(robot_reply("The moon is dusty.", "Want more?"))
    turn = client.post(f"/sessions/{session['id']}/turns",
                       json={"text": "tell me about the moon"}).json()
    assert turn["utterance"]["text"] == "The moon is dusty. Want more?"

    transcript = client.post(f"/sessions/{session['id']}/end").json()
    assert transcript["prompt_version_id"] == version["id"]
    fetched = client.get(f"/transcripts/{transcript['id']}").json()
    assert fetched == transcript

    ended = client.post(f"/sessions/{session['id']}/turns", json={"text": "hi"})
    assert ended.status_code == 409
    assert ended.json()["error"]["code"] == "session_ended"

    cycles = client.get(f"/projects/{project['id']}/cycles").json()
    assert len(cycles) == 1
    assert cycles[0]["transcripts"] == [transcript["id"]]


def test_session_rejects_foreign_version(world):
    client, gateway, _ = world
    project_a = make_project(client, "a")
    project_b = make_project(client, "b")
    version_b = make_version(client, project_b["id"])
    response = client.post(f"/projects/{project_a['id']}/sessions",
                           json={"prompt_version_id": version_b["id"]})
    assert response.status_code == 404
    assert response.json()["error"]["code"] == "unknown_version"


def test_annotation_endpoints(world):
    client, gateway, _ = world
    project = make_project(client)
    version = make_version(client, project["id"])
    transcript = run_session(client, gateway, project["id"], version["id"])

    created = annotate(client, transcript["id"], end=7, tags=("liked", "clear"))
    assert created.status_code == 200
    assert created.json()["tags"] == ["liked", "clear"]

    overlapping = annotate(client, transcript["id"], start=3, end=8,
                           tags=("ambiguous",))
    assert overlapping.status_code == 200

    listing = client.get(f"/transcripts/{transcript['id']}/annotations").json()
    assert len(listing) == 2

    conflicts = client.get(f"/transcripts/{transcript['id']}/conflicts").json()
    assert len(conflicts) == 1
    assert conflicts[0]["antonyms"] == [["clear", "ambiguous"]]

    digest = client.get(f"/transcripts/{transcript['id']}/digest").json()["digest"]
    assert digest.startswith("Designer feedback on the test conversation")

    bad_span = annotate(client, transcript["id"], start=5, end=5)
    assert bad_span.status_code == 400
    assert bad_span.json()["error"]["code"] == "invalid_span"

    bad_tag = annotate(client, transcript["id"], tags=("polite",))
    assert bad_tag.status_code == 400
    assert bad_tag.json()["error"]["code"] == "unknown_tag"

    bad_types = client.post(
        f"/transcripts/{transcript['id']}/annotations",
        json={"span": {"utterance_index": "0", "start": 0, "end": 3},
              "tags": ["liked"]},
    )
    assert bad_types.status_code == 400
    assert bad_types.json()["error"]["code"] == "invalid_request"


def test_refinement_endpoints(world):
    client, gateway, _ = world
    project = make_project(client)
    version = make_version(client, project["id"])
    transcript = run_session(client, gateway, project["id"], version["id"])
    annotate(client, transcript["id"])

    no_annotations_yet = client.post(
        f"/versions/{version['id']}/suggestions",
        json={"transcript_id": "tr-none"},
    )
    assert no_annotations_yet.status_code == 404

    gateway.push(SECTIONS)
    suggestions = client.post(
        f"/versions/{version['id']}/suggestions",
        json={"transcript_id": transcript["id"]},
    ).json()
    assert suggestions["maintain"] == ["Keep the greeting."]
    assert client.get(f"/suggestions/{suggestions['id']}").json() == suggestions

    edited = client.post(
        f"/suggestions/{suggestions['id']}/edit",
        json={"edits": {"adjustments": ["Mention Saturn's rings."]}},
    ).json()
    assert edited["designer_edited"] is True
    assert edited["id"] != suggestions["id"]

    gateway.push(PROMPT + "\nFor example, mention Saturn's rings.")
    draft = client.post(
        f"/versions/{version['id']}/refine",
        json={"suggestion_set_id": edited["id"]},
    ).json()
    assert draft["based_on_version_id"] == version["id"]
    assert client.get(f"/drafts/{draft['id']}").json() == draft

    committed = client.post(f"/drafts/{draft['id']}/commit", json={}).json()
    assert committed["origin"] == "refined"
    assert committed["parent_id"] == version["id"]
    assert committed["links"]["suggestion_set_ids"] == [edited["id"]]

    gateway.push("A second pass.")
    with_edit = client.post(
        f"/versions/{committed['id']}/refine",
        json={"suggestion_set_id": edited["id"]},
    )
    assert with_edit.status_code == 200


def test_replay_miss_surfaces_as_424(world):
    client, gateway, _ = world
    project = make_project(client)
    version = make_version(client, project["id"])
    gateway.push(errors.ReplayMiss("deadbeef"))
    response = client.post(f"/projects/{project['id']}/sessions",
                           json={"prompt_version_id": version["id"]})
    assert response.status_code == 424
    assert response.json()["error"]["code"] == "replay_miss"
    assert "deadbeef" in response.json()["error"]["message"]


def test_check_store_writable(tmp_path):
    check_store_writable(str(tmp_path / "new-store"))
    file_in_the_way = tmp_path / "occupied"
    file_in_the_way.write_text("x")
    with pytest.raises(errors.StoreError):
        check_store_writable(str(file_in_the_way))
