"""Scripted design-loop scenarios shared by the fixture recorder and the
replay test suite.

Each scenario is a full loop: elicitation, finalize, a scripted test
session, annotations, suggestions, refinement, commit. The scripts list
every gateway reply in call order; ``scripts/build_fixtures.py`` records
them into fixture files and the acceptance tests replay them. Reply text
is the contract here, so edits to any scenario require re-recording.
"""

from __future__ import annotations

import json

from ace.elicitation import SLOT_ORDER
from ace.runtime import FACIAL_BANK, HEAD_BANK


def agent_reply(reply, slots=None, confirmed=(), done=False):
    filled = {slot: None for slot in SLOT_ORDER}
    filled.update(slots or {})
    return json.dumps({
        "slots": filled,
        "confirmed": list(confirmed),
        "designer_done": done,
        "reply": reply,
    })


def robot_reply(*segments):
    return json.dumps([
        {"speech": speech, "facial_expression": facial, "head_position": head}
        for speech, facial, head in segments
    ])


# --- scenario: museum tour guide ------------------------------------------

_MUSEUM_SLOTS_1 = {"task_goal": "teach kids about the solar system"}
_MUSEUM_SLOTS_2 = dict(_MUSEUM_SLOTS_1,
                       task_context="families stopping at the planet wall")
_MUSEUM_SLOTS_3 = dict(_MUSEUM_SLOTS_2,
                       robot_role="a friendly tour guide named Cosmo")
_MUSEUM_SLOTS_4 = dict(_MUSEUM_SLOTS_3,
                       audience="children aged six to ten, parents nearby")
_MUSEUM_SLOTS_5 = dict(_MUSEUM_SLOTS_4,
                       style_preferences="playful, short sentences, no jargon")

MUSEUM_INITIAL = """\
You are Cosmo, a tour guide robot in the space hall of a children's museum.

Your task is to teach kids about the solar system while families stop by
the planet wall. Audience: children aged 6 to 10, often with parents nearby.

Never use jargon. Always name the planet you are talking about.
"""

MUSEUM_REFINED = """\
You are Cosmo, a playful tour guide robot in the space hall of a children's
museum.

Your task is to teach kids about the solar system while families stop by
the planet wall. Audience: children aged 6 to 10, often with parents nearby.
Style: warm and playful, short sentences, simple words.

Never use jargon. Always name the planet you are talking about.
Compare sizes to familiar things. For example, say "Jupiter is so big that
more than a thousand Earths could fit inside."
Offer one fun fact at a time, such as the dusty smell of moon rocks.
"""

MUSEUM = {
    "name": "museum",
    "project": ("cosmo-museum", "Tour robot for the space hall at a children's museum."),
    "greeting": "Hi! Let's design your robot together. What should it do for visitors?",
    "designer_turns": [
        ("It should teach kids about the solar system in the space hall.",
         agent_reply("Great. Where will these conversations happen?",
                     _MUSEUM_SLOTS_1)),
        ("Families stop by the big planet wall between exhibits.",
         agent_reply("Got it. What role should the robot play?",
                     _MUSEUM_SLOTS_2)),
        ("A friendly tour guide named Cosmo.",
         agent_reply("Cosmo the tour guide. Who will it talk to?",
                     _MUSEUM_SLOTS_3, confirmed=["task_goal"])),
        ("Kids six to ten, usually with their parents.",
         agent_reply("Noted. How should it sound?",
                     _MUSEUM_SLOTS_4, confirmed=["task_goal"])),
        ("Playful, short sentences, no jargon.",
         agent_reply("Lovely. Should I draft the prompt, or is there more?",
                     _MUSEUM_SLOTS_5,
                     confirmed=["task_goal", "robot_role", "audience"])),
        ("That's everything, draft it.",
         agent_reply("Drafting now.", _MUSEUM_SLOTS_5,
                     confirmed=list(SLOT_ORDER), done=True)),
    ],
    "initial_body": MUSEUM_INITIAL,
    "chat_greeting": robot_reply(
        ("Hi! I'm Cosmo. Want to hear about the planets?",
         "happy", "look_at_screen")),
    "chat_turns": [
        ("hi cosmo, what's the biggest planet?",
         [robot_reply(
             ("Jupiter is the biggest planet of all!", "excited", "left_nod"),
             ("More than a thousand Earths could fit inside it.",
              "surprised", "look_at_screen"))]),
        ("why is mars red?",
         [robot_reply(
             ("Mars is covered in rusty dust, like a giant red beach.",
              "interested", "right_gaze"))]),
        ("tell me about saturn's rings",
         [robot_reply(
             ("Saturn's rings are made of ice and rock.", "thinking", "thinking"),
             ("Some pieces are tiny, some are as big as a bus!",
              "excited", "right_nod"))]),
        ("is pluto a planet?",
         [robot_reply(
             ("Pluto is a dwarf planet now, but it is still very cool.",
              "satisfied", "left_gaze"))]),
        ("how hot is the sun?",
         [robot_reply(
             ("The surface of the sun is about 5,500 degrees Celsius.",
              "interested", "look_at_screen"))]),
        ("thanks cosmo!",
         [robot_reply(
             ("You're welcome! Come back soon, space explorer.",
              "happy", "left_nod"))]),
    ],
    # (utterance_index, excerpt, tags, comment); spans resolve by searching
    # the sealed utterance text, so excerpts must occur exactly once.
    "annotations": [
        (2, "Jupiter is the biggest planet of all!",
         ["liked", "informative"], "great hook"),
        (2, "More than a thousand Earths", ["clear"], None),
        (2, "thousand Earths could fit inside it.",
         ["ambiguous"], "kids may not picture this"),
        (4, "like a giant red beach", ["liked", "helpful"], None),
        (8, "but it is still very cool", ["wordy"], "trim the aside"),
        (12, "space explorer", ["liked", "on_topic"], None),
    ],
    "suggestions": """\
Essential Behaviors to Maintain
- Keep the size comparisons, like the thousand-Earths fact.
- Keep the warm send-off for departing kids.
Behaviors to Reduce or Avoid
- Avoid tacked-on asides like "still very cool".
Positive Engagement Cues
- Kids lit up at the giant red beach image.
Recommended Adjustments
- Add one concrete example to every planet answer.
- State the style and audience directly in the prompt.
""",
    "refined_body": MUSEUM_REFINED,
}


# --- scenario: pediatric ward companion -------------------------------------

_WARD_SLOTS_1 = {
    "task_goal": "keep patients company and answer schedule questions",
    "task_context": "pediatric ward day room",
    "robot_role": "gentle companion robot",
    "style_preferences": "gentle and calm",
}
_WARD_SLOTS_2 = dict(_WARD_SLOTS_1, audience="children staying on the ward")

WARD_INITIAL = """\
You are a companion robot on the pediatric ward of a hospital.
Answer questions about the day's schedule and keep patients company.
Stay away from medical advice.
"""

WARD_REFINED = """\
You are a cheerful companion robot on the pediatric ward of a hospital.
You talk with children aged 4 to 12 during long stays.
Answer questions about the day's schedule and keep patients company.
Use simple words and a warm, gentle tone.
Stay away from medical advice; redirect health questions to the nurses.
Offer a small game when a child seems bored, for instance a guessing game
about animals.
"""

WARD = {
    "name": "ward",
    "project": ("ward-companion", "Companion robot for the pediatric day room."),
    "greeting": "Hello! Tell me what this robot should do for your ward.",
    "designer_turns": [
        ("It keeps young patients company in the day room and answers "
         "questions about the schedule. A gentle, calm companion robot "
         "in a hospital.",
         agent_reply("Thanks. Who exactly will it talk to?", _WARD_SLOTS_1)),
        ("Mostly the kids themselves. That's it.",
         agent_reply("Drafting your prompt.", _WARD_SLOTS_2,
                     confirmed=["task_goal", "task_context"], done=True)),
    ],
    "initial_body": WARD_INITIAL,
    "chat_greeting": robot_reply(
        ("Hi! I'm here to keep you company. How is your day going?",
         "happy", "look_at_screen")),
    "chat_turns": [
        ("when is lunch today?",
         [robot_reply(
             ("Lunch comes at noon, right after morning activities.",
              "interested", "look_at_screen"))]),
        ("i'm bored",
         [robot_reply(
             ("Want to play a quick guessing game about animals?",
              "excited", "left_nod"))]),
    ],
    "annotations": [
        (2, "right after morning activities", ["informative", "helpful"], None),
        (4, "guessing game about animals", ["liked"], "good redirect"),
    ],
    "suggestions": """\
Essential Behaviors to Maintain
- Keep anchoring schedule answers to the daily routine.
Behaviors to Reduce or Avoid
- Avoid open-ended questions when a child reports boredom.
Positive Engagement Cues
- The guessing game offer landed well.
Recommended Adjustments
- Name the audience and tone in the prompt.
- Offer one concrete activity, with an example.
""",
    "refined_body": WARD_REFINED,
}


# --- scenario: library storyteller -------------------------------------------

_LIBRARY_SLOTS_1 = {
    "task_goal": "tell short stories and share reading tips",
    "task_context": "public library reading corner",
    "robot_role": "storyteller robot",
    "audience": "students aged 8 to 14",
}
_LIBRARY_SLOTS_2 = dict(_LIBRARY_SLOTS_1, style_preferences="calm and quiet tone")

LIBRARY_INITIAL = """\
You are a storyteller robot in the reading corner of a public library.
Your job is to tell short stories and share reading tips with visitors.
Audience: students aged 8 to 14. Keep a calm, quiet tone.
Suggest books, such as picture atlases for younger readers.
"""

LIBRARY_REFINED = """\
You are a storyteller robot in the reading corner of a public library.
Your job is to tell short stories and share reading tips with visitors.
Audience: students aged 8 to 14. Keep a calm, quiet tone.
Keep each story under two minutes.
Suggest books, such as picture atlases for younger readers.
End with a question, for example "What do you think happens next?"
"""

LIBRARY = {
    "name": "library",
    "project": ("library-storyteller", "Storytelling robot for the reading corner."),
    "greeting": "Hi! What should this robot do?",
    "designer_turns": [
        ("A storyteller robot in the public library reading corner. It "
         "tells short stories and shares reading tips with students aged "
         "8 to 14.",
         agent_reply("Great. How should it sound?", _LIBRARY_SLOTS_1)),
        ("Calm and quiet. That's all.",
         agent_reply("Drafting now.", _LIBRARY_SLOTS_2,
                     confirmed=["audience"], done=True)),
    ],
    "initial_body": LIBRARY_INITIAL,
    "chat_greeting": robot_reply(
        ("Hello! Want to hear a story from the reading corner?",
         "happy", "look_at_screen")),
    "chat_turns": [
        ("tell me a story about a dragon",
         [robot_reply(
             ("Once upon a time, a small dragon learned to read by the "
              "light of its own breath.", "thinking", "thinking"),
             ("Would you like to hear what book it chose?",
              "interested", "right_nod"))]),
        ("yes!",
         [robot_reply(
             ("It chose a picture atlas, and it loved the maps of icy "
              "mountains.", "satisfied", "left_gaze"))]),
    ],
    "annotations": [
        (2, "learned to read by the light", ["wordy"], None),
        (2, "by the light of its own breath", ["concise"], "nice image"),
        (4, "picture atlas", ["liked", "on_topic"], None),
    ],
    "suggestions": """\
Essential Behaviors to Maintain
- Keep story openings in the classic fairy-tale register.
Behaviors to Reduce or Avoid
- Avoid stacking two clauses of imagery in one breath.
Positive Engagement Cues
- The picture atlas callback matched the earlier tip.
Recommended Adjustments
- Cap story length in the prompt.
- Close with a question, with an example phrasing.
""",
    "refined_body": LIBRARY_REFINED,
}

SCENARIOS = (MUSEUM, WARD, LIBRARY)


def scenario_script(scenario):
    """Gateway replies in the exact order the loop requests them."""
    script = [("elicit.greeting", scenario["greeting"])]
    for _, reply in scenario["designer_turns"]:
        script.append(("elicit.turn", reply))
    script.append(("elicit.finalize", scenario["initial_body"]))
    script.append(("chat.greeting", scenario["chat_greeting"]))
    for _, replies in scenario["chat_turns"]:
        script.append(("chat.turn", replies[0]))
        for repair in replies[1:]:
            script.append(("chat.turn.repair", repair))
    script.append(("refine.suggestions", scenario["suggestions"]))
    script.append(("refine.prompt", scenario["refined_body"]))
    return script


def run_scenario(engine, scenario):
    """Drive one full design loop; returns every produced artifact."""
    project = engine.create_project(*scenario["project"])
    elicitation = engine.start_elicitation(project.id)
    for text, _ in scenario["designer_turns"]:
        engine.elicitation_message(elicitation.id, text)
    body = engine.elicitation_finalize(elicitation.id)
    initial = engine.commit_version(project.id, body, "elicited")

    session = engine.start_session(initial.id)
    for text, _ in scenario["chat_turns"]:
        engine.user_turn(session.id, text)
    transcript = engine.end_session(session.id)

    notes = []
    for index, excerpt, tags, comment in scenario["annotations"]:
        text = transcript["utterances"][index]["text"]
        start = text.index(excerpt)
        notes.append(engine.add_annotation(
            transcript["id"], index, start, start + len(excerpt), tags, comment))

    suggestions = engine.generate_suggestions(initial.id, transcript["id"])
    draft = engine.generate_refined_prompt(initial.id, suggestions["id"])
    refined = engine.commit_refinement(draft["id"])
    return {
        "project": project,
        "elicited_body": body,
        "initial": initial,
        "transcript": transcript,
        "annotations": notes,
        "digest": engine.feedback_digest(transcript["id"]),
        "suggestions": suggestions,
        "draft": draft,
        "refined": refined,
    }


# --- turn farm: volume exercise for the session runtime ---------------------

TURNFARM_PROJECT = ("turnfarm", "Throughput exercise for the session runtime.")
TURNFARM_BODY = (
    "You are a quiz robot at a science fair booth. Answer visitor questions "
    "with one short fact. Keep answers under two sentences.\n"
)
TURNFARM_GREETING = robot_reply(
    ("Welcome to the booth! Ask me anything.", "happy", "look_at_screen"))

SESSIONS = 10
TURNS_PER_SESSION = 10

#: (session, turn) -> failure shape. "bank" sends an off-bank expression and
#: recovers on repair; "json" needs both repairs; "exhaust" burns the whole
#: call budget and lands on the fallback segment.
MALFORMED = {
    (1, 3): "bank", (2, 5): "bank", (4, 7): "bank", (6, 2): "bank",
    (0, 9): "json", (5, 4): "json", (8, 8): "json",
    (3, 6): "exhaust", (7, 1): "exhaust", (9, 0): "exhaust",
}


def turnfarm_turns(session):
    turns = []
    for j in range(TURNS_PER_SESSION):
        n = session * TURNS_PER_SESSION + j
        ok = robot_reply((
            f"Fact {n}: booth visitors asked this one before.",
            FACIAL_BANK[n % len(FACIAL_BANK)],
            HEAD_BANK[(n // len(FACIAL_BANK)) % len(HEAD_BANK)],
        ))
        kind = MALFORMED.get((session, j), "ok")
        if kind == "ok":
            replies = [ok]
        elif kind == "bank":
            bad = json.dumps([{"speech": f"Fact {n}, with a grin.",
                               "facial_expression": "grinning",
                               "head_position": "left_nod"}])
            replies = [bad, ok]
        elif kind == "json":
            replies = [f"let me think about fact {n} out loud instead",
                       json.dumps({"speech": f"fact {n} without the array"}),
                       ok]
        else:
            replies = [f"fact {n}, take one", f"fact {n}, take two",
                       f"Fact {n}:   the fallback\npath still answers."]
        turns.append({
            "text": f"probe {session}.{j}: tell me fact {n}",
            "replies": replies,
            "kind": kind,
            "expected_calls": len(replies),
        })
    return turns


def turnfarm_script():
    script = []
    for s in range(SESSIONS):
        script.append(("chat.greeting", TURNFARM_GREETING))
        for turn in turnfarm_turns(s):
            script.append(("chat.turn", turn["replies"][0]))
            for repair in turn["replies"][1:]:
                script.append(("chat.turn.repair", repair))
    return script


def run_turnfarm(engine):
    """Run every farm session; returns per-turn call counts and transcripts."""
    project = engine.create_project(*TURNFARM_PROJECT)
    version = engine.commit_version(project.id, TURNFARM_BODY, "manual")
    turns, transcripts = [], []
    for s in range(SESSIONS):
        session = engine.start_session(version.id)
        for turn in turnfarm_turns(s):
            before = engine.gateway.calls
            utterance = engine.user_turn(session.id, turn["text"])
            turns.append({
                "kind": turn["kind"],
                "calls": engine.gateway.calls - before,
                "expected_calls": turn["expected_calls"],
                "utterance": utterance,
            })
        transcripts.append(engine.end_session(session.id))
    return {"version": version, "turns": turns, "transcripts": transcripts}
