"""Command line interface over the engine.

Exit codes: 0 success, 1 domain error (stable code printed to stderr),
2 usage error. Machine-facing commands print JSON documents; interactive
ones (elicit, chat) stream dialogue lines and end with an id line.
"""

from __future__ import annotations

import json
import sys

import click

from . import errors, report
from .config import load_config
from .engine import Engine


class AceGroup(click.Group):
    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except errors.AceError as exc:
            click.echo(f"error: {exc.code}: {exc.message}", err=True)
            ctx.exit(1)


def get_engine(ctx) -> Engine:
    if "engine" not in ctx.obj:
        config = load_config(
            overrides={
                "store_path": ctx.obj.get("store_path"),
                "fixtures_dir": ctx.obj.get("fixtures_dir"),
                "mode": ctx.obj.get("mode"),
            },
            config_file=ctx.obj.get("config_file"),
        )
        ctx.obj["config"] = config
        ctx.obj["engine"] = Engine.from_config(config)
    return ctx.obj["engine"]


def emit(doc) -> None:
    click.echo(json.dumps(doc, ensure_ascii=False, indent=2, sort_keys=True))


@click.group(cls=AceGroup)
@click.option("--store", "store_path", default=None, help="Store directory.")
@click.option("--fixtures", "fixtures_dir", default=None, help="Fixture directory.")
@click.option("--mode", default=None, type=click.Choice(["live", "record", "replay"]))
@click.option("--config", "config_file", default=None, help="Path to ace.toml.")
@click.pass_context
def main(ctx, store_path, fixtures_dir, mode, config_file):
    """Design, test, annotate, and refine robot conversation prompts."""
    ctx.obj = {
        "store_path": store_path,
        "fixtures_dir": fixtures_dir,
        "mode": mode,
        "config_file": config_file,
    }


@main.command()
@click.argument("name")
@click.option("--brief", default="", help="Short description of the design task.")
@click.pass_context
def init(ctx, name, brief):
    """Create a project."""
    emit(get_engine(ctx).create_project(name, brief).to_doc())


@main.command()
@click.pass_context
def projects(ctx):
    """List projects."""
    emit([p.to_doc() for p in get_engine(ctx).store.list_projects()])


@main.command()
@click.argument("project_id")
@click.pass_context
def cycles(ctx, project_id):
    """Summarize design cycles: versions with linked test evidence."""
    emit(get_engine(ctx).store.design_cycles(project_id))


@main.command()
@click.argument("project_id")
@click.option("--commit/--no-commit", "do_commit", default=True,
              help="Commit the finalized draft to history.")
@click.pass_context
def elicit(ctx, project_id, do_commit):
    """Chat with the elicitation agent; reads designer lines from stdin."""
    engine = get_engine(ctx)
    session = engine.start_elicitation(project_id)
    click.echo(f"agent: {session.turns[-1][1]}")
    for line in sys.stdin:
        text = line.rstrip("\n")
        if not text.strip():
            continue
        reply = engine.elicitation_message(session.id, text)
        click.echo(f"agent: {reply}")
        if session.status != "active":
            break
    if session.status != "drafting":
        engine.abandon_elicitation(session.id)
        click.echo("error: session abandoned before completion", err=True)
        ctx.exit(1)
    body = engine.elicitation_finalize(session.id)
    click.echo("--- draft ---")
    click.echo(body)
    if do_commit:
        current = engine.store.current_version(project_id)
        version = engine.commit_version(
            project_id, body, origin="elicited",
            parent_id=current.id if current else None,
        )
        click.echo(f"version {version.id}")


@main.command()
@click.argument("version_id")
@click.pass_context
def chat(ctx, version_id):
    """Run a test session against a prompt version; user lines from stdin."""
    engine = get_engine(ctx)
    session = engine.start_session(version_id)
    click.echo(f"robot: {session.utterances[-1]['text']}")
    for line in sys.stdin:
        text = line.rstrip("\n")
        if not text.strip():
            continue
        utterance = engine.user_turn(session.id, text)
        click.echo(f"robot: {utterance['text']}")
    transcript = engine.end_session(session.id)
    click.echo(f"transcript {transcript['id']}")


@main.command()
@click.argument("transcript_id")
@click.pass_context
def transcript(ctx, transcript_id):
    """Print a sealed transcript document."""
    emit(get_engine(ctx).store.get_transcript(transcript_id))


@main.command()
@click.argument("transcript_id")
@click.option("--utterance", type=int, required=True)
@click.option("--start", type=int, required=True)
@click.option("--end", type=int, required=True)
@click.option("--tag", "tags", multiple=True, required=True)
@click.option("--comment", default=None)
@click.pass_context
def annotate(ctx, transcript_id, utterance, start, end, tags, comment):
    """Tag a character span of one utterance."""
    engine = get_engine(ctx)
    annotation = engine.add_annotation(
        transcript_id, utterance, start, end, list(tags), comment
    )
    emit(annotation.to_doc())


@main.command()
@click.argument("transcript_id")
@click.pass_context
def annotations(ctx, transcript_id):
    """List annotations on a transcript in insertion order."""
    emit(get_engine(ctx).list_annotations(transcript_id))


@main.command()
@click.argument("transcript_id")
@click.pass_context
def conflicts(ctx, transcript_id):
    """List contradictory annotation pairs."""
    emit(get_engine(ctx).conflicts(transcript_id))


@main.command()
@click.argument("transcript_id")
@click.pass_context
def digest(ctx, transcript_id):
    """Print the feedback digest that the refiner consumes."""
    click.echo(get_engine(ctx).feedback_digest(transcript_id), nl=False)


@main.command()
@click.argument("version_id")
@click.argument("transcript_id")
@click.pass_context
def suggest(ctx, version_id, transcript_id):
    """Generate the four-list suggestion set from annotations."""
    emit(get_engine(ctx).generate_suggestions(version_id, transcript_id))


@main.command()
@click.argument("suggestion_set_id")
@click.pass_context
def suggestions(ctx, suggestion_set_id):
    """Print a stored suggestion set."""
    emit(get_engine(ctx).store.get_suggestions(suggestion_set_id))


@main.command()
@click.argument("suggestion_set_id")
@click.option("--edits-file", type=click.Path(exists=True, dir_okay=False),
              required=True, help="JSON object mapping category keys to bullet lists.")
@click.pass_context
def edit(ctx, suggestion_set_id, edits_file):
    """Apply designer edits to a suggestion set; writes a new set."""
    with open(edits_file, encoding="utf-8") as fh:
        edits = json.load(fh)
    emit(get_engine(ctx).edit_suggestions(suggestion_set_id, edits))


@main.command()
@click.argument("version_id")
@click.argument("suggestion_set_id")
@click.pass_context
def refine(ctx, version_id, suggestion_set_id):
    """Generate a refined prompt draft from a suggestion set."""
    emit(get_engine(ctx).generate_refined_prompt(version_id, suggestion_set_id))


@main.command()
@click.argument("draft_id")
@click.pass_context
def draft(ctx, draft_id):
    """Print a stored refinement draft."""
    emit(get_engine(ctx).store.get_draft(draft_id))


@main.command()
@click.option("--draft", "draft_id", default=None, help="Commit a refinement draft.")
@click.option("--project", "project_id", default=None, help="Commit a prompt body.")
@click.option("--body-file", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--origin", default="manual", type=click.Choice(["manual", "elicited"]))
@click.option("--parent", "parent_id", default=None)
@click.option("--edited-body-file", type=click.Path(exists=True, dir_okay=False),
              default=None, help="With --draft: designer-edited replacement body.")
@click.pass_context
def commit(ctx, draft_id, project_id, body_file, origin, parent_id, edited_body_file):
    """Commit a new prompt version, from a draft or from a file."""
    engine = get_engine(ctx)
    if draft_id:
        edited = None
        if edited_body_file:
            edited = open(edited_body_file, encoding="utf-8").read()
        emit(engine.commit_refinement(draft_id, edited).to_doc())
        return
    if not project_id or not body_file:
        raise click.UsageError("need --draft, or --project with --body-file")
    body = open(body_file, encoding="utf-8").read()
    emit(engine.commit_version(project_id, body, origin, parent_id).to_doc())


@main.command()
@click.option("--version", "version_id", default=None)
@click.option("--file", "file_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--mode", default="heuristic", type=click.Choice(["heuristic", "judge"]))
@click.option("--json", "as_json", is_flag=True, help="Full report as JSON.")
@click.pass_context
def analyze(ctx, version_id, file_path, mode, as_json):
    """Score a prompt: clarity slots and specificity counts."""
    engine = get_engine(ctx)
    if bool(version_id) == bool(file_path):
        raise click.UsageError("need exactly one of --version or --file")
    if version_id:
        doc = engine.analyze_version(version_id, mode=mode)
    else:
        doc = engine.analyze_text(open(file_path, encoding="utf-8").read(), mode=mode)
    if as_json:
        emit(doc)
        return
    clarity = doc["clarity"]
    present = [slot for slot, on in clarity["slots"].items() if on]
    click.echo(f"clarity: {clarity['score']}/5 ({', '.join(present) or 'no slots'})")
    for key in ("descriptive_words", "constraints", "examples"):
        click.echo(f"{key.replace('_', ' ')}: {doc['specificity'][key]['count']}")


@main.command()
@click.argument("project_id")
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def history(ctx, project_id, as_json):
    """List a project's prompt versions in commit order."""
    engine = get_engine(ctx)
    versions = engine.store.versions_of(project_id)
    if as_json:
        emit([v.to_doc() for v in versions])
        return
    for v in versions:
        edited = " edited" if v.designer_edited else ""
        parent = v.parent_id or "-"
        click.echo(f"{v.seq:>3}  {v.id}  {v.origin:<8}  parent={parent}{edited}")


@main.command()
@click.argument("version_id")
@click.pass_context
def show(ctx, version_id):
    """Print one prompt version document."""
    emit(get_engine(ctx).store.get_version(version_id).to_doc())


@main.command()
@click.argument("version_id")
@click.pass_context
def lineage(ctx, version_id):
    """List the chain of versions from the root to the given one."""
    emit([v.to_doc() for v in get_engine(ctx).lineage(version_id)])


@main.command()
@click.argument("version_id")
@click.pass_context
def revert(ctx, version_id):
    """Commit a new leaf whose body copies an earlier version."""
    emit(get_engine(ctx).revert(version_id).to_doc())


@main.command()
@click.argument("version_a")
@click.argument("version_b")
@click.pass_context
def diff(ctx, version_a, version_b):
    """Unified diff between two version bodies."""
    click.echo(get_engine(ctx).diff(version_a, version_b))


@main.command("report")
@click.argument("project_id")
@click.option("--out", default="./report", help="Output directory.")
@click.pass_context
def report_cmd(ctx, project_id, out):
    """Write per-version metrics as CSV plus clarity/specificity figures."""
    engine = get_engine(ctx)
    result = report.build_report(engine.store, project_id, out)
    click.echo(result["csv"])
    for figure in result["figures"]:
        click.echo(figure)


@main.command()
@click.option("--bind", "bind_addr", default=None, help="host:port to listen on.")
@click.pass_context
def serve(ctx, bind_addr):
    """Run the HTTP service."""
    from . import service

    config = load_config(
        overrides={
            "store_path": ctx.obj.get("store_path"),
            "fixtures_dir": ctx.obj.get("fixtures_dir"),
            "mode": ctx.obj.get("mode"),
            "bind_addr": bind_addr,
        },
        config_file=ctx.obj.get("config_file"),
    )
    service.serve(config)


if __name__ == "__main__":
    main()
