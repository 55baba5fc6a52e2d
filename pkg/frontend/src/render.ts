/**
 * DOM rendering for the studio. Pure builders: each function takes state
 * and callbacks and returns a detached element; app.ts swaps them into
 * the page on every state change. Text lands in the DOM via textContent,
 * never markup interpolation.
 */

import type {
  AnalysisDoc,
  AnnotationDoc,
  ConflictDoc,
  SpanDoc,
  TranscriptDoc,
  VersionDoc,
} from './api.js';
import { scalarLength, sliceScalars } from './offsets.js';
import { ANTONYM_ROWS, TAG_COLORS, Tag, tagLabel } from './tags.js';
import type { LiveEntry, PendingHighlight } from './viewmodel.js';

// -- highlights ---------------------------------------------------------

interface HighlightSource {
  id: string;
  span: SpanDoc;
  tags: string[];
  pending: boolean;
}

interface HighlightRun {
  text: string;
  covering: HighlightSource[];
}

/**
 * Split utterance text into runs at every annotation boundary so that
 * overlapping spans render as nested-looking stripes instead of broken
 * markup. Offsets are scalar; conversion to code units happens only at
 * the slice.
 */
export function highlightRuns(text: string, sources: HighlightSource[]): HighlightRun[] {
  const limit = scalarLength(text);
  const clamped = sources
    .map((source) => ({
      ...source,
      span: {
        ...source.span,
        start: Math.max(0, Math.min(source.span.start, limit)),
        end: Math.max(0, Math.min(source.span.end, limit)),
      },
    }))
    .filter((source) => source.span.start < source.span.end);

  const cuts = new Set<number>([0, limit]);
  for (const source of clamped) {
    cuts.add(source.span.start);
    cuts.add(source.span.end);
  }
  const ordered = [...cuts].sort((a, b) => a - b);

  const runs: HighlightRun[] = [];
  for (let i = 0; i + 1 < ordered.length; i += 1) {
    const from = ordered[i];
    const to = ordered[i + 1];
    runs.push({
      text: sliceScalars(text, from, to),
      covering: clamped.filter((s) => s.span.start <= from && s.span.end >= to),
    });
  }
  return runs;
}

function renderUtteranceText(text: string, sources: HighlightSource[]): DocumentFragment {
  const fragment = document.createDocumentFragment();
  for (const run of highlightRuns(text, sources)) {
    if (run.covering.length === 0) {
      fragment.appendChild(document.createTextNode(run.text));
      continue;
    }
    const mark = document.createElement('mark');
    mark.textContent = run.text;
    mark.dataset.annIds = run.covering.map((s) => s.id).join(' ');
    const top = run.covering[run.covering.length - 1];
    const firstTag = top.tags[0] as Tag | undefined;
    if (firstTag && TAG_COLORS[firstTag]) {
      mark.style.backgroundColor = TAG_COLORS[firstTag];
    }
    if (top.pending) {
      mark.classList.add('pending');
    }
    mark.title = run.covering.map((s) => s.tags.join(', ')).join(' | ');
    fragment.appendChild(mark);
  }
  return fragment;
}

// -- transcript -----------------------------------------------------------

export interface TranscriptView {
  transcript: TranscriptDoc;
  annotations: AnnotationDoc[];
  pendingHighlights: PendingHighlight[];
  conflicts: ConflictDoc[];
}

export function renderTranscript(view: TranscriptView): HTMLElement {
  const panel = document.createElement('section');
  panel.className = 'transcript-panel';

  const heading = document.createElement('h2');
  heading.textContent = 'Transcript';
  panel.appendChild(heading);

  for (const utterance of view.transcript.utterances) {
    const block = document.createElement('div');
    block.className = `utterance speaker-${utterance.speaker}`;
    block.dataset.utterance = String(utterance.index);

    const speaker = document.createElement('span');
    speaker.className = 'speaker';
    speaker.textContent = utterance.speaker;
    block.appendChild(speaker);

    const sources: HighlightSource[] = [
      ...view.annotations
        .filter((a) => a.span.utterance_index === utterance.index)
        .map((a) => ({ id: a.id, span: a.span, tags: a.tags, pending: false })),
      ...view.pendingHighlights
        .filter((p) => p.span.utterance_index === utterance.index)
        .map((p, i) => ({ id: `pending-${i}`, span: p.span, tags: p.tags, pending: true })),
    ];

    const body = document.createElement('p');
    body.className = 'utterance-text';
    body.appendChild(renderUtteranceText(utterance.text, sources));
    block.appendChild(body);

    const related = view.conflicts.filter((c) => c.utterance_index === utterance.index);
    if (related.length > 0) {
      const note = document.createElement('div');
      note.className = 'conflict-note';
      note.textContent = related
        .map((c) => `conflicting tags: ${c.antonyms.map((pair) => pair.join(' vs ')).join(', ')}`)
        .join('; ');
      block.appendChild(note);
    }
    panel.appendChild(block);
  }

  if (view.conflicts.length > 0) {
    const summary = document.createElement('p');
    summary.className = 'conflict-summary';
    summary.textContent = `${view.conflicts.length} conflicting annotation pair(s)`;
    panel.appendChild(summary);
  }
  return panel;
}

export function renderLiveChat(entries: LiveEntry[]): HTMLElement {
  const panel = document.createElement('section');
  panel.className = 'live-chat';
  for (const entry of entries) {
    const line = document.createElement('div');
    line.className = `chat-line speaker-${entry.speaker}`;
    const who = document.createElement('span');
    who.className = 'speaker';
    who.textContent = entry.speaker;
    const text = document.createElement('span');
    text.className = 'chat-text';
    text.textContent = entry.text;
    line.append(who, text);
    if (entry.utterance && entry.utterance.segments.length > 0) {
      const cues = document.createElement('span');
      cues.className = 'cues';
      cues.textContent = entry.utterance.segments
        .map((s) => `${s.facial_expression}/${s.head_position}`)
        .join(' ');
      line.appendChild(cues);
    }
    panel.appendChild(line);
  }
  return panel;
}

// -- tag picker -------------------------------------------------------------

export function renderTagPicker(selected: ReadonlySet<string>, onToggle: (tag: Tag) => void): HTMLElement {
  const picker = document.createElement('div');
  picker.className = 'tag-picker';
  for (const [left, right] of ANTONYM_ROWS) {
    const row = document.createElement('div');
    row.className = 'tag-row';
    for (const tag of [left, right]) {
      const button = document.createElement('button');
      button.type = 'button';
      button.className = 'tag-toggle';
      button.dataset.tag = tag;
      button.textContent = tagLabel(tag);
      button.style.borderColor = TAG_COLORS[tag];
      if (selected.has(tag)) {
        button.classList.add('selected');
        button.style.backgroundColor = TAG_COLORS[tag];
      }
      button.addEventListener('click', () => onToggle(tag));
      row.appendChild(button);
    }
    picker.appendChild(row);
  }
  return picker;
}

export interface AnnotateBarHandlers {
  onSubmit: () => void;
  onToggleTag: (tag: Tag) => void;
  onComment: (text: string) => void;
}

export function renderAnnotateBar(
  selectionText: string,
  selectedTags: ReadonlySet<string>,
  busy: boolean,
  handlers: AnnotateBarHandlers,
): HTMLElement {
  const bar = document.createElement('div');
  bar.className = 'annotate-bar';

  const preview = document.createElement('blockquote');
  preview.className = 'selection-preview';
  preview.textContent = selectionText;
  bar.appendChild(preview);

  bar.appendChild(renderTagPicker(selectedTags, handlers.onToggleTag));

  const comment = document.createElement('input');
  comment.type = 'text';
  comment.placeholder = 'optional comment';
  comment.className = 'annotate-comment';
  comment.addEventListener('input', () => handlers.onComment(comment.value));
  bar.appendChild(comment);

  const submit = document.createElement('button');
  submit.type = 'button';
  submit.className = 'annotate-submit';
  submit.textContent = 'Annotate';
  // No tags, no submit: the server would reject the annotation anyway.
  submit.disabled = busy || selectedTags.size === 0 || selectionText.length === 0;
  submit.addEventListener('click', handlers.onSubmit);
  bar.appendChild(submit);
  return bar;
}

// -- history ------------------------------------------------------------------

export interface HistoryHandlers {
  onSelect: (versionId: string) => void;
  onRevert: (versionId: string) => void;
  onDiff: (versionId: string) => void;
}

export function renderHistory(
  versions: VersionDoc[],
  currentId: string | null,
  busy: boolean,
  handlers: HistoryHandlers,
): HTMLElement {
  const panel = document.createElement('section');
  panel.className = 'history-panel';
  const heading = document.createElement('h2');
  heading.textContent = 'History';
  panel.appendChild(heading);

  const list = document.createElement('ol');
  for (const version of versions) {
    const item = document.createElement('li');
    item.dataset.versionId = version.id;
    if (version.id === currentId) {
      item.classList.add('current');
    }

    const label = document.createElement('button');
    label.type = 'button';
    label.className = 'version-label';
    label.textContent = `#${version.seq} ${version.id}`;
    label.disabled = busy;
    label.addEventListener('click', () => handlers.onSelect(version.id));
    item.appendChild(label);

    const badge = document.createElement('span');
    badge.className = `badge origin-${version.origin}`;
    badge.textContent = version.origin;
    item.appendChild(badge);

    if (version.revert_of) {
      const note = document.createElement('span');
      note.className = 'revert-note';
      note.textContent = `revert of ${version.revert_of}`;
      item.appendChild(note);
    }

    const revert = document.createElement('button');
    revert.type = 'button';
    revert.className = 'revert-button';
    revert.textContent = 'revert';
    revert.disabled = busy;
    revert.addEventListener('click', () => handlers.onRevert(version.id));
    item.appendChild(revert);

    const diff = document.createElement('button');
    diff.type = 'button';
    diff.className = 'diff-button';
    diff.textContent = 'diff';
    diff.disabled = busy || version.id === currentId;
    diff.addEventListener('click', () => handlers.onDiff(version.id));
    item.appendChild(diff);

    list.appendChild(item);
  }
  panel.appendChild(list);
  return panel;
}

// -- analysis -------------------------------------------------------------------

export function renderAnalysis(analysis: AnalysisDoc): HTMLElement {
  const panel = document.createElement('div');
  panel.className = 'analysis-strip';

  const clarity = document.createElement('span');
  clarity.className = 'score clarity';
  clarity.textContent = `clarity ${analysis.clarity.score}/5`;
  panel.appendChild(clarity);

  for (const [slot, present] of Object.entries(analysis.clarity.slots)) {
    const chip = document.createElement('span');
    chip.className = present ? 'slot present' : 'slot missing';
    chip.textContent = slot;
    panel.appendChild(chip);
  }

  const spec = analysis.specificity;
  for (const [key, label] of [
    ['descriptive_words', 'descriptive'],
    ['constraints', 'constraints'],
    ['examples', 'examples'],
  ] as const) {
    const chip = document.createElement('span');
    chip.className = 'score specificity';
    chip.textContent = `${label} ${spec[key].count}`;
    panel.appendChild(chip);
  }
  return panel;
}

export function renderDiff(diffText: string): HTMLElement {
  const panel = document.createElement('pre');
  panel.className = 'diff-view';
  panel.textContent = diffText;
  return panel;
}
