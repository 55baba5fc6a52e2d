/**
 * Page bootstrap: wires the view model to the three-panel layout.
 *
 * Prompt editor on the left, transcript in the middle, suggestion and
 * refined-prompt panels on the right. A project with no versions yet
 * opens in the elicitation chat instead of the editor.
 *
 * The API base defaults to the page origin; pass ?api=http://host:port
 * when the service runs elsewhere (behind one origin, since the service
 * sends no CORS headers).
 */

import { ApiClient } from './api.js';
import { captureDomSelection, bindSelection, SpanDraft } from './selection.js';
import {
  renderAnalysis,
  renderAnnotateBar,
  renderDiff,
  renderHistory,
  renderLiveChat,
  renderTranscript,
} from './render.js';
import { renderSuggestionsPanel } from './suggestions.js';
import type { Tag } from './tags.js';
import { StudioViewModel } from './viewmodel.js';

interface UiState {
  selectedTags: Set<Tag>;
  comment: string;
  spanDrafts: SpanDraft[];
  selectionText: string;
}

export function apiBaseFromLocation(location: { origin: string; search: string }): string {
  const params = new URLSearchParams(location.search);
  return params.get('api') ?? location.origin;
}

export function mountStudio(root: HTMLElement, api: ApiClient): StudioViewModel {
  const vm = new StudioViewModel(api);
  const ui: UiState = { selectedTags: new Set(), comment: '', spanDrafts: [], selectionText: '' };

  const rerender = (): void => {
    const state = vm.state;
    root.textContent = '';

    const bar = document.createElement('header');
    bar.className = 'top-bar';
    const title = document.createElement('h1');
    title.textContent = state.project ? state.project.name : 'ace design studio';
    bar.appendChild(title);
    if (state.busy) {
      const busy = document.createElement('span');
      busy.className = 'busy-indicator';
      busy.textContent = state.busy;
      bar.appendChild(busy);
    }
    if (state.lastError) {
      const err = document.createElement('span');
      err.className = 'error-banner';
      err.textContent =
        'code' in state.lastError
          ? `${(state.lastError as { code: string }).code}: ${state.lastError.message}`
          : state.lastError.message;
      bar.appendChild(err);
    }
    root.appendChild(bar);

    const columns = document.createElement('div');
    columns.className = 'columns';
    root.appendChild(columns);

    // left: editor + analysis + history
    const left = document.createElement('div');
    left.className = 'column column-editor';
    columns.appendChild(left);

    const editor = document.createElement('textarea');
    editor.className = 'prompt-editor';
    editor.value = state.editorBuffer;
    editor.addEventListener('input', () => {
      vm.state.editorBuffer = editor.value;
    });
    left.appendChild(editor);

    const commit = document.createElement('button');
    commit.type = 'button';
    commit.textContent = state.elicitedDraft !== null ? 'Commit elicited prompt' : 'Commit';
    commit.disabled = state.busy !== null || !state.project;
    commit.addEventListener('click', () => {
      const origin = state.elicitedDraft !== null ? 'elicited' : 'manual';
      vm.state.elicitedDraft = null;
      void vm.commitEditor(origin).catch(() => undefined);
    });
    left.appendChild(commit);

    if (state.analysis) {
      left.appendChild(renderAnalysis(state.analysis));
    }
    left.appendChild(
      renderHistory(state.versions, state.currentVersion?.id ?? null, state.busy !== null, {
        onSelect: (id) => void vm.selectVersion(id).catch(() => undefined),
        onRevert: (id) => void vm.revertTo(id).catch(() => undefined),
        onDiff: (id) => {
          if (state.currentVersion) {
            void vm.loadDiff(state.currentVersion.id, id).catch(() => undefined);
          }
        },
      }),
    );
    if (state.diffText) {
      left.appendChild(renderDiff(state.diffText));
    }

    // center: elicitation, live chat, or transcript
    const center = document.createElement('div');
    center.className = 'column column-transcript';
    columns.appendChild(center);

    if (state.elicitation && state.elicitation.status === 'active') {
      center.appendChild(renderElicitation(vm));
    } else if (state.session) {
      center.appendChild(renderLiveChat(state.liveEntries));
      const end = document.createElement('button');
      end.type = 'button';
      end.textContent = 'End session';
      end.disabled = state.busy !== null;
      end.addEventListener('click', () => void vm.endTestSession().catch(() => undefined));
      center.appendChild(end);
      center.appendChild(renderTurnInput(vm));
    } else if (state.transcript) {
      const transcriptPanel = renderTranscript({
        transcript: state.transcript,
        annotations: state.annotations,
        pendingHighlights: state.pendingHighlights,
        conflicts: state.conflicts,
      });
      transcriptPanel.addEventListener('mouseup', () => {
        const domSelection = window.getSelection();
        if (!domSelection) {
          return;
        }
        const captured = captureDomSelection(transcriptPanel, domSelection);
        if (!captured || !state.transcript) {
          return;
        }
        const utterances = state.transcript.utterances.map((u) => ({
          index: u.index,
          text: u.text,
        }));
        ui.spanDrafts = bindSelection(utterances, captured);
        ui.selectionText = ui.spanDrafts.map((d) => d.text).join('\n');
        rerender();
      });
      center.appendChild(transcriptPanel);
      center.appendChild(
        renderAnnotateBar(ui.selectionText, ui.selectedTags, state.busy !== null, {
          onToggleTag: (tag) => {
            if (ui.selectedTags.has(tag)) {
              ui.selectedTags.delete(tag);
            } else {
              ui.selectedTags.add(tag);
            }
            rerender();
          },
          onComment: (text) => {
            ui.comment = text;
          },
          onSubmit: () => {
            const spans = ui.spanDrafts;
            const tags = [...ui.selectedTags];
            ui.spanDrafts = [];
            ui.selectionText = '';
            ui.selectedTags.clear();
            void vm
              .annotateSelection(spans, tags, ui.comment || null)
              .catch(() => undefined)
              .finally(() => {
                ui.comment = '';
              });
          },
        }),
      );
    } else if (state.project) {
      const start = document.createElement('button');
      start.type = 'button';
      start.textContent = state.versions.length === 0 ? 'Start elicitation chat' : 'Start test session';
      start.disabled = state.busy !== null;
      start.addEventListener('click', () => {
        const action = state.versions.length === 0 ? vm.startElicitation() : vm.startTestSession();
        void action.catch(() => undefined);
      });
      center.appendChild(start);
    }

    // right: suggestions + refined draft
    const right = document.createElement('div');
    right.className = 'column column-suggestions';
    columns.appendChild(right);

    const generate = document.createElement('button');
    generate.type = 'button';
    generate.textContent = 'Generate suggestions';
    generate.disabled = state.busy !== null || !state.transcript || !state.currentVersion;
    generate.addEventListener('click', () => void vm.generateSuggestions().catch(() => undefined));
    right.appendChild(generate);

    right.appendChild(
      renderSuggestionsPanel(state.suggestionSet, {
        onEditBullet: (key, index, current) => {
          const next = window.prompt('Edit suggestion', current);
          if (next === null || !state.suggestionSet) {
            return;
          }
          const bullets = [...state.suggestionSet[key]];
          bullets[index] = next;
          void vm.editSuggestionBullets({ [key]: bullets }).catch(() => undefined);
        },
        onRemoveBullet: (key, index) => {
          if (!state.suggestionSet) {
            return;
          }
          const bullets = state.suggestionSet[key].filter((_, i) => i !== index);
          void vm.editSuggestionBullets({ [key]: bullets }).catch(() => undefined);
        },
      }),
    );

    const refine = document.createElement('button');
    refine.type = 'button';
    refine.textContent = 'Generate refined prompt';
    refine.disabled = state.busy !== null || !state.suggestionSet;
    refine.addEventListener('click', () => void vm.makeDraft().catch(() => undefined));
    right.appendChild(refine);

    if (state.draft) {
      const draftBox = document.createElement('textarea');
      draftBox.className = 'draft-editor';
      draftBox.value = state.draftBuffer;
      draftBox.addEventListener('input', () => {
        vm.state.draftBuffer = draftBox.value;
      });
      right.appendChild(draftBox);

      const commitDraft = document.createElement('button');
      commitDraft.type = 'button';
      commitDraft.textContent = 'Commit refined prompt';
      commitDraft.disabled = state.busy !== null;
      commitDraft.addEventListener('click', () => void vm.commitDraft().catch(() => undefined));
      right.appendChild(commitDraft);
    }
  };

  const renderElicitation = (model: StudioViewModel): HTMLElement => {
    const panel = document.createElement('section');
    panel.className = 'elicitation-panel';
    const session = model.state.elicitation;
    if (!session) {
      return panel;
    }
    const log = document.createElement('div');
    log.className = 'elicitation-log';
    for (const turn of session.turns) {
      const line = document.createElement('p');
      line.className = `chat-line speaker-${turn.speaker}`;
      line.textContent = `${turn.speaker}: ${turn.text}`;
      log.appendChild(line);
    }
    panel.appendChild(log);

    const input = document.createElement('input');
    input.type = 'text';
    input.className = 'elicitation-input';
    input.placeholder = 'Describe what the robot should do';
    panel.appendChild(input);

    const send = document.createElement('button');
    send.type = 'button';
    send.textContent = 'Send';
    send.disabled = model.state.busy !== null;
    send.addEventListener('click', () => {
      const text = input.value.trim();
      if (text) {
        void model.sendElicitationMessage(text).catch(() => undefined);
      }
    });
    panel.appendChild(send);

    const finalize = document.createElement('button');
    finalize.type = 'button';
    finalize.textContent = 'Finalize prompt';
    finalize.disabled = model.state.busy !== null;
    finalize.addEventListener('click', () => void model.finalizeElicitation().catch(() => undefined));
    panel.appendChild(finalize);
    return panel;
  };

  const renderTurnInput = (model: StudioViewModel): HTMLElement => {
    const holder = document.createElement('div');
    holder.className = 'turn-input';
    const input = document.createElement('input');
    input.type = 'text';
    input.placeholder = 'Say something to the robot';
    holder.appendChild(input);
    const send = document.createElement('button');
    send.type = 'button';
    send.textContent = 'Send';
    send.disabled = model.state.busy !== null;
    send.addEventListener('click', () => {
      const text = input.value.trim();
      if (text) {
        input.value = '';
        void model.sendUserTurn(text).catch(() => undefined);
      }
    });
    holder.appendChild(send);
    return holder;
  };

  vm.subscribe(rerender);
  rerender();
  return vm;
}

export function bootstrap(): void {
  const root = document.getElementById('app');
  if (!root) {
    throw new Error('missing #app mount point');
  }
  const api = new ApiClient(apiBaseFromLocation(window.location));
  const vm = mountStudio(root, api);

  // Landing flow: open the project named in the query string, else show a
  // minimal chooser over GET /projects.
  const params = new URLSearchParams(window.location.search);
  const projectId = params.get('project');
  if (projectId) {
    void vm.openProject(projectId).catch(() => undefined);
  } else {
    void api
      .listProjects()
      .then((projects) => {
        if (projects.length > 0) {
          return vm.openProject(projects[0].id);
        }
        return undefined;
      })
      .catch(() => undefined);
  }
}
