/**
 * Client state for the design studio. Holds exactly what the server said
 * and nothing derived: the editor buffer is a version body (or the
 * designer's in-progress edit of one), scores come from the analysis
 * endpoint, conflicts from the conflicts endpoint. One mutation may be in
 * flight at a time; views disable their controls while `busy` is set.
 */

import {
  AnalysisDoc,
  AnnotationDoc,
  ApiClient,
  ApiError,
  ConflictDoc,
  DraftDoc,
  ElicitationSessionDoc,
  ProjectDoc,
  SessionDoc,
  SpanDoc,
  SuggestionSetDoc,
  TranscriptDoc,
  UtteranceDoc,
  VersionDoc,
} from './api.js';
import type { SpanDraft } from './selection.js';
import type { CategoryKey } from './suggestions.js';

export interface PendingHighlight {
  span: SpanDoc;
  tags: string[];
}

/**
 * Live chat entry. Robot entries carry the utterance doc from the turn
 * endpoint; user entries echo the typed text, which the server does not
 * send back until the transcript is finalized.
 */
export interface LiveEntry {
  speaker: 'user' | 'robot';
  text: string;
  utterance?: UtteranceDoc;
}

export interface StudioState {
  project: ProjectDoc | null;
  versions: VersionDoc[];
  currentVersion: VersionDoc | null;
  editorBuffer: string;
  analysis: AnalysisDoc | null;
  diffText: string | null;
  elicitation: ElicitationSessionDoc | null;
  elicitedDraft: string | null;
  session: SessionDoc | null;
  liveEntries: LiveEntry[];
  transcript: TranscriptDoc | null;
  annotations: AnnotationDoc[];
  pendingHighlights: PendingHighlight[];
  conflicts: ConflictDoc[];
  suggestionSet: SuggestionSetDoc | null;
  draft: DraftDoc | null;
  draftBuffer: string;
  busy: string | null;
  lastError: ApiError | Error | null;
}

type Listener = (state: StudioState) => void;

export class StudioViewModel {
  readonly api: ApiClient;
  readonly state: StudioState;
  private listeners: Listener[] = [];

  constructor(api: ApiClient) {
    this.api = api;
    this.state = {
      project: null,
      versions: [],
      currentVersion: null,
      editorBuffer: '',
      analysis: null,
      diffText: null,
      elicitation: null,
      elicitedDraft: null,
      session: null,
      liveEntries: [],
      transcript: null,
      annotations: [],
      pendingHighlights: [],
      conflicts: [],
      suggestionSet: null,
      draft: null,
      draftBuffer: '',
      busy: null,
      lastError: null,
    };
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private notify(): void {
    for (const listener of this.listeners) {
      listener(this.state);
    }
  }

  setEditorBuffer(text: string): void {
    this.state.editorBuffer = text;
    this.notify();
  }

  setDraftBuffer(text: string): void {
    this.state.draftBuffer = text;
    this.notify();
  }

  /** Single in-flight contract: a second mutation is rejected, not queued. */
  private async run<T>(name: string, work: () => Promise<T>): Promise<T> {
    if (this.state.busy) {
      throw new Error(`operation ${this.state.busy} is in flight`);
    }
    this.state.busy = name;
    this.state.lastError = null;
    this.notify();
    try {
      return await work();
    } catch (error) {
      this.state.lastError = error instanceof Error ? error : new Error(String(error));
      throw error;
    } finally {
      this.state.busy = null;
      this.notify();
    }
  }

  // -- project and history -----------------------------------------------

  async openProject(projectId: string): Promise<void> {
    await this.run('open-project', async () => {
      this.state.project = await this.api.getProject(projectId);
      this.state.versions = await this.api.listVersions(projectId);
      const leaf = this.state.versions[this.state.versions.length - 1] ?? null;
      if (leaf) {
        await this.selectVersionInner(leaf.id);
      } else {
        this.state.currentVersion = null;
        this.state.editorBuffer = '';
      }
    });
  }

  async createProject(name: string, brief = ''): Promise<ProjectDoc> {
    return this.run('create-project', async () => {
      const project = await this.api.createProject(name, brief);
      this.state.project = project;
      this.state.versions = [];
      this.state.currentVersion = null;
      this.state.editorBuffer = '';
      return project;
    });
  }

  private async selectVersionInner(versionId: string): Promise<void> {
    const version = await this.api.getVersion(versionId);
    this.state.currentVersion = version;
    this.state.editorBuffer = version.body;
    this.state.analysis = await this.api.analysis(versionId);
    this.state.diffText = null;
  }

  async selectVersion(versionId: string): Promise<void> {
    await this.run('select-version', () => this.selectVersionInner(versionId));
  }

  async commitEditor(origin = 'manual'): Promise<VersionDoc> {
    return this.run('commit', async () => {
      const project = this.requireProject();
      const version = await this.api.commitVersion(
        project.id,
        this.state.editorBuffer,
        origin,
        this.state.currentVersion?.id ?? null,
      );
      this.state.versions = await this.api.listVersions(project.id);
      await this.selectVersionInner(version.id);
      return version;
    });
  }

  /**
   * Revert to an old version. The server answers with the new head, but
   * the editor is refilled from a fresh GET of that head so the buffer is
   * exactly what the store now holds.
   */
  async revertTo(versionId: string): Promise<VersionDoc> {
    return this.run('revert', async () => {
      const project = this.requireProject();
      const reverted = await this.api.revert(versionId);
      this.state.versions = await this.api.listVersions(project.id);
      await this.selectVersionInner(reverted.id);
      return reverted;
    });
  }

  async loadDiff(versionId: string, otherId: string): Promise<string> {
    return this.run('diff', async () => {
      const { diff } = await this.api.diff(versionId, otherId);
      this.state.diffText = diff;
      return diff;
    });
  }

  // -- elicitation ---------------------------------------------------------

  async startElicitation(): Promise<void> {
    await this.run('elicit-start', async () => {
      const project = this.requireProject();
      this.state.elicitation = await this.api.startElicitation(project.id);
      this.state.elicitedDraft = null;
    });
  }

  async sendElicitationMessage(text: string): Promise<void> {
    await this.run('elicit-message', async () => {
      const project = this.requireProject();
      const session = this.requireElicitation();
      const result = await this.api.elicitationMessage(project.id, session.id, text);
      this.state.elicitation = result.session;
    });
  }

  /** Finalized draft lands in the editor, ready to commit as `elicited`. */
  async finalizeElicitation(): Promise<string> {
    return this.run('elicit-finalize', async () => {
      const project = this.requireProject();
      const session = this.requireElicitation();
      const result = await this.api.elicitationFinalize(project.id, session.id);
      this.state.elicitation = result.session;
      this.state.elicitedDraft = result.draft;
      this.state.editorBuffer = result.draft;
      return result.draft;
    });
  }

  // -- test sessions ---------------------------------------------------------

  async startTestSession(): Promise<void> {
    await this.run('session-start', async () => {
      const project = this.requireProject();
      const version = this.requireVersion();
      const session = await this.api.startSession(project.id, version.id);
      this.state.session = session;
      this.state.liveEntries = session.utterances.map((utterance) => ({
        speaker: utterance.speaker,
        text: utterance.text,
        utterance,
      }));
      this.state.transcript = null;
      this.state.annotations = [];
      this.state.conflicts = [];
    });
  }

  async sendUserTurn(text: string): Promise<void> {
    await this.run('session-turn', async () => {
      const session = this.requireSession();
      const { utterance } = await this.api.userTurn(session.id, text);
      this.state.liveEntries.push({ speaker: 'user', text });
      this.state.liveEntries.push({ speaker: 'robot', text: utterance.text, utterance });
    });
  }

  async endTestSession(): Promise<TranscriptDoc> {
    return this.run('session-end', async () => {
      const session = this.requireSession();
      const transcript = await this.api.endSession(session.id);
      this.state.session = null;
      this.state.liveEntries = [];
      this.state.transcript = transcript;
      this.state.annotations = await this.api.listAnnotations(transcript.id);
      this.state.conflicts = await this.api.conflicts(transcript.id);
      return transcript;
    });
  }

  async loadTranscript(transcriptId: string): Promise<void> {
    await this.run('transcript-load', async () => {
      this.state.transcript = await this.api.getTranscript(transcriptId);
      this.state.annotations = await this.api.listAnnotations(transcriptId);
      this.state.conflicts = await this.api.conflicts(transcriptId);
    });
  }

  // -- annotations -------------------------------------------------------------

  /**
   * Create one annotation per span draft. Highlights render optimistically
   * while the POSTs run and are rolled back if any of them fails; the
   * authoritative list is re-read from the server afterwards either way.
   */
  async annotateSelection(
    spans: SpanDraft[],
    tags: string[],
    comment?: string | null,
  ): Promise<AnnotationDoc[]> {
    if (spans.length === 0) {
      throw new Error('selection covers no text');
    }
    if (tags.length === 0) {
      throw new Error('pick at least one tag');
    }
    return this.run('annotate', async () => {
      const transcript = this.requireTranscript();
      this.state.pendingHighlights = spans.map((span) => ({
        span: { utterance_index: span.utteranceIndex, start: span.start, end: span.end },
        tags,
      }));
      this.notify();
      try {
        const created: AnnotationDoc[] = [];
        for (const span of spans) {
          created.push(
            await this.api.addAnnotation(
              transcript.id,
              { utterance_index: span.utteranceIndex, start: span.start, end: span.end },
              tags,
              comment,
            ),
          );
        }
        this.state.annotations = await this.api.listAnnotations(transcript.id);
        this.state.conflicts = await this.api.conflicts(transcript.id);
        return created;
      } finally {
        this.state.pendingHighlights = [];
      }
    });
  }

  // -- refinement ----------------------------------------------------------------

  async generateSuggestions(): Promise<SuggestionSetDoc> {
    return this.run('suggest', async () => {
      const version = this.requireVersion();
      const transcript = this.requireTranscript();
      const set = await this.api.generateSuggestions(version.id, transcript.id);
      this.state.suggestionSet = set;
      return set;
    });
  }

  async editSuggestionBullets(
    edits: Partial<Record<CategoryKey, string[]>>,
  ): Promise<SuggestionSetDoc> {
    return this.run('suggest-edit', async () => {
      const current = this.state.suggestionSet;
      if (!current) {
        throw new Error('no suggestion set loaded');
      }
      const set = await this.api.editSuggestions(current.id, edits);
      this.state.suggestionSet = set;
      return set;
    });
  }

  async makeDraft(): Promise<DraftDoc> {
    return this.run('refine', async () => {
      const version = this.requireVersion();
      const set = this.state.suggestionSet;
      if (!set) {
        throw new Error('generate suggestions first');
      }
      const draft = await this.api.refine(version.id, set.id);
      this.state.draft = draft;
      this.state.draftBuffer = draft.body;
      return draft;
    });
  }

  async commitDraft(): Promise<VersionDoc> {
    return this.run('draft-commit', async () => {
      const project = this.requireProject();
      const draft = this.state.draft;
      if (!draft) {
        throw new Error('no draft to commit');
      }
      const edited = this.state.draftBuffer === draft.body ? null : this.state.draftBuffer;
      const version = await this.api.commitDraft(draft.id, edited);
      this.state.versions = await this.api.listVersions(project.id);
      await this.selectVersionInner(version.id);
      this.state.draft = null;
      this.state.draftBuffer = '';
      return version;
    });
  }

  // -- guards --------------------------------------------------------------

  private requireProject(): ProjectDoc {
    if (!this.state.project) {
      throw new Error('no project open');
    }
    return this.state.project;
  }

  private requireVersion(): VersionDoc {
    if (!this.state.currentVersion) {
      throw new Error('no version selected');
    }
    return this.state.currentVersion;
  }

  private requireSession(): SessionDoc {
    if (!this.state.session) {
      throw new Error('no test session running');
    }
    return this.state.session;
  }

  private requireTranscript(): TranscriptDoc {
    if (!this.state.transcript) {
      throw new Error('no transcript loaded');
    }
    return this.state.transcript;
  }

  private requireElicitation(): ElicitationSessionDoc {
    if (!this.state.elicitation) {
      throw new Error('no elicitation session running');
    }
    return this.state.elicitation;
  }
}
