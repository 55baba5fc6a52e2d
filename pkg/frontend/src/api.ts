/**
 * Typed client for the ace HTTP service. Every view in the studio reads
 * through this module; nothing in the client computes domain values
 * itself.
 */

export interface ProjectDoc {
  id: string;
  name: string;
  brief: string;
  created_at: string;
}

export interface VersionDoc {
  id: string;
  project_id: string;
  parent_id: string | null;
  body: string;
  origin: 'elicited' | 'manual' | 'refined' | 'revert';
  designer_edited: boolean;
  created_at: string;
  seq: number;
  revert_of: string | null;
  links: {
    transcript_ids: string[];
    annotation_set_ids: string[];
    suggestion_set_ids: string[];
  };
}

export interface SegmentDoc {
  speech: string;
  facial_expression: string;
  head_position: string;
}

export interface UtteranceDoc {
  index: number;
  speaker: 'robot' | 'user';
  text: string;
  segments: SegmentDoc[];
  timestamp: string;
}

export interface SessionDoc {
  id: string;
  project_id: string;
  prompt_version_id: string;
  status: 'active' | 'ended';
  utterances: UtteranceDoc[];
}

export interface TranscriptDoc {
  id: string;
  project_id: string;
  prompt_version_id: string;
  started_at: string;
  ended_at: string;
  utterances: UtteranceDoc[];
  idle_behaviors: unknown[];
}

export interface SpanDoc {
  utterance_index: number;
  start: number;
  end: number;
}

export interface AnnotationDoc {
  id: string;
  transcript_id: string;
  span: SpanDoc;
  tags: string[];
  comment: string | null;
  created_at: string;
}

export interface ConflictDoc {
  a_id: string;
  b_id: string;
  utterance_index: number;
  antonyms: [string, string][];
}

export interface SuggestionSetDoc {
  id: string;
  project_id: string;
  prompt_version_id: string;
  source_transcript_id: string;
  source_annotation_digest_hash: string;
  maintain: string[];
  reduce_avoid: string[];
  positive_cues: string[];
  adjustments: string[];
  designer_edited: boolean;
  truncated: boolean;
  created_at: string;
}

export interface DraftDoc {
  id: string;
  body: string;
  based_on_version_id: string;
  suggestion_set_id: string;
  created_at: string;
}

export interface ElicitationTurn {
  speaker: 'agent' | 'designer';
  text: string;
}

export interface ElicitationSessionDoc {
  id: string;
  project_id: string;
  status: 'active' | 'drafting' | 'completed' | 'abandoned';
  turns: ElicitationTurn[];
  slot_state: Record<string, { value: string | null; confirmed: boolean }>;
}

export interface AnalysisEvidence {
  text: string;
  start: number;
}

export interface AnalysisDoc {
  mode: string;
  clarity: {
    slots: Record<string, boolean>;
    score: number;
    evidence: Record<string, AnalysisEvidence[]>;
    mode: string;
  };
  specificity: {
    descriptive_words: { count: number; evidence: AnalysisEvidence[] };
    constraints: { count: number; evidence: AnalysisEvidence[] };
    examples: { count: number; evidence: AnalysisEvidence[] };
  };
}

export interface CycleDoc {
  version_id: string;
  origin: string;
  transcripts: string[];
  annotation_sets: string[];
  suggestion_sets: string[];
  children: string[];
}

/** Error envelope from the service, carrying its stable machine code. */
export class ApiError extends Error {
  readonly code: string;
  readonly status: number;

  constructor(code: string, message: string, status: number) {
    super(message);
    this.name = 'ApiError';
    this.code = code;
    this.status = status;
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private readonly baseUrl: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/+$/, '');
    const impl = fetchImpl ?? (globalThis.fetch as FetchLike | undefined);
    if (!impl) {
      throw new Error('no fetch implementation available');
    }
    this.fetchImpl = impl;
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method, headers: {} };
    if (body !== undefined) {
      init.headers = { 'content-type': 'application/json' };
      init.body = JSON.stringify(body);
    }
    const response = await this.fetchImpl(this.baseUrl + path, init);
    if (!response.ok) {
      let code = 'internal_error';
      let message = `${method} ${path} failed with status ${response.status}`;
      try {
        const payload = (await response.json()) as { error?: { code?: string; message?: string } };
        if (payload.error?.code) {
          code = payload.error.code;
          message = payload.error.message ?? message;
        }
      } catch {
        // non-JSON error body: keep the fallback code
      }
      throw new ApiError(code, message, response.status);
    }
    return (await response.json()) as T;
  }

  health(): Promise<{ status: string }> {
    return this.request('GET', '/healthz');
  }

  // -- projects ------------------------------------------------------------

  createProject(name: string, brief = ''): Promise<ProjectDoc> {
    return this.request('POST', '/projects', { name, brief });
  }

  listProjects(): Promise<ProjectDoc[]> {
    return this.request('GET', '/projects');
  }

  getProject(projectId: string): Promise<ProjectDoc> {
    return this.request('GET', `/projects/${projectId}`);
  }

  designCycles(projectId: string): Promise<CycleDoc[]> {
    return this.request('GET', `/projects/${projectId}/cycles`);
  }

  // -- elicitation -----------------------------------------------------------

  startElicitation(projectId: string): Promise<ElicitationSessionDoc> {
    return this.request('POST', `/projects/${projectId}/elicitation`);
  }

  elicitationMessage(
    projectId: string,
    sessionId: string,
    text: string,
  ): Promise<{ reply: string; session: ElicitationSessionDoc }> {
    return this.request('POST', `/projects/${projectId}/elicitation/${sessionId}/messages`, {
      text,
    });
  }

  elicitationFinalize(
    projectId: string,
    sessionId: string,
  ): Promise<{ draft: string; session: ElicitationSessionDoc }> {
    return this.request('POST', `/projects/${projectId}/elicitation/${sessionId}/finalize`);
  }

  // -- versions --------------------------------------------------------------

  commitVersion(
    projectId: string,
    body: string,
    origin = 'manual',
    parentId?: string | null,
  ): Promise<VersionDoc> {
    const payload: Record<string, unknown> = { body, origin };
    if (parentId != null) {
      payload.parent_id = parentId;
    }
    return this.request('POST', `/projects/${projectId}/versions`, payload);
  }

  listVersions(projectId: string): Promise<VersionDoc[]> {
    return this.request('GET', `/projects/${projectId}/versions`);
  }

  getVersion(versionId: string): Promise<VersionDoc> {
    return this.request('GET', `/versions/${versionId}`);
  }

  revert(versionId: string): Promise<VersionDoc> {
    return this.request('POST', `/versions/${versionId}/revert`);
  }

  lineage(versionId: string): Promise<VersionDoc[]> {
    return this.request('GET', `/versions/${versionId}/lineage`);
  }

  diff(versionId: string, otherId: string): Promise<{ diff: string }> {
    return this.request('GET', `/versions/${versionId}/diff/${otherId}`);
  }

  analysis(versionId: string, mode = 'heuristic'): Promise<AnalysisDoc> {
    return this.request('GET', `/versions/${versionId}/analysis?mode=${mode}`);
  }

  // -- test sessions -----------------------------------------------------------

  startSession(projectId: string, promptVersionId: string): Promise<SessionDoc> {
    return this.request('POST', `/projects/${projectId}/sessions`, {
      prompt_version_id: promptVersionId,
    });
  }

  userTurn(sessionId: string, text: string): Promise<{ utterance: UtteranceDoc }> {
    return this.request('POST', `/sessions/${sessionId}/turns`, { text });
  }

  endSession(sessionId: string): Promise<TranscriptDoc> {
    return this.request('POST', `/sessions/${sessionId}/end`);
  }

  getTranscript(transcriptId: string): Promise<TranscriptDoc> {
    return this.request('GET', `/transcripts/${transcriptId}`);
  }

  // -- annotations -------------------------------------------------------------

  addAnnotation(
    transcriptId: string,
    span: SpanDoc,
    tags: string[],
    comment?: string | null,
  ): Promise<AnnotationDoc> {
    const payload: Record<string, unknown> = { span, tags };
    if (comment != null) {
      payload.comment = comment;
    }
    return this.request('POST', `/transcripts/${transcriptId}/annotations`, payload);
  }

  listAnnotations(transcriptId: string): Promise<AnnotationDoc[]> {
    return this.request('GET', `/transcripts/${transcriptId}/annotations`);
  }

  conflicts(transcriptId: string): Promise<ConflictDoc[]> {
    return this.request('GET', `/transcripts/${transcriptId}/conflicts`);
  }

  digest(transcriptId: string): Promise<{ digest: string }> {
    return this.request('GET', `/transcripts/${transcriptId}/digest`);
  }

  // -- refinement ----------------------------------------------------------------

  generateSuggestions(versionId: string, transcriptId: string): Promise<SuggestionSetDoc> {
    return this.request('POST', `/versions/${versionId}/suggestions`, {
      transcript_id: transcriptId,
    });
  }

  getSuggestions(suggestionSetId: string): Promise<SuggestionSetDoc> {
    return this.request('GET', `/suggestions/${suggestionSetId}`);
  }

  editSuggestions(
    suggestionSetId: string,
    edits: Partial<Record<'maintain' | 'reduce_avoid' | 'positive_cues' | 'adjustments', string[]>>,
  ): Promise<SuggestionSetDoc> {
    return this.request('POST', `/suggestions/${suggestionSetId}/edit`, { edits });
  }

  refine(versionId: string, suggestionSetId: string): Promise<DraftDoc> {
    return this.request('POST', `/versions/${versionId}/refine`, {
      suggestion_set_id: suggestionSetId,
    });
  }

  getDraft(draftId: string): Promise<DraftDoc> {
    return this.request('GET', `/drafts/${draftId}`);
  }

  commitDraft(draftId: string, editedBody?: string | null): Promise<VersionDoc> {
    const payload: Record<string, unknown> = {};
    if (editedBody != null) {
      payload.edited_body = editedBody;
    }
    return this.request('POST', `/drafts/${draftId}/commit`, payload);
  }
}
