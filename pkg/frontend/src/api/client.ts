/** Typed client for the deliberation service. The client never holds domain
 * state of its own: every view renders straight from these payloads. */

import type {
  ClustersPayload,
  ContestedEntry,
  DiscussionView,
  FacilitatorSnapshot,
  ImportSessionPayload,
  PublicSnapshot,
  ThemeMapPayload,
  TranscriptPayload,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(public status: number, public code: string, message: string) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private baseUrl: string,
    private token: string,
    private fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers: {
        Authorization: `Bearer ${this.token}`,
        ...(body !== undefined ? { "Content-Type": "application/json" } : {}),
      },
      ...(body !== undefined ? { body: JSON.stringify(body) } : {}),
    });
    const payload = await response.json();
    if (!response.ok) {
      const error = (payload as { error?: { code?: string; message?: string } }).error ?? {};
      throw new ApiError(response.status, error.code ?? "Error", error.message ?? "request failed");
    }
    return payload as T;
  }

  getDiscussion(id: string): Promise<DiscussionView> {
    return this.request("GET", `/discussions/${id}`);
  }

  addContribution(discussionId: string, input: {
    kind: string; stance: string; text: string; author: string; parent: string | null;
  }): Promise<{ contribution_id: string }> {
    return this.request("POST", `/discussions/${discussionId}/contributions`, input);
  }

  endorse(contributionId: string, participant: string): Promise<{ endorsements: number }> {
    return this.request("POST", `/contributions/${contributionId}/endorse`, { participant });
  }

  getContested(discussionId: string): Promise<{ positions: ContestedEntry[] }> {
    return this.request("GET", `/discussions/${discussionId}/analytics/contested`);
  }

  getClusters(discussionId: string, k: number): Promise<ClustersPayload> {
    return this.request("GET", `/discussions/${discussionId}/analytics/clusters?k=${k}`);
  }

  getThemeMap(discussionId: string): Promise<ThemeMapPayload> {
    return this.request("GET", `/discussions/${discussionId}/analytics/thememap`);
  }

  getTranscript(transcriptId: string): Promise<TranscriptPayload> {
    return this.request("GET", `/transcripts/${transcriptId}`);
  }

  getImport(sessionId: string): Promise<ImportSessionPayload> {
    return this.request("GET", `/imports/${sessionId}`);
  }

  editImport(sessionId: string, patch: object[]): Promise<ImportSessionPayload> {
    return this.request("POST", `/imports/${sessionId}/edit`, { patch });
  }

  approveImport(sessionId: string): Promise<ImportSessionPayload> {
    return this.request("POST", `/imports/${sessionId}/approve`, {});
  }

  rejectImport(sessionId: string, reason: string): Promise<ImportSessionPayload> {
    return this.request("POST", `/imports/${sessionId}/reject`, { reason });
  }

  mergeImport(sessionId: string): Promise<{ contribution_ids: string[] }> {
    return this.request("POST", `/imports/${sessionId}/merge`, {});
  }

  getEvent(eventId: string): Promise<{ event_id: string; deck: PublicSnapshot["deck"] }> {
    return this.request("GET", `/events/${eventId}`);
  }

  postReflection(eventId: string, participant: string, cardId: string, tMs: number):
      Promise<{ status: string }> {
    return this.request("POST", `/events/${eventId}/reflections`,
      { participant, card_id: cardId, t_ms: tMs });
  }

  publicSnapshot(eventId: string): Promise<PublicSnapshot> {
    return this.request("GET", `/events/${eventId}/snapshot/public`);
  }

  facilitatorSnapshot(eventId: string): Promise<FacilitatorSnapshot> {
    return this.request("GET", `/events/${eventId}/snapshot/facilitator`);
  }

  markDelivered(eventId: string, promptId: string): Promise<{ delivered: boolean }> {
    return this.request("POST", `/events/${eventId}/prompts/${promptId}/delivered`, {});
  }

  streamUrl(path: string, lastSeq: number): string {
    const sep = path.includes("?") ? "&" : "?";
    return `${this.baseUrl}${path}${sep}last_seq=${lastSeq}&token=${this.token}`;
  }
}
