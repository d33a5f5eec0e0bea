/** Payload shapes of the deliberation service API (projections, no logic). */

export type ContributionKind = "Issue" | "Position" | "Argument";
export type Stance = "Pro" | "Con" | "None";

export interface Contribution {
  id: string;
  discussion_id: string;
  kind: ContributionKind;
  stance: Stance;
  text: string;
  author: string;
  parent: string | null;
  provenance: {
    source: "OnlinePost" | "TranscriptSpan";
    transcript_id: string | null;
    segment_index: number | null;
    char_range: [number, number] | null;
    import_session_id: string | null;
  };
  created_at: string;
  endorsements: number;
}

export interface DiscussionView {
  discussion: {
    id: string;
    title: string;
    focal_question: string;
    phase: string;
    members: string[];
  };
  contributions: Contribution[];
  children: Record<string, string[]>;
}

export interface ContestedEntry {
  position_id: string;
  text: string;
  score: number;
  pro: number;
  con: number;
}

export interface HierarchyLeaf {
  id: string;
  name: string;
  value: number;
}

export interface HierarchyCluster {
  name: string;
  cluster_index: number;
  description: string;
  children: HierarchyLeaf[];
}

export interface ClustersPayload {
  discussion_id: string;
  k: number;
  fingerprint: string;
  labels: { cluster_index: number; title: string; description: string; member_ids: string[] }[];
  hierarchy: { name: string; children: HierarchyCluster[] };
  points: { id: string; x: number; y: number; cluster: number; text: string }[];
}

export interface ThemeMapPayload {
  ids: string[];
  coords: [number, number][];
  method_tag: string;
  explained_variance: [number, number];
}

export interface TranscriptPayload {
  id: string;
  event_title: string;
  language: string;
  segments: { speaker: string; start_ms: number; end_ms: number; text: string }[];
}

export interface DraftNode {
  id: string;
  kind: ContributionKind;
  stance: Stance;
  text: string;
  author: string;
  parent: string | null;
  provenance: Contribution["provenance"];
}

export type SessionState =
  | "Uploaded" | "Analyzed" | "UnderReview" | "Approved" | "Rejected" | "Merged";

export interface ImportSessionPayload {
  id: string;
  transcript_id: string;
  target_discussion_id: string;
  state: SessionState;
  draft: { nodes: DraftNode[]; warnings: string[] };
  audit: { actor: string; action: string; timestamp_ms: number }[];
}

export interface DeckCard {
  card_id: string;
  label: string;
  category: "Agree" | "Disagree" | "Emotion" | "Custom";
}

export interface PublicSnapshot {
  event_id: string;
  title: string;
  closed: boolean;
  clock_ms: number;
  deck: { id: string; event_id: string; cards: DeckCard[] };
  window_ms: number;
  series: {
    window_ms: number;
    n_windows: number;
    counts: Record<string, number[]>;
    accepted_total: number;
  };
  totals: Record<string, number>;
}

export interface SpikeAlertPayload {
  id: string;
  event_id: string;
  card_id: string;
  window_index: number;
  z_score: number;
  count: number;
  window_range_ms: [number, number];
  linked_segment: { transcript_id: string; segment_index: number } | null;
  theme: string | null;
}

export interface PromptPayload {
  id: string;
  kind: "Open" | "Clarifying" | "Provocative";
  text: string;
  grounding: Record<string, unknown>;
  delivered: boolean;
}

export interface FacilitatorSnapshot extends PublicSnapshot {
  alerts: SpikeAlertPayload[];
  prompts: PromptPayload[];
}

export interface StreamMessage {
  seq: number;
  kind: string;
  data: Record<string, unknown>;
}
