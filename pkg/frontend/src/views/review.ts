/* Curator review screen for one import session.
 *
 * The transcript pane colours claim- and premise-derived spans; the side
 * panel mirrors the draft IBIS tree and round-trips edits through the edit
 * endpoint without a page reload. Action controls follow the session state
 * machine: anything illegal in the current state is absent from the DOM,
 * not merely disabled. */

import type { ApiClient } from "../api/client.js";
import type { DraftNode, ImportSessionPayload, SessionState, TranscriptPayload } from "../api/types.js";
import { clear, el } from "./dom.js";

const CONTROLS_BY_STATE: Record<SessionState, string[]> = {
  Uploaded: ["analyze"],
  Analyzed: [],
  UnderReview: ["edit", "approve", "reject"],
  Approved: ["merge"],
  Rejected: [],
  Merged: [],
};

export class ReviewScreen {
  private session: ImportSessionPayload | null = null;
  private transcript: TranscriptPayload | null = null;

  constructor(private root: HTMLElement, private api: ApiClient) {}

  async load(sessionId: string): Promise<void> {
    this.session = await this.api.getImport(sessionId);
    this.transcript = await this.api.getTranscript(this.session.transcript_id);
    this.render();
  }

  /** Re-render from an updated session payload (no refetch, no reload). */
  update(session: ImportSessionPayload): void {
    this.session = session;
    this.render();
  }

  allowedControls(): string[] {
    return this.session ? CONTROLS_BY_STATE[this.session.state] : [];
  }

  async retype(nodeId: string, stance: "Pro" | "Con"): Promise<void> {
    const updated = await this.api.editImport(this.session!.id,
      [{ op: "retype", node: nodeId, stance }]);
    this.update(updated);
  }

  render(): void {
    if (!this.session || !this.transcript) return;
    clear(this.root);
    const session = this.session;

    this.root.append(el("header", {}, [
      el("h1", {}, [`Import ${session.id}`]),
      el("span", { class: "session-state", "data-state": session.state }, [session.state]),
    ]));

    this.root.append(el("div", { class: "review-layout" }, [
      this.renderTranscript(),
      this.renderDraftPanel(),
    ]));
    this.root.append(this.renderActions());
  }

  private spansBySegment(): Map<number, DraftNode[]> {
    const out = new Map<number, DraftNode[]>();
    for (const node of this.session!.draft.nodes) {
      const segment = node.provenance.segment_index;
      if (segment === null) continue;
      const bucket = out.get(segment) ?? [];
      bucket.push(node);
      out.set(segment, bucket);
    }
    for (const bucket of out.values()) {
      bucket.sort((a, b) => (a.provenance.char_range![0] - b.provenance.char_range![0]));
    }
    return out;
  }

  private renderTranscript(): HTMLElement {
    const spans = this.spansBySegment();
    return el("section", { class: "transcript-pane" },
      this.transcript!.segments.map((segment, index) => {
        const parts: (Node | string)[] = [];
        let cursor = 0;
        for (const node of spans.get(index) ?? []) {
          const [start, end] = node.provenance.char_range!;
          if (node.kind === "Issue") continue; // the working issue spans the whole turn
          if (start > cursor) parts.push(segment.text.slice(cursor, start));
          const componentClass = node.kind === "Position" ? "claim" : "premise";
          parts.push(el("mark", {
            class: `span-${componentClass}`,
            "data-draft-node": node.id,
            title: `${node.kind}${node.stance === "None" ? "" : ` (${node.stance})`}`,
          }, [segment.text.slice(start, end)]));
          cursor = Math.max(cursor, end);
        }
        if (cursor < segment.text.length) parts.push(segment.text.slice(cursor));
        return el("p", { class: "segment", "data-segment": index }, [
          el("strong", {}, [`${segment.speaker}: `]),
          ...parts,
        ]);
      })) as HTMLElement;
  }

  private renderDraftPanel(): HTMLElement {
    const session = this.session!;
    const editable = this.allowedControls().includes("edit");
    const items = session.draft.nodes.map((node) => {
      const controls: Node[] = [];
      if (editable && node.kind === "Argument") {
        const flipTo = node.stance === "Pro" ? "Con" : "Pro";
        controls.push(el("button", {
          class: "retype",
          "data-retype": node.id,
          onclick: () => void this.retype(node.id, flipTo),
        }, [`mark ${flipTo}`]));
      }
      return el("li", {
        class: `draft-node kind-${node.kind.toLowerCase()}`,
        "data-draft-id": node.id,
        "data-stance": node.stance,
      }, [
        el("span", { class: "kind" }, [node.kind]),
        node.stance !== "None" ? el("span", { class: "stance" }, [node.stance]) : "",
        el("span", { class: "text" }, [node.text]),
        el("span", { class: "author" }, [` by ${node.author}`]),
        ...controls,
      ]);
    });
    return el("aside", { class: "draft-panel" }, [
      el("h2", {}, ["Draft structure"]),
      el("ul", {}, items),
      ...(session.draft.warnings.length
        ? [el("p", { class: "warnings" }, [session.draft.warnings.join("; ")])]
        : []),
    ]) as HTMLElement;
  }

  private renderActions(): HTMLElement {
    const allowed = this.allowedControls();
    const buttons: Node[] = [];
    if (allowed.includes("approve")) {
      buttons.push(el("button", {
        class: "action-approve",
        onclick: async () => this.update(await this.api.approveImport(this.session!.id)),
      }, ["Approve"]));
    }
    if (allowed.includes("reject")) {
      buttons.push(el("button", {
        class: "action-reject",
        onclick: async () =>
          this.update(await this.api.rejectImport(this.session!.id, "rejected in review")),
      }, ["Reject"]));
    }
    if (allowed.includes("merge")) {
      buttons.push(el("button", {
        class: "action-merge",
        onclick: async () => {
          await this.api.mergeImport(this.session!.id);
          this.update(await this.api.getImport(this.session!.id));
        },
      }, ["Merge into discussion"]));
    }
    return el("footer", { class: "actions" }, buttons) as HTMLElement;
  }
}
