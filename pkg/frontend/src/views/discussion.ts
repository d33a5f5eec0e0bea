/* Participant discussion screen: focal question on top, positions with
 * con arguments left and pro arguments right, a contested-positions summary
 * panel, and a navigable overview tree. */

import type { ApiClient } from "../api/client.js";
import type { ContestedEntry, Contribution, DiscussionView } from "../api/types.js";
import { clear, el } from "./dom.js";

export class DiscussionScreen {
  private view: DiscussionView | null = null;
  private contested: ContestedEntry[] = [];

  constructor(
    private root: HTMLElement,
    private api: ApiClient,
    private participant: string,
  ) {}

  async load(discussionId: string): Promise<void> {
    this.view = await this.api.getDiscussion(discussionId);
    this.contested = (await this.api.getContested(discussionId)).positions;
    this.render();
  }

  focus(contributionId: string): void {
    for (const node of this.root.querySelectorAll(".contribution.focused")) {
      node.classList.remove("focused");
    }
    const target = this.root.querySelector(`[data-node="${contributionId}"]`);
    if (target) {
      target.classList.add("focused");
      (target as HTMLElement).scrollIntoView?.({ block: "center" });
    }
  }

  private byId(): Map<string, Contribution> {
    return new Map(this.view!.contributions.map((c) => [c.id, c]));
  }

  render(): void {
    if (!this.view) return;
    clear(this.root);
    const view = this.view;
    const nodes = this.byId();
    const focal = nodes.get(view.discussion.focal_question)!;

    this.root.append(
      el("header", { class: "focal-question" }, [
        el("h1", { "data-node": focal.id, class: "contribution" }, [focal.text]),
        el("span", { class: "phase" }, [view.discussion.phase]),
      ]),
    );

    const contestedPanel = el("aside", { class: "contested-panel" }, [
      el("h2", {}, ["Most contested"]),
      el("ol", {}, this.contested.map((entry) =>
        el("li", { "data-position": entry.position_id }, [
          el("button", {
            class: "jump",
            onclick: () => this.focus(entry.position_id),
          }, [entry.text]),
          el("span", { class: "score" },
            [` pro ${entry.pro} / con ${entry.con} (${entry.score.toFixed(3)})`]),
        ]))),
    ]);

    const positions = (view.children[focal.id] ?? [])
      .map((id) => nodes.get(id)!)
      .filter((node) => node.kind === "Position");
    const center = el("main", { class: "positions" }, positions.map((position) =>
      this.renderPosition(position, nodes, view.children)));

    const issueRoots = [focal.id,
      ...view.contributions.filter((c) => c.kind === "Issue" && c.id !== focal.id)
        .map((c) => c.id)];
    const tree = el("nav", { class: "overview-tree" }, [
      el("h2", {}, ["Overview"]),
      ...issueRoots.map((rootId) => this.renderTree(rootId, nodes, view.children)),
    ]);

    this.root.append(el("div", { class: "discussion-layout" },
      [contestedPanel, center, tree]));

    // other issues imported alongside the focal question
    const extraIssues = view.contributions.filter(
      (c) => c.kind === "Issue" && c.id !== focal.id);
    if (extraIssues.length > 0) {
      this.root.append(el("section", { class: "other-issues" }, [
        el("h2", {}, ["Related issues"]),
        ...extraIssues.map((issue) => this.renderPositionGroup(issue, nodes, view.children)),
      ]));
    }
  }

  private renderPositionGroup(issue: Contribution, nodes: Map<string, Contribution>,
                              children: Record<string, string[]>): HTMLElement {
    return el("div", { class: "issue-group" }, [
      el("h3", { "data-node": issue.id, class: "contribution" }, [issue.text]),
      ...(children[issue.id] ?? [])
        .map((id) => nodes.get(id)!)
        .filter((node) => node.kind === "Position")
        .map((position) => this.renderPosition(position, nodes, children)),
    ]) as HTMLElement;
  }

  private renderPosition(position: Contribution, nodes: Map<string, Contribution>,
                         children: Record<string, string[]>): HTMLElement {
    const args = (children[position.id] ?? []).map((id) => nodes.get(id)!);
    const cons = args.filter((a) => a.stance === "Con");
    const pros = args.filter((a) => a.stance === "Pro");
    const renderArg = (argument: Contribution): HTMLElement =>
      el("li", { "data-node": argument.id, class: `contribution argument ${argument.stance.toLowerCase()}` }, [
        el("p", {}, [argument.text]),
        this.endorseControl(argument),
        ...(children[argument.id] ?? []).map((id) =>
          el("ul", { class: "counters" }, [renderArg(nodes.get(id)!)])),
      ]) as HTMLElement;
    return el("article", { class: "position contribution", "data-node": position.id }, [
      el("h3", {}, [position.text]),
      this.endorseControl(position),
      el("div", { class: "argument-columns" }, [
        el("ul", { class: "cons" }, cons.map(renderArg)),
        el("ul", { class: "pros" }, pros.map(renderArg)),
      ]),
    ]) as HTMLElement;
  }

  private endorseControl(node: Contribution): HTMLElement {
    const count = el("span", { class: "endorse-count" }, [String(node.endorsements)]);
    const button = el("button", {
      class: "endorse",
      onclick: async () => {
        const result = await this.api.endorse(node.id, this.participant);
        count.textContent = String(result.endorsements);
      },
    }, ["agree"]);
    return el("span", { class: "endorse-control" },
      [button, count, this.sourceLink(node)]) as HTMLElement;
  }

  /** Every rendered claim carries a resolvable source link: either the
   * author of an online post or the transcript span it was lifted from. */
  private sourceLink(node: Contribution): HTMLElement {
    const provenance = node.provenance;
    if (provenance.source === "TranscriptSpan") {
      return el("a", {
        class: "source-link transcript",
        "data-source": node.id,
        href: `#/transcript/${provenance.transcript_id}/${provenance.segment_index}`,
        title: `transcript ${provenance.transcript_id}, segment `
          + `${provenance.segment_index}, chars ${provenance.char_range![0]}..`
          + `${provenance.char_range![1]}`,
      }, ["source: transcript"]) as HTMLElement;
    }
    return el("span", {
      class: "source-link online",
      "data-source": node.id,
      title: `posted by ${node.author}`,
    }, [`source: ${node.author}`]) as HTMLElement;
  }

  private renderTree(rootId: string, nodes: Map<string, Contribution>,
                     children: Record<string, string[]>): HTMLElement {
    const node = nodes.get(rootId)!;
    return el("ul", { class: "tree" }, [
      el("li", {}, [
        el("button", {
          class: "tree-node",
          "data-tree": node.id,
          onclick: () => this.focus(node.id),
        }, [node.text.slice(0, 48)]),
        ...(children[rootId] ?? []).map((child) =>
          this.renderTree(child, nodes, children)),
      ]),
    ]) as HTMLElement;
  }
}
