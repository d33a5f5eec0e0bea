/* Live dashboards.
 *
 * The public dashboard shows the engagement timeline only. The facilitator
 * dashboard adds spike alerts and suggested prompts with a "mark delivered"
 * control; both arrive over the facilitator push stream, and delivered
 * prompts move into a history list. Timelines refresh from snapshot polls;
 * alerts and prompts render the moment their stream message lands. */

import type { ApiClient } from "../api/client.js";
import type {
  FacilitatorSnapshot,
  PromptPayload,
  PublicSnapshot,
  SpikeAlertPayload,
  StreamMessage,
} from "../api/types.js";
import { StreamConnection, StreamOptions } from "../api/stream.js";
import { clear, el } from "./dom.js";

export class PublicDashboard {
  snapshot: PublicSnapshot | null = null;

  constructor(protected root: HTMLElement, protected api: ApiClient,
              protected eventId: string) {}

  async refresh(): Promise<void> {
    this.snapshot = await this.api.publicSnapshot(this.eventId);
    this.render();
  }

  protected timeline(): HTMLElement {
    const snapshot = this.snapshot!;
    const cards = Object.keys(snapshot.series.counts).sort();
    const labelOf = new Map(snapshot.deck.cards.map((c) => [c.card_id, c.label]));
    const rows = cards.map((card) => {
      const values = snapshot.series.counts[card];
      const peak = Math.max(1, ...values);
      return el("div", { class: "timeline-row", "data-card": card }, [
        el("span", { class: "card-label" }, [labelOf.get(card) ?? card]),
        el("span", { class: "total" }, [String(snapshot.totals[card] ?? 0)]),
        el("div", { class: "bars" }, values.map((value, index) =>
          el("i", {
            class: "bar",
            "data-window": index,
            style: `height:${Math.round((value / peak) * 28) + 2}px`,
            title: `window ${index}: ${value}`,
          }))),
      ]);
    });
    return el("section", { class: "timeline" }, [
      el("h2", {}, ["Engagement"]),
      ...rows,
    ]) as HTMLElement;
  }

  render(): void {
    if (!this.snapshot) return;
    clear(this.root);
    this.root.append(el("header", {}, [
      el("h1", {}, [this.snapshot.title]),
      el("span", { class: "clock" }, [`${Math.floor(this.snapshot.clock_ms / 1000)}s`]),
    ]));
    this.root.append(this.timeline());
  }
}

export class FacilitatorDashboard extends PublicDashboard {
  alerts: SpikeAlertPayload[] = [];
  prompts = new Map<string, PromptPayload>();
  private connection: StreamConnection | null = null;

  async start(streamOptions: StreamOptions = {}): Promise<void> {
    const full = await this.api.facilitatorSnapshot(this.eventId);
    this.snapshot = full;
    this.alerts = [...full.alerts];
    for (const prompt of full.prompts) this.prompts.set(prompt.id, prompt);
    this.render();
    this.connection = new StreamConnection(
      (lastSeq) => this.api.streamUrl(`/events/${this.eventId}/stream/facilitator`, lastSeq),
      (message) => this.onMessage(message),
      streamOptions,
    );
    void this.connection.run();
  }

  stop(): void {
    this.connection?.close();
  }

  onMessage(message: StreamMessage): void {
    if (message.kind === "alerts_detected") {
      const alert = message.data.alert as unknown as SpikeAlertPayload;
      if (!this.alerts.some((known) => known.id === alert.id)) this.alerts.push(alert);
      this.render();
    } else if (message.kind === "prompt_drafted") {
      const prompt = message.data.prompt as unknown as PromptPayload;
      this.prompts.set(prompt.id, prompt);
      this.render();
    } else if (message.kind === "prompt_delivered") {
      const id = message.data.prompt_id as string;
      const prompt = this.prompts.get(id);
      if (prompt) this.prompts.set(id, { ...prompt, delivered: true });
      this.render();
    }
  }

  async markDelivered(promptId: string): Promise<void> {
    await this.api.markDelivered(this.eventId, promptId);
    const prompt = this.prompts.get(promptId);
    if (prompt) this.prompts.set(promptId, { ...prompt, delivered: true });
    this.render();
  }

  render(): void {
    if (!this.snapshot) return;
    super.render();
    const cardLabel = new Map(this.snapshot.deck.cards.map((c) => [c.card_id, c.label]));

    this.root.append(el("section", { class: "alerts" }, [
      el("h2", {}, ["Spike alerts"]),
      el("ul", {}, this.alerts.map((alert) =>
        el("li", { class: "alert", "data-alert": alert.id }, [
          el("strong", {}, [cardLabel.get(alert.card_id) ?? alert.card_id]),
          ` z=${alert.z_score.toFixed(1)} in window ${alert.window_index}`,
          alert.theme ? el("em", { class: "theme" }, [` theme: ${alert.theme}`]) : "",
        ]))),
    ]));

    const pending = [...this.prompts.values()].filter((p) => !p.delivered);
    const history = [...this.prompts.values()].filter((p) => p.delivered);
    this.root.append(el("section", { class: "prompts" }, [
      el("h2", {}, ["Suggested questions"]),
      el("ul", { class: "pending" }, pending.map((prompt) =>
        el("li", { class: `prompt kind-${prompt.kind.toLowerCase()}`, "data-prompt": prompt.id }, [
          el("span", { class: "kind" }, [prompt.kind]),
          el("p", {}, [prompt.text]),
          el("button", {
            class: "deliver",
            onclick: () => void this.markDelivered(prompt.id),
          }, ["Mark delivered"]),
        ]))),
      el("h3", {}, ["Delivered"]),
      el("ul", { class: "history" }, history.map((prompt) =>
        el("li", { class: "prompt delivered", "data-prompt": prompt.id }, [
          el("span", { class: "kind" }, [prompt.kind]),
          el("p", {}, [prompt.text]),
        ]))),
    ]));
  }
}
