/* Audience reflection clicker: one button per deck card, taps post
 * reflection events stamped with the event-relative clock. */

import type { ApiClient } from "../api/client.js";
import type { PublicSnapshot } from "../api/types.js";
import { clear, el } from "./dom.js";

export class ReflectScreen {
  private deck: PublicSnapshot["deck"] | null = null;
  private tapCount = 0;

  constructor(
    private root: HTMLElement,
    private api: ApiClient,
    private eventId: string,
    private participant: string,
    private clockMs: () => number,
  ) {}

  async load(): Promise<void> {
    const snapshot = await this.api.publicSnapshot(this.eventId);
    this.deck = snapshot.deck;
    this.render();
  }

  async tap(cardId: string): Promise<void> {
    const result = await this.api.postReflection(
      this.eventId, this.participant, cardId, this.clockMs());
    if (result.status === "accepted") {
      this.tapCount += 1;
      const counter = this.root.querySelector(".tap-count");
      if (counter) counter.textContent = String(this.tapCount);
    }
  }

  render(): void {
    if (!this.deck) return;
    clear(this.root);
    this.root.append(el("div", { class: "card-deck" },
      this.deck.cards.map((card) =>
        el("button", {
          class: `reflection-card category-${card.category.toLowerCase()}`,
          "data-card": card.card_id,
          onclick: () => void this.tap(card.card_id),
        }, [card.label]))));
    this.root.append(el("p", {}, [
      "Your reflections: ",
      el("span", { class: "tap-count" }, ["0"]),
    ]));
  }
}
