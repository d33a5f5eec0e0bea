/* Hash-routed entry point: #/discussion/<id>, #/review/<session>,
 * #/analytics/<id>, #/reflect/<event>, #/facilitator/<event>,
 * #/public/<event>. Server URL and token come from query parameters
 * (?api=...&token=...) so one static bundle serves every role. */

import { ApiClient } from "./api/client.js";
import { AnalyticsScreen } from "./views/analytics.js";
import { DiscussionScreen } from "./views/discussion.js";
import { FacilitatorDashboard, PublicDashboard } from "./views/facilitator.js";
import { ReflectScreen } from "./views/reflect.js";
import { ReviewScreen } from "./views/review.js";

function config() {
  const params = new URLSearchParams(window.location.search);
  return {
    api: params.get("api") ?? "",
    token: params.get("token") ?? "",
    participant: params.get("participant") ?? `guest-${Math.floor(Math.random() * 1e6)}`,
  };
}

async function route(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) return;
  const { api, token, participant } = config();
  const client = new ApiClient(api, token);
  const [, page, id] = window.location.hash.split("/");

  if (page === "discussion" && id) {
    await new DiscussionScreen(root, client, participant).load(id);
  } else if (page === "review" && id) {
    await new ReviewScreen(root, client).load(id);
  } else if (page === "analytics" && id) {
    await new AnalyticsScreen(root, client, id).load();
  } else if (page === "reflect" && id) {
    const started = Date.now();
    await new ReflectScreen(root, client, id, participant, () => Date.now() - started).load();
  } else if (page === "facilitator" && id) {
    const dashboard = new FacilitatorDashboard(root, client, id);
    await dashboard.start();
    setInterval(() => void dashboard.refresh(), 2000);
  } else if (page === "public" && id) {
    const dashboard = new PublicDashboard(root, client, id);
    await dashboard.refresh();
    setInterval(() => void dashboard.refresh(), 2000);
  } else {
    root.textContent = "Pick a view: #/discussion/<id>, #/review/<session>, " +
      "#/analytics/<discussion>, #/reflect/<event>, #/facilitator/<event>, #/public/<event>";
  }
}

window.addEventListener("hashchange", () => void route());
void route();
