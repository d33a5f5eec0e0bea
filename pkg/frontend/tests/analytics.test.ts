import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api/client.js";
import type { ClustersPayload } from "../src/api/types.js";
import { AnalyticsScreen } from "../src/views/analytics.js";
import { sunburstLayout } from "../src/viz/sunburst.js";
import { treemapLayout } from "../src/viz/treemap.js";
import { FakeApi, fixture } from "./helpers/fakeApi.js";

describe("analytics screen", () => {
  let fake: FakeApi;
  let screen: AnalyticsScreen;
  let root: HTMLElement;

  beforeEach(async () => {
    fake = new FakeApi();
    root = document.createElement("div");
    document.body.replaceChildren(root);
    const client = new ApiClient("http://svc", "token", fake.fetch);
    screen = new AnalyticsScreen(root, client, "d1");
    await screen.load();
  });

  it("k sweep 2..8 issues exactly 7 cluster fetches and zero embedding refetches", async () => {
    fake.calls = []; // drop the initial load (k=4)
    for (let k = 2; k <= 8; k++) {
      await screen.setK(k); // every step changes k, including back through 4
    }
    expect(fake.countCalls(/analytics\/clusters/)).toBe(7);
    expect(fake.countCalls(/embedding/)).toBe(0);
    expect(fake.countCalls(/thememap/)).toBe(0); // theme map fetched once at load
    expect(fake.calls.length).toBe(7); // nothing else crossed the network
  });

  it("setting the same k again does not refetch", async () => {
    fake.calls = [];
    await screen.setK(screen.k);
    expect(fake.calls.length).toBe(0);
  });

  it("mode switches are pure re-renders with no network traffic", () => {
    fake.calls = [];
    screen.setMode("treemap");
    expect(root.querySelector(".diagram-treemap")).toBeTruthy();
    screen.setMode("sunburst");
    expect(root.querySelector(".diagram-sunburst")).toBeTruthy();
    screen.setMode("voronoi");
    expect(root.querySelector(".diagram-voronoi")).toBeTruthy();
    expect(fake.calls.length).toBe(0);
  });

  it("sunburst leaf count equals contribution count", () => {
    screen.setMode("sunburst");
    const payload = fixture<ClustersPayload>("clusters_k4.json");
    const leaves = root.querySelectorAll(".diagram-sunburst [data-leaf]");
    expect(leaves.length).toBe(payload.points.length);
  });

  it("treemap and voronoi also conserve contributions", () => {
    const payload = fixture<ClustersPayload>("clusters_k4.json");
    screen.setMode("treemap");
    expect(root.querySelectorAll(".diagram-treemap [data-leaf]").length)
      .toBe(payload.points.length);
    screen.setMode("voronoi");
    expect(root.querySelectorAll(".diagram-voronoi [data-leaf]").length)
      .toBe(payload.points.length);
  });

  it("theme map points carry contribution text and cluster label on hover", () => {
    const payload = fixture<ClustersPayload>("clusters_k4.json");
    const points = root.querySelectorAll(".theme-map [data-point]");
    expect(points.length).toBe(payload.points.length);
    const first = points[0]!;
    const hover = first.querySelector("title")!.textContent!;
    const id = first.getAttribute("data-point")!;
    const point = payload.points.find((p) => p.id === id)!;
    expect(hover).toContain(point.text);
    const label = payload.labels.find((l) => l.cluster_index === point.cluster)!;
    expect(hover).toContain(label.title);
  });

  it("slider is bounded to 2..8", () => {
    const slider = root.querySelector(".k-slider") as HTMLInputElement;
    expect(slider.getAttribute("min")).toBe("2");
    expect(slider.getAttribute("max")).toBe("8");
  });
});

describe("layout algorithms", () => {
  const hierarchy = fixture<ClustersPayload>("clusters_k4.json").hierarchy;

  it("treemap cells tile the canvas area", () => {
    const cells = treemapLayout(hierarchy, 640, 420);
    const total = cells.reduce((sum, cell) => sum + cell.w * cell.h, 0);
    expect(Math.abs(total - 640 * 420)).toBeLessThan(1e-6 * 640 * 420);
    for (const cell of cells) {
      expect(cell.x).toBeGreaterThanOrEqual(-1e-9);
      expect(cell.y).toBeGreaterThanOrEqual(-1e-9);
      expect(cell.x + cell.w).toBeLessThanOrEqual(640 + 1e-6);
      expect(cell.y + cell.h).toBeLessThanOrEqual(420 + 1e-6);
    }
  });

  it("sunburst leaf angles nest inside their cluster span", () => {
    const arcs = sunburstLayout(hierarchy);
    const clusters = arcs.filter((arc) => arc.depth === 1);
    for (const leaf of arcs.filter((arc) => arc.depth === 2)) {
      const parent = clusters.find((c) => c.clusterIndex === leaf.clusterIndex)!;
      expect(leaf.startAngle).toBeGreaterThanOrEqual(parent.startAngle - 1e-9);
      expect(leaf.endAngle).toBeLessThanOrEqual(parent.endAngle + 1e-9);
    }
    const fullCircle = clusters.reduce((sum, c) => sum + (c.endAngle - c.startAngle), 0);
    expect(Math.abs(fullCircle - Math.PI * 2)).toBeLessThan(1e-9);
  });
});
