/* Analytics explorer: k slider (2..8), Voronoi / Treemap / Sunburst modes,
 * and the 2D theme-map scatter with hover-to-text.
 *
 * Moving the slider refetches only the clusters payload for the new k; the
 * theme map is fetched once and embeddings never leave the server. Switching
 * diagram mode is a pure re-render of the payload already in hand. */

import type { ApiClient } from "../api/client.js";
import type { ClustersPayload, ThemeMapPayload } from "../api/types.js";
import { arcPath, sunburstLayout } from "../viz/sunburst.js";
import { treemapLayout } from "../viz/treemap.js";
import { voronoiLayout } from "../viz/voronoi.js";
import { clear, el } from "./dom.js";

export type DiagramMode = "voronoi" | "treemap" | "sunburst";

const WIDTH = 640;
const HEIGHT = 420;
const PALETTE = ["#4e79a7", "#f28e2b", "#59a14f", "#e15759",
                 "#76b7b2", "#edc948", "#b07aa1", "#9c755f"];

export class AnalyticsScreen {
  private clusters: ClustersPayload | null = null;
  private themeMap: ThemeMapPayload | null = null;
  mode: DiagramMode = "voronoi";
  k = 4;

  constructor(
    private root: HTMLElement,
    private api: ApiClient,
    private discussionId: string,
  ) {}

  async load(): Promise<void> {
    this.themeMap = await this.api.getThemeMap(this.discussionId);
    this.clusters = await this.api.getClusters(this.discussionId, this.k);
    this.render();
  }

  async setK(k: number): Promise<void> {
    if (k < 2 || k > 8 || k === this.k) return;
    this.k = k;
    this.clusters = await this.api.getClusters(this.discussionId, k);
    this.render();
  }

  setMode(mode: DiagramMode): void {
    this.mode = mode;
    this.render(); // same payload, different drawing
  }

  render(): void {
    if (!this.clusters || !this.themeMap) return;
    clear(this.root);
    this.root.append(this.renderControls());
    this.root.append(el("section", { class: "diagram", "data-mode": this.mode },
      [this.renderDiagram()]));
    this.root.append(this.renderThemeMap());
  }

  private renderControls(): HTMLElement {
    const slider = el("input", {
      type: "range", min: 2, max: 8, step: 1, value: this.k, class: "k-slider",
      oninput: (event: Event) =>
        void this.setK(Number((event.target as HTMLInputElement).value)),
    });
    const modes = (["voronoi", "treemap", "sunburst"] as DiagramMode[]).map((mode) =>
      el("button", {
        class: `mode-${mode}${this.mode === mode ? " active" : ""}`,
        onclick: () => this.setMode(mode),
      }, [mode]));
    return el("header", { class: "analytics-controls" }, [
      el("label", {}, [`clusters: ${this.k}`, slider]),
      el("div", { class: "modes" }, modes),
    ]) as HTMLElement;
  }

  private renderDiagram(): SVGElement {
    const payload = this.clusters!;
    const svg = el("svg", {
      viewBox: `0 0 ${WIDTH} ${HEIGHT}`, width: WIDTH, height: HEIGHT,
      class: `diagram-${this.mode}`,
    }) as SVGElement;

    if (this.mode === "treemap") {
      for (const cell of treemapLayout(payload.hierarchy, WIDTH, HEIGHT)) {
        svg.append(el("rect", {
          x: cell.x, y: cell.y, width: cell.w, height: cell.h,
          fill: PALETTE[cell.clusterIndex % PALETTE.length],
          stroke: "#fff", "data-leaf": cell.id, class: "leaf",
        }, [el("title", {}, [cell.label])]));
      }
    } else if (this.mode === "sunburst") {
      for (const arc of sunburstLayout(payload.hierarchy)) {
        svg.append(el("path", {
          d: arcPath(arc, WIDTH / 2, HEIGHT / 2, 60, Math.min(WIDTH, HEIGHT) / 2 - 8),
          fill: PALETTE[arc.clusterIndex % PALETTE.length],
          "fill-opacity": arc.depth === 1 ? "0.95" : "0.7",
          stroke: "#fff",
          class: arc.depth === 2 ? "leaf" : "cluster-arc",
          ...(arc.depth === 2 ? { "data-leaf": arc.id } : { "data-cluster": arc.clusterIndex }),
        }, [el("title", {}, [arc.label])]));
      }
    } else {
      for (const bubble of voronoiLayout(payload.points, WIDTH, HEIGHT)) {
        const label = payload.labels.find((l) => l.cluster_index === bubble.cluster);
        svg.append(el("circle", {
          cx: bubble.x, cy: bubble.y, r: bubble.r,
          fill: PALETTE[bubble.cluster % PALETTE.length], "fill-opacity": "0.25",
          "data-cluster": bubble.cluster, class: "cluster-bubble",
        }, [el("title", {}, [label?.title ?? `Cluster ${bubble.cluster}`])]));
        for (const dot of bubble.members) {
          svg.append(el("circle", {
            cx: dot.x, cy: dot.y, r: dot.r,
            fill: PALETTE[bubble.cluster % PALETTE.length],
            "data-leaf": dot.id, class: "leaf",
          }, [el("title", {}, [dot.text])]));
        }
      }
    }
    return svg;
  }

  private renderThemeMap(): HTMLElement {
    const themeMap = this.themeMap!;
    const clusterOf = new Map(this.clusters!.points.map((p) => [p.id, p.cluster]));
    const textOf = new Map(this.clusters!.points.map((p) => [p.id, p.text]));
    const labelOf = new Map(this.clusters!.labels.map((l) => [l.cluster_index, l.title]));

    const xs = themeMap.coords.map((c) => c[0]);
    const ys = themeMap.coords.map((c) => c[1]);
    const spanX = Math.max(Math.max(...xs) - Math.min(...xs), 1e-9);
    const spanY = Math.max(Math.max(...ys) - Math.min(...ys), 1e-9);
    const minX = Math.min(...xs);
    const minY = Math.min(...ys);

    const svg = el("svg", {
      viewBox: `0 0 ${WIDTH} 300`, width: WIDTH, height: 300, class: "theme-map",
    }) as SVGElement;
    themeMap.ids.forEach((id, index) => {
      const cluster = clusterOf.get(id) ?? 0;
      const hover = `${textOf.get(id) ?? id} [${labelOf.get(cluster) ?? `cluster ${cluster}`}]`;
      svg.append(el("circle", {
        cx: 16 + ((themeMap.coords[index][0] - minX) / spanX) * (WIDTH - 32),
        cy: 16 + ((themeMap.coords[index][1] - minY) / spanY) * (300 - 32),
        r: 5,
        fill: PALETTE[cluster % PALETTE.length],
        "data-point": id,
        class: "theme-point",
      }, [el("title", {}, [hover])]));
    });
    return el("section", { class: "theme-map-panel" }, [
      el("h2", {}, ["Theme map"]),
      svg,
    ]) as HTMLElement;
  }
}
