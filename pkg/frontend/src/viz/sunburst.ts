/* Sunburst arcs: ring 1 holds clusters, ring 2 their member contributions.
 * Angles are proportional to membership weight; each leaf's span nests
 * inside its cluster's span. */

export interface SunburstArc {
  id: string;
  label: string;
  clusterIndex: number;
  depth: 1 | 2;
  startAngle: number; // radians
  endAngle: number;
  value: number;
}

import type { HierarchyInput } from "./treemap.js";

const TAU = Math.PI * 2;

export function sunburstLayout(hierarchy: HierarchyInput): SunburstArc[] {
  const clusterTotals = hierarchy.children.map((cluster) =>
    cluster.children.reduce((sum, leaf) => sum + Math.max(leaf.value, 1e-9), 0));
  const grandTotal = clusterTotals.reduce((a, b) => a + b, 0);
  if (grandTotal <= 0) return [];

  const arcs: SunburstArc[] = [];
  let angle = 0;
  hierarchy.children.forEach((cluster, index) => {
    const clusterSpan = (clusterTotals[index] / grandTotal) * TAU;
    arcs.push({
      id: `cluster-${cluster.cluster_index}`,
      label: cluster.name,
      clusterIndex: cluster.cluster_index,
      depth: 1,
      startAngle: angle,
      endAngle: angle + clusterSpan,
      value: clusterTotals[index],
    });
    let leafAngle = angle;
    for (const leaf of cluster.children) {
      const weight = Math.max(leaf.value, 1e-9);
      const span = (weight / clusterTotals[index]) * clusterSpan;
      arcs.push({
        id: leaf.id,
        label: leaf.name,
        clusterIndex: cluster.cluster_index,
        depth: 2,
        startAngle: leafAngle,
        endAngle: leafAngle + span,
        value: weight,
      });
      leafAngle += span;
    }
    angle += clusterSpan;
  });
  return arcs;
}

export function arcPath(arc: SunburstArc, cx: number, cy: number,
                        innerRadius: number, outerRadius: number): string {
  const r0 = arc.depth === 1 ? innerRadius : (innerRadius + outerRadius) / 2;
  const r1 = arc.depth === 1 ? (innerRadius + outerRadius) / 2 : outerRadius;
  const large = arc.endAngle - arc.startAngle > Math.PI ? 1 : 0;
  const point = (radius: number, theta: number) =>
    `${cx + radius * Math.cos(theta - Math.PI / 2)},${cy + radius * Math.sin(theta - Math.PI / 2)}`;
  return [
    `M ${point(r0, arc.startAngle)}`,
    `A ${r0} ${r0} 0 ${large} 1 ${point(r0, arc.endAngle)}`,
    `L ${point(r1, arc.endAngle)}`,
    `A ${r1} ${r1} 0 ${large} 0 ${point(r1, arc.startAngle)}`,
    "Z",
  ].join(" ");
}
