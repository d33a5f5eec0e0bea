/* Squarified treemap over the server-provided cluster hierarchy. */

export interface TreemapCell {
  id: string;
  label: string;
  clusterIndex: number;
  value: number;
  x: number;
  y: number;
  w: number;
  h: number;
}

interface Item {
  id: string;
  label: string;
  clusterIndex: number;
  value: number;
  area: number;
}

function worstRatio(areas: number[], total: number, side: number): number {
  const length = total / side;
  let worst = 0;
  for (const area of areas) {
    const span = area / length;
    const ratio = Math.max(length / span, span / length);
    if (ratio > worst) worst = ratio;
  }
  return worst;
}

function layout(items: Item[], x: number, y: number, w: number, h: number): TreemapCell[] {
  if (items.length === 0) return [];
  if (items.length === 1) {
    const only = items[0];
    return [{ id: only.id, label: only.label, clusterIndex: only.clusterIndex,
      value: only.value, x, y, w, h }];
  }
  const horizontal = h > w;
  const shortSide = horizontal ? w : h;

  const strip: Item[] = [items[0]];
  let stripTotal = items[0].area;
  for (let i = 1; i < items.length; i++) {
    const withNext = strip.map((s) => s.area).concat(items[i].area);
    if (worstRatio(withNext, stripTotal + items[i].area, shortSide)
        <= worstRatio(strip.map((s) => s.area), stripTotal, shortSide)) {
      strip.push(items[i]);
      stripTotal += items[i].area;
    } else break;
  }

  const thickness = stripTotal / shortSide;
  const cells: TreemapCell[] = [];
  let offset = 0;
  for (let i = 0; i < strip.length; i++) {
    const item = strip[i];
    const span = i === strip.length - 1 ? shortSide - offset : item.area / thickness;
    if (horizontal) {
      cells.push({ id: item.id, label: item.label, clusterIndex: item.clusterIndex,
        value: item.value, x: x + offset, y, w: span, h: thickness });
    } else {
      cells.push({ id: item.id, label: item.label, clusterIndex: item.clusterIndex,
        value: item.value, x, y: y + offset, w: thickness, h: span });
    }
    offset += span;
  }

  const rest = items.slice(strip.length);
  if (rest.length === 0) return cells;
  return horizontal
    ? cells.concat(layout(rest, x, y + thickness, w, h - thickness))
    : cells.concat(layout(rest, x + thickness, y, w - thickness, h));
}

export interface HierarchyInput {
  children: {
    name: string;
    cluster_index: number;
    children: { id: string; name: string; value: number }[];
  }[];
}

/** One cell per leaf contribution, nested cluster-major, areas proportional
 * to membership weight. Total cell area equals width * height. */
export function treemapLayout(hierarchy: HierarchyInput, width: number,
                              height: number): TreemapCell[] {
  const leaves: Item[] = [];
  for (const cluster of hierarchy.children) {
    for (const leaf of cluster.children) {
      leaves.push({ id: leaf.id, label: leaf.name, clusterIndex: cluster.cluster_index,
        value: Math.max(leaf.value, 1e-9), area: 0 });
    }
  }
  if (leaves.length === 0) return [];
  const total = leaves.reduce((sum, leaf) => sum + leaf.value, 0);
  for (const leaf of leaves) leaf.area = (leaf.value / total) * width * height;
  leaves.sort((a, b) => b.area - a.area || a.id.localeCompare(b.id));
  return layout(leaves, 0, 0, width, height);
}
