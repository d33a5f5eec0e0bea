/* Cluster-bubble layout for the Voronoi (circle pack) mode.
 *
 * The server supplies 2D positions (theme-map coordinates) and hard cluster
 * assignments; the client only places circles. Clusters become enclosing
 * bubbles sized by member count, members become dots at their projected
 * position scaled into the cluster bubble. */

export interface PackedDot {
  id: string;
  text: string;
  cluster: number;
  x: number;
  y: number;
  r: number;
}

export interface ClusterBubble {
  cluster: number;
  x: number;
  y: number;
  r: number;
  members: PackedDot[];
}

export interface PointInput {
  id: string;
  x: number;
  y: number;
  cluster: number;
  text: string;
}

export function voronoiLayout(points: PointInput[], width: number,
                              height: number): ClusterBubble[] {
  const byCluster = new Map<number, PointInput[]>();
  for (const point of points) {
    const bucket = byCluster.get(point.cluster) ?? [];
    bucket.push(point);
    byCluster.set(point.cluster, bucket);
  }
  const clusters = [...byCluster.keys()].sort((a, b) => a - b);
  if (clusters.length === 0) return [];

  // cluster bubbles on a ring around the canvas centre, radius by share
  const cx = width / 2;
  const cy = height / 2;
  const ringRadius = Math.min(width, height) / (clusters.length > 1 ? 3.2 : 1e9);
  const maxBubble = Math.min(width, height) / (clusters.length > 1 ? 3.4 : 2.2);

  return clusters.map((cluster, index) => {
    const members = byCluster.get(cluster)!;
    const share = members.length / points.length;
    const bubbleR = Math.max(maxBubble * Math.sqrt(share), 12);
    const theta = (index / clusters.length) * Math.PI * 2;
    const bx = cx + ringRadius * Math.cos(theta);
    const by = cy + ringRadius * Math.sin(theta);

    const xs = members.map((m) => m.x);
    const ys = members.map((m) => m.y);
    const spanX = Math.max(Math.max(...xs) - Math.min(...xs), 1e-9);
    const spanY = Math.max(Math.max(...ys) - Math.min(...ys), 1e-9);
    const minX = Math.min(...xs);
    const minY = Math.min(...ys);
    const inner = bubbleR * 0.72;

    const dots = members.map((member) => ({
      id: member.id,
      text: member.text,
      cluster,
      x: bx - inner + ((member.x - minX) / spanX) * inner * 2,
      y: by - inner + ((member.y - minY) / spanY) * inner * 2,
      r: Math.max(inner / Math.max(members.length, 4), 2.5),
    }));
    return { cluster, x: bx, y: by, r: bubbleR, members: dots };
  });
}
