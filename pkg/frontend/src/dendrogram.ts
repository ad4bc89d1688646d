import type { DendrogramResponse, TreeNode } from './types';

export interface ClusterSummary {
  members: string[];
  /** Distinct leaf categories inside this subtree, in first-seen order. */
  categories: string[];
  monochromatic: boolean;
}

export interface DendrogramView {
  cut: number;
  stale: boolean;
  verdict: 'PURE' | 'IMPURE' | 'UNKNOWN';
  offending: string[];
  clusters: ClusterSummary[];
}

/**
 * Summarize the server's dendrogram response for display. No
 * clustering math happens here: the partition, purity verdict, and
 * offending list all come from the service; this only tallies leaf
 * categories per cluster so the view can color subtrees.
 */
export function analyzeDendrogram(resp: DendrogramResponse): DendrogramView {
  const clusters = resp.partition.map((members) => {
    const seen: string[] = [];
    for (const id of members) {
      const cat = resp.leaf_categories[id] ?? '?';
      if (!seen.includes(cat)) seen.push(cat);
    }
    return { members: [...members], categories: seen, monochromatic: seen.length === 1 };
  });
  return {
    cut: resp.cut,
    stale: resp.stale,
    verdict: resp.purity === null ? 'UNKNOWN' : resp.purity.pure ? 'PURE' : 'IMPURE',
    offending: resp.purity?.offending ?? [],
    clusters,
  };
}

function leaves(node: TreeNode): string[] {
  if (node.leaf !== undefined) return [node.leaf];
  const [a, b] = node.children!;
  return [...leaves(a), ...leaves(b)];
}

function renderNode(
  node: TreeNode,
  prefix: string,
  isLast: boolean,
  categories: Record<string, string>,
  offending: Set<string>,
  out: string[],
): void {
  const branch = prefix === '' ? '' : isLast ? '`- ' : '+- ';
  if (node.leaf !== undefined) {
    const mark = offending.has(node.leaf) ? '  <-- offending' : '';
    out.push(`${prefix}${branch}${node.leaf} [${categories[node.leaf] ?? '?'}]${mark}`);
    return;
  }
  out.push(`${prefix}${branch}${node.height.toFixed(4)}`);
  const childPrefix = prefix + (prefix === '' ? '' : isLast ? '   ' : '|  ');
  const [a, b] = node.children!;
  renderNode(a, childPrefix, false, categories, offending, out);
  renderNode(b, childPrefix, true, categories, offending, out);
}

/**
 * Plain-text rendering of the full response: verdict line, one line
 * per cut cluster, then the merge tree with heights. Pure function of
 * the response JSON, which keeps it snapshot-testable.
 */
export function renderDendrogram(resp: DendrogramResponse): string {
  const view = analyzeDendrogram(resp);
  const lines: string[] = [];
  const mono = view.clusters.filter((c) => c.monochromatic).length;
  lines.push(`cut=${view.cut}  verdict=${view.verdict}  monochromatic=${mono}/${view.clusters.length}`);
  if (view.stale) {
    lines.push('! prototypes changed since the matrix ran; recompute to refresh');
  }
  view.clusters.forEach((c, i) => {
    const tag = c.monochromatic ? c.categories[0] : `MIXED: ${c.categories.join('+')}`;
    lines.push(`cluster ${i + 1} (${tag}): ${c.members.join(' ')}`);
  });
  if (view.offending.length > 0) {
    lines.push(`offending: ${view.offending.join(' ')}`);
  }
  lines.push('');
  const offending = new Set(view.offending);
  renderNode(resp.dendrogram.tree, '', true, resp.leaf_categories, offending, lines);
  return lines.join('\n');
}

/** Leaf order as drawn, for aligning external annotations. */
export function leafOrder(resp: DendrogramResponse): string[] {
  return leaves(resp.dendrogram.tree);
}
