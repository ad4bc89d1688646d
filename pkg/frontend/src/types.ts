/** JSON shapes served by the project HTTP API. */

export interface Rect {
  left: number;
  top: number;
  width: number;
  height: number;
}

export interface CorpusImage {
  id: string;
  width: number;
  height: number;
  [extra: string]: unknown;
}

export interface CorpusResponse {
  images: CorpusImage[];
  labels: Record<string, Record<string, string>>;
}

export interface PrototypeEntry {
  id: string;
  category: string;
  source_image_id: string;
  rect: Rect;
  [extra: string]: unknown;
}

export interface Job {
  id: string;
  kind: string;
  state: 'queued' | 'running' | 'done' | 'failed';
  progress: number;
  result: Record<string, unknown> | null;
  error: string | null;
}

/** One node of the merge tree: either a leaf or two children with a merge height. */
export interface TreeNode {
  height: number;
  leaf?: string;
  children?: [TreeNode, TreeNode];
}

export interface PurityVerdict {
  pure: boolean;
  offending: string[];
  cluster_majorities: string[];
}

export interface DendrogramResponse {
  dendrogram: { labels: string[]; tree: TreeNode };
  newick: string;
  cut: number;
  partition: string[][];
  purity: PurityVerdict | null;
  stale: boolean;
  leaf_categories: Record<string, string>;
}

export interface CvReport {
  kind: 'cv';
  algorithm: string;
  folds: number;
  seed: number;
  fold_accuracies: number[];
  baseline_accuracies: number[];
  mean_accuracy: number;
  baseline_mean_accuracy: number;
  t_statistic: number;
  p_value: number;
  alpha: number;
  significant: boolean;
}

export interface KmeansReport {
  kind: 'kmeans';
  k: number;
  seed: number;
  assignments: number[];
  centroids: number[][];
  categories: string[];
  inertia: number;
}

export type Report = CvReport | KmeansReport;
