import type { CvReport, KmeansReport, Report } from './types';

const pad = (s: string, w: number) => s.padStart(w);

/**
 * Accuracy table for a cross-validation report. A significant
 * improvement over the baseline is marked with "∘" after the
 * learner's mean, matching the usual corrected-comparison convention.
 */
export function renderCvTable(report: CvReport): string {
  const improved = report.significant && report.mean_accuracy > report.baseline_mean_accuracy;
  const marker = improved ? ' ∘' : '';
  const lines = [
    `${'run'.padEnd(16)}${pad('baseline', 10)}${pad(report.algorithm, 14)}`,
    `${'accuracy %'.padEnd(16)}${pad(report.baseline_mean_accuracy.toFixed(2), 10)}${pad(
      report.mean_accuracy.toFixed(2),
      14,
    )}${marker}`,
    `${'folds'.padEnd(16)}${pad(String(report.folds), 10)}  seed ${report.seed}`,
    `${'p-value'.padEnd(16)}${pad(report.p_value.toExponential(2), 10)}  alpha ${report.alpha}`,
  ];
  if (improved) lines.push('∘ statistically significant improvement');
  return lines.join('\n');
}

/** Feature-by-cluster grid: full-data mean, then one column per cluster. */
export function renderKmeansGrid(report: KmeansReport): string {
  const n = report.assignments.length;
  const counts = Array.from({ length: report.k }, (_, i) => report.assignments.filter((a) => a === i).length);
  // full-data mean of each feature, weighted by cluster size
  const full = report.categories.map((_, j) => {
    let s = 0;
    for (let i = 0; i < report.k; i++) s += report.centroids[i][j] * counts[i];
    return s / n;
  });
  const header =
    'feature'.padEnd(12) +
    pad('full data', 12) +
    report.centroids.map((_, i) => pad(`cluster#${i + 1}`, 12)).join('');
  const rows = report.categories.map(
    (cat, j) =>
      cat.padEnd(12) +
      pad(full[j].toFixed(4), 12) +
      report.centroids.map((c) => pad(c[j].toFixed(4), 12)).join(''),
  );
  const sizes =
    'n'.padEnd(12) + pad(String(n), 12) + counts.map((c) => pad(String(c), 12)).join('');
  return [header, ...rows, sizes].join('\n');
}

export function renderReport(report: Report): string {
  return report.kind === 'cv' ? renderCvTable(report) : renderKmeansGrid(report);
}

export const EMPTY_REPORTS_MESSAGE = 'No reports yet. Run cross-validation or k-means first.';
