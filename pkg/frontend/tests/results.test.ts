import { describe, expect, it } from 'vitest';

import { renderCvTable, renderKmeansGrid } from '../src/results';
import type { CvReport, KmeansReport } from '../src/types';

const cvBase: CvReport = {
  kind: 'cv',
  algorithm: 'naive_bayes',
  folds: 10,
  seed: 1,
  fold_accuracies: Array(10).fill(89.25),
  baseline_accuracies: Array(10).fill(50),
  mean_accuracy: 89.25,
  baseline_mean_accuracy: 50.0,
  t_statistic: 12.3,
  p_value: 1.4e-6,
  alpha: 0.05,
  significant: true,
};

describe('renderCvTable', () => {
  it('marks a significant improvement with the ring', () => {
    const text = renderCvTable(cvBase);
    expect(text).toContain('89.25 ∘');
    expect(text).toContain('50.00');
    expect(text).toContain('∘ statistically significant improvement');
  });

  it('omits the ring when not significant', () => {
    const text = renderCvTable({ ...cvBase, significant: false });
    expect(text).not.toContain('∘');
  });

  it('omits the ring when significantly worse', () => {
    const text = renderCvTable({ ...cvBase, mean_accuracy: 30, baseline_mean_accuracy: 50 });
    expect(text).not.toContain('∘');
  });
});

const km: KmeansReport = {
  kind: 'kmeans',
  k: 3,
  seed: 0,
  assignments: [0, 0, 1, 1, 2, 2, 2, 0],
  centroids: [
    [0.7, 0.2, 0.05, 0.05],
    [0.05, 0.1, 0.75, 0.1],
    [0.05, 0.1, 0.1, 0.75],
  ],
  categories: ['constant', 'stripes', 'checker', 'noise'],
  inertia: 0.12,
};

describe('renderKmeansGrid', () => {
  it('lays out features x (full data + one column per cluster)', () => {
    const lines = renderKmeansGrid(km).split('\n');
    expect(lines[0]).toMatch(/feature\s+full data\s+cluster#1\s+cluster#2\s+cluster#3/);
    expect(lines).toHaveLength(1 + 4 + 1); // header, 4 features, sizes
    expect(lines[1]).toMatch(/^constant\s/);
    expect(lines[5]).toMatch(/^n\s+8\s+3\s+2\s+3$/);
  });

  it('weights the full-data column by cluster size', () => {
    const lines = renderKmeansGrid(km).split('\n');
    // constant: (0.7*3 + 0.05*2 + 0.05*3) / 8 = 0.29375
    const full = Number(lines[1].trim().split(/\s+/)[1]);
    expect(full).toBeCloseTo(0.29375, 4);
  });
});
