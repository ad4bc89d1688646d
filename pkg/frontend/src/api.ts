import type {
  CorpusResponse,
  DendrogramResponse,
  Job,
  PrototypeEntry,
  Rect,
  Report,
} from './types';

export class ApiError extends Error {
  constructor(
    public status: number,
    public detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

type Fetch = typeof fetch;

/**
 * Thin typed client over the project service. All numbers shown in the
 * UI come from here; the client never computes distances or clusters.
 */
export class ApiClient {
  constructor(
    private base: string,
    private fetchFn: Fetch = fetch,
  ) {
    this.base = base.replace(/\/$/, '');
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchFn(this.base + path, init);
    if (!resp.ok) {
      let detail = resp.statusText;
      try {
        const body = await resp.json();
        if (body && typeof body.detail === 'string') detail = body.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(resp.status, detail);
    }
    return (await resp.json()) as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(body),
    });
  }

  corpus(): Promise<CorpusResponse> {
    return this.request('/corpus');
  }

  async uploadImages(files: { name: string; data: Blob }[]): Promise<{ ids: string[]; errors: string[] }> {
    const form = new FormData();
    for (const f of files) form.append('files', f.data, f.name);
    return this.request('/corpus/images', { method: 'POST', body: form });
  }

  imageUrl(imageId: string): string {
    return `${this.base}/corpus/images/${imageId}/raw`;
  }

  async imageBytes(imageId: string): Promise<ArrayBuffer> {
    const resp = await this.fetchFn(this.imageUrl(imageId));
    if (!resp.ok) throw new ApiError(resp.status, 'image fetch failed');
    return resp.arrayBuffer();
  }

  categories(): Promise<{ categories: string[] }> {
    return this.request('/categories');
  }

  addCategory(name: string): Promise<{ categories: string[] }> {
    return this.post('/categories', { name });
  }

  deleteCategory(name: string): Promise<{ categories: string[] }> {
    return this.request(`/categories/${encodeURIComponent(name)}`, { method: 'DELETE' });
  }

  prototypes(): Promise<{ prototypes: PrototypeEntry[] }> {
    return this.request('/prototypes');
  }

  addPrototype(sourceImageId: string, rect: Rect, category: string): Promise<{ id: string }> {
    return this.post('/prototypes', { source_image_id: sourceImageId, rect, category });
  }

  prototypeUrl(protoId: string): string {
    return `${this.base}/prototypes/${protoId}/raw`;
  }

  async prototypeBytes(protoId: string): Promise<ArrayBuffer> {
    const resp = await this.fetchFn(this.prototypeUrl(protoId));
    if (!resp.ok) throw new ApiError(resp.status, 'prototype fetch failed');
    return resp.arrayBuffer();
  }

  deletePrototype(protoId: string): Promise<{ deleted: string }> {
    return this.request(`/prototypes/${protoId}`, { method: 'DELETE' });
  }

  startMatrix(): Promise<Job> {
    return this.request('/prototypes/matrix', { method: 'POST' });
  }

  dendrogram(cut?: number): Promise<DendrogramResponse> {
    const q = cut === undefined ? '' : `?cut=${cut}`;
    return this.request(`/prototypes/dendrogram${q}`);
  }

  startExtract(target?: string, workers = 1): Promise<Job> {
    return this.post('/features/extract', { target: target ?? null, workers });
  }

  startCv(datasetId: string, algorithm: string, folds = 10, seed = 0): Promise<Job> {
    return this.post('/learn/cv', { dataset_id: datasetId, algorithm, folds, seed });
  }

  startKmeans(datasetId: string, k: number, seed = 0): Promise<Job> {
    return this.post('/learn/kmeans', { dataset_id: datasetId, k, seed });
  }

  setLabels(target: string, labels: Record<string, string>): Promise<{ target: string; count: number }> {
    return this.post(`/labels/${encodeURIComponent(target)}`, labels);
  }

  job(jobId: string): Promise<Job> {
    return this.request(`/jobs/${jobId}`);
  }

  reports(): Promise<{ reports: string[] }> {
    return this.request('/reports');
  }

  report(reportId: string): Promise<Report> {
    return this.request(`/reports/${reportId}`);
  }

  /** Poll a job until it leaves the queued/running states. */
  async waitJob(jobId: string, opts: { intervalMs?: number; timeoutMs?: number; onProgress?: (j: Job) => void } = {}): Promise<Job> {
    const interval = opts.intervalMs ?? 500;
    const deadline = Date.now() + (opts.timeoutMs ?? 300_000);
    for (;;) {
      const job = await this.job(jobId);
      opts.onProgress?.(job);
      if (job.state === 'done') return job;
      if (job.state === 'failed') throw new Error(job.error ?? 'job failed');
      if (Date.now() > deadline) throw new Error(`job ${jobId} timed out`);
      await new Promise((r) => setTimeout(r, interval));
    }
  }
}
