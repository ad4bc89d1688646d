import { ApiClient, ApiError } from './api';
import { dragToRect, prototypePayload, stampRect, STAMP_HEIGHT, STAMP_WIDTH, type DragState } from './crop';
import { renderDendrogram } from './dendrogram';
import { EMPTY_REPORTS_MESSAGE, renderReport } from './results';
import type { CorpusImage } from './types';

const api = new ApiClient(location.origin);

interface Session {
  activeImage: CorpusImage | null;
  activeCategory: string | null;
  stampMode: boolean;
  drag: DragState | null;
  cut: number;
}

const session: Session = {
  activeImage: null,
  activeCategory: null,
  stampMode: false,
  drag: null,
  cut: 4,
};

function el<K extends keyof HTMLElementTagNameMap>(tag: K, cls?: string, text?: string) {
  const node = document.createElement(tag);
  if (cls) node.className = cls;
  if (text !== undefined) node.textContent = text;
  return node;
}

function byId<T extends HTMLElement>(id: string): T {
  return document.getElementById(id) as T;
}

function flash(message: string, isError = false) {
  const bar = byId<HTMLDivElement>('status');
  bar.textContent = message;
  bar.className = isError ? 'status error' : 'status';
}

async function guard<T>(work: () => Promise<T>): Promise<T | undefined> {
  try {
    return await work();
  } catch (err) {
    flash(err instanceof ApiError ? err.detail : String(err), true);
    return undefined;
  }
}

// ---- selection view ------------------------------------------------

async function refreshThumbnails() {
  const strip = byId<HTMLDivElement>('thumbnails');
  strip.replaceChildren();
  const corpus = await api.corpus();
  for (const img of corpus.images) {
    const thumb = el('img') as HTMLImageElement;
    thumb.src = api.imageUrl(img.id);
    thumb.title = `${img.id} (${img.width}x${img.height})`;
    thumb.onclick = () => selectImage(img);
    strip.append(thumb);
  }
}

function selectImage(img: CorpusImage) {
  session.activeImage = img;
  const view = byId<HTMLImageElement>('fullview');
  view.src = api.imageUrl(img.id);
  flash(`viewing ${img.id}`);
}

function overlayRect() {
  const box = byId<HTMLDivElement>('dragbox');
  if (!session.drag || !session.activeImage) {
    box.style.display = 'none';
    return;
  }
  const r = dragToRect(session.drag, session.activeImage);
  if (!r) {
    box.style.display = 'none';
    return;
  }
  box.style.display = 'block';
  box.style.left = `${r.rect.left}px`;
  box.style.top = `${r.rect.top}px`;
  box.style.width = `${r.rect.width}px`;
  box.style.height = `${r.rect.height}px`;
  box.classList.toggle('clamped', r.clamped);
}

function imageCoords(ev: MouseEvent): { x: number; y: number } {
  const view = byId<HTMLImageElement>('fullview');
  const bounds = view.getBoundingClientRect();
  // the image is shown at natural size; offset, don't scale
  return { x: ev.clientX - bounds.left, y: ev.clientY - bounds.top };
}

async function submitRect(result: ReturnType<typeof dragToRect>) {
  if (!result || !session.activeImage) return;
  if (!session.activeCategory) {
    flash('pick a category first', true);
    return;
  }
  if (result.clamped) flash('selection extended past the edge; rect clamped');
  const payload = prototypePayload(session.activeImage.id, result.rect, session.activeCategory);
  const created = await guard(() => api.addPrototype(payload.source_image_id, payload.rect, payload.category));
  if (created) {
    flash(`prototype ${created.id} added to ${session.activeCategory}`);
    await refreshGallery();
  }
}

function wireViewport() {
  const view = byId<HTMLImageElement>('fullview');
  view.addEventListener('mousedown', (ev) => {
    if (!session.activeImage) return;
    const { x, y } = imageCoords(ev);
    if (session.stampMode) {
      void submitRect(stampRect(x, y, session.activeImage, STAMP_WIDTH, STAMP_HEIGHT));
      return;
    }
    session.drag = { startX: x, startY: y, currentX: x, currentY: y };
    overlayRect();
  });
  view.addEventListener('mousemove', (ev) => {
    if (!session.drag) return;
    const { x, y } = imageCoords(ev);
    session.drag.currentX = x;
    session.drag.currentY = y;
    overlayRect();
  });
  window.addEventListener('mouseup', () => {
    if (!session.drag || !session.activeImage) return;
    const result = dragToRect(session.drag, session.activeImage);
    session.drag = null;
    overlayRect();
    void submitRect(result);
  });
}

async function refreshCategories() {
  const palette = byId<HTMLDivElement>('palette');
  palette.replaceChildren();
  const { categories } = await api.categories();
  for (const name of categories) {
    const chip = el('button', 'chip', name);
    chip.classList.toggle('active', name === session.activeCategory);
    chip.onclick = () => {
      session.activeCategory = name;
      void refreshCategories();
    };
    palette.append(chip);
  }
  const add = el('button', 'chip add', '+ category');
  add.onclick = async () => {
    const name = prompt('category name');
    if (!name) return;
    await guard(() => api.addCategory(name.trim()));
    session.activeCategory = name.trim();
    await refreshCategories();
  };
  palette.append(add);
}

async function refreshGallery() {
  const gallery = byId<HTMLDivElement>('gallery');
  gallery.replaceChildren();
  const { prototypes } = await api.prototypes();
  const byCategory = new Map<string, typeof prototypes>();
  for (const p of prototypes) {
    (byCategory.get(p.category) ?? byCategory.set(p.category, []).get(p.category)!).push(p);
  }
  for (const [category, group] of byCategory) {
    const section = el('div', 'gallery-group');
    section.append(el('h4', '', `${category} (${group.length})`));
    for (const p of group) {
      const cell = el('div', 'proto');
      const img = el('img') as HTMLImageElement;
      img.src = api.prototypeUrl(p.id);
      img.title = `${p.id} from ${p.source_image_id} at (${p.rect.left},${p.rect.top})`;
      const del = el('button', 'delete', 'x');
      del.onclick = async () => {
        await guard(() => api.deletePrototype(p.id));
        await refreshGallery();
      };
      cell.append(img, del);
      section.append(cell);
    }
    gallery.append(section);
  }
}

// ---- dendrogram view -----------------------------------------------

async function refreshDendrogram() {
  const pre = byId<HTMLPreElement>('dendro');
  const resp = await guard(() => api.dendrogram(session.cut));
  if (!resp) {
    pre.textContent = 'no dendrogram yet; compute the matrix first';
    return;
  }
  pre.textContent = renderDendrogram(resp);
  byId<HTMLButtonElement>('recompute').style.display = resp.stale ? 'inline-block' : 'none';
}

function wireDendrogram() {
  byId<HTMLButtonElement>('run-matrix').onclick = async () => {
    const job = await guard(() => api.startMatrix());
    if (!job) return;
    flash('computing distance matrix...');
    await guard(() => api.waitJob(job.id));
    flash('matrix done');
    await refreshDendrogram();
  };
  byId<HTMLButtonElement>('recompute').onclick = () => byId<HTMLButtonElement>('run-matrix').click();
  const slider = byId<HTMLInputElement>('cut');
  slider.oninput = async () => {
    session.cut = Number(slider.value);
    byId<HTMLSpanElement>('cut-label').textContent = slider.value;
    await refreshDendrogram();
  };
  byId<HTMLButtonElement>('reselect').onclick = () => {
    document.getElementById('selection')?.scrollIntoView({ behavior: 'smooth' });
  };
}

// ---- results view --------------------------------------------------

async function refreshReports() {
  const list = byId<HTMLDivElement>('reports');
  list.replaceChildren();
  const { reports } = await api.reports();
  if (reports.length === 0) {
    list.append(el('p', 'empty', EMPTY_REPORTS_MESSAGE));
    return;
  }
  for (const id of reports) {
    const report = await api.report(id);
    const card = el('div', 'report-card');
    card.append(el('h4', '', `${id} (${report.kind})`));
    card.append(el('pre', '', renderReport(report)));
    list.append(card);
  }
}

function wireExtraction() {
  byId<HTMLButtonElement>('run-extract').onclick = async () => {
    const target = byId<HTMLInputElement>('target').value.trim() || undefined;
    const job = await guard(() => api.startExtract(target));
    if (!job) return;
    await guard(() =>
      api.waitJob(job.id, {
        onProgress: (j) => flash(`extracting... ${(j.progress * 100).toFixed(0)}%`),
      }),
    );
    flash('extraction done');
  };
}

// ---- boot ----------------------------------------------------------

async function boot() {
  wireViewport();
  wireDendrogram();
  wireExtraction();
  byId<HTMLInputElement>('stamp-mode').onchange = (ev) => {
    session.stampMode = (ev.target as HTMLInputElement).checked;
  };
  byId<HTMLButtonElement>('refresh-reports').onclick = () => void refreshReports();
  await Promise.all([refreshThumbnails(), refreshCategories(), refreshGallery(), refreshReports()]);
}

document.addEventListener('DOMContentLoaded', () => void guard(boot));
