import { describe, expect, it, vi } from 'vitest';

import { ApiClient } from '../src/api';
import { dragToRect, prototypePayload, rectInsideBounds, stampRect } from '../src/crop';

const bounds = { width: 128, height: 64 };

describe('dragToRect', () => {
  it('passes an in-bounds drag through unchanged', () => {
    const result = dragToRect({ startX: 10, startY: 20, currentX: 55, currentY: 37 }, bounds);
    expect(result).toEqual({ rect: { left: 10, top: 20, width: 45, height: 17 }, clamped: false });
  });

  it('normalizes a drag made in any direction', () => {
    const down = dragToRect({ startX: 10, startY: 20, currentX: 55, currentY: 37 }, bounds);
    const up = dragToRect({ startX: 55, startY: 37, currentX: 10, currentY: 20 }, bounds);
    expect(up).toEqual(down);
  });

  it('snaps fractional pointer coordinates to whole pixels', () => {
    const result = dragToRect({ startX: 10.4, startY: 19.6, currentX: 55.2, currentY: 36.9 }, bounds);
    expect(result!.rect).toEqual({ left: 10, top: 20, width: 45, height: 17 });
  });

  it('clamps a drag that leaves the image and flags it', () => {
    const result = dragToRect({ startX: 100, startY: 50, currentX: 200, currentY: 90 }, bounds);
    expect(result).toEqual({ rect: { left: 100, top: 50, width: 28, height: 14 }, clamped: true });
    expect(rectInsideBounds(result!.rect, bounds)).toBe(true);
  });

  it('returns null for a degenerate click', () => {
    expect(dragToRect({ startX: 5, startY: 5, currentX: 5.2, currentY: 5.1 }, bounds)).toBeNull();
  });
});

describe('stampRect', () => {
  it('centers the default 45x17 window on the click', () => {
    const result = stampRect(64, 32, bounds);
    expect(result).toEqual({ rect: { left: 42, top: 24, width: 45, height: 17 }, clamped: false });
  });

  it('shifts rather than shrinks near the edge', () => {
    const result = stampRect(2, 1, bounds);
    expect(result).toEqual({ rect: { left: 0, top: 0, width: 45, height: 17 }, clamped: true });
  });

  it('refuses when the image is smaller than the stamp', () => {
    expect(stampRect(5, 5, { width: 30, height: 30 })).toBeNull();
  });
});

describe('submission payload', () => {
  it('posts exactly the rect produced by the drag, byte for byte', async () => {
    // the crop-fidelity contract: no resampling between drag and POST
    const drag = { startX: 7, startY: 3, currentX: 52, currentY: 20 };
    const { rect } = dragToRect(drag, bounds)!;
    expect(rect).toEqual({ left: 7, top: 3, width: 45, height: 17 });

    const fetchSpy = vi.fn(async () => new Response(JSON.stringify({ id: 'p0001' }), { status: 200 }));
    const client = new ApiClient('http://x', fetchSpy as unknown as typeof fetch);
    const payload = prototypePayload('img-1', rect, 'noise');
    await client.addPrototype(payload.source_image_id, payload.rect, payload.category);

    expect(fetchSpy).toHaveBeenCalledOnce();
    const [url, init] = fetchSpy.mock.calls[0] as unknown as [string, RequestInit];
    expect(url).toBe('http://x/prototypes');
    expect(JSON.parse(init.body as string)).toEqual({
      source_image_id: 'img-1',
      rect: { left: 7, top: 3, width: 45, height: 17 },
      category: 'noise',
    });
  });
});
