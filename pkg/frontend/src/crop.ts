import type { Rect } from './types';

/** Default prototype window; one click in stamp mode places this size. */
export const STAMP_WIDTH = 45;
export const STAMP_HEIGHT = 17;

export interface ImageBounds {
  width: number;
  height: number;
}

export interface DragState {
  startX: number;
  startY: number;
  currentX: number;
  currentY: number;
}

export interface CropResult {
  rect: Rect;
  /** True when the pointer left the image and the rect was pulled back in. */
  clamped: boolean;
}

const clampCoord = (v: number, max: number) => Math.min(Math.max(Math.round(v), 0), max);

/**
 * Convert a live drag to an integral rect inside the image.
 *
 * The two corners are snapped to whole pixels first and clamped to the
 * image afterwards, so the rect that leaves here is exactly the rect
 * the server will store; there is no later resampling step.
 */
export function dragToRect(drag: DragState, bounds: ImageBounds): CropResult | null {
  const x0 = clampCoord(Math.min(drag.startX, drag.currentX), bounds.width);
  const y0 = clampCoord(Math.min(drag.startY, drag.currentY), bounds.height);
  const x1 = clampCoord(Math.max(drag.startX, drag.currentX), bounds.width);
  const y1 = clampCoord(Math.max(drag.startY, drag.currentY), bounds.height);
  if (x1 - x0 < 1 || y1 - y0 < 1) return null; // degenerate drag, nothing to crop
  const clamped =
    Math.min(drag.startX, drag.currentX) < 0 ||
    Math.min(drag.startY, drag.currentY) < 0 ||
    Math.max(drag.startX, drag.currentX) > bounds.width ||
    Math.max(drag.startY, drag.currentY) > bounds.height;
  return {
    rect: { left: x0, top: y0, width: x1 - x0, height: y1 - y0 },
    clamped,
  };
}

/**
 * One-click placement of a fixed-size window centered on the click,
 * shifted (not shrunk) to stay inside the image.
 */
export function stampRect(
  x: number,
  y: number,
  bounds: ImageBounds,
  w = STAMP_WIDTH,
  h = STAMP_HEIGHT,
): CropResult | null {
  if (bounds.width < w || bounds.height < h) return null; // image smaller than the stamp
  const idealLeft = Math.round(x - w / 2);
  const idealTop = Math.round(y - h / 2);
  const left = Math.min(Math.max(idealLeft, 0), bounds.width - w);
  const top = Math.min(Math.max(idealTop, 0), bounds.height - h);
  return {
    rect: { left, top, width: w, height: h },
    clamped: left !== idealLeft || top !== idealTop,
  };
}

/** The exact JSON body POST /prototypes expects for this rect. */
export function prototypePayload(sourceImageId: string, rect: Rect, category: string) {
  return { source_image_id: sourceImageId, rect: { ...rect }, category };
}

export function rectInsideBounds(rect: Rect, bounds: ImageBounds): boolean {
  return (
    rect.left >= 0 &&
    rect.top >= 0 &&
    rect.width >= 1 &&
    rect.height >= 1 &&
    rect.left + rect.width <= bounds.width &&
    rect.top + rect.height <= bounds.height
  );
}
