// Canvas/mockup coordinate mapping and box hit-testing. Boxes are stored in
// mockup pixels; the canvas renders them at a zoom factor, so every mouse
// position goes through these helpers exactly once.

import type { Box } from "./model.js";

export interface ViewState {
  zoom: number; // canvas px per mockup px
}

export function toMockup(view: ViewState, canvasX: number, canvasY: number) {
  return { x: canvasX / view.zoom, y: canvasY / view.zoom };
}

export function toCanvas(view: ViewState, mockupX: number, mockupY: number) {
  return { x: mockupX * view.zoom, y: mockupY * view.zoom };
}

export function fitZoom(imageWidth: number, maxWidth: number): number {
  if (imageWidth <= 0) return 1;
  return Math.min(1, maxWidth / imageWidth);
}

export function normalizedBox(x0: number, y0: number, x1: number, y1: number): Box {
  const x = Math.min(x0, x1);
  const y = Math.min(y0, y1);
  return { x, y, width: Math.abs(x1 - x0), height: Math.abs(y1 - y0) };
}

export function clampBox(box: Box, width: number, height: number): Box {
  const x = Math.max(0, Math.min(box.x, width - 1));
  const y = Math.max(0, Math.min(box.y, height - 1));
  return {
    x,
    y,
    width: Math.max(1, Math.min(box.width, width - x)),
    height: Math.max(1, Math.min(box.height, height - y)),
  };
}

export function inBox(box: Box, x: number, y: number): boolean {
  return x >= box.x && x <= box.x + box.width && y >= box.y && y <= box.y + box.height;
}

export type Handle = "nw" | "ne" | "sw" | "se";

export const HANDLE_RADIUS = 6; // mockup px at zoom 1; divided by zoom when testing

export function handleAt(box: Box, x: number, y: number, radius: number): Handle | null {
  const corners: [Handle, number, number][] = [
    ["nw", box.x, box.y],
    ["ne", box.x + box.width, box.y],
    ["sw", box.x, box.y + box.height],
    ["se", box.x + box.width, box.y + box.height],
  ];
  for (const [name, cx, cy] of corners) {
    if (Math.abs(x - cx) <= radius && Math.abs(y - cy) <= radius) return name;
  }
  return null;
}

export function resizeBox(box: Box, handle: Handle, x: number, y: number): Box {
  const right = box.x + box.width;
  const bottom = box.y + box.height;
  switch (handle) {
    case "nw":
      return normalizedBox(x, y, right, bottom);
    case "ne":
      return normalizedBox(box.x, y, x, bottom);
    case "sw":
      return normalizedBox(x, box.y, right, y);
    case "se":
      return normalizedBox(box.x, box.y, x, y);
  }
}

export function moveBox(box: Box, dx: number, dy: number): Box {
  return { ...box, x: box.x + dx, y: box.y + dy };
}

/** Topmost (last-drawn) box containing the point. */
export function pickBox<T extends { box: Box }>(items: T[], x: number, y: number): T | null {
  for (let i = items.length - 1; i >= 0; i--) {
    if (inBox(items[i].box, x, y)) return items[i];
  }
  return null;
}
