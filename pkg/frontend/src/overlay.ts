// Review-overlay helpers: evaluation report rows joined against the current
// annotation, color-coded by localization tier.

import type { Page } from "./model.js";
import type { Report, ReportRow } from "./api.js";

export const TIER_COLORS: Record<string, string> = {
  T1_IOU30: "#2e7d32",
  T2_IOU10: "#9ccc65",
  T3_CENTER150: "#fbc02d",
  T4_CENTER600: "#fb8c00",
  T5_TEXT: "#8e24aa",
  MISS: "#e53935",
};

export function tierColor(tier: string): string {
  return TIER_COLORS[tier] ?? "#607d8b";
}

export interface OverlayItem {
  row: ReportRow;
  color: string;
  tooltip: string;
}

export interface OverlayView {
  items: OverlayItem[]; // rows whose targets still exist on the page
  stale: ReportRow[]; // rows referencing deleted targets
}

export function overlayForPage(page: Page, report: Report): OverlayView {
  const known = new Set(page.targets.map((t) => t.id));
  const items: OverlayItem[] = [];
  const stale: ReportRow[] = [];
  for (const row of report.per_annotation) {
    if (row.page_id !== page.page_id) continue;
    if (!known.has(row.target_id)) {
      stale.push(row);
      continue;
    }
    const matched = row.matched_locator ? `matched ${row.matched_locator}` : "no match";
    items.push({
      row,
      color: tierColor(row.tier_name),
      tooltip: `${row.target_id}: ${row.tier_name} L=${row.L} B=${row.B} (${matched})`,
    });
  }
  return { items, stale };
}
