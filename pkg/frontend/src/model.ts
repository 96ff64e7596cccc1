// Annotation document types and the client-side mirror of the server's
// validation rules. Every rule the server enforces on save is checked here
// first so annotators see problems before a round trip; the server remains
// the authority and may still reject.

export interface Box {
  x: number;
  y: number;
  width: number;
  height: number;
}

export type Variant =
  | "navigation"
  | "input"
  | "toggle"
  | "external_link"
  | "popout"
  | "click";

export const VARIANTS: Variant[] = [
  "navigation",
  "input",
  "toggle",
  "external_link",
  "popout",
  "click",
];

export interface InteractionType {
  variant: Variant;
  subtype: string | null;
}

export interface Target {
  id: string;
  page_id: string;
  box: Box;
  interaction: InteractionType;
  description: string | null;
}

export interface Anchor {
  label: string;
  point: { x: number; y: number };
  page_id: string;
}

export interface Page {
  page_id: string;
  mockup_image: string;
  mockup_size: { width: number; height: number };
  declared_url: string | null;
  targets: Target[];
  anchors: Anchor[];
}

export interface TaskDoc {
  format_version: number;
  task_name: string;
  condition_label: string | null;
  pages: Page[];
}

const ANCHOR_LABEL = /^<[^<>\s]+>$/;

export const MIN_ANCHORS = 2;
export const MAX_ANCHORS = 5;

export interface Problem {
  page_id: string | null;
  message: string;
}

export function validatePage(page: Page): Problem[] {
  const problems: Problem[] = [];
  const where = page.page_id;
  const n = page.anchors.length;
  if (n < MIN_ANCHORS || n > MAX_ANCHORS) {
    problems.push({
      page_id: where,
      message: `anchors: expected ${MIN_ANCHORS}..${MAX_ANCHORS}, got ${n}`,
    });
  }
  const labels = new Set<string>();
  for (const anchor of page.anchors) {
    if (!ANCHOR_LABEL.test(anchor.label)) {
      problems.push({ page_id: where, message: `anchor label ${anchor.label} must look like <name>` });
    }
    if (labels.has(anchor.label)) {
      problems.push({ page_id: where, message: `duplicate anchor label ${anchor.label}` });
    }
    labels.add(anchor.label);
    const p = anchor.point;
    if (p.x < 0 || p.y < 0 || p.x > page.mockup_size.width || p.y > page.mockup_size.height) {
      problems.push({ page_id: where, message: `anchor ${anchor.label} outside the mockup` });
    }
  }
  for (const target of page.targets) {
    const b = target.box;
    if (b.width <= 0 || b.height <= 0) {
      problems.push({ page_id: where, message: `target ${target.id}: box must have positive size` });
    }
    if (
      b.x < 0 ||
      b.y < 0 ||
      b.x + b.width > page.mockup_size.width ||
      b.y + b.height > page.mockup_size.height
    ) {
      problems.push({ page_id: where, message: `target ${target.id}: box outside the mockup` });
    }
    if (!VARIANTS.includes(target.interaction.variant)) {
      problems.push({
        page_id: where,
        message: `target ${target.id}: unknown interaction ${target.interaction.variant}`,
      });
    }
    if (target.page_id !== page.page_id) {
      problems.push({ page_id: where, message: `target ${target.id}: page_id mismatch` });
    }
  }
  return problems;
}

export function validateTask(doc: TaskDoc): Problem[] {
  const problems: Problem[] = [];
  if (!doc.task_name) {
    problems.push({ page_id: null, message: "task_name must not be empty" });
  }
  if (doc.pages.length === 0) {
    problems.push({ page_id: null, message: "pages must be nonempty" });
  }
  const pageIds = new Set<string>();
  const targetIds = new Set<string>();
  for (const page of doc.pages) {
    if (pageIds.has(page.page_id)) {
      problems.push({ page_id: page.page_id, message: "duplicate page_id" });
    }
    pageIds.add(page.page_id);
    problems.push(...validatePage(page));
    for (const target of page.targets) {
      if (targetIds.has(target.id)) {
        problems.push({ page_id: page.page_id, message: `duplicate target id ${target.id}` });
      }
      targetIds.add(target.id);
    }
  }
  return problems;
}

let counter = 0;

export function freshTargetId(pageId: string, existing: Set<string>): string {
  for (;;) {
    counter += 1;
    const id = `${pageId}.t${counter}`;
    if (!existing.has(id)) return id;
  }
}

export function emptyPage(pageId: string, image: string, width: number, height: number): Page {
  return {
    page_id: pageId,
    mockup_image: image,
    mockup_size: { width, height },
    declared_url: null,
    targets: [],
    anchors: [],
  };
}

export function emptyTask(name: string): TaskDoc {
  return { format_version: 1, task_name: name, condition_label: null, pages: [] };
}
