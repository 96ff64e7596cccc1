// Annotation tool wiring: canvas editing on the left, page list and target
// form on the right. Keyboard: 1-6 assigns the interaction type of the
// selected target, "a" toggles anchor placement, Delete removes the
// selection. Boxes live in mockup pixels no matter the zoom.

import { Api, ApiError, Report } from "./api.js";
import {
  Handle,
  HANDLE_RADIUS,
  ViewState,
  clampBox,
  fitZoom,
  handleAt,
  moveBox,
  normalizedBox,
  pickBox,
  resizeBox,
  toMockup,
} from "./geometry.js";
import {
  Anchor,
  Page,
  Target,
  TaskDoc,
  VARIANTS,
  Variant,
  emptyPage,
  emptyTask,
  freshTargetId,
  validateTask,
} from "./model.js";
import { overlayForPage } from "./overlay.js";

const VARIANT_COLORS: Record<Variant, string> = {
  navigation: "#1e88e5",
  input: "#00897b",
  toggle: "#8e24aa",
  external_link: "#6d4c41",
  popout: "#f4511e",
  click: "#546e7a",
};

type Drag =
  | { kind: "draw"; startX: number; startY: number; curX: number; curY: number }
  | { kind: "move"; target: Target; lastX: number; lastY: number }
  | { kind: "resize"; target: Target; handle: Handle };

class App {
  private api = new Api();
  private doc: TaskDoc = emptyTask("task");
  private revision = "new";
  private pageId: string | null = null;
  private image = new Image();
  private view: ViewState = { zoom: 1 };
  private selected: Target | null = null;
  private drag: Drag | null = null;
  private anchorMode = false;
  private overlayOn = false;
  private report: Report | null = null;
  private dirty = false;

  private canvas = el<HTMLCanvasElement>("canvas");
  private ctx = this.canvas.getContext("2d")!;

  async start() {
    const loaded = await this.api.load();
    this.revision = loaded.revision;
    const pages = await this.api.pages();
    if (loaded.document) {
      this.doc = loaded.document;
    } else if (pages.length > 0) {
      this.doc = emptyTask(pages[0].page_id.split(".")[0] || "task");
    }
    // surface mockups that have no page entry yet
    for (const info of pages) {
      if (!this.doc.pages.some((p) => p.page_id === info.page_id)) {
        this.doc.pages.push(emptyPage(info.page_id, info.mockup_image, 0, 0));
      }
    }
    this.report = await this.api.report();
    el<HTMLButtonElement>("toggle-overlay").hidden = this.report === null;
    this.bind();
    this.renderPageList();
    if (this.doc.pages.length > 0) this.selectPage(this.doc.pages[0].page_id);
    this.setStatus(`loaded revision ${this.revision}`);
  }

  private page(): Page | null {
    return this.doc.pages.find((p) => p.page_id === this.pageId) ?? null;
  }

  // -- DOM wiring --

  private bind() {
    this.canvas.addEventListener("mousedown", (e) => this.onDown(e));
    this.canvas.addEventListener("mousemove", (e) => this.onMove(e));
    window.addEventListener("mouseup", () => this.onUp());
    window.addEventListener("keydown", (e) => this.onKey(e));
    window.addEventListener("beforeunload", (e) => {
      if (this.dirty) e.preventDefault(); // unsaved boxes are not lost silently
    });
    el<HTMLButtonElement>("save").addEventListener("click", () => void this.save());
    el<HTMLButtonElement>("add-anchor").addEventListener("click", () => {
      this.anchorMode = !this.anchorMode;
      this.setStatus(this.anchorMode ? "anchor mode: click to place" : "anchor mode off");
    });
    el<HTMLButtonElement>("toggle-overlay").addEventListener("click", () => {
      this.overlayOn = !this.overlayOn;
      this.draw();
    });
    el<HTMLInputElement>("description").addEventListener("input", (e) => {
      if (this.selected) {
        this.selected.description = (e.target as HTMLInputElement).value || null;
        this.markDirty();
      }
    });
    el<HTMLInputElement>("subtype").addEventListener("input", (e) => {
      if (this.selected) {
        this.selected.interaction.subtype = (e.target as HTMLInputElement).value || null;
        this.markDirty();
      }
    });
    el<HTMLSelectElement>("variant").addEventListener("change", (e) => {
      if (this.selected) {
        this.selected.interaction.variant = (e.target as HTMLSelectElement).value as Variant;
        this.markDirty();
        this.draw();
      }
    });
    const variantSelect = el<HTMLSelectElement>("variant");
    for (const v of VARIANTS) {
      const option = document.createElement("option");
      option.value = v;
      option.textContent = v;
      variantSelect.appendChild(option);
    }
  }

  private renderPageList() {
    const list = el<HTMLUListElement>("pages");
    list.innerHTML = "";
    for (const page of this.doc.pages) {
      const item = document.createElement("li");
      item.textContent = `${page.page_id} (${page.targets.length} targets, ${page.anchors.length} anchors)`;
      if (page.page_id === this.pageId) item.classList.add("current");
      item.addEventListener("click", () => this.selectPage(page.page_id));
      list.appendChild(item);
    }
  }

  private selectPage(pageId: string) {
    this.pageId = pageId;
    this.selected = null;
    const page = this.page();
    if (!page) return;
    this.image = new Image();
    this.image.onload = () => {
      if (page.mockup_size.width === 0) {
        page.mockup_size = { width: this.image.naturalWidth, height: this.image.naturalHeight };
      }
      this.view.zoom = fitZoom(page.mockup_size.width, this.canvas.parentElement!.clientWidth - 16);
      this.canvas.width = Math.round(page.mockup_size.width * this.view.zoom);
      this.canvas.height = Math.round(page.mockup_size.height * this.view.zoom);
      this.draw();
    };
    this.image.src = this.api.imageUrl(pageId);
    this.renderPageList();
    this.renderForm();
  }

  // -- mouse editing --

  private mockupPoint(e: MouseEvent) {
    const rect = this.canvas.getBoundingClientRect();
    return toMockup(this.view, e.clientX - rect.left, e.clientY - rect.top);
  }

  private onDown(e: MouseEvent) {
    const page = this.page();
    if (!page) return;
    const { x, y } = this.mockupPoint(e);
    if (this.anchorMode) {
      this.placeAnchor(page, x, y);
      return;
    }
    if (this.selected) {
      const handle = handleAt(this.selected.box, x, y, HANDLE_RADIUS / this.view.zoom + 4);
      if (handle) {
        this.drag = { kind: "resize", target: this.selected, handle };
        return;
      }
    }
    const hit = pickBox(page.targets, x, y);
    if (hit) {
      this.selected = hit;
      this.drag = { kind: "move", target: hit, lastX: x, lastY: y };
      this.renderForm();
      this.draw();
      return;
    }
    this.selected = null;
    this.drag = { kind: "draw", startX: x, startY: y, curX: x, curY: y };
    this.renderForm();
  }

  private onMove(e: MouseEvent) {
    if (!this.drag) return;
    const page = this.page();
    if (!page) return;
    const { x, y } = this.mockupPoint(e);
    if (this.drag.kind === "move") {
      const moved = moveBox(this.drag.target.box, x - this.drag.lastX, y - this.drag.lastY);
      this.drag.target.box = clampBox(moved, page.mockup_size.width, page.mockup_size.height);
      this.drag.lastX = x;
      this.drag.lastY = y;
      this.markDirty();
    } else if (this.drag.kind === "resize") {
      const resized = resizeBox(this.drag.target.box, this.drag.handle, x, y);
      this.drag.target.box = clampBox(resized, page.mockup_size.width, page.mockup_size.height);
      this.markDirty();
    } else {
      this.drag.curX = x;
      this.drag.curY = y;
    }
    this.draw(
      this.drag.kind === "draw"
        ? { x0: this.drag.startX, y0: this.drag.startY, x1: x, y1: y }
        : undefined,
    );
  }

  private onUp() {
    const page = this.page();
    const drag = this.drag;
    this.drag = null;
    if (drag?.kind === "draw" && page) {
      this.finishDraw(page, drag.startX, drag.startY, drag.curX, drag.curY);
    }
    this.draw();
  }

  private finishDraw(page: Page, x0: number, y0: number, x1: number, y1: number) {
    const box = normalizedBox(x0, y0, x1, y1);
    if (box.width < 4 || box.height < 4) return;
    const existing = new Set(this.doc.pages.flatMap((p) => p.targets.map((t) => t.id)));
    const target: Target = {
      id: freshTargetId(page.page_id, existing),
      page_id: page.page_id,
      box: clampBox(box, page.mockup_size.width, page.mockup_size.height),
      interaction: { variant: "click", subtype: null },
      description: null,
    };
    page.targets.push(target);
    this.selected = target;
    this.markDirty();
    this.renderForm();
    this.renderPageList();
  }

  private placeAnchor(page: Page, x: number, y: number) {
    const labelInput = el<HTMLInputElement>("anchor-label");
    let token = labelInput.value.trim().replace(/^<|>$/g, "");
    if (!token) token = `anchor-${page.anchors.length + 1}`;
    const anchor: Anchor = {
      label: `<${token}>`,
      point: { x: Math.round(x), y: Math.round(y) },
      page_id: page.page_id,
    };
    page.anchors.push(anchor);
    labelInput.value = "";
    this.anchorMode = false;
    this.markDirty();
    this.renderPageList();
    this.draw();
    this.validateInline();
  }

  private onKey(e: KeyboardEvent) {
    if (e.target instanceof HTMLInputElement || e.target instanceof HTMLSelectElement) return;
    const page = this.page();
    if (!page) return;
    const index = Number.parseInt(e.key, 10);
    if (index >= 1 && index <= VARIANTS.length && this.selected) {
      this.selected.interaction.variant = VARIANTS[index - 1];
      this.markDirty();
      this.renderForm();
      this.draw();
      return;
    }
    if (e.key === "a") {
      this.anchorMode = !this.anchorMode;
      this.setStatus(this.anchorMode ? "anchor mode: click to place" : "anchor mode off");
      return;
    }
    if ((e.key === "Delete" || e.key === "Backspace") && this.selected) {
      page.targets = page.targets.filter((t) => t !== this.selected);
      this.selected = null;
      this.markDirty();
      this.renderForm();
      this.renderPageList();
      this.draw();
    }
  }

  // -- persistence --

  private markDirty() {
    this.dirty = true;
    this.validateInline();
  }

  private validateInline(): boolean {
    const problems = validateTask(this.doc);
    const list = el<HTMLUListElement>("problems");
    list.innerHTML = "";
    for (const problem of problems) {
      const item = document.createElement("li");
      item.textContent = problem.page_id ? `${problem.page_id}: ${problem.message}` : problem.message;
      list.appendChild(item);
    }
    el<HTMLButtonElement>("save").disabled = problems.length > 0;
    return problems.length === 0;
  }

  private async save() {
    if (!this.validateInline()) {
      this.setStatus("fix the listed problems before saving");
      return;
    }
    try {
      this.revision = await this.api.save(this.doc, this.revision);
      this.dirty = false;
      this.setStatus(`saved revision ${this.revision}`);
    } catch (error) {
      const apiError = error as ApiError;
      if (apiError.status === 409) {
        this.setStatus(`save conflict: ${apiError.message}; reload to continue`);
      } else {
        this.setStatus(`save rejected: ${apiError.message ?? error}`);
      }
    }
  }

  // -- rendering --

  private draw(rubber?: { x0: number; y0: number; x1: number; y1: number }) {
    const page = this.page();
    const ctx = this.ctx;
    ctx.clearRect(0, 0, this.canvas.width, this.canvas.height);
    if (!page) return;
    if (this.image.complete && this.image.naturalWidth > 0) {
      ctx.drawImage(this.image, 0, 0, this.canvas.width, this.canvas.height);
    }
    const z = this.view.zoom;
    for (const target of page.targets) {
      const b = target.box;
      ctx.lineWidth = target === this.selected ? 3 : 2;
      ctx.strokeStyle = VARIANT_COLORS[target.interaction.variant];
      ctx.strokeRect(b.x * z, b.y * z, b.width * z, b.height * z);
      ctx.font = "11px sans-serif";
      ctx.fillStyle = ctx.strokeStyle;
      ctx.fillText(target.interaction.variant, b.x * z + 2, Math.max(10, b.y * z - 3));
      if (target === this.selected) {
        ctx.fillStyle = "#ffffff";
        for (const [cx, cy] of [
          [b.x, b.y],
          [b.x + b.width, b.y],
          [b.x, b.y + b.height],
          [b.x + b.width, b.y + b.height],
        ]) {
          ctx.fillRect(cx * z - 3, cy * z - 3, 6, 6);
          ctx.strokeRect(cx * z - 3, cy * z - 3, 6, 6);
        }
      }
    }
    for (const anchor of page.anchors) {
      const { x, y } = anchor.point;
      ctx.strokeStyle = "#d81b60";
      ctx.lineWidth = 2;
      ctx.beginPath();
      ctx.moveTo(x * z - 6, y * z);
      ctx.lineTo(x * z + 6, y * z);
      ctx.moveTo(x * z, y * z - 6);
      ctx.lineTo(x * z, y * z + 6);
      ctx.stroke();
      ctx.fillStyle = "#d81b60";
      ctx.fillText(anchor.label, x * z + 8, y * z - 4);
    }
    if (rubber) {
      ctx.strokeStyle = "#333";
      ctx.setLineDash([4, 3]);
      const box = normalizedBox(rubber.x0, rubber.y0, rubber.x1, rubber.y1);
      ctx.strokeRect(box.x * z, box.y * z, box.width * z, box.height * z);
      ctx.setLineDash([]);
    }
    if (this.overlayOn && this.report) {
      const view = overlayForPage(page, this.report);
      for (const item of view.items) {
        const target = page.targets.find((t) => t.id === item.row.target_id)!;
        const b = target.box;
        ctx.lineWidth = 3;
        ctx.strokeStyle = item.color;
        ctx.strokeRect(b.x * z - 2, b.y * z - 2, b.width * z + 4, b.height * z + 4);
        ctx.fillStyle = item.color;
        ctx.fillText(item.tooltip, b.x * z + 2, (b.y + b.height) * z + 12);
      }
      const badge = el<HTMLSpanElement>("stale-badge");
      badge.hidden = view.stale.length === 0;
      badge.textContent = view.stale.length
        ? `${view.stale.length} stale report target(s)`
        : "";
    }
  }

  private renderForm() {
    const form = el<HTMLDivElement>("target-form");
    form.hidden = this.selected === null;
    if (this.selected) {
      el<HTMLSelectElement>("variant").value = this.selected.interaction.variant;
      el<HTMLInputElement>("description").value = this.selected.description ?? "";
      el<HTMLInputElement>("subtype").value = this.selected.interaction.subtype ?? "";
      el<HTMLSpanElement>("target-id").textContent = this.selected.id;
    }
  }

  private setStatus(message: string) {
    el<HTMLDivElement>("status").textContent = message;
  }
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

window.addEventListener("DOMContentLoaded", () => {
  new App().start().catch((error) => {
    document.getElementById("status")!.textContent = `failed to start: ${error.message ?? error}`;
  });
});
