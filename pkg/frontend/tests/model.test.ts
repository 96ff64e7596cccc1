import { describe, expect, it } from "vitest";

import {
  Page,
  TaskDoc,
  emptyPage,
  emptyTask,
  freshTargetId,
  validatePage,
  validateTask,
} from "../src/model.js";

function page(anchors = 2, targets = 1): Page {
  const p = emptyPage("home", "mockups/home.png", 1280, 800);
  for (let i = 0; i < anchors; i++) {
    p.anchors.push({ label: `<a${i}>`, point: { x: 10 + i, y: 10 }, page_id: "home" });
  }
  for (let i = 0; i < targets; i++) {
    p.targets.push({
      id: `home.t${i}`,
      page_id: "home",
      box: { x: 10 + 50 * i, y: 50, width: 40, height: 20 },
      interaction: { variant: "click", subtype: null },
      description: null,
    });
  }
  return p;
}

function task(pages: Page[]): TaskDoc {
  return { ...emptyTask("demo"), pages };
}

describe("validatePage", () => {
  it("accepts a well-formed page", () => {
    expect(validatePage(page())).toEqual([]);
  });

  it("rejects one anchor", () => {
    const problems = validatePage(page(1));
    expect(problems.some((p) => p.message.includes("expected 2..5, got 1"))).toBe(true);
  });

  it("rejects six anchors", () => {
    const problems = validatePage(page(6));
    expect(problems.some((p) => p.message.includes("expected 2..5, got 6"))).toBe(true);
  });

  it("rejects duplicate anchor labels", () => {
    const p = page();
    p.anchors[1].label = p.anchors[0].label;
    expect(validatePage(p).some((x) => x.message.includes("duplicate anchor label"))).toBe(true);
  });

  it("rejects malformed anchor labels", () => {
    const p = page();
    p.anchors[0].label = "search";
    expect(validatePage(p).some((x) => x.message.includes("look like <name>"))).toBe(true);
  });

  it("rejects boxes outside the mockup", () => {
    const p = page();
    p.targets[0].box.x = 1270;
    expect(validatePage(p).some((x) => x.message.includes("outside the mockup"))).toBe(true);
  });

  it("rejects non-positive boxes", () => {
    const p = page();
    p.targets[0].box.width = 0;
    expect(validatePage(p).some((x) => x.message.includes("positive size"))).toBe(true);
  });

  it("rejects target page_id mismatch", () => {
    const p = page();
    p.targets[0].page_id = "elsewhere";
    expect(validatePage(p).some((x) => x.message.includes("page_id mismatch"))).toBe(true);
  });
});

describe("validateTask", () => {
  it("accepts a well-formed task", () => {
    expect(validateTask(task([page()]))).toEqual([]);
  });

  it("rejects empty page lists", () => {
    expect(validateTask(task([])).some((p) => p.message.includes("nonempty"))).toBe(true);
  });

  it("rejects duplicate page ids", () => {
    const problems = validateTask(task([page(), page()]));
    expect(problems.some((p) => p.message.includes("duplicate page_id"))).toBe(true);
  });

  it("rejects duplicate target ids across pages", () => {
    const a = page();
    const b = page();
    b.page_id = "other";
    b.targets[0].page_id = "other";
    const problems = validateTask(task([a, b]));
    expect(problems.some((p) => p.message.includes("duplicate target id"))).toBe(true);
  });
});

describe("freshTargetId", () => {
  it("avoids existing ids", () => {
    const existing = new Set(["home.t1", "home.t2"]);
    const id = freshTargetId("home", existing);
    expect(existing.has(id)).toBe(false);
    expect(id.startsWith("home.t")).toBe(true);
  });
});
