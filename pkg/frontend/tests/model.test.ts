import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import {
  ROOT_ID,
  buildModelView,
  highlightFor,
  nodeId,
  pathDetails,
  pathsEndingAt,
} from "../src/model.js";
import { StcDocument, validateStc } from "../src/stc.js";

function coffeeDoc(): StcDocument {
  const raw = JSON.parse(
    readFileSync(new URL("./fixtures/coffee.stc.json", import.meta.url), "utf-8"),
  );
  const result = validateStc(raw);
  if (!result.ok) throw new Error("fixture must validate");
  return result.doc;
}

/** A synthetic document with `count` single-instance contexts. */
function fanOutDoc(count: number): StcDocument {
  const elements = Array.from({ length: count }, (_, i) => ({
    name: `e${String(i).padStart(2, "0")}`,
    label: `element ${i}`,
  }));
  const contexts = elements.map((element, i) => ({
    instances: [{ element: element.name, value: "v" }],
    joint_support: count - i,
    joint_support_ratio: (count - i) / count,
  }));
  return {
    version: "1.0",
    task: "stress",
    elements,
    relations: [],
    contexts,
    warnings: [],
  };
}

describe("buildModelView", () => {
  it("renders exactly as many paths as the document has contexts", () => {
    const doc = coffeeDoc();
    const view = buildModelView(doc);
    expect(view.paths).toHaveLength(doc.contexts.length);
    const distinct = new Set(view.paths.map((p) => p.nodeIds.join("|")));
    expect(distinct.size).toBe(doc.contexts.length);
  });

  it("gives the two-path model two leaves reachable from the root", () => {
    const view = buildModelView(coffeeDoc());
    const leaves = view.paths.map((p) => p.nodeIds[p.nodeIds.length - 1]);
    expect(new Set(leaves).size).toBe(2);
    for (const path of view.paths) {
      expect(path.nodeIds[0]).toBe(ROOT_ID);
    }
  });

  it("labels traversed edges with the relation strength", () => {
    const view = buildModelView(coffeeDoc());
    const labelled = view.edges.filter((e) => e.relation !== null);
    expect(labelled).toHaveLength(2);
    for (const edge of labelled) {
      expect(edge.label).toBe(edge.relation!.cramers_v.toFixed(3));
    }
    const rootEdges = view.edges.filter((e) => e.from === ROOT_ID);
    expect(rootEdges.every((e) => e.label === "")).toBe(true);
  });

  it("is deterministic for equal input", () => {
    const first = buildModelView(coffeeDoc());
    const second = buildModelView(coffeeDoc());
    expect(JSON.stringify(first)).toBe(JSON.stringify(second));
  });

  it("keeps a 50-path model fully enumerated", () => {
    const view = buildModelView(fanOutDoc(50));
    expect(view.paths).toHaveLength(50);
    expect(view.nodes).toHaveLength(51); // root + 50 instances
  });

  it("handles an empty model", () => {
    const view = buildModelView(fanOutDoc(0));
    expect(view.paths).toHaveLength(0);
    expect(view.nodes).toHaveLength(1);
    expect(view.nodes[0].id).toBe(ROOT_ID);
  });

  it("deduplicates nodes shared by several contexts", () => {
    const doc = coffeeDoc();
    // a second context reusing location=WORK
    doc.elements.push({ name: "battery", label: "battery" });
    doc.contexts.push({
      instances: [
        { element: "location", value: "WORK" },
        { element: "battery", value: "LOW" },
      ],
      joint_support: 1,
      joint_support_ratio: 0.02,
    });
    const view = buildModelView(doc);
    const workNodes = view.nodes.filter(
      (n) => n.id === nodeId({ element: "location", value: "WORK" }),
    );
    expect(workNodes).toHaveLength(1);
    expect(view.paths).toHaveLength(3);
  });

  it("lays columns out strictly left to right", () => {
    const view = buildModelView(coffeeDoc());
    const byId = new Map(view.nodes.map((n) => [n.id, n]));
    for (const edge of view.edges) {
      expect(byId.get(edge.from)!.x).toBeLessThan(byId.get(edge.to)!.x);
    }
  });
});

describe("selection helpers", () => {
  it("highlights the full chain of a selected path", () => {
    const view = buildModelView(coffeeDoc());
    const highlight = highlightFor(view, 0);
    expect(highlight.nodeIds.size).toBe(3); // root + 2 instances
    expect(highlight.edgeIds.size).toBe(2);
    for (const id of view.paths[0].edgeIds) {
      expect(highlight.edgeIds.has(id)).toBe(true);
    }
  });

  it("clears the highlight on deselect", () => {
    const view = buildModelView(coffeeDoc());
    const cleared = highlightFor(view, null);
    expect(cleared.nodeIds.size).toBe(0);
    expect(cleared.edgeIds.size).toBe(0);
  });

  it("finds the paths ending at a leaf", () => {
    const view = buildModelView(coffeeDoc());
    const leaf = view.paths[0].nodeIds[view.paths[0].nodeIds.length - 1];
    const ending = pathsEndingAt(view, leaf);
    expect(ending).toHaveLength(1);
    expect(ending[0].index).toBe(0);
  });

  it("exposes support and per-step strength for the detail panel", () => {
    const view = buildModelView(coffeeDoc());
    const details = pathDetails(view, 0);
    expect(details.jointSupport).toBe(view.paths[0].context.joint_support);
    expect(details.steps).toHaveLength(view.paths[0].context.instances.length);
    expect(details.steps[0].relation).toBeNull(); // step from the root
    expect(details.steps[1].relation).not.toBeNull();
  });
});
