/**
 * View model for the context graph: nodes, edges, layered layout, and the
 * root-to-leaf path views the explorer highlights.
 *
 * Built purely from the STC document. The rendered graph is the union of
 * the document's contexts (each context is one root-to-leaf chain), so the
 * view shows exactly as many distinct paths as the document carries;
 * relations supply the strength labels along traversed edges. No statistics
 * happen here: every number on screen comes from the document.
 */

import {
  InstanceRef,
  StcContext,
  StcDocument,
  StcRelation,
  instanceLabel,
} from "./stc.js";

export const ROOT_ID = "root";

export interface GraphNode {
  id: string;
  label: string;
  kind: "root" | "instance";
  depth: number;
  x: number;
  y: number;
}

export interface GraphEdge {
  id: string;
  from: string;
  to: string;
  label: string;
  relation: StcRelation | null;
}

export interface PathView {
  index: number;
  nodeIds: string[];
  edgeIds: string[];
  context: StcContext;
  label: string;
}

export interface ModelView {
  task: string;
  nodes: GraphNode[];
  edges: GraphEdge[];
  paths: PathView[];
  warnings: StcDocument["warnings"];
}

export interface LayoutOptions {
  columnGap: number;
  rowGap: number;
  marginX: number;
  marginY: number;
}

const DEFAULT_LAYOUT: LayoutOptions = {
  columnGap: 190,
  rowGap: 64,
  marginX: 40,
  marginY: 40,
};

export function nodeId(ref: InstanceRef): string {
  return `n:${ref.element}=${ref.value}`;
}

export function edgeId(from: string, to: string): string {
  return `e:${from}->${to}`;
}

function relationKey(ref: InstanceRef, other: InstanceRef): string {
  return `${nodeId(ref)}|${nodeId(other)}`;
}

/** Deterministic layered left-to-right view of the document's contexts. */
export function buildModelView(
  doc: StcDocument,
  layout: LayoutOptions = DEFAULT_LAYOUT,
): ModelView {
  const relationByEndpoints = new Map<string, StcRelation>();
  for (const relation of doc.relations) {
    relationByEndpoints.set(relationKey(relation.from, relation.to), relation);
  }

  // collect nodes and edges from the context chains
  const instances = new Map<string, InstanceRef>();
  const edgePairs = new Map<string, { from: string; to: string; relation: StcRelation | null }>();
  const depth = new Map<string, number>([[ROOT_ID, 0]]);

  for (const context of doc.contexts) {
    let previousId = ROOT_ID;
    let previousRef: InstanceRef | null = null;
    context.instances.forEach((ref, position) => {
      const id = nodeId(ref);
      instances.set(id, ref);
      // longest-path layering keeps every edge pointing rightwards
      depth.set(id, Math.max(depth.get(id) ?? 0, position + 1));
      const relation = previousRef
        ? relationByEndpoints.get(relationKey(previousRef, ref)) ?? null
        : null;
      edgePairs.set(edgeId(previousId, id), { from: previousId, to: id, relation });
      previousId = id;
      previousRef = ref;
    });
  }

  // vertical order inside a column: lexicographic instance identity
  const columns = new Map<number, string[]>();
  for (const [id] of instances) {
    const d = depth.get(id) ?? 1;
    const column = columns.get(d) ?? [];
    column.push(id);
    columns.set(d, column);
  }
  for (const column of columns.values()) column.sort();

  const tallest = Math.max(1, ...[...columns.values()].map((c) => c.length));
  const heightOf = (count: number) => (count - 1) * layout.rowGap;
  const center = layout.marginY + heightOf(tallest) / 2;

  const nodes: GraphNode[] = [
    {
      id: ROOT_ID,
      label: doc.task,
      kind: "root",
      depth: 0,
      x: layout.marginX,
      y: center,
    },
  ];
  for (const [d, column] of [...columns.entries()].sort((a, b) => a[0] - b[0])) {
    const top = center - heightOf(column.length) / 2;
    column.forEach((id, row) => {
      const ref = instances.get(id)!;
      nodes.push({
        id,
        label: instanceLabel(ref),
        kind: "instance",
        depth: d,
        x: layout.marginX + d * layout.columnGap,
        y: top + row * layout.rowGap,
      });
    });
  }

  const edges: GraphEdge[] = [...edgePairs.entries()]
    .sort((a, b) => (a[0] < b[0] ? -1 : 1))
    .map(([id, pair]) => ({
      id,
      from: pair.from,
      to: pair.to,
      label: pair.relation ? pair.relation.cramers_v.toFixed(3) : "",
      relation: pair.relation,
    }));

  const paths: PathView[] = doc.contexts.map((context, index) => {
    const ids = [ROOT_ID, ...context.instances.map(nodeId)];
    return {
      index,
      nodeIds: ids,
      edgeIds: ids.slice(1).map((id, i) => edgeId(ids[i], id)),
      context,
      label: context.instances.map(instanceLabel).join("  →  "),
    };
  });

  return { task: doc.task, nodes, edges, paths, warnings: doc.warnings };
}

export interface Highlight {
  nodeIds: Set<string>;
  edgeIds: Set<string>;
}

/** Nodes and edges to emphasize for a selected path; null clears. */
export function highlightFor(view: ModelView, pathIndex: number | null): Highlight {
  if (pathIndex === null || pathIndex < 0 || pathIndex >= view.paths.length) {
    return { nodeIds: new Set(), edgeIds: new Set() };
  }
  const path = view.paths[pathIndex];
  return { nodeIds: new Set(path.nodeIds), edgeIds: new Set(path.edgeIds) };
}

/** Paths ending at the given node (used when a leaf is clicked). */
export function pathsEndingAt(view: ModelView, id: string): PathView[] {
  return view.paths.filter((p) => p.nodeIds[p.nodeIds.length - 1] === id);
}

export interface PathStep {
  label: string;
  relation: StcRelation | null;
}

export interface PathDetails {
  label: string;
  jointSupport: number;
  jointSupportRatio: number;
  steps: PathStep[];
}

/** Everything the detail panel shows for one selected path. */
export function pathDetails(view: ModelView, pathIndex: number): PathDetails {
  const path = view.paths[pathIndex];
  const edgeById = new Map(view.edges.map((e) => [e.id, e]));
  return {
    label: path.label,
    jointSupport: path.context.joint_support,
    jointSupportRatio: path.context.joint_support_ratio,
    steps: path.context.instances.map((ref, i) => ({
      label: instanceLabel(ref),
      relation: edgeById.get(path.edgeIds[i])?.relation ?? null,
    })),
  };
}
