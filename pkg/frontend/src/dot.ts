/**
 * Graphviz DOT export of the rendered model, mirroring the service side's
 * deterministic emission order (sorted nodes, root edges first).
 */

import { ModelView, ROOT_ID } from "./model.js";

function escapeLabel(text: string): string {
  return text.replace(/\\/g, "\\\\").replace(/"/g, '\\"');
}

export function exportDot(view: ModelView): string {
  const instanceNodes = view.nodes
    .filter((n) => n.kind === "instance")
    .sort((a, b) => (a.label < b.label ? -1 : 1));
  const names = new Map<string, string>(
    instanceNodes.map((node, i) => [node.id, `n${i}`]),
  );

  const lines = [
    "digraph context_model {",
    "  rankdir=LR;",
    "  node [shape=box];",
    `  root [label="${escapeLabel(view.task)}", shape=ellipse, style=bold];`,
  ];
  for (const node of instanceNodes) {
    lines.push(`  ${names.get(node.id)} [label="${escapeLabel(node.label)}"];`);
  }

  const rootEdges = view.edges
    .filter((e) => e.from === ROOT_ID)
    .sort((a, b) => (names.get(a.to)! < names.get(b.to)! ? -1 : 1));
  for (const edge of rootEdges) {
    lines.push(`  root -> ${names.get(edge.to)};`);
  }
  const innerEdges = view.edges
    .filter((e) => e.from !== ROOT_ID)
    .sort((a, b) => (a.id < b.id ? -1 : 1));
  for (const edge of innerEdges) {
    const label = edge.label ? ` [label="${edge.label}"]` : "";
    lines.push(`  ${names.get(edge.from)} -> ${names.get(edge.to)}${label};`);
  }
  lines.push("}");
  return lines.join("\n") + "\n";
}
