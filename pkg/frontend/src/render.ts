/**
 * SVG rendering of the model view and the detail panel. Thin DOM layer:
 * all decisions about what to show come from the pure model module.
 */

import {
  GraphNode,
  Highlight,
  ModelView,
  PathView,
  highlightFor,
  pathDetails,
  pathsEndingAt,
} from "./model.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const NODE_WIDTH = 150;
const NODE_HEIGHT = 38;

export interface ModelRenderer {
  select(pathIndex: number | null): void;
  selected(): number | null;
}

export function renderModel(
  container: HTMLElement,
  pathList: HTMLElement,
  detailPanel: HTMLElement,
  view: ModelView,
): ModelRenderer {
  container.replaceChildren();
  pathList.replaceChildren();
  detailPanel.replaceChildren();

  let selected: number | null = null;

  const width =
    Math.max(...view.nodes.map((n) => n.x), 0) + NODE_WIDTH + 60;
  const height =
    Math.max(...view.nodes.map((n) => n.y), 0) + NODE_HEIGHT + 60;

  const svg = document.createElementNS(SVG_NS, "svg");
  svg.setAttribute("viewBox", `0 0 ${width} ${height}`);
  svg.setAttribute("width", String(width));
  svg.classList.add("model-svg");

  const nodeById = new Map(view.nodes.map((n) => [n.id, n]));
  const edgeElements = new Map<string, SVGElement>();
  const nodeElements = new Map<string, SVGElement>();

  for (const edge of view.edges) {
    const from = nodeById.get(edge.from)!;
    const to = nodeById.get(edge.to)!;
    const group = document.createElementNS(SVG_NS, "g");
    group.classList.add("edge");
    const line = document.createElementNS(SVG_NS, "line");
    line.setAttribute("x1", String(from.x + NODE_WIDTH));
    line.setAttribute("y1", String(from.y + NODE_HEIGHT / 2));
    line.setAttribute("x2", String(to.x));
    line.setAttribute("y2", String(to.y + NODE_HEIGHT / 2));
    line.setAttribute("marker-end", "url(#arrow)");
    group.appendChild(line);
    if (edge.label) {
      const text = document.createElementNS(SVG_NS, "text");
      text.setAttribute("x", String((from.x + NODE_WIDTH + to.x) / 2));
      text.setAttribute("y", String((from.y + to.y + NODE_HEIGHT) / 2 - 6));
      text.textContent = edge.label;
      group.appendChild(text);
    }
    svg.appendChild(group);
    edgeElements.set(edge.id, group);
  }

  const defs = document.createElementNS(SVG_NS, "defs");
  defs.innerHTML =
    '<marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" ' +
    'markerWidth="7" markerHeight="7" orient="auto-start-reverse">' +
    '<path d="M 0 0 L 10 5 L 0 10 z"/></marker>';
  svg.appendChild(defs);

  for (const node of view.nodes) {
    svg.appendChild(renderNode(node, nodeElements, onNodeClick));
  }
  container.appendChild(svg);

  const rows: HTMLElement[] = view.paths.map((path) => {
    const row = document.createElement("button");
    row.type = "button";
    row.className = "path-row";
    row.textContent = `${path.label}   (support ${path.context.joint_support})`;
    row.addEventListener("click", () => {
      select(selected === path.index ? null : path.index);
    });
    pathList.appendChild(row);
    return row;
  });

  function onNodeClick(node: GraphNode): void {
    if (node.kind === "root") {
      select(null);
      return;
    }
    const ending: PathView[] = pathsEndingAt(view, node.id);
    if (ending.length > 0) {
      select(selected === ending[0].index ? null : ending[0].index);
    }
  }

  function applyHighlight(highlight: Highlight): void {
    const emphasize = highlight.nodeIds.size > 0;
    for (const [id, element] of nodeElements) {
      element.classList.toggle("highlighted", highlight.nodeIds.has(id));
      element.classList.toggle("dimmed", emphasize && !highlight.nodeIds.has(id));
    }
    for (const [id, element] of edgeElements) {
      element.classList.toggle("highlighted", highlight.edgeIds.has(id));
      element.classList.toggle("dimmed", emphasize && !highlight.edgeIds.has(id));
    }
    rows.forEach((row, i) => {
      row.classList.toggle("selected", selected === i);
    });
  }

  function renderDetails(): void {
    detailPanel.replaceChildren();
    if (selected === null) {
      const hint = document.createElement("p");
      hint.className = "hint";
      hint.textContent = "Select a path or leaf to inspect it.";
      detailPanel.appendChild(hint);
      return;
    }
    const details = pathDetails(view, selected);
    const title = document.createElement("h3");
    title.textContent = details.label;
    detailPanel.appendChild(title);
    const support = document.createElement("p");
    support.textContent =
      `Joint support: ${details.jointSupport} rows ` +
      `(${(details.jointSupportRatio * 100).toFixed(2)}% of observations)`;
    detailPanel.appendChild(support);
    const table = document.createElement("table");
    table.innerHTML =
      "<thead><tr><th>Step</th><th>Cramér's V</th><th>Residual</th>" +
      "<th>Support</th><th>p-value</th></tr></thead>";
    const body = document.createElement("tbody");
    for (const step of details.steps) {
      const tr = document.createElement("tr");
      const metric = (v: string) => {
        const td = document.createElement("td");
        td.textContent = v;
        return td;
      };
      tr.appendChild(metric(step.label));
      if (step.relation) {
        tr.appendChild(metric(step.relation.cramers_v.toFixed(3)));
        tr.appendChild(metric(step.relation.residual.toFixed(2)));
        tr.appendChild(metric(String(step.relation.support)));
        tr.appendChild(metric(step.relation.p_value.toExponential(2)));
      } else {
        tr.appendChild(metric("—"));
        tr.appendChild(metric("—"));
        tr.appendChild(metric("—"));
        tr.appendChild(metric("—"));
      }
      body.appendChild(tr);
    }
    table.appendChild(body);
    detailPanel.appendChild(table);
  }

  function select(pathIndex: number | null): void {
    selected = pathIndex;
    applyHighlight(highlightFor(view, selected));
    renderDetails();
  }

  select(null);
  return {
    select,
    selected: () => selected,
  };
}

function renderNode(
  node: GraphNode,
  registry: Map<string, SVGElement>,
  onClick: (node: GraphNode) => void,
): SVGElement {
  const group = document.createElementNS(SVG_NS, "g");
  group.classList.add("node", node.kind);
  group.addEventListener("click", () => onClick(node));

  const shape = document.createElementNS(SVG_NS, "rect");
  shape.setAttribute("x", String(node.x));
  shape.setAttribute("y", String(node.y));
  shape.setAttribute("width", String(NODE_WIDTH));
  shape.setAttribute("height", String(NODE_HEIGHT));
  shape.setAttribute("rx", node.kind === "root" ? "19" : "6");
  group.appendChild(shape);

  const text = document.createElementNS(SVG_NS, "text");
  text.setAttribute("x", String(node.x + NODE_WIDTH / 2));
  text.setAttribute("y", String(node.y + NODE_HEIGHT / 2 + 4));
  text.setAttribute("text-anchor", "middle");
  text.textContent =
    node.label.length > 24 ? node.label.slice(0, 23) + "…" : node.label;
  const title = document.createElementNS(SVG_NS, "title");
  title.textContent = node.label;
  group.appendChild(title);
  group.appendChild(text);

  registry.set(node.id, group);
  return group;
}
