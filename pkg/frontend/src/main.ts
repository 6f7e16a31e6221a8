/**
 * Application wiring: configuration, form handling, outcome panels, exports.
 */

import { ProcessClient, ProcessOutcome, SubmitInput } from "./api.js";
import { buildModelView } from "./model.js";
import { exportDot } from "./dot.js";
import { renderModel } from "./render.js";

const CONFIG_PARAMS = [
  "alpha",
  "min_effect_size",
  "residual_threshold",
  "min_pair_support",
  "min_path_support",
  "max_instances",
  "max_path_length",
  "bins",
] as const;

interface RuntimeConfig {
  serviceUrl: string;
}

async function loadConfig(): Promise<RuntimeConfig> {
  try {
    const response = await fetch("./config.json");
    if (response.ok) {
      const raw = (await response.json()) as Partial<RuntimeConfig>;
      if (typeof raw.serviceUrl === "string" && raw.serviceUrl) {
        return { serviceUrl: raw.serviceUrl };
      }
    }
  } catch {
    // fall through to the same-origin default
  }
  return { serviceUrl: window.location.origin };
}

function element<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as T;
}

function download(name: string, data: BlobPart, type: string): void {
  const url = URL.createObjectURL(new Blob([data], { type }));
  const anchor = document.createElement("a");
  anchor.href = url;
  anchor.download = name;
  anchor.click();
  URL.revokeObjectURL(url);
}

async function start(): Promise<void> {
  const config = await loadConfig();
  const client = new ProcessClient(config.serviceUrl);

  const form = element<HTMLFormElement>("generate-form");
  const datasetInput = element<HTMLInputElement>("dataset-file");
  const metadataInput = element<HTMLInputElement>("metadata-file");
  const taskInput = element<HTMLInputElement>("task-name");
  const generateButton = element<HTMLButtonElement>("generate");
  const statusLine = element<HTMLParagraphElement>("status");
  const errorPanel = element<HTMLElement>("error-panel");
  const modelPanel = element<HTMLElement>("model-panel");
  const graphHost = element<HTMLElement>("graph");
  const pathList = element<HTMLElement>("path-list");
  const detailPanel = element<HTMLElement>("detail-panel");
  const warningsHost = element<HTMLElement>("warnings");
  const exportStc = element<HTMLButtonElement>("export-stc");
  const exportDotButton = element<HTMLButtonElement>("export-dot");
  const retryButton = element<HTMLButtonElement>("retry");

  statusLine.textContent = `Processor: ${config.serviceUrl}`;

  let lastInput: SubmitInput | null = null;
  let lastSuccess: Extract<ProcessOutcome, { kind: "success" }> | null = null;

  function overridesFromForm(): Record<string, string> {
    const overrides: Record<string, string> = {};
    for (const name of CONFIG_PARAMS) {
      const value = element<HTMLInputElement>(`cfg-${name}`).value.trim();
      if (value !== "") overrides[name] = value;
    }
    return overrides;
  }

  function showError(title: string, lines: string[]): void {
    errorPanel.hidden = false;
    modelPanel.hidden = true;
    errorPanel.replaceChildren();
    const heading = document.createElement("h3");
    heading.textContent = title;
    errorPanel.appendChild(heading);
    const list = document.createElement("ul");
    for (const line of lines) {
      const item = document.createElement("li");
      item.textContent = line;
      list.appendChild(item);
    }
    errorPanel.appendChild(list);
    errorPanel.appendChild(retryButton);
    retryButton.hidden = false;
  }

  function showModel(outcome: Extract<ProcessOutcome, { kind: "success" }>): void {
    lastSuccess = outcome;
    errorPanel.hidden = true;
    modelPanel.hidden = false;
    const view = buildModelView(outcome.doc);
    renderModel(graphHost, pathList, detailPanel, view);
    warningsHost.replaceChildren();
    if (view.paths.length === 0) {
      const notice = document.createElement("p");
      notice.className = "hint";
      notice.textContent = "No contexts found for this task with the current thresholds.";
      warningsHost.appendChild(notice);
    }
    for (const warning of view.warnings) {
      const line = document.createElement("p");
      line.className = "warning";
      line.textContent = `${warning.code}: ${warning.message}`;
      warningsHost.appendChild(line);
    }
    exportStc.onclick = () =>
      download("model.stc.json", outcome.bytes, "application/json");
    exportDotButton.onclick = () =>
      download("model.dot", exportDot(view), "text/vnd.graphviz");
  }

  async function run(input: SubmitInput): Promise<void> {
    lastInput = input;
    generateButton.disabled = true;
    statusLine.textContent = "Generating…";
    const outcome = await client.submit(input);
    generateButton.disabled = false;
    switch (outcome.kind) {
      case "success":
        statusLine.textContent =
          `${outcome.doc.contexts.length} context(s), ` +
          `${outcome.doc.relations.length} relation(s).`;
        showModel(outcome);
        break;
      case "error":
        statusLine.textContent = "The processor rejected the request.";
        showError(
          `${outcome.code} (HTTP ${outcome.status}): ${outcome.message}`,
          outcome.details.map((d) => JSON.stringify(d)),
        );
        break;
      case "schema":
        statusLine.textContent = "The processor answered with an unreadable document.";
        showError(
          "Response failed schema validation",
          outcome.issues.map((issue) => `${issue.path}: ${issue.message}`),
        );
        break;
      case "network":
        statusLine.textContent = "Could not reach the processor.";
        showError("Network failure", [outcome.message]);
        break;
      case "cancelled":
        break;
    }
  }

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const dataset = datasetInput.files?.[0];
    const metadata = metadataInput.files?.[0];
    const task = taskInput.value.trim();
    if (!dataset || !metadata || !task) {
      // client-side validation: the browser's `required` attributes catch
      // this first; this is the programmatic backstop
      statusLine.textContent = "Dataset, metadata and task name are all required.";
      return;
    }
    void run({ dataset, metadata, task, overrides: overridesFromForm() });
  });

  retryButton.addEventListener("click", () => {
    if (lastInput) void run(lastInput);
  });

  element<HTMLButtonElement>("clear-selection").addEventListener("click", () => {
    if (lastSuccess) showModel(lastSuccess);
  });
}

void start();
