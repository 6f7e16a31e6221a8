/**
 * Types and validation for the standardized task-specific contexts (STC)
 * document, format 1.0 — the service's wire contract.
 *
 * Validation is deliberately strict at the boundary: the rest of the UI can
 * then trust the document shape. Unknown fields are tolerated (forward
 * compatibility); an unknown version is not.
 */

export const STC_VERSION = "1.0";

export interface InstanceRef {
  element: string;
  value: string;
}

export interface StcElement {
  name: string;
  label: string;
}

export interface StcRelation {
  from: InstanceRef;
  to: InstanceRef;
  chi_square: number;
  p_value: number;
  cramers_v: number;
  residual: number;
  support: number;
  support_ratio: number;
}

export interface StcContext {
  instances: InstanceRef[];
  joint_support: number;
  joint_support_ratio: number;
}

export interface StcWarning {
  code: string;
  message: string;
}

export interface StcDocument {
  version: string;
  task: string;
  elements: StcElement[];
  relations: StcRelation[];
  contexts: StcContext[];
  warnings: StcWarning[];
}

export interface ValidationIssue {
  path: string;
  message: string;
}

export type StcParseResult =
  | { ok: true; doc: StcDocument }
  | { ok: false; issues: ValidationIssue[] };

export function instanceLabel(ref: InstanceRef): string {
  return `${ref.element} = ${ref.value}`;
}

function isRecord(value: unknown): value is Record<string, unknown> {
  return typeof value === "object" && value !== null && !Array.isArray(value);
}

class Checker {
  issues: ValidationIssue[] = [];

  fail(path: string, message: string): undefined {
    this.issues.push({ path, message });
    return undefined;
  }

  str(obj: Record<string, unknown>, key: string, path: string): string | undefined {
    const value = obj[key];
    if (typeof value !== "string") return this.fail(`${path}${key}`, "expected a string");
    return value;
  }

  num(obj: Record<string, unknown>, key: string, path: string): number | undefined {
    const value = obj[key];
    if (typeof value !== "number" || !Number.isFinite(value)) {
      return this.fail(`${path}${key}`, "expected a finite number");
    }
    return value;
  }

  int(obj: Record<string, unknown>, key: string, path: string): number | undefined {
    const value = this.num(obj, key, path);
    if (value === undefined) return undefined;
    if (!Number.isInteger(value)) return this.fail(`${path}${key}`, "expected an integer");
    return value;
  }

  list(obj: Record<string, unknown>, key: string, path: string): unknown[] | undefined {
    const value = obj[key];
    if (!Array.isArray(value)) return this.fail(`${path}${key}`, "expected an array");
    return value;
  }

  instance(value: unknown, path: string): InstanceRef | undefined {
    if (!isRecord(value)) return this.fail(path, "expected an object");
    const element = this.str(value, "element", `${path}.`);
    const instanceValue = this.str(value, "value", `${path}.`);
    if (element === undefined || instanceValue === undefined) return undefined;
    if (!element || !instanceValue) return this.fail(path, "element and value must be non-empty");
    return { element, value: instanceValue };
  }
}

/** Parse raw JSON (already decoded) into a validated STC document. */
export function validateStc(raw: unknown): StcParseResult {
  const check = new Checker();
  if (!isRecord(raw)) {
    return { ok: false, issues: [{ path: "$", message: "document root must be an object" }] };
  }

  const version = check.str(raw, "version", "");
  if (version !== undefined && version !== STC_VERSION) {
    return {
      ok: false,
      issues: [{ path: "version", message: `unsupported document version '${version}'` }],
    };
  }
  const task = check.str(raw, "task", "");

  const elements: StcElement[] = [];
  const known = new Set<string>();
  for (const [i, item] of (check.list(raw, "elements", "") ?? []).entries()) {
    const path = `elements[${i}]`;
    if (!isRecord(item)) {
      check.fail(path, "expected an object");
      continue;
    }
    const name = check.str(item, "name", `${path}.`);
    const label = check.str(item, "label", `${path}.`);
    if (name === undefined || label === undefined) continue;
    if (known.has(name)) check.fail(`${path}.name`, `duplicate element '${name}'`);
    known.add(name);
    elements.push({ name, label });
  }

  const requireKnown = (ref: InstanceRef | undefined, path: string) => {
    if (ref && !known.has(ref.element)) {
      check.fail(`${path}.element`, `unknown element '${ref.element}'`);
    }
  };

  const relations: StcRelation[] = [];
  for (const [i, item] of (check.list(raw, "relations", "") ?? []).entries()) {
    const path = `relations[${i}]`;
    if (!isRecord(item)) {
      check.fail(path, "expected an object");
      continue;
    }
    const from = check.instance(item["from"], `${path}.from`);
    const to = check.instance(item["to"], `${path}.to`);
    requireKnown(from, `${path}.from`);
    requireKnown(to, `${path}.to`);
    if (from && to && from.element === to.element) {
      check.fail(path, "relation endpoints share an element");
    }
    const chiSquare = check.num(item, "chi_square", `${path}.`);
    const pValue = check.num(item, "p_value", `${path}.`);
    const cramersV = check.num(item, "cramers_v", `${path}.`);
    const residual = check.num(item, "residual", `${path}.`);
    const support = check.int(item, "support", `${path}.`);
    const supportRatio = check.num(item, "support_ratio", `${path}.`);
    if (
      from === undefined || to === undefined || chiSquare === undefined ||
      pValue === undefined || cramersV === undefined || residual === undefined ||
      support === undefined || supportRatio === undefined
    ) {
      continue;
    }
    if (pValue < 0 || pValue > 1) check.fail(`${path}.p_value`, "must be in [0, 1]");
    if (cramersV < 0 || cramersV > 1) check.fail(`${path}.cramers_v`, "must be in [0, 1]");
    relations.push({
      from, to,
      chi_square: chiSquare,
      p_value: pValue,
      cramers_v: cramersV,
      residual,
      support,
      support_ratio: supportRatio,
    });
  }

  const contexts: StcContext[] = [];
  for (const [i, item] of (check.list(raw, "contexts", "") ?? []).entries()) {
    const path = `contexts[${i}]`;
    if (!isRecord(item)) {
      check.fail(path, "expected an object");
      continue;
    }
    const rawInstances = check.list(item, "instances", `${path}.`) ?? [];
    const instances: InstanceRef[] = [];
    const seen = new Set<string>();
    for (const [j, entry] of rawInstances.entries()) {
      const ref = check.instance(entry, `${path}.instances[${j}]`);
      if (!ref) continue;
      requireKnown(ref, `${path}.instances[${j}]`);
      if (seen.has(ref.element)) {
        check.fail(`${path}.instances[${j}]`, `element '${ref.element}' repeats in one context`);
      }
      seen.add(ref.element);
      instances.push(ref);
    }
    if (instances.length === 0) check.fail(path, "a context needs at least one instance");
    const jointSupport = check.int(item, "joint_support", `${path}.`);
    const ratio = check.num(item, "joint_support_ratio", `${path}.`);
    if (jointSupport === undefined || ratio === undefined) continue;
    contexts.push({
      instances,
      joint_support: jointSupport,
      joint_support_ratio: ratio,
    });
  }

  const warnings: StcWarning[] = [];
  for (const [i, item] of (check.list(raw, "warnings", "") ?? []).entries()) {
    const path = `warnings[${i}]`;
    if (!isRecord(item)) {
      check.fail(path, "expected an object");
      continue;
    }
    const code = check.str(item, "code", `${path}.`);
    const message = check.str(item, "message", `${path}.`);
    if (code === undefined || message === undefined) continue;
    warnings.push({ code, message });
  }

  if (check.issues.length > 0 || version === undefined || task === undefined) {
    return { ok: false, issues: check.issues };
  }
  return { ok: true, doc: { version, task, elements, relations, contexts, warnings } };
}
