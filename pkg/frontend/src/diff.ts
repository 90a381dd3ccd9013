/**
 * Method-granularity diff over role code.
 *
 * An increment adds or replaces whole methods, so the natural diff unit
 * is the method, not the line. The service prints code canonically:
 * methods open with `    fn name(...)` and close with a `    }` line,
 * and string literals never span lines, so chunking by those markers is
 * exact for anything the service sends.
 */

const METHOD_OPEN = /^ {4}fn ([A-Za-z_][A-Za-z0-9_]*)\(/;
const METHOD_CLOSE = /^ {4}\}\s*$/;

export interface MethodChunk {
  name: string;
  text: string;
}

export interface CodeChunks {
  /** everything before the first method (role header and fields) */
  header: string;
  methods: MethodChunk[];
}

export function splitMethods(code: string): CodeChunks {
  const lines = code.split("\n");
  const headerLines: string[] = [];
  const methods: MethodChunk[] = [];
  let current: { name: string; lines: string[] } | null = null;
  for (const line of lines) {
    if (current === null) {
      const open = METHOD_OPEN.exec(line);
      if (open) {
        current = { name: open[1], lines: [line] };
      } else {
        headerLines.push(line);
      }
      continue;
    }
    current.lines.push(line);
    if (METHOD_CLOSE.test(line)) {
      methods.push({ name: current.name, text: current.lines.join("\n") });
      current = null;
    }
  }
  return { header: headerLines.join("\n"), methods };
}

export type MethodDiffKind = "added" | "replaced" | "unchanged";

export interface MethodDiff {
  name: string;
  kind: MethodDiffKind;
  before?: string;
  after: string;
}

/** Diff two canonical code listings at method granularity, in the order
 * the methods appear in the `after` code. */
export function diffMethods(before: string, after: string): MethodDiff[] {
  const prev = new Map(splitMethods(before).methods.map((m) => [m.name, m.text]));
  return splitMethods(after).methods.map((m) => {
    const old = prev.get(m.name);
    if (old === undefined) return { name: m.name, kind: "added", after: m.text };
    if (old !== m.text) return { name: m.name, kind: "replaced", before: old, after: m.text };
    return { name: m.name, kind: "unchanged", after: m.text };
  });
}

/** Names of the methods defined by an increment, in source order. */
export function deltaMethodNames(deltaSource: string): string[] {
  return splitMethods(deltaSource).methods.map((m) => m.name);
}

/** The changed subset of a diff (what an increment actually touched). */
export function changedNames(diff: MethodDiff[]): string[] {
  return diff.filter((d) => d.kind !== "unchanged").map((d) => d.name);
}
