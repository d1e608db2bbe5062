/** View state of the workbench and the pure derivations that feed the
 * canvas and panels. Badges come exclusively from the last fetched report;
 * nothing in here re-derives a verdict. */

import type { AnnotationJson, ConflictJson, ReportJson, Verdict } from "./types.js";

export interface DerivedEdge {
  source: string;
  target: string;
  rule: string;
  pending: boolean;
}

export interface ConflictRow {
  suspects: string[];
  reason: string;
}

const REASON_LABELS: Record<ConflictJson["reason"], string> = {
  initialXinitial: "initial×initial",
  initialXinferred: "initial×inferred",
  inferredXinferred: "inferred×inferred",
};

/** Worst verdict per element over the report's compared pairs. */
export function badgesFromReport(report: ReportJson): Map<string, Verdict> {
  const rank: Record<Verdict, number> = {
    consistent: 0,
    possiblyConsistent: 1,
    inconsistent: 2,
  };
  const badges = new Map<string, Verdict>();
  for (const finding of report.inconsistencies) {
    const current = badges.get(finding.element);
    if (current === undefined || rank[finding.verdict] > rank[current]) {
      badges.set(finding.element, finding.verdict);
    }
  }
  return badges;
}

/** Dashed canvas edges: one per inferred annotation or pending suggestion,
 * labeled by the rule-derived predicate that produced it. */
export function derivedEdges(
  annotations: AnnotationJson[],
  pending: AnnotationJson[],
): DerivedEdge[] {
  const edges = new Map<string, DerivedEdge>();
  const add = (a: AnnotationJson, isPending: boolean) => {
    if (a.provenance.kind !== "inferred") return;
    const source = a.provenance.sourceElement ?? "";
    const rule = a.provenance.viaRule ?? "";
    const key = `${source}->${a.element}:${rule}`;
    const existing = edges.get(key);
    if (!existing || (existing.pending && !isPending)) {
      edges.set(key, { source, target: a.element, rule, pending: isPending });
    }
  };
  for (const a of annotations) add(a, false);
  for (const s of pending) add(s, true);
  return [...edges.values()].sort((a, b) => (a.source + a.target).localeCompare(b.source + b.target));
}

export function conflictRows(report: ReportJson): ConflictRow[] {
  return report.conflicts.map((c) => ({
    suspects: [...c.suspects],
    reason: REASON_LABELS[c.reason] ?? c.reason,
  }));
}

/** Trailing local name of a qualified `&NS;Name` string. */
export function localName(qualified: string): string {
  const i = qualified.indexOf(";");
  return i >= 0 ? qualified.slice(i + 1) : qualified;
}

export function namespaceOf(qualified: string): string | null {
  if (!qualified.startsWith("&")) return null;
  const i = qualified.indexOf(";");
  return i > 1 ? qualified.slice(1, i) : null;
}

export class ViewState {
  selectedElement: string | null = null;
  browsePath: string[] = [];
  queue: AnnotationJson[] = [];
  badges = new Map<string, Verdict>();
  conflicts: ConflictRow[] = [];
  lastReportVersion: number | null = null;

  constructor(private knownElements: Set<string>) {}

  select(elementId: string | null): void {
    if (elementId !== null && !this.knownElements.has(elementId)) {
      throw new Error(`not a model element: ${elementId}`);
    }
    this.selectedElement = elementId;
  }

  applyReport(report: ReportJson): void {
    this.badges = badgesFromReport(report);
    this.conflicts = conflictRows(report);
    this.queue = [...report.suggestions];
    this.lastReportVersion = report.version;
  }

  dropFromQueue(suggestionId: string): void {
    this.queue = this.queue.filter((s) => s.id !== suggestionId);
  }
}
