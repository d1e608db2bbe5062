import { describe, expect, it } from "vitest";

import {
  ViewState,
  badgesFromReport,
  conflictRows,
  derivedEdges,
  localName,
  namespaceOf,
} from "../src/state.js";
import type { AnnotationJson, ReportJson } from "../src/types.js";

function report(partial: Partial<ReportJson>): ReportJson {
  return {
    version: 1,
    currentVersion: 1,
    suggestions: [],
    inconsistencies: [],
    conflicts: [],
    stats: { pairsChecked: 0, rulesFired: 0 },
    ...partial,
  };
}

function inferred(element: string, source: string, main = "&A;X"): AnnotationJson {
  return {
    id: `sug-${element}-${main}`,
    element,
    sr: "lessGeneral",
    mme: "&M;DataObject",
    mr: "io",
    provenance: { kind: "inferred", sourceElement: source, viaRule: "&SANS;SBR_rule" },
    domain: { main, entities: [main], triples: [] },
  };
}

describe("badgesFromReport", () => {
  it("keeps the worst verdict per element", () => {
    const badges = badgesFromReport(
      report({
        inconsistencies: [
          { element: "e2", saX: "sa1", saY: "sa2", pr: "overlapping", verdict: "possiblyConsistent" },
          { element: "e2", saX: "sa1", saY: "sa3", pr: "disjoint", verdict: "inconsistent" },
          { element: "e3", saX: "sa4", saY: "sa5", pr: "equivalent", verdict: "consistent" },
        ],
      }),
    );
    expect(badges.get("e2")).toBe("inconsistent");
    expect(badges.get("e3")).toBe("consistent");
    expect(badges.get("e4")).toBeUndefined();
  });
});

describe("derivedEdges", () => {
  it("draws one dashed edge per inferred provenance, store edges win over pending", () => {
    const accepted = inferred("e2", "e9");
    const pendingTwin = inferred("e2", "e9");
    const other = inferred("e3", "e9", "&A;Y");
    const edges = derivedEdges([accepted], [pendingTwin, other]);
    expect(edges).toHaveLength(2);
    const e2edge = edges.find((e) => e.target === "e2")!;
    expect(e2edge.pending).toBe(false);
    expect(e2edge.rule).toBe("&SANS;SBR_rule");
    expect(edges.find((e) => e.target === "e3")!.pending).toBe(true);
  });

  it("ignores initial annotations", () => {
    const initial: AnnotationJson = {
      ...inferred("e2", "e9"),
      provenance: { kind: "initial" },
    };
    expect(derivedEdges([initial], [])).toHaveLength(0);
  });
});

describe("conflictRows", () => {
  it("formats provenance reasons for the pane", () => {
    const rows = conflictRows(
      report({
        conflicts: [{ suspects: ["e2", "e9"], reason: "initialXinferred", finding: 0 }],
      }),
    );
    expect(rows).toEqual([{ suspects: ["e2", "e9"], reason: "initial×inferred" }]);
  });
});

describe("ViewState", () => {
  it("only selects known elements", () => {
    const view = new ViewState(new Set(["e1", "e2"]));
    view.select("e2");
    expect(view.selectedElement).toBe("e2");
    view.select(null);
    expect(view.selectedElement).toBeNull();
    expect(() => view.select("ghost")).toThrow(/not a model element/);
  });

  it("applies a report to badges, queue, and conflicts", () => {
    const view = new ViewState(new Set(["e2"]));
    view.applyReport(
      report({
        version: 7,
        suggestions: [inferred("e2", "e9")],
        inconsistencies: [
          { element: "e2", saX: "a", saY: "b", pr: "disjoint", verdict: "inconsistent" },
        ],
        conflicts: [{ suspects: ["e2", "e9"], reason: "initialXinferred", finding: 0 }],
      }),
    );
    expect(view.lastReportVersion).toBe(7);
    expect(view.queue).toHaveLength(1);
    expect(view.badges.get("e2")).toBe("inconsistent");
    view.dropFromQueue(view.queue[0].id);
    expect(view.queue).toHaveLength(0);
  });
});

describe("name helpers", () => {
  it("splits qualified names", () => {
    expect(localName("&AIPL;P0110")).toBe("P0110");
    expect(namespaceOf("&AIPL;P0110")).toBe("AIPL");
    expect(namespaceOf("P0110")).toBeNull();
  });
});
