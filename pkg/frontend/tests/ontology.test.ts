import { describe, expect, it } from "vitest";

import { OntologyTree } from "../src/ontology.js";
import type { OntologyJson } from "../src/types.js";

const DOC: OntologyJson = {
  version: 1,
  namespace: "A",
  prefix: "&A;",
  concepts: ["&A;Top", "&A;Mid", "&A;Leaf", "&A;Lone"],
  properties: ["&A;p"],
  triples: [
    ["&A;Mid", "rdfs:subClassOf", "&A;Top"],
    ["&A;Leaf", "rdfs:subClassOf", "&A;Mid"],
    ["&A;Leaf", "&A;p", "&A;Lone"],
  ],
  oall: ["&A;Top", "&A;Mid", "&A;Leaf", "&A;Lone", "&A;p"],
};

describe("OntologyTree", () => {
  it("finds roots: concepts that subclass nothing", () => {
    expect(new OntologyTree(DOC).roots()).toEqual(["&A;Lone", "&A;Top"]);
  });

  it("expands children lazily by subclass edges", () => {
    const tree = new OntologyTree(DOC);
    expect(tree.children("&A;Top")).toEqual(["&A;Mid"]);
    expect(tree.children("&A;Mid")).toEqual(["&A;Leaf"]);
    expect(tree.children("&A;Leaf")).toEqual([]);
  });

  it("indexes triples for the inspector", () => {
    const tree = new OntologyTree(DOC);
    expect(tree.triplesAbout("&A;Leaf")).toHaveLength(2);
    expect(tree.triplesAbout("&A;Lone")).toHaveLength(0);
  });
});
