/** Lazy tree over an ontology's subclass hierarchy plus a triple index for
 * the inspector. */

import type { OntologyJson, Triple } from "./types.js";

const SUBCLASS_OF = "rdfs:subClassOf";

export class OntologyTree {
  private childIndex = new Map<string, string[]>();
  private subjectIndex = new Map<string, Triple[]>();
  private conceptSet: Set<string>;

  constructor(readonly doc: OntologyJson) {
    this.conceptSet = new Set(doc.concepts);
    for (const triple of doc.triples) {
      const [subject, predicate, object] = triple;
      const about = this.subjectIndex.get(subject) ?? [];
      about.push(triple);
      this.subjectIndex.set(subject, about);
      if (predicate === SUBCLASS_OF) {
        const children = this.childIndex.get(object) ?? [];
        children.push(subject);
        this.childIndex.set(object, children);
      }
    }
    for (const children of this.childIndex.values()) children.sort();
  }

  has(name: string): boolean {
    return this.conceptSet.has(name);
  }

  /** Concepts that are not a subclass of anything: the tree's top level. */
  roots(): string[] {
    const withParent = new Set<string>();
    for (const [subject, , ] of this.doc.triples.filter(([, p]) => p === SUBCLASS_OF)) {
      withParent.add(subject);
    }
    return this.doc.concepts.filter((c) => !withParent.has(c)).sort();
  }

  children(concept: string): string[] {
    return this.childIndex.get(concept) ?? [];
  }

  triplesAbout(name: string): Triple[] {
    return this.subjectIndex.get(name) ?? [];
  }
}
