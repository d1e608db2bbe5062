/** JSON payload shapes of the annot project API. */

export type Triple = [string, string, string];

export interface BlockJson {
  main: string;
  entities: string[];
  triples: Triple[];
}

export interface ProvenanceJson {
  kind: "initial" | "inferred";
  sourceElement?: string;
  viaRule?: string;
}

export type SrKind =
  | "equivalent"
  | "moreGeneral"
  | "lessGeneral"
  | "overlapping"
  | "disjoint";

export interface AnnotationJson {
  id: string;
  element: string;
  sr: SrKind;
  mme: string;
  mr: string;
  provenance: ProvenanceJson;
  domain: BlockJson;
}

export interface AssociationJson {
  derived: string;
  property: string;
  direction: "forward" | "inverse";
}

export interface ElementJson {
  id: string;
  label: string;
  metaType: string;
  attributes: Record<string, string>;
}

export interface LinkJson {
  source: string;
  target: string;
  kind: string;
}

export interface ProjectInfo {
  version: number;
  model: { id: string; metamodel: string; elementCount: number; linkCount: number };
  namespaces: string[];
  annotationCount: number;
}

export interface ModelJson {
  version: number;
  id: string;
  metamodel: string;
  elements: ElementJson[];
  links: LinkJson[];
}

export interface OntologyJson {
  version: number;
  namespace: string;
  prefix: string;
  concepts: string[];
  properties: string[];
  triples: Triple[];
  oall: string[];
}

export interface AnnotationsJson {
  version: number;
  annotations: AnnotationJson[];
  associations: AssociationJson[];
}

export type Verdict = "consistent" | "possiblyConsistent" | "inconsistent";

export interface FindingJson {
  element: string;
  saX: string;
  saY: string;
  pr: string;
  verdict: Verdict;
}

export interface ConflictJson {
  suspects: string[];
  reason: "initialXinitial" | "initialXinferred" | "inferredXinferred";
  finding: number;
}

export interface ReportJson {
  version: number;
  currentVersion: number;
  suggestions: AnnotationJson[];
  inconsistencies: FindingJson[];
  conflicts: ConflictJson[];
  stats: { pairsChecked: number; rulesFired: number };
}
