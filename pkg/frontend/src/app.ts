/** The annotation workbench: browse the model and ontologies, attach
 * annotations, trigger reasoning, and triage inferred suggestions. All
 * decisions come from the server; the UI renders them. */

import { ApiClient, ApiError } from "./api.js";
import { OntologyTree } from "./ontology.js";
import {
  ViewState,
  derivedEdges,
  localName,
  namespaceOf,
} from "./state.js";
import {
  renderAnnotationList,
  renderBlockPreview,
  renderConflicts,
  renderModelCanvas,
  renderQueue,
} from "./render.js";
import type { AnnotationsJson, BlockJson, ElementJson, LinkJson, SrKind } from "./types.js";

export interface FlowResult {
  ok: boolean;
  error?: string;
  stale?: boolean;
  id?: string;
}

export class Workbench {
  version = 0;
  elements: ElementJson[] = [];
  links: LinkJson[] = [];
  store: AnnotationsJson = { version: 0, annotations: [], associations: [] };
  ontologies = new Map<string, OntologyTree>();
  view!: ViewState;
  private retry: (() => Promise<FlowResult>) | null = null;

  constructor(
    readonly api: ApiClient,
    readonly root: Document,
  ) {}

  private panel<T extends HTMLElement>(id: string): T {
    const node = this.root.getElementById(id);
    if (!node) throw new Error(`missing #${id} in the workbench document`);
    return node as T;
  }

  async init(): Promise<void> {
    const project = await this.api.getProject();
    this.version = project.version;
    const model = await this.api.getModel();
    this.elements = model.elements;
    this.links = model.links;
    this.view = new ViewState(new Set(this.elements.map((e) => e.id)));
    for (const namespace of project.namespaces) {
      this.ontologies.set(namespace, new OntologyTree(await this.api.getOntology(namespace)));
    }
    await this.refreshStore();
    this.panel("project-title").textContent = `${model.id} @ v${this.version}`;
    this.renderAll();
  }

  async refreshStore(): Promise<void> {
    this.store = await this.api.listAnnotations();
    this.version = this.store.version;
  }

  conceptKnown(qualified: string): boolean {
    const namespace = namespaceOf(qualified);
    if (!namespace) return false;
    const tree = this.ontologies.get(namespace);
    return Boolean(tree && tree.doc.oall.includes(qualified));
  }

  selectElement(elementId: string | null): void {
    this.view.select(elementId);
    this.renderAll();
  }

  /** Preview the semantic block the server would delimit for a concept. */
  async previewBlock(concept: string, depth?: number): Promise<BlockJson | null> {
    if (!this.conceptKnown(concept)) {
      this.showAnnotateError(`unknown concept: ${concept}`);
      return null;
    }
    const namespace = namespaceOf(concept)!;
    const { block } = await this.api.getBlock(namespace, concept, depth);
    renderBlockPreview(this.panel("block-preview"), block);
    return block;
  }

  /** Attach a domain-semantics annotation to an element: preview the block,
   * then post it. Unknown concepts never reach the server. */
  async annotateFlow(
    elementId: string,
    concept: string,
    depth: number | undefined,
    sr: SrKind,
  ): Promise<FlowResult> {
    this.showAnnotateError("");
    if (!this.conceptKnown(concept)) {
      const error = `unknown concept: ${concept}`;
      this.showAnnotateError(error);
      return { ok: false, error };
    }
    const block = await this.previewBlock(concept, depth);
    if (!block) return { ok: false, error: "no block" };
    try {
      const { version, id } = await this.api.postAnnotation({
        version: this.version,
        element: elementId,
        sr,
        domain: block,
      });
      this.version = version;
      await this.refreshStore();
      this.renderAll();
      return { ok: true, id };
    } catch (error) {
      return this.surface(error, () => this.annotateFlow(elementId, concept, depth, sr));
    }
  }

  async deleteAnnotation(id: string): Promise<FlowResult> {
    try {
      const { version } = await this.api.deleteAnnotation(id, this.version);
      this.version = version;
      await this.refreshStore();
      this.renderAll();
      return { ok: true, id };
    } catch (error) {
      return this.surface(error, () => this.deleteAnnotation(id));
    }
  }

  /** Run reasoning and refresh badges, suggestion queue, and conflicts. */
  async runReason(): Promise<void> {
    const report = await this.api.reason();
    this.view.applyReport(report);
    await this.refreshStore();
    this.renderAll();
  }

  async acceptSuggestion(id: string): Promise<FlowResult> {
    try {
      const { version, annotationId } = await this.api.acceptSuggestion(id, this.version);
      this.version = version;
      this.view.dropFromQueue(id);
      await this.refreshStore();
      this.renderAll();
      return { ok: true, id: annotationId };
    } catch (error) {
      return this.surface(error, () => this.acceptSuggestion(id));
    }
  }

  async rejectSuggestion(id: string): Promise<FlowResult> {
    try {
      const { version } = await this.api.rejectSuggestion(id, this.version);
      this.version = version;
      this.view.dropFromQueue(id);
      this.renderAll();
      return { ok: true, id };
    } catch (error) {
      return this.surface(error, () => this.rejectSuggestion(id));
    }
  }

  /** Map API failures onto the UI: 422 inline, 409 refresh-and-retry. */
  private async surface(
    error: unknown,
    retry: () => Promise<FlowResult>,
  ): Promise<FlowResult> {
    if (error instanceof ApiError && error.isStaleVersion) {
      await this.refreshStore();
      this.retry = retry;
      const banner = this.panel("stale-banner");
      banner.hidden = false;
      banner.querySelector("span")!.textContent =
        `Project changed underneath you (now at v${this.version}). Retry?`;
      this.renderAll();
      return { ok: false, stale: true, error: "stale version" };
    }
    if (error instanceof ApiError) {
      const detail = error.detail as { invariant?: string; message?: string } | string | null;
      const message =
        typeof detail === "string"
          ? detail
          : detail?.message ?? detail?.invariant ?? `request failed (${error.status})`;
      this.showAnnotateError(message);
      return { ok: false, error: message };
    }
    throw error;
  }

  async retryLast(): Promise<FlowResult> {
    const pending = this.retry;
    this.retry = null;
    this.panel("stale-banner").hidden = true;
    if (!pending) return { ok: false, error: "nothing to retry" };
    return pending();
  }

  private showAnnotateError(message: string): void {
    this.panel("annotate-error").textContent = message;
  }

  annotationCounts(): Map<string, number> {
    const counts = new Map<string, number>();
    for (const annotation of this.store.annotations) {
      counts.set(annotation.element, (counts.get(annotation.element) ?? 0) + 1);
    }
    return counts;
  }

  renderAll(): void {
    renderModelCanvas(
      this.panel("canvas") as unknown as SVGSVGElement,
      this.elements,
      this.links,
      derivedEdges(this.store.annotations, this.view.queue),
      this.view.badges,
      this.annotationCounts(),
      this.view.selectedElement,
      { onSelect: (id) => this.selectElement(id) },
    );
    this.panel("store-count").textContent =
      `${this.store.annotations.length} annotations @ v${this.version}`;
    const selected = this.view.selectedElement;
    this.panel("selected-element").textContent = selected ?? "(none)";
    const shown = selected
      ? this.store.annotations.filter((a) => a.element === selected)
      : this.store.annotations;
    renderAnnotationList(this.panel("annotation-list"), shown, (id) => {
      void this.deleteAnnotation(id);
    });
    renderQueue(
      this.panel("suggestion-queue"),
      this.view.queue,
      (id) => void this.acceptSuggestion(id),
      (id) => void this.rejectSuggestion(id),
    );
    renderConflicts(this.panel("conflict-pane"), this.view.conflicts);
  }

  /** Wire the static controls; called once after init. */
  attach(): void {
    this.panel("reason-button").addEventListener("click", () => void this.runReason());
    this.panel("retry-button").addEventListener("click", () => void this.retryLast());
    this.panel("preview-button").addEventListener("click", () => {
      void this.previewBlock(this.conceptInput(), this.depthInput());
    });
    this.panel("annotate-button").addEventListener("click", () => {
      const element = this.view.selectedElement;
      if (!element) {
        this.showAnnotateError("select an element first");
        return;
      }
      void this.annotateFlow(element, this.conceptInput(), this.depthInput(), this.srInput());
    });
    this.panel("ontology-select").addEventListener("change", () => this.renderOntologyTree());
    this.populateOntologySelect();
    this.renderOntologyTree();
  }

  private conceptInput(): string {
    return (this.panel("concept-input") as HTMLInputElement).value.trim();
  }

  private depthInput(): number | undefined {
    const raw = (this.panel("depth-input") as HTMLInputElement).value.trim();
    return raw === "" ? undefined : Number(raw);
  }

  private srInput(): SrKind {
    return (this.panel("sr-select") as HTMLSelectElement).value as SrKind;
  }

  private populateOntologySelect(): void {
    const select = this.panel("ontology-select") as HTMLSelectElement;
    select.textContent = "";
    for (const namespace of [...this.ontologies.keys()].sort()) {
      const option = this.root.createElement("option");
      option.value = namespace;
      option.textContent = namespace;
      select.appendChild(option);
    }
  }

  renderOntologyTree(): void {
    const select = this.panel("ontology-select") as HTMLSelectElement;
    const tree = this.ontologies.get(select.value);
    const container = this.panel("ontology-tree");
    container.textContent = "";
    if (!tree) return;
    container.appendChild(this.treeLevel(tree, tree.roots()));
  }

  /** One lazy tree level: children render on first expand. */
  private treeLevel(tree: OntologyTree, concepts: string[]): HTMLElement {
    const list = this.root.createElement("ul");
    list.className = "tree-level";
    for (const concept of concepts) {
      const item = this.root.createElement("li");
      item.dataset.concept = concept;
      const label = this.root.createElement("span");
      label.textContent = localName(concept);
      label.className = "tree-label";
      label.addEventListener("click", () => {
        this.inspectConcept(tree, concept);
        if (!item.querySelector("ul")) {
          const children = tree.children(concept);
          if (children.length > 0) item.appendChild(this.treeLevel(tree, children));
        }
        (this.panel("concept-input") as HTMLInputElement).value = concept;
      });
      item.appendChild(label);
      list.appendChild(item);
    }
    return list;
  }

  private inspectConcept(tree: OntologyTree, concept: string): void {
    const inspector = this.panel("triple-inspector");
    inspector.textContent = "";
    for (const [s, p, o] of tree.triplesAbout(concept)) {
      const row = this.root.createElement("li");
      row.textContent = `${s} ${p} ${o}`;
      inspector.appendChild(row);
    }
  }
}
