/** DOM/SVG rendering for the workbench. Nothing here talks to the server. */

import type { DerivedEdge } from "./state.js";
import { localName } from "./state.js";
import type { AnnotationJson, BlockJson, ElementJson, LinkJson, Verdict } from "./types.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const WIDTH = 720;
const HEIGHT = 520;

function svgEl<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string>,
): SVGElementTagNameMap[K] {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  return node;
}

/** Deterministic circular layout: elements in model order around an ellipse. */
export function layoutPositions(elements: ElementJson[]): Map<string, { x: number; y: number }> {
  const positions = new Map<string, { x: number; y: number }>();
  const n = Math.max(elements.length, 1);
  elements.forEach((element, i) => {
    const angle = (2 * Math.PI * i) / n - Math.PI / 2;
    positions.set(element.id, {
      x: WIDTH / 2 + (WIDTH / 2 - 70) * Math.cos(angle),
      y: HEIGHT / 2 + (HEIGHT / 2 - 50) * Math.sin(angle),
    });
  });
  return positions;
}

export interface CanvasCallbacks {
  onSelect(elementId: string): void;
}

export function renderModelCanvas(
  svg: SVGSVGElement,
  elements: ElementJson[],
  links: LinkJson[],
  derived: DerivedEdge[],
  badges: Map<string, Verdict>,
  annotationCounts: Map<string, number>,
  selected: string | null,
  callbacks: CanvasCallbacks,
): void {
  svg.setAttribute("viewBox", `0 0 ${WIDTH} ${HEIGHT}`);
  svg.textContent = "";
  const positions = layoutPositions(elements);

  for (const link of links) {
    const a = positions.get(link.source);
    const b = positions.get(link.target);
    if (!a || !b) continue;
    svg.appendChild(
      svgEl("line", {
        x1: String(a.x), y1: String(a.y), x2: String(b.x), y2: String(b.y),
        class: "link native",
      }),
    );
  }

  for (const edge of derived) {
    const a = positions.get(edge.source);
    const b = positions.get(edge.target);
    if (!a || !b) continue;
    const group = svgEl("g", { class: `link derived${edge.pending ? " pending" : ""}` });
    group.appendChild(
      svgEl("line", {
        x1: String(a.x), y1: String(a.y), x2: String(b.x), y2: String(b.y),
        "stroke-dasharray": "6 4",
      }),
    );
    const label = svgEl("text", {
      x: String((a.x + b.x) / 2),
      y: String((a.y + b.y) / 2 - 4),
      class: "derived-label",
    });
    label.textContent = localName(edge.rule);
    group.appendChild(label);
    svg.appendChild(group);
  }

  for (const element of elements) {
    const position = positions.get(element.id)!;
    const badge = badges.get(element.id);
    const classes = ["node", `meta-${localName(element.metaType)}`];
    if (badge) classes.push(`badge-${badge}`);
    if (element.id === selected) classes.push("selected");
    const group = svgEl("g", {
      class: classes.join(" "),
      "data-element": element.id,
      transform: `translate(${position.x} ${position.y})`,
    });
    group.appendChild(svgEl("circle", { r: "18" }));
    const label = svgEl("text", { y: "32", "text-anchor": "middle", class: "node-label" });
    label.textContent = element.label;
    group.appendChild(label);
    const count = annotationCounts.get(element.id) ?? 0;
    if (count > 0) {
      const countBadge = svgEl("text", { y: "4", "text-anchor": "middle", class: "count" });
      countBadge.textContent = String(count);
      group.appendChild(countBadge);
    }
    group.addEventListener("click", () => callbacks.onSelect(element.id));
    svg.appendChild(group);
  }
}

export function renderBlockPreview(container: HTMLElement, block: BlockJson | null): void {
  container.textContent = "";
  if (!block) return;
  const heading = document.createElement("div");
  heading.className = "preview-main";
  heading.textContent = `${block.main} (${block.entities.length} entities)`;
  container.appendChild(heading);
  const list = document.createElement("ul");
  list.className = "preview-entities";
  for (const entity of block.entities) {
    const item = document.createElement("li");
    item.textContent = entity;
    list.appendChild(item);
  }
  container.appendChild(list);
}

export function renderAnnotationList(
  container: HTMLElement,
  annotations: AnnotationJson[],
  onDelete: (id: string) => void,
): void {
  container.textContent = "";
  for (const annotation of annotations) {
    const row = document.createElement("li");
    row.className = `annotation ${annotation.provenance.kind}`;
    row.dataset.annotation = annotation.id;
    const text = document.createElement("span");
    text.textContent =
      `${annotation.id}: ${annotation.element} ${annotation.sr} ${annotation.domain.main}` +
      (annotation.provenance.kind === "inferred"
        ? ` (inferred from ${annotation.provenance.sourceElement})`
        : "");
    row.appendChild(text);
    const remove = document.createElement("button");
    remove.textContent = "delete";
    remove.addEventListener("click", () => onDelete(annotation.id));
    row.appendChild(remove);
    container.appendChild(row);
  }
}

export function renderQueue(
  container: HTMLElement,
  queue: AnnotationJson[],
  onAccept: (id: string) => void,
  onReject: (id: string) => void,
): void {
  container.textContent = "";
  for (const suggestion of queue) {
    const row = document.createElement("li");
    row.className = "suggestion";
    row.dataset.suggestion = suggestion.id;
    const text = document.createElement("span");
    text.textContent =
      `${suggestion.element} ← ${suggestion.domain.main} (${suggestion.sr}, ` +
      `from ${suggestion.provenance.sourceElement} via ${localName(suggestion.provenance.viaRule ?? "")})`;
    row.appendChild(text);
    const accept = document.createElement("button");
    accept.textContent = "accept";
    accept.className = "accept";
    accept.addEventListener("click", () => onAccept(suggestion.id));
    const reject = document.createElement("button");
    reject.textContent = "reject";
    reject.className = "reject";
    reject.addEventListener("click", () => onReject(suggestion.id));
    row.append(accept, reject);
    container.appendChild(row);
  }
}

export function renderConflicts(
  container: HTMLElement,
  rows: { suspects: string[]; reason: string }[],
): void {
  container.textContent = "";
  for (const row of rows) {
    const item = document.createElement("li");
    item.className = "conflict";
    item.dataset.suspects = row.suspects.join(",");
    item.textContent = `{${row.suspects.join(", ")}} — ${row.reason}`;
    container.appendChild(item);
  }
}
