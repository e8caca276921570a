/** Adjudication screen: three layers (locked, candidates A, candidates B).
 *
 * Constraint rendering makes illegal decisions unrepresentable: locked
 * items carry no toggle or removal control at all, and the screen offers
 * no way to create an annotation. Only candidates get keep/drop toggles.
 */

import { ApiClient } from "./api.js";
import type { AnnotationPayload, DivergencePayload, RelationPayload } from "./types.js";

export class AdjudicationView {
  divergence: DivergencePayload | null = null;
  kept = new Set<string>();

  constructor(
    private readonly api: ApiClient,
    private readonly docId: string,
    private readonly root: {
      locked: HTMLElement;
      candidatesA: HTMLElement;
      candidatesB: HTMLElement;
      preview: HTMLElement;
      status: HTMLElement;
    },
  ) {}

  async load(): Promise<void> {
    this.divergence = await this.api.divergence(this.docId);
    this.kept.clear();
    this.render();
  }

  toggle(id: string, keep: boolean): void {
    if (keep) {
      this.kept.add(id);
    } else {
      this.kept.delete(id);
    }
    this.renderPreview();
  }

  /** Gold preview: locked plus currently kept candidates. */
  goldPreview(): AnnotationPayload[] {
    if (!this.divergence) {
      return [];
    }
    const candidates = [...this.divergence.candidates_a, ...this.divergence.candidates_b];
    return [
      ...this.divergence.locked,
      ...candidates.filter((c) => this.kept.has(c.id)),
    ].sort((a, b) => a.start - b.start || a.end - b.end || a.id.localeCompare(b.id));
  }

  render(): void {
    if (!this.divergence) {
      return;
    }
    this.renderLocked(this.divergence.locked, this.divergence.locked_relations);
    this.renderCandidates(
      this.root.candidatesA,
      this.divergence.candidates_a,
      this.divergence.candidate_relations_a,
      "a",
    );
    this.renderCandidates(
      this.root.candidatesB,
      this.divergence.candidates_b,
      this.divergence.candidate_relations_b,
      "b",
    );
    this.renderPreview();
  }

  private annotationLabel(annotation: AnnotationPayload): string {
    return `[${annotation.start}, ${annotation.end}) ${annotation.types.join(", ")}`;
  }

  private renderLocked(locked: AnnotationPayload[], relations: RelationPayload[]): void {
    const container = this.root.locked;
    container.textContent = "";
    const list = document.createElement("ul");
    list.dataset.layer = "locked";
    for (const annotation of locked) {
      // Deliberately plain: no buttons, no inputs, nothing to toggle.
      const item = document.createElement("li");
      item.dataset.annotationId = annotation.id;
      item.className = "locked-item";
      item.textContent = `${this.annotationLabel(annotation)} (agreed by both)`;
      list.appendChild(item);
    }
    for (const relation of relations) {
      const item = document.createElement("li");
      item.dataset.relationId = relation.id;
      item.className = "locked-item locked-relation";
      item.textContent = `${relation.rtype}: ${relation.source} -> ${relation.target} (agreed by both)`;
      list.appendChild(item);
    }
    container.appendChild(list);
  }

  private renderCandidates(
    container: HTMLElement,
    candidates: AnnotationPayload[],
    relations: RelationPayload[],
    origin: "a" | "b",
  ): void {
    container.textContent = "";
    const list = document.createElement("ul");
    list.dataset.layer = `candidates-${origin}`;
    const addToggle = (item: HTMLLIElement, id: string) => {
      const toggle = document.createElement("input");
      toggle.type = "checkbox";
      toggle.dataset.action = "keep";
      toggle.dataset.targetId = id;
      toggle.checked = this.kept.has(id);
      toggle.addEventListener("change", () => this.toggle(id, toggle.checked));
      const label = document.createElement("label");
      label.appendChild(toggle);
      label.appendChild(document.createTextNode(" keep"));
      item.appendChild(label);
    };
    for (const annotation of candidates) {
      const item = document.createElement("li");
      item.dataset.annotationId = annotation.id;
      item.className = "candidate-item";
      item.appendChild(document.createTextNode(this.annotationLabel(annotation) + " "));
      addToggle(item, annotation.id);
      list.appendChild(item);
    }
    for (const relation of relations) {
      const item = document.createElement("li");
      item.dataset.relationId = relation.id;
      item.className = "candidate-item candidate-relation";
      item.appendChild(
        document.createTextNode(`${relation.rtype}: ${relation.source} -> ${relation.target} `),
      );
      addToggle(item, relation.id);
      list.appendChild(item);
    }
    container.appendChild(list);
  }

  private renderPreview(): void {
    const container = this.root.preview;
    container.textContent = "";
    const list = document.createElement("ul");
    list.dataset.role = "gold-preview";
    for (const annotation of this.goldPreview()) {
      const item = document.createElement("li");
      item.dataset.annotationId = annotation.id;
      item.textContent = this.annotationLabel(annotation);
      list.appendChild(item);
    }
    container.appendChild(list);
  }

  /** Submit the decision; zero kept requires explicit confirmation. */
  async submit(confirmMinimal: () => boolean = () => true): Promise<boolean> {
    if (this.kept.size === 0 && !confirmMinimal()) {
      this.root.status.textContent = "submission cancelled";
      return false;
    }
    try {
      await this.api.adjudicate(this.docId, [...this.kept].sort());
      this.root.status.textContent = "gold standard created";
      return true;
    } catch (error) {
      this.root.status.textContent = `rejected by server: ${String(error)}`;
      await this.load(); // refetch, the state may have raced
      return false;
    }
  }
}
