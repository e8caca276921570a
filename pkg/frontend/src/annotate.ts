/** Annotator screen: select a span, pick a type (suggestions or palette),
 * save concepts, then draw relations once at least two concepts exist. */

import { ApiClient } from "./api.js";
import { groupColor, renderHighlights } from "./highlight.js";
import { TypePalette } from "./palette.js";
import { renderSuggestionPopup } from "./suggestions.js";
import type {
  AnnotationPayload,
  RelationPayload,
  SemanticTypeInfo,
  SuggestionsResponse,
} from "./types.js";

export interface DraftSpan {
  start: number;
  end: number;
}

export class AnnotationView {
  draft: DraftSpan | null = null;
  draftTypes: string[] = [];
  annotations: AnnotationPayload[] = [];
  relations: RelationPayload[] = [];
  submitted = false;

  private text = "";
  private typeIndex = new Map<string, SemanticTypeInfo>();
  private palette: TypePalette | null = null;
  private localCounter = 0;

  constructor(
    private readonly api: ApiClient,
    private readonly docId: string,
    private readonly root: {
      textContainer: HTMLElement;
      popup: HTMLElement;
      paletteContainer: HTMLElement;
      status: HTMLElement;
    },
  ) {}

  /** Relation drawing stays locked until two concepts are saved. */
  get relationModeEnabled(): boolean {
    return this.annotations.length >= 2;
  }

  async load(): Promise<void> {
    const [view, registry] = await Promise.all([
      this.api.getDocument(this.docId),
      this.api.registry(),
    ]);
    this.text = view.document.text;
    this.annotations = view.annotations ?? [];
    this.relations = view.relations ?? [];
    this.submitted = view.submitted ?? false;
    this.typeIndex = new Map(registry.types.map((t) => [t.code, t]));
    this.palette = new TypePalette(registry.types);
    this.renderText();
  }

  renderText(): void {
    renderHighlights(this.root.textContainer, this.text, this.annotations, (annotation) => {
      const info = this.typeIndex.get(annotation.types[0]);
      return groupColor(info?.group_code ?? "NA");
    });
  }

  /** Begin a draft from a selection; whitespace-only selections are ignored. */
  async beginDraft(start: number, end: number): Promise<void> {
    if (end <= start || !this.text.slice(start, end).trim()) {
      this.draft = null;
      return;
    }
    this.draft = { start, end };
    this.draftTypes = [];
    let response: SuggestionsResponse;
    try {
      response = await this.api.suggestions(this.docId, start, end);
    } catch {
      response = { suggestions: [], provider_unavailable: true };
    }
    renderSuggestionPopup(this.root.popup, response, (suggestion) => {
      this.draftTypes = [...suggestion.types];
    });
    this.palette?.render(this.root.paletteContainer, "", (sty) => {
      if (!this.draftTypes.includes(sty.code)) {
        this.draftTypes.push(sty.code);
      }
    });
  }

  searchPalette(query: string): void {
    this.palette?.render(this.root.paletteContainer, query, (sty) => {
      if (!this.draftTypes.includes(sty.code)) {
        this.draftTypes.push(sty.code);
      }
    });
  }

  /** Persist the draft; on API failure the draft is kept for retry. */
  async saveDraft(expansion?: string): Promise<AnnotationPayload | null> {
    if (!this.draft || this.draftTypes.length === 0) {
      return null;
    }
    const body = {
      start: this.draft.start,
      end: this.draft.end,
      types: this.draftTypes,
      ...(expansion ? { expansion } : {}),
    };
    try {
      const { id } = await this.api.saveAnnotation(this.docId, body);
      const saved: AnnotationPayload = { id, ...body };
      this.annotations.push(saved);
      this.draft = null;
      this.draftTypes = [];
      this.root.popup.textContent = "";
      this.renderText();
      this.root.status.textContent = `saved ${id}`;
      return saved;
    } catch (error) {
      this.root.status.textContent = `save failed, draft kept: ${String(error)}`;
      return null;
    }
  }

  /** Queue a relation locally; relations are submitted with the final pass. */
  addRelation(sourceId: string, targetId: string, rtype: string): RelationPayload {
    if (!this.relationModeEnabled) {
      throw new Error("relation mode requires at least two saved concepts");
    }
    this.localCounter += 1;
    const relation: RelationPayload = {
      id: `local-r${this.localCounter}`,
      source: sourceId,
      target: targetId,
      rtype,
    };
    this.relations.push(relation);
    return relation;
  }

  async submitPass(): Promise<void> {
    const result = await this.api.submit(this.docId, [], this.relations);
    this.submitted = result.submitted;
    this.root.status.textContent = `submitted (document ${result.document_status})`;
  }
}
