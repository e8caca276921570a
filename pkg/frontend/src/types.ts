/** Payload shapes exchanged with the annotation service. */

export interface SemanticTypeInfo {
  code: string;
  name: string;
  group_code: string;
  group_name: string;
}

export interface SectionInfo {
  name: string;
  start: number;
  end: number;
}

export interface DocumentPayload {
  id: string;
  text: string;
  sections: SectionInfo[];
  status: string;
  metadata: Record<string, unknown>;
}

export interface AnnotationPayload {
  id: string;
  doc_id?: string;
  annotator?: string;
  start: number;
  end: number;
  types: string[];
  expansion?: string;
}

export interface RelationPayload {
  id: string;
  source: string;
  target: string;
  rtype: string;
}

export interface SuggestionPayload {
  start: number;
  end: number;
  types: string[];
  source: "history" | "terminology_exact" | "terminology_fuzzy";
  score: number;
  term: string;
}

export interface SuggestionsResponse {
  suggestions: SuggestionPayload[];
  provider_unavailable: boolean;
}

export interface DivergencePayload {
  doc_id: string;
  annotator_a: string;
  annotator_b: string;
  locked: AnnotationPayload[];
  candidates_a: AnnotationPayload[];
  candidates_b: AnnotationPayload[];
  locked_relations: RelationPayload[];
  candidate_relations_a: RelationPayload[];
  candidate_relations_b: RelationPayload[];
}

export interface RoundPayload {
  round: number;
  documents: string[];
  mean: number;
  per_pair: Record<string, number>;
}

export interface RoundsReport {
  rounds: RoundPayload[];
  stability?: "stable" | "continue";
  epsilon: number;
}

export interface AssignmentPayload {
  doc_id: string;
  annotator_a: string;
  annotator_b: string;
  adjudicator: string;
  round: number;
}

export interface DocumentView {
  document: DocumentPayload;
  assignment: AssignmentPayload | null;
  annotations?: AnnotationPayload[];
  relations?: RelationPayload[];
  submitted?: boolean;
}
