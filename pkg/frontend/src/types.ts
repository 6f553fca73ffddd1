/** Wire types shared with the annotation server. */

export type EntityType = "PER" | "ORG" | "LOC" | "DATE" | "AWARD" | "OTHER";

export const ENTITY_TYPES: EntityType[] = ["PER", "ORG", "LOC", "DATE", "AWARD", "OTHER"];

export type MentionOrigin = "corpus" | "date_tagger" | "annotator";

export interface MentionJson {
  start: number;
  end: number;
  origin: MentionOrigin;
}

export interface EntityClusterJson {
  entity_ref: string;
  display_label: string;
  entity_type: EntityType;
  mentions: MentionJson[];
  /** Server-assigned; present in task payloads, never sent back. */
  color?: string;
}

export interface RelationSummary {
  name: string;
  subject_type: EntityType;
  object_type: EntityType;
  symmetric: boolean;
}

export interface TaskPayload {
  sentence_id: string;
  round: number;
  tokens: string[];
  entities: EntityClusterJson[];
  relation: RelationSummary;
}

export type Decision = "expresses" | "not_expresses";

export interface AnnotationResponseBody {
  annotator_id: string;
  relation_name: string;
  sentence_id: string;
  round: number;
  decision: Decision;
  asserted_pairs: [string, string][];
  entity_edits: EntityClusterJson[];
  elapsed_seconds: number;
}

export interface ApiErrorBody {
  code: string;
  message: string;
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
  }
}
