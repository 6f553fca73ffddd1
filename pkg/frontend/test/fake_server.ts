/** In-memory stand-in for the annotation server, used by the DOM smoke test.
 *
 * Implements the documented HTTP contract (task queue with rounds,
 * agreement/tie-break transitions, delete/ignore) and strictly validates
 * every response body it receives, so a UI bug that produces a malformed
 * or inconsistent body fails the test here.
 */

import type { FetchLike } from "../src/api.js";
import type {
  AnnotationResponseBody,
  EntityClusterJson,
  RelationSummary,
  TaskPayload,
} from "../src/types.js";

const ROUND_FOR_STATUS: Record<string, number> = {
  pending: 1,
  awaiting_second: 2,
  awaiting_tiebreak: 3,
};

const PALETTE = [
  "#e41a1c", "#377eb8", "#4daf4a", "#984ea3",
  "#ff7f00", "#a65628", "#f781bf", "#17becf",
];

interface SentenceRecord {
  sentenceId: string;
  tokens: string[];
  status: string;
  responses: AnnotationResponseBody[];
  currentEntities: EntityClusterJson[];
}

function colorFor(ref: string): string {
  let hash = 0;
  for (const ch of ref) hash = (hash * 31 + ch.charCodeAt(0)) >>> 0;
  return PALETTE[hash % PALETTE.length];
}

function json(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

function error(status: number, code: string, message: string): Response {
  return json(status, { code, message });
}

export class FakeServer {
  private sentences = new Map<string, SentenceRecord>();
  readonly served: { annotator: string; sentenceId: string; round: number }[] = [];
  readonly validationFailures: string[] = [];

  constructor(private readonly relation: RelationSummary) {}

  addSentence(sentenceId: string, tokens: string[], entities: EntityClusterJson[]): void {
    this.sentences.set(sentenceId, {
      sentenceId,
      tokens,
      status: "pending",
      responses: [],
      currentEntities: entities,
    });
  }

  record(sentenceId: string): SentenceRecord {
    const found = this.sentences.get(sentenceId);
    if (!found) throw new Error(`no such sentence ${sentenceId}`);
    return found;
  }

  records(): SentenceRecord[] {
    return [...this.sentences.values()];
  }

  private nextTask(annotator: string): TaskPayload | null {
    const open = [...this.sentences.values()]
      .filter((s) => s.status in ROUND_FOR_STATUS)
      .filter((s) => !s.responses.some((r) => r.annotator_id === annotator))
      .sort((a, b) => a.sentenceId.localeCompare(b.sentenceId));
    if (open.length === 0) return null;
    const chosen = open[0];
    const round = ROUND_FOR_STATUS[chosen.status];
    this.served.push({ annotator, sentenceId: chosen.sentenceId, round });
    return {
      sentence_id: chosen.sentenceId,
      round,
      tokens: [...chosen.tokens],
      entities: chosen.currentEntities.map((c) => ({
        ...c,
        mentions: c.mentions.map((m) => ({ ...m })),
        color: colorFor(c.entity_ref),
      })),
      relation: this.relation,
    };
  }

  private validate(body: AnnotationResponseBody, rec: SentenceRecord): string | null {
    const refs = new Set(body.entity_edits.map((c) => c.entity_ref));
    if (!body.annotator_id) return "missing annotator_id";
    if (body.relation_name !== this.relation.name) return "wrong relation";
    if (body.decision === "not_expresses" && body.asserted_pairs.length > 0) {
      return "not_expresses with pairs";
    }
    if (body.decision === "expresses" && body.asserted_pairs.length === 0) {
      return "expresses without pairs";
    }
    if (!(body.elapsed_seconds > 0)) return "elapsed_seconds must be > 0";
    for (const [s, o] of body.asserted_pairs) {
      if (s === o) return "self pair";
      if (!refs.has(s) || !refs.has(o)) return "pair references unknown entity";
      const subj = body.entity_edits.find((c) => c.entity_ref === s)!;
      const obj = body.entity_edits.find((c) => c.entity_ref === o)!;
      if (subj.entity_type !== this.relation.subject_type
          || obj.entity_type !== this.relation.object_type) {
        return "pair violates type signature";
      }
    }
    for (const cluster of body.entity_edits) {
      if ("color" in cluster) return "entity_edits must not carry colors";
      for (const m of cluster.mentions) {
        if (!(m.start >= 0 && m.start < m.end && m.end <= rec.tokens.length)) {
          return "mention span out of range";
        }
      }
    }
    const spans = body.entity_edits
      .flatMap((c) => c.mentions)
      .sort((a, b) => a.start - b.start);
    for (let i = 1; i < spans.length; i++) {
      if (spans[i - 1].end > spans[i].start) return "overlapping mentions";
    }
    return null;
  }

  private submit(body: AnnotationResponseBody): Response {
    const rec = this.sentences.get(body.sentence_id);
    if (!rec) return error(404, "unknown_sentence", body.sentence_id);
    if (!(rec.status in ROUND_FOR_STATUS)) {
      return error(409, "stale_round", `status ${rec.status}`);
    }
    const expected = ROUND_FOR_STATUS[rec.status];
    if (body.round !== expected) {
      return error(409, "stale_round", `expected round ${expected}`);
    }
    if (rec.responses.some((r) => r.annotator_id === body.annotator_id)) {
      return error(409, "duplicate_annotator", body.annotator_id);
    }
    const problem = this.validate(body, rec);
    if (problem) {
      this.validationFailures.push(`${body.sentence_id}: ${problem}`);
      return error(400, "malformed_request", problem);
    }
    rec.responses.push(body);
    rec.currentEntities = body.entity_edits;
    if (rec.status === "pending") {
      rec.status = "awaiting_second";
    } else if (rec.status === "awaiting_second") {
      rec.status = rec.responses[0].decision === body.decision
        ? "adjudicated"
        : "awaiting_tiebreak";
    } else {
      rec.status = "adjudicated";
    }
    return json(200, { status: rec.status });
  }

  /** FetchLike routing the client's requests into this fake. */
  fetch: FetchLike = async (input, init) => {
    const url = new URL(input, "http://fake");
    if (url.pathname === "/api/task") {
      const annotator = url.searchParams.get("annotator");
      const relation = url.searchParams.get("relation");
      if (!annotator || !relation) {
        return error(400, "malformed_request", "missing params");
      }
      const task = this.nextTask(annotator);
      if (!task) return error(404, "no_task", "queue exhausted");
      return json(200, task);
    }
    if (url.pathname === "/api/response") {
      const body = JSON.parse(String(init?.body)) as AnnotationResponseBody;
      return this.submit(body);
    }
    const deleteMatch = url.pathname.match(/^\/api\/sentence\/([^/]+)\/delete$/);
    if (deleteMatch) {
      const rec = this.sentences.get(decodeURIComponent(deleteMatch[1]));
      if (!rec) return error(404, "unknown_sentence", deleteMatch[1]);
      rec.status = "deleted";
      return json(200, { status: "deleted" });
    }
    const ignoreMatch = url.pathname.match(/^\/api\/sentence\/([^/]+)\/ignore$/);
    if (ignoreMatch) {
      if (!url.searchParams.get("relation")) {
        return error(400, "malformed_request", "relation param is required");
      }
      const rec = this.sentences.get(decodeURIComponent(ignoreMatch[1]));
      if (!rec) return error(404, "unknown_sentence", ignoreMatch[1]);
      if (!(rec.status in ROUND_FOR_STATUS)) {
        return error(409, "stale_round", `status ${rec.status}`);
      }
      rec.status = "ignored";
      return json(200, { status: "ignored" });
    }
    return error(404, "unknown", url.pathname);
  };
}

export function perCluster(
  ref: string,
  label: string,
  type: EntityClusterJson["entity_type"],
  spans: [number, number][],
): EntityClusterJson {
  return {
    entity_ref: ref,
    display_label: label,
    entity_type: type,
    mentions: spans.map(([start, end]) => ({ start, end, origin: "corpus" as const })),
  };
}
