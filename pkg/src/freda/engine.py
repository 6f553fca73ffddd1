"""Adjudication state machine.

Each (sentence, relation) moves through pending -> awaiting_second ->
(adjudicated | awaiting_tiebreak -> adjudicated), or terminates early as
deleted (global) or ignored (per relation).  Two agreeing responses
adjudicate; a disagreement pulls in a third annotator whose response
settles the majority.  Entity edits carry over: the list served at round
r is exactly the previous round's entity_edits.  Round 3 sees entities
only, never the earlier decisions.

State is persisted as an append-only JSON-lines event log
(candidate_added / response / delete / ignore); replaying the log
rebuilds identical states.  Task leases are ephemeral and never logged.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field, replace
from statistics import fmean
from typing import Callable, Iterable, Mapping, Optional

from .corpus import (
    AnnotatedSentence,
    EntityCluster,
    cluster_from_json,
    cluster_to_json,
    sentence_from_json,
    sentence_to_json,
)
from .errors import (
    DuplicateAnnotator,
    InvalidPairTypes,
    NoTaskAvailable,
    NotAdjudicated,
    StaleRound,
    UnknownSentence,
)
from .filtering import RelationSchema

DECISIONS = ("expresses", "not_expresses")
STATUSES = ("pending", "awaiting_second", "awaiting_tiebreak",
            "adjudicated", "deleted", "ignored")
ROUND_FOR_STATUS = {"pending": 1, "awaiting_second": 2, "awaiting_tiebreak": 3}
EVENT_TYPES = ("candidate_added", "response", "delete", "ignore")

DEFAULT_LEASE_SECONDS = 600.0


@dataclass(frozen=True)
class AnnotationResponse:
    annotator_id: str
    relation_name: str
    sentence_id: str
    round: int
    decision: str
    asserted_pairs: frozenset[tuple[str, str]]
    entity_edits: tuple[EntityCluster, ...]
    elapsed_seconds: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "asserted_pairs",
                           frozenset(tuple(p) for p in self.asserted_pairs))
        object.__setattr__(self, "entity_edits", tuple(self.entity_edits))
        if not self.annotator_id:
            raise ValueError("annotator_id must be non-empty")
        if self.round not in (1, 2, 3):
            raise ValueError(f"round must be 1, 2 or 3, got {self.round}")
        if self.decision not in DECISIONS:
            raise ValueError(f"unknown decision {self.decision!r}")
        if self.decision == "not_expresses" and self.asserted_pairs:
            raise ValueError("not_expresses responses must assert no pairs")
        if self.decision == "expresses" and not self.asserted_pairs:
            raise ValueError("expresses responses must assert at least one pair")
        if self.elapsed_seconds < 0:
            raise ValueError("elapsed_seconds must be >= 0")
        refs = {c.entity_ref for c in self.entity_edits}
        for subj, obj in self.asserted_pairs:
            if subj == obj:
                raise ValueError(f"pair subject equals object: {subj!r}")
            if subj not in refs or obj not in refs:
                raise ValueError(f"pair ({subj!r}, {obj!r}) references unknown entity")


@dataclass
class SentenceState:
    sentence_id: str
    relation_name: str
    status: str
    responses: list[AnnotationResponse] = field(default_factory=list)
    current_entities: tuple[EntityCluster, ...] = ()


@dataclass(frozen=True)
class SentenceVerdict:
    sentence_id: str
    relation_name: str
    final_decision: str
    final_pairs: frozenset[tuple[str, str]]
    final_entities: tuple[EntityCluster, ...]

    def __post_init__(self):
        object.__setattr__(self, "final_pairs",
                           frozenset(tuple(p) for p in self.final_pairs))
        object.__setattr__(self, "final_entities", tuple(self.final_entities))
        if self.final_decision == "not_expresses" and self.final_pairs:
            raise ValueError("not_expresses verdicts carry no pairs")


@dataclass(frozen=True)
class TimingRecord:
    annotator_id: str
    approach_tag: str
    sentence_id: str
    elapsed_seconds: float

    def __post_init__(self):
        if self.elapsed_seconds <= 0:
            raise ValueError("elapsed_seconds must be > 0")


@dataclass
class _Lease:
    annotator_id: str
    round: int
    expires_at: float


def adjudicate(state: SentenceState) -> SentenceVerdict:
    """Resolve an adjudicated state: majority decision, union of majority pairs."""
    if state.status != "adjudicated":
        raise NotAdjudicated(
            f"{state.sentence_id}/{state.relation_name} has status {state.status}")
    yes = [r for r in state.responses if r.decision == "expresses"]
    no = [r for r in state.responses if r.decision == "not_expresses"]
    final_refs = {c.entity_ref for c in state.current_entities}
    if len(yes) > len(no):
        pairs = frozenset(
            p for r in yes for p in r.asserted_pairs
            if p[0] in final_refs and p[1] in final_refs)
        return SentenceVerdict(state.sentence_id, state.relation_name,
                               "expresses", pairs, state.current_entities)
    return SentenceVerdict(state.sentence_id, state.relation_name,
                           "not_expresses", frozenset(), state.current_entities)


def speed_report(records: Iterable[TimingRecord]) -> dict[tuple[str, str], float]:
    """Mean seconds per (annotator, approach_tag); empty groups are omitted."""
    groups: dict[tuple[str, str], list[float]] = {}
    for r in records:
        groups.setdefault((r.annotator_id, r.approach_tag), []).append(r.elapsed_seconds)
    return {key: fmean(vals) for key, vals in groups.items()}


def render_speed_table(means: Mapping[tuple[str, str], float]) -> str:
    lines = [f"{'annotator':<12}  {'approach':<12}  sec."]
    for (annotator, tag), mean in sorted(means.items()):
        lines.append(f"{annotator:<12}  {tag:<12}  {mean:.1f}")
    return "\n".join(lines)


def speed_report_to_json(means: Mapping[tuple[str, str], float]) -> list[dict]:
    return [
        {"annotator_id": annotator, "approach_tag": tag, "mean_seconds": mean}
        for (annotator, tag), mean in sorted(means.items())
    ]


class AnnotationEngine:
    """In-memory adjudication state, fed by mutations or event-log replay."""

    def __init__(
        self,
        schemas: Mapping[str, RelationSchema],
        *,
        lease_seconds: float = DEFAULT_LEASE_SECONDS,
        approach_tag: str = "freda",
        clock: Callable[[], float] = time.time,
        event_sink: Optional[Callable[[dict], None]] = None,
    ):
        self._schemas = dict(schemas)
        self._lease_seconds = lease_seconds
        self._approach_tag = approach_tag
        self._clock = clock
        self._event_sink = event_sink
        self._sentences: dict[str, AnnotatedSentence] = {}
        self._states: dict[tuple[str, str], SentenceState] = {}
        self._deleted: set[str] = set()
        self._timing: list[TimingRecord] = []
        self._leases: dict[tuple[str, str], _Lease] = {}
        self._events: list[dict] = []
        self._lock = threading.RLock()

    # -- accessors ---------------------------------------------------------

    @property
    def schemas(self) -> dict[str, RelationSchema]:
        return dict(self._schemas)

    def sentence(self, sentence_id: str) -> AnnotatedSentence:
        try:
            return self._sentences[sentence_id]
        except KeyError:
            raise UnknownSentence(f"unknown sentence {sentence_id!r}") from None

    def states(self) -> list[SentenceState]:
        with self._lock:
            return [self._states[k] for k in sorted(self._states)]

    def state(self, sentence_id: str, relation_name: str) -> SentenceState:
        try:
            return self._states[(sentence_id, relation_name)]
        except KeyError:
            raise UnknownSentence(
                f"no state for sentence {sentence_id!r} under {relation_name!r}") from None

    def timing_records(self) -> list[TimingRecord]:
        return list(self._timing)

    def events(self) -> list[dict]:
        return list(self._events)

    def verdicts(self) -> list[SentenceVerdict]:
        with self._lock:
            return [adjudicate(st) for st in self.states() if st.status == "adjudicated"]

    def attach_sink(self, sink: Optional[Callable[[dict], None]]) -> None:
        """Set where newly recorded events go (e.g. an EventLogWriter)."""
        self._event_sink = sink

    # -- mutations ---------------------------------------------------------

    def add_candidate(self, sentence: AnnotatedSentence, relation_name: str) -> Optional[SentenceState]:
        """Queue a sentence for a relation.  No-op for known pairs and for
        deleted sentences (those never come back)."""
        if relation_name not in self._schemas:
            raise ValueError(f"unknown relation {relation_name!r}")
        with self._lock:
            if sentence.sentence_id in self._deleted:
                return None
            key = (sentence.sentence_id, relation_name)
            if key in self._states:
                return self._states[key]
            stored = self._sentences.get(sentence.sentence_id)
            if stored is not None and stored != sentence:
                raise ValueError(
                    f"conflicting payloads for sentence {sentence.sentence_id!r}")
            self._sentences[sentence.sentence_id] = sentence
            state = SentenceState(sentence.sentence_id, relation_name, "pending",
                                  [], sentence.entities)
            self._states[key] = state
            self._record({"event_type": "candidate_added",
                          "relation_name": relation_name,
                          "sentence": sentence_to_json(sentence)})
            return state

    def next_task(self, annotator_id: str, relation_name: str) -> tuple[AnnotatedSentence, int]:
        """Serve the lowest-id open sentence this annotator may work on.

        The returned sentence carries current_entities (edits carry over).
        A lease keeps other annotators off the same (sentence, round) until
        it expires or the response lands.
        """
        if relation_name not in self._schemas:
            raise ValueError(f"unknown relation {relation_name!r}")
        if not annotator_id:
            raise ValueError("annotator_id must be non-empty")
        with self._lock:
            now = self._clock()
            for key in sorted(self._states):
                sentence_id, rel = key
                if rel != relation_name:
                    continue
                state = self._states[key]
                if state.status not in ROUND_FOR_STATUS:
                    continue
                if any(r.annotator_id == annotator_id for r in state.responses):
                    continue
                round_ = ROUND_FOR_STATUS[state.status]
                lease = self._leases.get(key)
                if (lease is not None and lease.round == round_
                        and lease.annotator_id != annotator_id
                        and lease.expires_at > now):
                    continue
                self._leases[key] = _Lease(annotator_id, round_, now + self._lease_seconds)
                sentence = replace(self._sentences[sentence_id],
                                   entities=state.current_entities)
                return sentence, round_
            raise NoTaskAvailable(
                f"no open task for annotator {annotator_id!r} under {relation_name!r}")

    def submit_response(self, r: AnnotationResponse) -> SentenceState:
        with self._lock:
            state = self.state(r.sentence_id, r.relation_name)
            if state.status not in ROUND_FOR_STATUS:
                raise StaleRound(
                    f"status {state.status} accepts no responses")
            expected = ROUND_FOR_STATUS[state.status]
            if r.round != expected:
                raise StaleRound(f"expected round {expected}, got {r.round}")
            if any(p.annotator_id == r.annotator_id for p in state.responses):
                raise DuplicateAnnotator(
                    f"{r.annotator_id!r} already responded on "
                    f"{r.sentence_id}/{r.relation_name}")
            self._check_pair_types(r)
            state.responses.append(r)
            state.current_entities = r.entity_edits
            if state.status == "pending":
                state.status = "awaiting_second"
            elif state.status == "awaiting_second":
                agree = state.responses[0].decision == r.decision
                state.status = "adjudicated" if agree else "awaiting_tiebreak"
            else:
                state.status = "adjudicated"
            if r.elapsed_seconds > 0:
                self._timing.append(TimingRecord(
                    r.annotator_id, self._approach_tag, r.sentence_id,
                    r.elapsed_seconds))
            self._leases.pop((r.sentence_id, r.relation_name), None)
            self._record({"event_type": "response", "response": response_to_json(r)})
            return state

    def delete_sentence(self, sentence_id: str) -> None:
        """Remove a sentence from every relation's queue, permanently.  Idempotent."""
        with self._lock:
            if sentence_id not in self._sentences:
                raise UnknownSentence(f"unknown sentence {sentence_id!r}")
            self._deleted.add(sentence_id)
            for (sid, rel), state in self._states.items():
                if sid == sentence_id:
                    state.status = "deleted"
                    self._leases.pop((sid, rel), None)
            self._record({"event_type": "delete", "sentence_id": sentence_id})

    def ignore_for_relation(self, sentence_id: str, relation_name: str) -> None:
        """Drop a sentence from one relation's queue; other relations keep it."""
        with self._lock:
            if sentence_id not in self._sentences:
                raise UnknownSentence(f"unknown sentence {sentence_id!r}")
            state = self.state(sentence_id, relation_name)
            if state.status == "ignored":
                self._record({"event_type": "ignore", "sentence_id": sentence_id,
                              "relation_name": relation_name})
                return
            if state.status not in ROUND_FOR_STATUS:
                raise StaleRound(
                    f"cannot ignore {sentence_id}/{relation_name} "
                    f"with status {state.status}")
            state.status = "ignored"
            self._leases.pop((sentence_id, relation_name), None)
            self._record({"event_type": "ignore", "sentence_id": sentence_id,
                          "relation_name": relation_name})

    # -- internals ---------------------------------------------------------

    def _check_pair_types(self, r: AnnotationResponse) -> None:
        schema = self._schemas[r.relation_name]
        clusters = {c.entity_ref: c for c in r.entity_edits}
        for subj, obj in r.asserted_pairs:
            if (clusters[subj].entity_type != schema.subject_type
                    or clusters[obj].entity_type != schema.object_type):
                raise InvalidPairTypes(
                    f"pair ({subj}, {obj}) violates {schema.name} signature "
                    f"{schema.subject_type}->{schema.object_type}")

    def _record(self, event: dict) -> None:
        self._events.append(event)
        if self._event_sink is not None:
            self._event_sink(event)

    # -- persistence -------------------------------------------------------

    def apply_event(self, event: dict) -> None:
        etype = event.get("event_type")
        if etype == "candidate_added":
            self.add_candidate(sentence_from_json(event["sentence"]),
                               event["relation_name"])
        elif etype == "response":
            self.submit_response(response_from_json(event["response"]))
        elif etype == "delete":
            self.delete_sentence(event["sentence_id"])
        elif etype == "ignore":
            self.ignore_for_relation(event["sentence_id"], event["relation_name"])
        else:
            raise ValueError(f"unknown event_type {etype!r}")

    @classmethod
    def replay(cls, events: Iterable[dict], schemas: Mapping[str, RelationSchema],
               **kwargs) -> "AnnotationEngine":
        engine = cls(schemas, **kwargs)
        sink, engine._event_sink = engine._event_sink, None
        for event in events:
            engine.apply_event(event)
        engine._event_sink = sink
        return engine

    @classmethod
    def from_event_log(cls, path, schemas: Mapping[str, RelationSchema],
                       **kwargs) -> "AnnotationEngine":
        events = read_event_log(path)
        return cls.replay(events, schemas, **kwargs)

    def dump_states(self) -> bytes:
        """Canonical byte serialization of all states, for replay comparison."""
        payload = [state_to_json(st) for st in self.states()]
        return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")


# --- serialization ----------------------------------------------------------

def response_to_json(r: AnnotationResponse) -> dict:
    return {
        "annotator_id": r.annotator_id,
        "relation_name": r.relation_name,
        "sentence_id": r.sentence_id,
        "round": r.round,
        "decision": r.decision,
        "asserted_pairs": sorted([s, o] for s, o in r.asserted_pairs),
        "entity_edits": [cluster_to_json(c) for c in r.entity_edits],
        "elapsed_seconds": r.elapsed_seconds,
    }


def response_from_json(obj: dict) -> AnnotationResponse:
    return AnnotationResponse(
        annotator_id=obj["annotator_id"],
        relation_name=obj["relation_name"],
        sentence_id=obj["sentence_id"],
        round=obj["round"],
        decision=obj["decision"],
        asserted_pairs=frozenset((s, o) for s, o in obj["asserted_pairs"]),
        entity_edits=tuple(cluster_from_json(c) for c in obj["entity_edits"]),
        elapsed_seconds=obj.get("elapsed_seconds", 0.0),
    )


def state_to_json(st: SentenceState) -> dict:
    return {
        "sentence_id": st.sentence_id,
        "relation_name": st.relation_name,
        "status": st.status,
        "responses": [response_to_json(r) for r in st.responses],
        "current_entities": [cluster_to_json(c) for c in st.current_entities],
    }


def verdict_to_json(v: SentenceVerdict) -> dict:
    return {
        "sentence_id": v.sentence_id,
        "relation_name": v.relation_name,
        "final_decision": v.final_decision,
        "final_pairs": sorted([s, o] for s, o in v.final_pairs),
        "final_entities": [cluster_to_json(c) for c in v.final_entities],
    }


def verdict_from_json(obj: dict) -> SentenceVerdict:
    return SentenceVerdict(
        sentence_id=obj["sentence_id"],
        relation_name=obj["relation_name"],
        final_decision=obj["final_decision"],
        final_pairs=frozenset((s, o) for s, o in obj["final_pairs"]),
        final_entities=tuple(cluster_from_json(c) for c in obj["final_entities"]),
    )


def event_to_line(event: dict) -> str:
    return json.dumps(event, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def read_event_log(path) -> list[dict]:
    events = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                events.append(json.loads(line))
    return events


class EventLogWriter:
    """Append-only JSONL sink; one flushed line per event."""

    def __init__(self, path):
        self._fh = open(path, "a", encoding="utf-8")

    def __call__(self, event: dict) -> None:
        self._fh.write(event_to_line(event) + "\n")
        self._fh.flush()

    def close(self) -> None:
        self._fh.close()
