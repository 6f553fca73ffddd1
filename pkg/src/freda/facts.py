"""Fact extraction from adjudicated verdicts.

An expressing verdict yields its asserted pairs as positive facts (plus
the reversed pairs for symmetric relations); every other ordered cluster
pair with conforming types becomes a negative fact, self-pairs excluded.
Non-expressing verdicts yield all typed ordered pairs as negatives.

Test-set construction against corpora without exhaustive entity
annotations may additionally emit one same-entity negative per
multi-mention cluster (flag-controlled), since two mentions of the same
entity cannot stand in a relation to each other.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

from .corpus import AnnotatedSentence, EntityCluster
from .engine import SentenceVerdict
from .errors import TypeMismatch
from .filtering import RelationSchema

LABELS = ("positive", "negative")


@dataclass(frozen=True)
class Fact:
    sentence_id: str
    relation_name: str
    subject_ref: str
    object_ref: str
    label: str

    def __post_init__(self):
        if self.label not in LABELS:
            raise ValueError(f"unknown label {self.label!r}")

    @property
    def key(self) -> tuple[str, str, str, str]:
        return (self.sentence_id, self.relation_name, self.subject_ref, self.object_ref)


def typed_ordered_pairs(entities: Sequence[EntityCluster],
                        schema: RelationSchema) -> list[tuple[str, str]]:
    """All ordered (subject, object) cluster pairs conforming to the signature,
    self-pairs excluded."""
    subjects = [c.entity_ref for c in entities if c.entity_type == schema.subject_type]
    objects = [c.entity_ref for c in entities if c.entity_type == schema.object_type]
    return [(s, o) for s in subjects for o in objects if s != o]


def _check_pair_signature(pair: tuple[str, str], entities: Sequence[EntityCluster],
                          schema: RelationSchema) -> None:
    by_ref = {c.entity_ref: c for c in entities}
    subj, obj = pair
    if subj not in by_ref or obj not in by_ref:
        raise TypeMismatch(f"pair ({subj}, {obj}) references entity missing from verdict")
    if (by_ref[subj].entity_type != schema.subject_type
            or by_ref[obj].entity_type != schema.object_type):
        raise TypeMismatch(
            f"pair ({subj}, {obj}) violates {schema.name} signature "
            f"{schema.subject_type}->{schema.object_type}")


def facts_from_verdict(v: SentenceVerdict, schema: RelationSchema) -> list[Fact]:
    """Expand one verdict into labeled facts over its final entity list."""
    if v.relation_name != schema.name:
        raise ValueError(f"verdict is for {v.relation_name!r}, schema is {schema.name!r}")
    all_pairs = typed_ordered_pairs(v.final_entities, schema)
    positives: set[tuple[str, str]] = set()
    if v.final_decision == "expresses":
        for pair in v.final_pairs:
            _check_pair_signature(pair, v.final_entities, schema)
            positives.add(pair)
            if schema.symmetric:
                positives.add((pair[1], pair[0]))
    facts = [Fact(v.sentence_id, v.relation_name, s, o, "positive")
             for s, o in positives]
    facts.extend(Fact(v.sentence_id, v.relation_name, s, o, "negative")
                 for s, o in all_pairs if (s, o) not in positives)
    facts.sort(key=lambda f: (f.subject_ref, f.object_ref))
    return facts


def extract_facts(v: SentenceVerdict, s: AnnotatedSentence,
                  schema: RelationSchema) -> list[Fact]:
    if v.sentence_id != s.sentence_id:
        raise ValueError(
            f"verdict sentence {v.sentence_id!r} does not match {s.sentence_id!r}")
    return facts_from_verdict(v, schema)


def extract_test_negatives(s: AnnotatedSentence, positives: Iterable[Fact],
                           schema: RelationSchema,
                           same_entity_negatives: bool = False) -> list[Fact]:
    """Negative facts for test construction; optionally adds one same-entity
    pair per multi-mention cluster of a conforming type."""
    positive_pairs: set[tuple[str, str]] = set()
    for f in positives:
        if f.label != "positive":
            raise ValueError(f"expected positive facts, got {f.label!r}")
        if f.sentence_id != s.sentence_id:
            raise ValueError("positives must belong to the sentence")
        positive_pairs.add((f.subject_ref, f.object_ref))
    negatives = [Fact(s.sentence_id, schema.name, subj, obj, "negative")
                 for subj, obj in typed_ordered_pairs(s.entities, schema)
                 if (subj, obj) not in positive_pairs]
    if same_entity_negatives:
        for c in s.entities:
            if (len(c.mentions) >= 2
                    and c.entity_type == schema.subject_type
                    and c.entity_type == schema.object_type):
                negatives.append(Fact(s.sentence_id, schema.name,
                                      c.entity_ref, c.entity_ref, "negative"))
    negatives.sort(key=lambda f: (f.subject_ref, f.object_ref))
    return negatives


@dataclass(frozen=True)
class StatisticsReport:
    sentences: int
    pos_responses: int
    neg_responses: int
    pos_facts: int
    neg_facts: int


def corpus_statistics(verdicts: Iterable[SentenceVerdict],
                      facts: Iterable[Fact]) -> StatisticsReport:
    verdicts = list(verdicts)
    pos_responses = sum(1 for v in verdicts if v.final_decision == "expresses")
    pos_facts = neg_facts = 0
    for f in facts:
        if f.label == "positive":
            pos_facts += 1
        else:
            neg_facts += 1
    return StatisticsReport(
        sentences=len(verdicts),
        pos_responses=pos_responses,
        neg_responses=len(verdicts) - pos_responses,
        pos_facts=pos_facts,
        neg_facts=neg_facts,
    )


def statistics_to_json(r: StatisticsReport) -> dict:
    return {
        "sentences": r.sentences,
        "pos_responses": r.pos_responses,
        "neg_responses": r.neg_responses,
        "pos_facts": r.pos_facts,
        "neg_facts": r.neg_facts,
    }


def render_statistics(r: StatisticsReport, relations: Optional[int] = None,
                      kappa: Optional[float] = None) -> str:
    """Fixed-width statistics table; optional relation count and kappa rows."""
    rows: list[tuple[str, str]] = []
    if relations is not None:
        rows.append(("Relations", str(relations)))
    rows.extend([
        ("Sentences", f"{r.sentences:,}"),
        ("Positive responses", f"{r.pos_responses:,}"),
        ("Negative responses", f"{r.neg_responses:,}"),
        ("Positive facts", f"{r.pos_facts:,}"),
        ("Negative facts", f"{r.neg_facts:,}"),
    ])
    if kappa is not None:
        rows.append(("Inter-annotator kappa", f"{kappa:.2f}"))
    width = max(len(name) for name, _ in rows)
    return "\n".join(f"{name:<{width}}  {value}" for name, value in rows)


def fact_to_json(f: Fact) -> dict:
    return {
        "sentence_id": f.sentence_id,
        "relation_name": f.relation_name,
        "subject_ref": f.subject_ref,
        "object_ref": f.object_ref,
        "label": f.label,
    }


def fact_from_json(obj: dict) -> Fact:
    return Fact(obj["sentence_id"], obj["relation_name"],
                obj["subject_ref"], obj["object_ref"], obj["label"])


def sort_facts(facts: Iterable[Fact]) -> list[Fact]:
    return sorted(facts, key=lambda f: (f.sentence_id, f.subject_ref, f.object_ref))


def write_facts_jsonl(facts: Iterable[Fact], path) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for f in sort_facts(facts):
            fh.write(json.dumps(fact_to_json(f), ensure_ascii=False) + "\n")
            count += 1
    return count


def read_facts_jsonl(path) -> Iterator[Fact]:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                yield fact_from_json(json.loads(line))
