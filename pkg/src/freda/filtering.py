"""Candidate sentence selection: keyword matching and distant supervision.

A relation's schema lists hand-picked lowercase keyword phrases and may
point at a TSV of known (subject, object) label pairs from a knowledge
base.  A sentence becomes a candidate when it passes the type prefilter
and matches either route; provenance records which one(s).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Optional

from .corpus import ENTITY_TYPES, AnnotatedSentence

PROVENANCES = ("keyword", "distant", "both")


@dataclass(frozen=True)
class RelationSchema:
    name: str
    subject_type: str
    object_type: str
    symmetric: bool = False
    keywords: tuple[str, ...] = ()
    kb_pairs_path: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "keywords", tuple(self.keywords))
        if not self.name:
            raise ValueError("relation name must be non-empty")
        for t in (self.subject_type, self.object_type):
            if t not in ENTITY_TYPES:
                raise ValueError(f"unknown entity type {t!r} in relation {self.name}")
        if self.symmetric and self.subject_type != self.object_type:
            raise ValueError(f"symmetric relation {self.name} needs equal types")
        for kw in self.keywords:
            if not kw or kw != kw.lower():
                raise ValueError(f"keyword {kw!r} must be non-empty lowercase")


@dataclass(frozen=True)
class KbPair:
    subject_label: str
    object_label: str

    def __post_init__(self):
        if not self.subject_label or not self.object_label:
            raise ValueError("kb pair labels must be non-empty")


@dataclass(frozen=True)
class Candidate:
    sentence_id: str
    relation_name: str
    provenance: str
    matched_keyword: Optional[str] = None
    matched_pair: Optional[KbPair] = None

    def __post_init__(self):
        if self.provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {self.provenance!r}")
        if self.provenance in ("keyword", "both") and self.matched_keyword is None:
            raise ValueError("keyword provenance requires matched_keyword")
        if self.provenance in ("distant", "both") and self.matched_pair is None:
            raise ValueError("distant provenance requires matched_pair")


def load_schemas(path) -> dict[str, RelationSchema]:
    """Load the schema registry: a JSON array of RelationSchema objects."""
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    registry: dict[str, RelationSchema] = {}
    for obj in raw:
        schema = RelationSchema(
            name=obj["name"],
            subject_type=obj["subject_type"],
            object_type=obj["object_type"],
            symmetric=obj.get("symmetric", False),
            keywords=tuple(obj.get("keywords", ())),
            kb_pairs_path=obj.get("kb_pairs_path"),
        )
        if schema.name in registry:
            raise ValueError(f"duplicate relation name {schema.name!r}")
        registry[schema.name] = schema
    return registry


def schema_to_json(schema: RelationSchema) -> dict:
    return {
        "name": schema.name,
        "subject_type": schema.subject_type,
        "object_type": schema.object_type,
        "symmetric": schema.symmetric,
        "keywords": list(schema.keywords),
        "kb_pairs_path": schema.kb_pairs_path,
    }


def load_kb_pairs(path) -> list[KbPair]:
    """Load `subject_label<TAB>object_label` pairs, one per line."""
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            raw = raw.rstrip("\n")
            if not raw.strip():
                continue
            fields = raw.split("\t")
            if len(fields) != 2:
                raise ValueError(f"{path}:{lineno}: expected two tab-separated labels")
            pairs.append(KbPair(fields[0], fields[1]))
    return pairs


def resolve_kb_pairs(schema: RelationSchema, kb_pairs_dir=None) -> list[KbPair]:
    if schema.kb_pairs_path is None:
        return []
    path = Path(schema.kb_pairs_path)
    if not path.is_absolute() and kb_pairs_dir is not None:
        path = Path(kb_pairs_dir) / path
    return load_kb_pairs(path)


def match_keywords(s: AnnotatedSentence, schema: RelationSchema) -> Optional[str]:
    """First keyword whose tokens appear contiguously in the lowercased sentence."""
    lowered = [t.text.lower() for t in s.tokens]
    for keyword in schema.keywords:
        phrase = keyword.split()
        n = len(phrase)
        for i in range(len(lowered) - n + 1):
            if lowered[i:i + n] == phrase:
                return keyword
    return None


def match_distant(s: AnnotatedSentence, pairs: Iterable[KbPair]) -> Optional[KbPair]:
    """First pair whose labels both name distinct clusters (case-insensitive)."""
    labels = [c.display_label.lower() for c in s.entities]
    for pair in pairs:
        subj = pair.subject_label.lower()
        obj = pair.object_label.lower()
        subj_at = [i for i, label in enumerate(labels) if label == subj]
        obj_at = [i for i, label in enumerate(labels) if label == obj]
        if any(i != j for i in subj_at for j in obj_at):
            return pair
    return None


def passes_type_prefilter(s: AnnotatedSentence, schema: RelationSchema) -> bool:
    counts: dict[str, int] = {}
    for c in s.entities:
        counts[c.entity_type] = counts.get(c.entity_type, 0) + 1
    if schema.symmetric:
        return counts.get(schema.subject_type, 0) >= 2
    return (counts.get(schema.subject_type, 0) >= 1
            and counts.get(schema.object_type, 0) >= 1)


def select_candidates(
    corpus: Iterable[AnnotatedSentence],
    schema: RelationSchema,
    pairs: Iterable[KbPair],
    quota: int,
) -> list[Candidate]:
    """Scan in corpus order, emitting candidates until the quota is filled."""
    if quota < 1:
        raise ValueError("quota must be >= 1")
    pairs = list(pairs)
    out: list[Candidate] = []
    for s in corpus:
        if len(out) >= quota:
            break
        if not passes_type_prefilter(s, schema):
            continue
        keyword = match_keywords(s, schema)
        pair = match_distant(s, pairs)
        if keyword is not None and pair is not None:
            provenance = "both"
        elif keyword is not None:
            provenance = "keyword"
        elif pair is not None:
            provenance = "distant"
        else:
            continue
        out.append(Candidate(s.sentence_id, schema.name, provenance, keyword, pair))
    return out


def candidate_to_json(c: Candidate) -> dict:
    return {
        "sentence_id": c.sentence_id,
        "relation_name": c.relation_name,
        "provenance": c.provenance,
        "matched_keyword": c.matched_keyword,
        "matched_pair": (
            None if c.matched_pair is None else
            {"subject_label": c.matched_pair.subject_label,
             "object_label": c.matched_pair.object_label}),
    }


def candidate_from_json(obj: dict) -> Candidate:
    pair = obj.get("matched_pair")
    return Candidate(
        obj["sentence_id"],
        obj["relation_name"],
        obj["provenance"],
        obj.get("matched_keyword"),
        None if pair is None else KbPair(pair["subject_label"], pair["object_label"]),
    )


def write_candidates_jsonl(candidates: Iterable[Candidate], path) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for c in candidates:
            fh.write(json.dumps(candidate_to_json(c), ensure_ascii=False) + "\n")
            count += 1
    return count


def read_candidates_jsonl(path) -> Iterator[Candidate]:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                yield candidate_from_json(json.loads(line))
