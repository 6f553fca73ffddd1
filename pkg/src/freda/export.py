"""Dataset compilation: sentence-level splits, entity markers, class weights.

A fact fans out to one training example per ordered (subject mention,
object mention) pair; the chosen mentions are wrapped in the literal
marker tokens [ES]...[/ES] and [EO]...[/EO].  Splits are drawn at the
sentence level so no sentence contributes to both sides.  Positive
examples get weight N_neg/N_pos (inverse positive frequency) so each
class carries equal total mass; weights are exact rationals internally
and serialized as floats.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .corpus import AnnotatedSentence
from .errors import DegenerateClassBalance, NoValidMentionPair, TooFewSentences
from .facts import Fact
from .filtering import RelationSchema

SUBJECT_START = "[ES]"
SUBJECT_END = "[/ES]"
OBJECT_START = "[EO]"
OBJECT_END = "[/EO]"
MARKERS = (SUBJECT_START, SUBJECT_END, OBJECT_START, OBJECT_END)

WEIGHTING_SCHEME = "inverse_positive_frequency"


@dataclass(frozen=True)
class TrainingExample:
    relation_name: str
    marked_tokens: tuple[str, ...]
    label: str
    weight: Fraction
    sentence_id: str
    subject_mention: tuple[int, int]
    object_mention: tuple[int, int]

    def __post_init__(self):
        object.__setattr__(self, "marked_tokens", tuple(self.marked_tokens))
        if self.weight <= 0:
            raise ValueError("weight must be positive")
        for marker in MARKERS:
            if self.marked_tokens.count(marker) != 1:
                raise ValueError(f"expected exactly one {marker} token")


@dataclass(frozen=True)
class SplitManifest:
    relation_name: str
    test_sentence_ids: frozenset[str]
    train_sentence_ids: frozenset[str]
    seed: int

    def __post_init__(self):
        object.__setattr__(self, "test_sentence_ids", frozenset(self.test_sentence_ids))
        object.__setattr__(self, "train_sentence_ids", frozenset(self.train_sentence_ids))
        if self.test_sentence_ids & self.train_sentence_ids:
            raise ValueError("test and train sentence sets must be disjoint")


def split(sentence_ids: Sequence[str], ratio: float, seed: int,
          relation_name: str = "") -> SplitManifest:
    """Deterministic sentence-level split: floor(ratio*N) test ids, at least one."""
    if not 0 < ratio < 1:
        raise ValueError(f"ratio must be in (0, 1), got {ratio}")
    ids = sorted(set(sentence_ids))
    n = len(ids)
    if n < 2:
        raise TooFewSentences(f"need at least 2 sentences to split, got {n}")
    # exact decimal arithmetic so e.g. floor(0.1 * 290) is 29, not 28
    n_test = max(1, int(Fraction(str(ratio)) * n))
    rng = random.Random(seed)
    rng.shuffle(ids)
    return SplitManifest(relation_name, frozenset(ids[:n_test]),
                         frozenset(ids[n_test:]), seed)


def insert_markers(texts: Sequence[str], subject_span: tuple[int, int],
                   object_span: tuple[int, int]) -> list[str]:
    ss, se = subject_span
    os_, oe = object_span
    out: list[str] = []
    for i in range(len(texts) + 1):
        if i == se:
            out.append(SUBJECT_END)
        if i == oe:
            out.append(OBJECT_END)
        if i == ss:
            out.append(SUBJECT_START)
        if i == os_:
            out.append(OBJECT_START)
        if i < len(texts):
            out.append(texts[i])
    return out


def strip_markers(marked: Sequence[str]) -> list[str]:
    return [t for t in marked if t not in MARKERS]


def _spans_overlap(a: tuple[int, int], b: tuple[int, int]) -> bool:
    return a[0] < b[1] and b[0] < a[1]


def to_examples(f: Fact, s: AnnotatedSentence) -> list[TrainingExample]:
    """One example per ordered non-overlapping (subject, object) mention pair."""
    if f.sentence_id != s.sentence_id:
        raise ValueError(f"fact sentence {f.sentence_id!r} is not {s.sentence_id!r}")
    subject = s.cluster(f.subject_ref)
    obj = s.cluster(f.object_ref)
    texts = [t.text for t in s.tokens]
    out: list[TrainingExample] = []
    for sm in subject.mentions:
        for om in obj.mentions:
            subj_span = (sm.span_start, sm.span_end)
            obj_span = (om.span_start, om.span_end)
            if _spans_overlap(subj_span, obj_span):
                continue
            out.append(TrainingExample(
                relation_name=f.relation_name,
                marked_tokens=tuple(insert_markers(texts, subj_span, obj_span)),
                label=f.label,
                weight=Fraction(1),
                sentence_id=f.sentence_id,
                subject_mention=subj_span,
                object_mention=obj_span,
            ))
    if not out:
        raise NoValidMentionPair(
            f"no non-overlapping mention pair for ({f.subject_ref}, {f.object_ref}) "
            f"in {s.sentence_id}")
    return out


def assign_weights(examples: Sequence[TrainingExample]) -> list[TrainingExample]:
    """Weight one relation's training examples: negatives 1, positives N_neg/N_pos."""
    n_pos = sum(1 for e in examples if e.label == "positive")
    n_neg = len(examples) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DegenerateClassBalance(
            f"training set needs both classes, got {n_pos} positive / {n_neg} negative")
    pos_weight = Fraction(n_neg, n_pos)
    return [replace(e, weight=pos_weight if e.label == "positive" else Fraction(1))
            for e in examples]


def example_to_json(e: TrainingExample) -> dict:
    return {
        "relation": e.relation_name,
        "tokens": list(e.marked_tokens),
        "label": e.label,
        "weight": float(e.weight),
        "sentence_id": e.sentence_id,
        "subject_span": list(e.subject_mention),
        "object_span": list(e.object_mention),
    }


def example_from_json(obj: dict) -> TrainingExample:
    return TrainingExample(
        relation_name=obj["relation"],
        marked_tokens=tuple(obj["tokens"]),
        label=obj["label"],
        weight=Fraction(obj["weight"]),
        sentence_id=obj["sentence_id"],
        subject_mention=tuple(obj["subject_span"]),
        object_mention=tuple(obj["object_span"]),
    )


def write_examples_jsonl(examples: Iterable[TrainingExample], path) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for e in examples:
            fh.write(json.dumps(example_to_json(e), ensure_ascii=False) + "\n")
            count += 1
    return count


def read_examples_jsonl(path) -> Iterator[TrainingExample]:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                yield example_from_json(json.loads(line))


@dataclass
class RelationDataset:
    relation_name: str
    manifest: SplitManifest
    train: list[TrainingExample]
    test: list[TrainingExample]
    fact_counts: dict[str, int]


def build_relation_dataset(
    relation_name: str,
    facts: Sequence[Fact],
    sentences_by_id: dict[str, AnnotatedSentence],
    ratio: float,
    seed: int,
) -> RelationDataset:
    """Split one relation's sentences and expand its facts into weighted examples."""
    facts = [f for f in facts if f.relation_name == relation_name]
    sentence_ids = sorted({f.sentence_id for f in facts})
    manifest = split(sentence_ids, ratio, seed, relation_name)
    train: list[TrainingExample] = []
    test: list[TrainingExample] = []
    for f in sorted(facts, key=lambda f: (f.sentence_id, f.subject_ref, f.object_ref)):
        bucket = test if f.sentence_id in manifest.test_sentence_ids else train
        bucket.extend(to_examples(f, sentences_by_id[f.sentence_id]))
    train = assign_weights(train)
    fact_counts = {
        "positive": sum(1 for f in facts if f.label == "positive"),
        "negative": sum(1 for f in facts if f.label == "negative"),
    }
    return RelationDataset(relation_name, manifest, train, test, fact_counts)


def dataset_manifest_json(datasets: Sequence[RelationDataset], ratio: float,
                          seed: int) -> dict:
    relations = {}
    for ds in datasets:
        train_pos = sum(1 for e in ds.train if e.label == "positive")
        test_pos = sum(1 for e in ds.test if e.label == "positive")
        pos_weight = next((e.weight for e in ds.train if e.label == "positive"), None)
        relations[ds.relation_name] = {
            "train_sentences": len(ds.manifest.train_sentence_ids),
            "test_sentences": len(ds.manifest.test_sentence_ids),
            "facts": ds.fact_counts,
            "train_examples": {"positive": train_pos,
                               "negative": len(ds.train) - train_pos},
            "test_examples": {"positive": test_pos,
                              "negative": len(ds.test) - test_pos},
            "positive_weight": None if pos_weight is None else float(pos_weight),
        }
    return {
        "ratio": ratio,
        "seed": seed,
        "weighting_scheme": WEIGHTING_SCHEME,
        "relations": relations,
    }
