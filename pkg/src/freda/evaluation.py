"""Scoring prediction files against gold facts.

Facts and predictions are keyed by (sentence, relation, subject, object).
Per relation: tp/fp/fn exact counts with precision, recall and F1;
missing predictions on gold positives count as false negatives.  Named
aggregates ("Interim", "Total") pool counts across a relation subset
(micro) or average the per-relation scores (macro); each aggregate
records which method produced it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .errors import UnknownKey, UnknownRelation
from .facts import Fact

Key = tuple[str, str, str, str]


@dataclass(frozen=True)
class Prediction:
    sentence_id: str
    relation_name: str
    subject_ref: str
    object_ref: str
    predicted_label: str

    def __post_init__(self):
        if self.predicted_label not in ("positive", "negative"):
            raise ValueError(f"unknown label {self.predicted_label!r}")

    @property
    def key(self) -> Key:
        return (self.sentence_id, self.relation_name, self.subject_ref, self.object_ref)


@dataclass(frozen=True)
class RelationScore:
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    fn: int


@dataclass(frozen=True)
class AggregateScore:
    precision: float
    recall: float
    f1: float
    method: str


@dataclass
class EvalReport:
    per_relation: dict[str, RelationScore]
    aggregates: dict[str, AggregateScore] = field(default_factory=dict)


def _prf(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    f1 = (2 * precision * recall / (precision + recall)
          if precision + recall > 0 else 0.0)
    return precision, recall, f1


def evaluate(preds: Iterable[Prediction], gold: Iterable[Fact]) -> EvalReport:
    """Score predictions against gold facts; every prediction key must exist."""
    gold_labels: dict[Key, str] = {}
    for f in gold:
        if f.key in gold_labels:
            raise ValueError(f"duplicate gold key {f.key}")
        gold_labels[f.key] = f.label
    predicted: dict[Key, str] = {}
    for p in preds:  # last prediction per key wins
        if p.key not in gold_labels:
            raise UnknownKey(f"prediction references no gold fact: {p.key}")
        predicted[p.key] = p.predicted_label
    counts: dict[str, list[int]] = {}
    for key, gold_label in gold_labels.items():
        relation = key[1]
        tp_fp_fn = counts.setdefault(relation, [0, 0, 0])
        pred_label = predicted.get(key, "negative")
        if pred_label == "positive" and gold_label == "positive":
            tp_fp_fn[0] += 1
        elif pred_label == "positive":
            tp_fp_fn[1] += 1
        elif gold_label == "positive":
            tp_fp_fn[2] += 1
    per_relation = {}
    for relation in sorted(counts):
        tp, fp, fn = counts[relation]
        precision, recall, f1 = _prf(tp, fp, fn)
        per_relation[relation] = RelationScore(precision, recall, f1, tp, fp, fn)
    return EvalReport(per_relation)


def aggregate(report: EvalReport, relation_subset: Sequence[str], name: str,
              method: str = "micro") -> AggregateScore:
    """Pool a relation subset into a named aggregate, recorded on the report."""
    if not relation_subset:
        raise ValueError("relation subset must be non-empty")
    if method not in ("micro", "macro"):
        raise ValueError(f"unknown aggregation method {method!r}")
    missing = [r for r in relation_subset if r not in report.per_relation]
    if missing:
        raise UnknownRelation(f"relations not in report: {missing}")
    rows = [report.per_relation[r] for r in relation_subset]
    if method == "micro":
        tp = sum(r.tp for r in rows)
        fp = sum(r.fp for r in rows)
        fn = sum(r.fn for r in rows)
        precision, recall, f1 = _prf(tp, fp, fn)
    else:
        precision = sum(r.precision for r in rows) / len(rows)
        recall = sum(r.recall for r in rows) / len(rows)
        f1 = sum(r.f1 for r in rows) / len(rows)
    score = AggregateScore(precision, recall, f1, method)
    report.aggregates[name] = score
    return score


def report_to_json(report: EvalReport) -> dict:
    return {
        "per_relation": {
            rel: {"precision": s.precision, "recall": s.recall, "f1": s.f1,
                  "tp": s.tp, "fp": s.fp, "fn": s.fn}
            for rel, s in sorted(report.per_relation.items())
        },
        "aggregates": {
            name: {"precision": s.precision, "recall": s.recall, "f1": s.f1,
                   "method": s.method}
            for name, s in report.aggregates.items()
        },
    }


def render_eval_table(report: EvalReport) -> str:
    """Fixed-width table: one P/R/F1 row per relation, then the aggregates."""
    names = list(report.per_relation) + list(report.aggregates)
    width = max([len("Relation")] + [len(n) for n in names])
    lines = [f"{'Relation':<{width}}  {'P':>5}  {'R':>5}  {'F1':>5}"]
    for rel, s in report.per_relation.items():
        lines.append(f"{rel:<{width}}  {s.precision:>5.2f}  {s.recall:>5.2f}  {s.f1:>5.2f}")
    for name, s in report.aggregates.items():
        lines.append(f"{name:<{width}}  {s.precision:>5.2f}  {s.recall:>5.2f}  {s.f1:>5.2f}")
    return "\n".join(lines)


def prediction_to_json(p: Prediction) -> dict:
    return {
        "sentence_id": p.sentence_id,
        "relation": p.relation_name,
        "subject_ref": p.subject_ref,
        "object_ref": p.object_ref,
        "label": p.predicted_label,
    }


def prediction_from_json(obj: dict) -> Prediction:
    return Prediction(obj["sentence_id"], obj["relation"],
                      obj["subject_ref"], obj["object_ref"], obj["label"])


def write_predictions_jsonl(preds: Iterable[Prediction], path) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for p in preds:
            fh.write(json.dumps(prediction_to_json(p), ensure_ascii=False) + "\n")
            count += 1
    return count


def read_predictions_jsonl(path) -> Iterator[Prediction]:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                yield prediction_from_json(json.loads(line))
