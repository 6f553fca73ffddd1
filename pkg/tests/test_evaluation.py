import pytest
from hypothesis import given, strategies as st

from freda.errors import UnknownKey, UnknownRelation
from freda.evaluation import (
    EvalReport,
    Prediction,
    aggregate,
    evaluate,
    prediction_from_json,
    prediction_to_json,
    render_eval_table,
    report_to_json,
)
from freda.facts import Fact


def gold(sid, rel, s, o, label):
    return Fact(sid, rel, s, o, label)


def pred(sid, rel, s, o, label):
    return Prediction(sid, rel, s, o, label)


class TestEvaluate:
    def test_hand_counted(self):
        g = [gold("s1", "r", "a", "b", "positive"),
             gold("s1", "r", "b", "a", "negative")]
        p = [pred("s1", "r", "a", "b", "positive"),
             pred("s1", "r", "b", "a", "positive")]
        report = evaluate(p, g)
        score = report.per_relation["r"]
        assert (score.tp, score.fp, score.fn) == (1, 1, 0)
        assert score.precision == pytest.approx(0.5)
        assert score.recall == pytest.approx(1.0)
        assert score.f1 == pytest.approx(2 / 3)

    def test_perfect_predictions(self):
        g = [gold("s1", "r", "a", "b", "positive"),
             gold("s2", "r", "a", "b", "negative")]
        p = [pred("s1", "r", "a", "b", "positive"),
             pred("s2", "r", "a", "b", "negative")]
        score = evaluate(p, g).per_relation["r"]
        assert (score.precision, score.recall, score.f1) == (1.0, 1.0, 1.0)

    def test_no_positive_predictions_degenerate(self):
        g = [gold("s1", "r", "a", "b", "positive")]
        score = evaluate([], g).per_relation["r"]
        assert (score.precision, score.recall, score.f1) == (0.0, 0.0, 0.0)
        assert score.fn == 1

    def test_missing_prediction_counts_as_negative(self):
        g = [gold("s1", "r", "a", "b", "positive"),
             gold("s2", "r", "a", "b", "positive")]
        p = [pred("s1", "r", "a", "b", "positive")]
        score = evaluate(p, g).per_relation["r"]
        assert (score.tp, score.fp, score.fn) == (1, 0, 1)

    def test_unknown_key(self):
        g = [gold("s1", "r", "a", "b", "positive")]
        with pytest.raises(UnknownKey):
            evaluate([pred("s9", "r", "a", "b", "positive")], g)

    def test_duplicate_gold_key_rejected(self):
        g = [gold("s1", "r", "a", "b", "positive"),
             gold("s1", "r", "a", "b", "negative")]
        with pytest.raises(ValueError):
            evaluate([], g)

    def test_last_prediction_wins(self):
        g = [gold("s1", "r", "a", "b", "positive")]
        p = [pred("s1", "r", "a", "b", "positive"),
             pred("s1", "r", "a", "b", "negative")]
        score = evaluate(p, g).per_relation["r"]
        assert (score.tp, score.fp, score.fn) == (0, 0, 1)

    def test_permutation_invariant(self):
        g = [gold(f"s{i}", "r", "a", "b", "positive" if i % 2 else "negative")
             for i in range(8)]
        p = [pred(f"s{i}", "r", "a", "b", "positive" if i % 3 else "negative")
             for i in range(8)]
        fwd = evaluate(p, g)
        rev = evaluate(list(reversed(p)), list(reversed(g)))
        assert fwd.per_relation == rev.per_relation

    def test_count_identities(self):
        g = [gold(f"s{i}", "r", "a", "b", "positive" if i < 5 else "negative")
             for i in range(12)]
        p = [pred(f"s{i}", "r", "a", "b", "positive" if i % 2 == 0 else "negative")
             for i in range(12)]
        score = evaluate(p, g).per_relation["r"]
        assert score.tp + score.fn == 5
        assert score.tp + score.fp == sum(1 for x in p if x.predicted_label == "positive")


class TestAggregate:
    def make_report(self):
        g = [gold("s1", "r1", "a", "b", "positive"),
             gold("s2", "r1", "a", "b", "negative"),
             gold("s3", "r2", "a", "b", "positive"),
             gold("s4", "r2", "a", "b", "positive")]
        p = [pred("s1", "r1", "a", "b", "positive"),
             pred("s2", "r1", "a", "b", "positive"),
             pred("s3", "r2", "a", "b", "positive"),
             pred("s4", "r2", "a", "b", "negative")]
        return evaluate(p, g)

    def test_hand_pooling(self):
        # r1: (tp,fp,fn)=(1,1,0); r2: (1,0,1) -> pooled P=R=F1=2/3
        report = self.make_report()
        score = aggregate(report, ["r1", "r2"], "Total")
        assert score.precision == pytest.approx(2 / 3)
        assert score.recall == pytest.approx(2 / 3)
        assert score.f1 == pytest.approx(2 / 3)
        assert report.aggregates["Total"] == score

    def test_single_relation_subset_equals_row(self):
        report = self.make_report()
        score = aggregate(report, ["r1"], "Interim")
        row = report.per_relation["r1"]
        assert (score.precision, score.recall, score.f1) == (
            row.precision, row.recall, row.f1)

    def test_unknown_relation(self):
        with pytest.raises(UnknownRelation):
            aggregate(self.make_report(), ["r1", "ghost"], "x")

    def test_macro_differs_from_micro(self):
        report = self.make_report()
        micro = aggregate(report, ["r1", "r2"], "m1", method="micro")
        macro = aggregate(report, ["r1", "r2"], "m2", method="macro")
        assert macro.method == "macro"
        assert macro.precision == pytest.approx((0.5 + 1.0) / 2)
        assert micro.precision == pytest.approx(2 / 3)

    def test_render_table(self):
        report = self.make_report()
        aggregate(report, ["r1", "r2"], "Interim")
        aggregate(report, ["r1", "r2"], "Total")
        text = render_eval_table(report)
        lines = text.splitlines()
        assert lines[0].split() == ["Relation", "P", "R", "F1"]
        assert any(line.startswith("Interim") for line in lines)
        assert lines[-1].startswith("Total")

    def test_json_labels_method(self):
        report = self.make_report()
        aggregate(report, ["r1"], "Interim", method="micro")
        payload = report_to_json(report)
        assert payload["aggregates"]["Interim"]["method"] == "micro"
        assert payload["per_relation"]["r1"]["tp"] == 1


@given(st.lists(
    st.tuples(st.integers(min_value=0, max_value=30),
              st.booleans(),
              st.sampled_from(["positive", "negative", "missing"])),
    min_size=1, max_size=40, unique_by=lambda t: t[0]))
def test_count_identities_property(rows):
    g = [gold(f"s{i}", "r", "a", "b", "positive" if gp else "negative")
         for i, gp, _ in rows]
    p = [pred(f"s{i}", "r", "a", "b", pl)
         for i, _, pl in rows if pl != "missing"]
    score = evaluate(p, g).per_relation["r"]
    assert score.tp + score.fn == sum(1 for x in g if x.label == "positive")
    assert score.tp + score.fp == sum(
        1 for x in p if x.predicted_label == "positive")


@given(st.lists(
    st.tuples(st.integers(min_value=0, max_value=9),
              st.sampled_from(["r1", "r2", "r3"]),
              st.booleans(), st.booleans()),
    min_size=1, max_size=40, unique_by=lambda t: (t[0], t[1])))
def test_micro_identity_pooled_equals_concatenated(rows):
    g = [gold(f"s{i}", rel, "a", "b", "positive" if gp else "negative")
         for i, rel, gp, _ in rows]
    p = [pred(f"s{i}", rel, "a", "b", "positive" if pp else "negative")
         for i, rel, _, pp in rows]
    report = evaluate(p, g)
    relations = sorted(report.per_relation)
    pooled = aggregate(report, relations, "all")
    merged = [gold(f"s{i}_{rel}", "merged", "a", "b", "positive" if gp else "negative")
              for i, rel, gp, _ in rows]
    merged_p = [pred(f"s{i}_{rel}", "merged", "a", "b", "positive" if pp else "negative")
                for i, rel, _, pp in rows]
    single = evaluate(merged_p, merged).per_relation["merged"]
    assert pooled.precision == pytest.approx(single.precision, abs=1e-12)
    assert pooled.recall == pytest.approx(single.recall, abs=1e-12)
    assert pooled.f1 == pytest.approx(single.f1, abs=1e-12)


def test_prediction_json_round_trip():
    p = pred("s1", "spouse", "a", "b", "positive")
    payload = prediction_to_json(p)
    assert payload == {"sentence_id": "s1", "relation": "spouse",
                       "subject_ref": "a", "object_ref": "b", "label": "positive"}
    assert prediction_from_json(payload) == p
