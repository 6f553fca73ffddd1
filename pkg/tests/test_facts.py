import pytest
from hypothesis import given, strategies as st

from freda.corpus import AnnotatedSentence, EntityCluster, Mention, Token
from freda.engine import SentenceVerdict
from freda.errors import TypeMismatch
from freda.facts import (
    Fact,
    corpus_statistics,
    extract_facts,
    extract_test_negatives,
    facts_from_verdict,
    statistics_to_json,
)
from freda.filtering import RelationSchema

CHILD_OF = RelationSchema("child_of", "PER", "PER", keywords=("daughter",))
SPOUSE = RelationSchema("spouse", "PER", "PER", symmetric=True)
DOB = RelationSchema("date_of_birth", "PER", "DATE")


def brute_force_pair_count(entities, schema):
    """Independent oracle: count ordered typed cluster pairs, self-pairs excluded."""
    count = 0
    for subj in entities:
        for obj in entities:
            if subj.entity_ref == obj.entity_ref:
                continue
            if (subj.entity_type == schema.subject_type
                    and obj.entity_type == schema.object_type):
                count += 1
    return count


def make_sentence(sid, types):
    """One cluster per (ref, type); one token per cluster."""
    tokens = tuple(Token(i, f"w{i}") for i in range(len(types)))
    entities = tuple(
        EntityCluster(ref, f"w{i}", etype, (Mention(i, i + 1, ref),))
        for i, (ref, etype) in enumerate(types))
    return AnnotatedSentence(sid, "art", tokens, entities)


def verdict_for(s, schema, pairs):
    decision = "expresses" if pairs else "not_expresses"
    return SentenceVerdict(s.sentence_id, schema.name, decision,
                           frozenset(pairs), s.entities)


class TestExtractFacts:
    def test_princess_alberta_six_ordered_pairs(self, princess_sentence):
        v = verdict_for(princess_sentence, CHILD_OF, [("pa", "qv"), ("pa", "pra")])
        facts = extract_facts(v, princess_sentence, CHILD_OF)
        positives = {(f.subject_ref, f.object_ref)
                     for f in facts if f.label == "positive"}
        negatives = {(f.subject_ref, f.object_ref)
                     for f in facts if f.label == "negative"}
        assert positives == {("pa", "qv"), ("pa", "pra")}
        assert negatives == {("qv", "pa"), ("pra", "pa"), ("pra", "qv"), ("qv", "pra")}
        assert len(facts) == 6

    def test_symmetric_closure(self):
        s = make_sentence("s1", [("A", "PER"), ("B", "PER"), ("C", "LOC")])
        facts = facts_from_verdict(verdict_for(s, SPOUSE, [("A", "B")]), SPOUSE)
        positives = {(f.subject_ref, f.object_ref)
                     for f in facts if f.label == "positive"}
        negatives = [f for f in facts if f.label == "negative"]
        assert positives == {("A", "B"), ("B", "A")}
        assert negatives == []

    def test_directed_with_distractor_type(self):
        s = make_sentence("s1", [("P1", "PER"), ("P2", "PER"), ("D", "DATE")])
        facts = facts_from_verdict(verdict_for(s, DOB, [("P1", "D")]), DOB)
        assert [(f.subject_ref, f.object_ref, f.label) for f in facts] == [
            ("P1", "D", "positive"), ("P2", "D", "negative")]

    def test_not_expresses_all_pairs_negative(self, princess_sentence):
        v = verdict_for(princess_sentence, CHILD_OF, [])
        facts = extract_facts(v, princess_sentence, CHILD_OF)
        assert all(f.label == "negative" for f in facts)
        assert len(facts) == 6

    def test_type_mismatch_detected(self):
        s = make_sentence("s1", [("P", "PER"), ("D", "DATE")])
        v = verdict_for(s, DOB, [("D", "P")])  # reversed direction
        with pytest.raises(TypeMismatch):
            facts_from_verdict(v, DOB)

    def test_pair_referencing_missing_entity(self):
        s = make_sentence("s1", [("P", "PER"), ("D", "DATE")])
        v = SentenceVerdict("s1", "date_of_birth", "expresses",
                            frozenset({("ghost", "D")}), s.entities)
        with pytest.raises(TypeMismatch):
            facts_from_verdict(v, DOB)

    def test_sentence_id_must_match(self, princess_sentence):
        other = make_sentence("other", [("P", "PER")])
        v = verdict_for(princess_sentence, CHILD_OF, [("pa", "qv")])
        with pytest.raises(ValueError):
            extract_facts(v, other, CHILD_OF)


class TestTestNegatives:
    def test_flag_off_matches_extract_facts_negatives(self, princess_sentence):
        v = verdict_for(princess_sentence, CHILD_OF, [("pa", "qv"), ("pa", "pra")])
        all_facts = extract_facts(v, princess_sentence, CHILD_OF)
        positives = [f for f in all_facts if f.label == "positive"]
        expected = [f for f in all_facts if f.label == "negative"]
        got = extract_test_negatives(princess_sentence, positives, CHILD_OF,
                                     same_entity_negatives=False)
        assert sorted(got, key=lambda f: f.key) == sorted(expected, key=lambda f: f.key)

    def test_same_entity_negative_for_multi_mention_cluster(self):
        tokens = tuple(Token(i, t) for i, t in enumerate(
            ["Bill", "Gates", "said", "he", "left"]))
        cluster = EntityCluster("A", "Bill Gates", "PER",
                                (Mention(0, 2, "A"), Mention(3, 4, "A")))
        other = EntityCluster("B", "left", "PER", (Mention(4, 5, "B"),))
        s = AnnotatedSentence("s1", "art", tokens, (cluster, other))
        got = extract_test_negatives(s, [], SPOUSE, same_entity_negatives=True)
        assert Fact("s1", "spouse", "A", "A", "negative") in got
        assert Fact("s1", "spouse", "B", "B", "negative") not in got

    def test_same_entity_requires_conforming_both_sides(self):
        tokens = tuple(Token(i, t) for i, t in enumerate(["Bill", "he", "won"]))
        cluster = EntityCluster("P", "Bill", "PER",
                                (Mention(0, 1, "P"), Mention(1, 2, "P")))
        s = AnnotatedSentence("s1", "art", tokens, (cluster,))
        got = extract_test_negatives(s, [], DOB, same_entity_negatives=True)
        assert got == []

    def test_positive_label_precondition(self, princess_sentence):
        bad = [Fact("s_princess", "child_of", "pa", "qv", "negative")]
        with pytest.raises(ValueError):
            extract_test_negatives(princess_sentence, bad, CHILD_OF)


class TestStatistics:
    def test_princess_worked_example(self, princess_sentence):
        v = verdict_for(princess_sentence, CHILD_OF, [("pa", "qv"), ("pa", "pra")])
        facts = extract_facts(v, princess_sentence, CHILD_OF)
        r = corpus_statistics([v], facts)
        assert statistics_to_json(r) == {
            "sentences": 1, "pos_responses": 1, "neg_responses": 0,
            "pos_facts": 2, "neg_facts": 4}

    def test_empty(self):
        r = corpus_statistics([], [])
        assert (r.sentences, r.pos_responses, r.neg_responses,
                r.pos_facts, r.neg_facts) == (0, 0, 0, 0, 0)

    def test_three_verdict_hand_enumeration(self):
        # three sentences, two typed pairs each; two expressing verdicts with
        # one asserted pair, one non-expressing
        sents = [make_sentence(f"s{i}", [("P1", "PER"), ("P2", "PER"), ("D", "DATE")])
                 for i in range(3)]
        verdicts = [
            verdict_for(sents[0], DOB, [("P1", "D")]),
            verdict_for(sents[1], DOB, [("P2", "D")]),
            verdict_for(sents[2], DOB, []),
        ]
        facts = [f for v, s in zip(verdicts, sents)
                 for f in extract_facts(v, s, DOB)]
        r = corpus_statistics(verdicts, facts)
        assert (r.sentences, r.pos_responses, r.neg_responses,
                r.pos_facts, r.neg_facts) == (3, 2, 1, 2, 4)


# --- count law property ------------------------------------------------------

_TYPES = ["PER", "ORG", "LOC", "DATE"]


@st.composite
def sentence_and_verdict(draw):
    n = draw(st.integers(min_value=1, max_value=6))
    types = [(f"e{i}", draw(st.sampled_from(_TYPES))) for i in range(n)]
    s = make_sentence("s1", types)
    schema = draw(st.sampled_from([
        CHILD_OF, SPOUSE, DOB,
        RelationSchema("headquarters", "ORG", "LOC"),
    ]))
    candidates = [
        (a.entity_ref, b.entity_ref)
        for a in s.entities for b in s.entities
        if a.entity_ref != b.entity_ref
        and a.entity_type == schema.subject_type
        and b.entity_type == schema.object_type]
    if candidates and draw(st.booleans()):
        pairs = draw(st.sets(st.sampled_from(candidates), min_size=1))
    else:
        pairs = set()
    return s, schema, verdict_for(s, schema, pairs)


@given(sentence_and_verdict())
def test_count_law(case):
    s, schema, v = case
    facts = facts_from_verdict(v, schema)
    assert len(facts) == brute_force_pair_count(s.entities, schema)
    keys = [(f.subject_ref, f.object_ref) for f in facts]
    assert len(keys) == len(set(keys))


@given(sentence_and_verdict())
def test_symmetric_closure_property(case):
    s, schema, v = case
    facts = facts_from_verdict(v, schema)
    positives = {(f.subject_ref, f.object_ref) for f in facts if f.label == "positive"}
    negatives = {(f.subject_ref, f.object_ref) for f in facts if f.label == "negative"}
    if schema.symmetric:
        assert {(o, s_) for s_, o in positives} == positives
    assert not positives & negatives
