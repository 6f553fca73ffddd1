import pytest

from freda.corpus import parse_corpus_line
from freda.engine import AnnotationEngine, AnnotationResponse
from freda.filtering import RelationSchema

PRINCESS_LINE = (
    "s_princess\tPrincess Alberta\t"
    "[[pa|PER|Princess Alberta]] was the fourth daughter of "
    "[[qv|PER|Queen Victoria]] and [[pra|PER|Prince Albert]] ."
)


@pytest.fixture
def princess_sentence():
    return parse_corpus_line(PRINCESS_LINE)


@pytest.fixture
def schemas():
    return {
        "child_of": RelationSchema(
            "child_of", "PER", "PER", keywords=("daughter", "son")),
        "spouse": RelationSchema(
            "spouse", "PER", "PER", symmetric=True, keywords=("married",)),
        "date_of_birth": RelationSchema(
            "date_of_birth", "PER", "DATE", keywords=("born",)),
        "sibling": RelationSchema(
            "sibling", "PER", "PER", symmetric=True, keywords=("brother", "sister")),
    }


@pytest.fixture
def engine(schemas):
    return AnnotationEngine(schemas)


def respond(sentence, relation, annotator, round_, decision, pairs=(),
            entities=None, elapsed=1.0):
    """Build a valid AnnotationResponse against a served sentence."""
    return AnnotationResponse(
        annotator_id=annotator,
        relation_name=relation,
        sentence_id=sentence.sentence_id,
        round=round_,
        decision=decision,
        asserted_pairs=frozenset(pairs),
        entity_edits=tuple(entities if entities is not None else sentence.entities),
        elapsed_seconds=elapsed,
    )
