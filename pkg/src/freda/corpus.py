"""Corpus model and ingestion.

Sentences arrive as `.wexea` lines (`sentence_id<TAB>article<TAB>markup`)
where the markup interleaves plain tokens with `[[id|TYPE|surface]]`
entity annotations.  Parsing produces an AnnotatedSentence: a token list
plus entity clusters whose mentions are token spans.  Same-id annotations
merge into one cluster (coreference).  Nested or overlapping annotations
are rejected.

The date tagger adds DATE clusters for token runs matching a small fixed
grammar: a bare 4-digit year (1000-2999), `Month D`, `Month D , YYYY`,
and `D Month YYYY`, with full English month names matched
case-insensitively and days 1-31.
"""

from __future__ import annotations

import json
import string
from dataclasses import dataclass, replace
from typing import Iterable, Iterator

from .errors import EmptyInput, MalformedMarkup

ENTITY_TYPES = ("PER", "ORG", "LOC", "DATE", "AWARD", "OTHER")
MENTION_ORIGINS = ("corpus", "date_tagger", "annotator")

_PUNCT = frozenset(string.punctuation)

MONTHS = (
    "january", "february", "march", "april", "may", "june",
    "july", "august", "september", "october", "november", "december",
)


@dataclass(frozen=True)
class Token:
    index: int
    text: str

    def __post_init__(self):
        if not self.text or any(ch.isspace() for ch in self.text):
            raise ValueError(f"token text must be non-empty without whitespace: {self.text!r}")
        if self.index < 0:
            raise ValueError("token index must be >= 0")


@dataclass(frozen=True)
class Mention:
    span_start: int
    span_end: int
    entity_ref: str
    origin: str = "corpus"

    def __post_init__(self):
        if not 0 <= self.span_start < self.span_end:
            raise ValueError(f"bad mention span [{self.span_start},{self.span_end})")
        if self.origin not in MENTION_ORIGINS:
            raise ValueError(f"unknown mention origin {self.origin!r}")

    def overlaps(self, other: "Mention") -> bool:
        return self.span_start < other.span_end and other.span_start < self.span_end


@dataclass(frozen=True)
class EntityCluster:
    entity_ref: str
    display_label: str
    entity_type: str
    mentions: tuple[Mention, ...]

    def __post_init__(self):
        object.__setattr__(self, "mentions", tuple(self.mentions))
        if not self.entity_ref:
            raise ValueError("entity_ref must be non-empty")
        if self.entity_type not in ENTITY_TYPES:
            raise ValueError(f"unknown entity type {self.entity_type!r}")
        if not self.mentions:
            raise ValueError(f"cluster {self.entity_ref} has no mentions")
        for m in self.mentions:
            if m.entity_ref != self.entity_ref:
                raise ValueError(
                    f"mention ref {m.entity_ref!r} does not match cluster {self.entity_ref!r}")


@dataclass(frozen=True)
class AnnotatedSentence:
    sentence_id: str
    source_article: str
    tokens: tuple[Token, ...]
    entities: tuple[EntityCluster, ...]

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "entities", tuple(self.entities))
        if not self.sentence_id:
            raise ValueError("sentence_id must be non-empty")
        for i, tok in enumerate(self.tokens):
            if tok.index != i:
                raise ValueError("token indices must be contiguous from 0")
        refs = [c.entity_ref for c in self.entities]
        if len(refs) != len(set(refs)):
            raise ValueError(f"duplicate entity_ref in sentence {self.sentence_id}")
        mentions = self.all_mentions()
        for m in mentions:
            if m.span_end > len(self.tokens):
                raise ValueError(f"mention {m} exceeds sentence length {len(self.tokens)}")
        ordered = sorted(mentions, key=lambda m: m.span_start)
        for a, b in zip(ordered, ordered[1:]):
            if a.overlaps(b):
                raise ValueError(f"overlapping mentions {a} / {b} in {self.sentence_id}")

    def all_mentions(self) -> list[Mention]:
        return [m for c in self.entities for m in c.mentions]

    def cluster(self, entity_ref: str) -> EntityCluster:
        for c in self.entities:
            if c.entity_ref == entity_ref:
                return c
        raise KeyError(entity_ref)

    def mention_text(self, m: Mention) -> str:
        return " ".join(t.text for t in self.tokens[m.span_start:m.span_end])


def _split_chunk(chunk: str) -> list[str]:
    """Detach leading/trailing punctuation; internal punctuation stays."""
    lead: list[str] = []
    trail: list[str] = []
    while chunk and chunk[0] in _PUNCT:
        lead.append(chunk[0])
        chunk = chunk[1:]
    while chunk and chunk[-1] in _PUNCT:
        trail.append(chunk[-1])
        chunk = chunk[:-1]
    parts = lead
    if chunk:
        parts.append(chunk)
    parts.extend(reversed(trail))
    return parts


def tokenize(raw: str) -> list[Token]:
    """Whitespace split with leading/trailing punctuation detached."""
    texts = tokenize_texts(raw)
    return [Token(i, t) for i, t in enumerate(texts)]


def tokenize_texts(raw: str) -> list[str]:
    if not raw or not raw.strip():
        raise EmptyInput("cannot tokenize empty input")
    out: list[str] = []
    for chunk in raw.split():
        out.extend(_split_chunk(chunk))
    return out


# --- bracket markup -------------------------------------------------------

_OPEN = "[["
_CLOSE = "]]"


def _parse_markup(markup: str) -> tuple[list[str], list[tuple[str, str, int, int]]]:
    """Return (token texts, [(entity id, type, start, end)]) for one markup string."""
    texts: list[str] = []
    spans: list[tuple[str, str, int, int]] = []
    pos = 0
    while pos < len(markup):
        start = markup.find(_OPEN, pos)
        if start == -1:
            plain = markup[pos:]
            if _CLOSE in plain:
                raise MalformedMarkup(f"stray ']]' outside annotation: {markup!r}")
            if plain.strip():
                texts.extend(tokenize_texts(plain))
            break
        plain = markup[pos:start]
        if _CLOSE in plain:
            raise MalformedMarkup(f"stray ']]' outside annotation: {markup!r}")
        if plain.strip():
            texts.extend(tokenize_texts(plain))
        end = markup.find(_CLOSE, start + len(_OPEN))
        if end == -1:
            raise MalformedMarkup(f"unbalanced '[[' in: {markup!r}")
        body = markup[start + len(_OPEN):end]
        if _OPEN in body:
            raise MalformedMarkup(f"nested annotation in: {markup!r}")
        fields = body.split("|")
        if len(fields) != 3:
            raise MalformedMarkup(f"annotation needs id|TYPE|surface, got {body!r}")
        ref, etype, surface = (f.strip() for f in fields)
        if not ref:
            raise MalformedMarkup(f"empty entity id in {body!r}")
        if etype not in ENTITY_TYPES:
            raise MalformedMarkup(f"unknown entity type {etype!r} in {body!r}")
        if not surface.strip():
            raise MalformedMarkup(f"empty surface in {body!r}")
        surface_texts = tokenize_texts(surface)
        spans.append((ref, etype, len(texts), len(texts) + len(surface_texts)))
        texts.extend(surface_texts)
        pos = end + len(_CLOSE)
    if not texts:
        raise MalformedMarkup(f"no tokens in markup: {markup!r}")
    return texts, spans


def parse_corpus_line(line: str) -> AnnotatedSentence:
    """Parse one `.wexea` line into an AnnotatedSentence."""
    parts = line.rstrip("\n").split("\t")
    if len(parts) != 3:
        raise MalformedMarkup(f"expected sentence_id<TAB>article<TAB>markup, got {line!r}")
    sentence_id, article, markup = parts
    if not sentence_id:
        raise MalformedMarkup("empty sentence_id")
    texts, spans = _parse_markup(markup)
    clusters: dict[str, tuple[str, str, list[Mention]]] = {}
    for ref, etype, start, end in spans:
        mention = Mention(start, end, ref, origin="corpus")
        if ref in clusters:
            label, known_type, mentions = clusters[ref]
            if known_type != etype:
                raise MalformedMarkup(
                    f"entity {ref!r} annotated with conflicting types {known_type}/{etype}")
            mentions.append(mention)
        else:
            clusters[ref] = (" ".join(texts[start:end]), etype, [mention])
    entities = tuple(
        EntityCluster(ref, label, etype, tuple(mentions))
        for ref, (label, etype, mentions) in clusters.items()
    )
    tokens = tuple(Token(i, t) for i, t in enumerate(texts))
    try:
        return AnnotatedSentence(sentence_id, article, tokens, entities)
    except ValueError as exc:  # overlapping annotations are rejected, not repaired
        raise MalformedMarkup(str(exc)) from exc


def read_corpus(lines: Iterable[str]) -> Iterator[AnnotatedSentence]:
    """Parse a `.wexea` stream; duplicate sentence ids are rejected."""
    seen: set[str] = set()
    for line in lines:
        if not line.strip():
            continue
        sentence = parse_corpus_line(line)
        if sentence.sentence_id in seen:
            raise MalformedMarkup(f"duplicate sentence_id {sentence.sentence_id!r}")
        seen.add(sentence.sentence_id)
        yield sentence


# --- date tagging ---------------------------------------------------------

def _is_month(text: str) -> bool:
    return text.lower() in MONTHS


def _is_day(text: str) -> bool:
    return text.isdigit() and len(text) <= 2 and 1 <= int(text) <= 31


def _is_year(text: str) -> bool:
    return len(text) == 4 and text.isdigit() and 1000 <= int(text) <= 2999


def _date_match_length(texts: list[str], i: int) -> int:
    """Longest date-grammar match starting at token i, 0 if none."""
    n = len(texts)
    if _is_month(texts[i]) and i + 1 < n and _is_day(texts[i + 1]):
        if i + 3 < n and texts[i + 2] == "," and _is_year(texts[i + 3]):
            return 4
        return 2
    if (_is_day(texts[i]) and i + 2 < n
            and _is_month(texts[i + 1]) and _is_year(texts[i + 2])):
        return 3
    if _is_year(texts[i]):
        return 1
    return 0


def tag_dates(s: AnnotatedSentence) -> AnnotatedSentence:
    """Add DATE clusters for date-grammar runs not overlapping existing mentions.

    Longest-match, left-to-right scan; idempotent.
    """
    texts = [t.text for t in s.tokens]
    matches: list[tuple[int, int]] = []
    i = 0
    while i < len(texts):
        length = _date_match_length(texts, i)
        if length:
            matches.append((i, i + length))
            i += length
        else:
            i += 1
    existing = s.all_mentions()
    taken_refs = {c.entity_ref for c in s.entities}
    new_clusters: list[EntityCluster] = []
    for start, end in matches:
        probe = Mention(start, end, "probe", origin="date_tagger")
        if any(probe.overlaps(m) for m in existing):
            continue
        ref = f"date_{start}_{end}"
        while ref in taken_refs:
            ref += "_"
        taken_refs.add(ref)
        new_clusters.append(EntityCluster(
            ref, " ".join(texts[start:end]), "DATE",
            (Mention(start, end, ref, origin="date_tagger"),)))
    if not new_clusters:
        return s
    return replace(s, entities=s.entities + tuple(new_clusters))


# --- canonical JSON form --------------------------------------------------

def mention_to_json(m: Mention) -> dict:
    return {"start": m.span_start, "end": m.span_end, "origin": m.origin}


def cluster_to_json(c: EntityCluster) -> dict:
    return {
        "entity_ref": c.entity_ref,
        "display_label": c.display_label,
        "entity_type": c.entity_type,
        "mentions": [mention_to_json(m) for m in c.mentions],
    }


def sentence_to_json(s: AnnotatedSentence) -> dict:
    return {
        "sentence_id": s.sentence_id,
        "source_article": s.source_article,
        "tokens": [t.text for t in s.tokens],
        "entities": [cluster_to_json(c) for c in s.entities],
    }


def cluster_from_json(obj: dict) -> EntityCluster:
    ref = obj["entity_ref"]
    return EntityCluster(
        ref,
        obj["display_label"],
        obj["entity_type"],
        tuple(Mention(m["start"], m["end"], ref, m.get("origin", "corpus"))
              for m in obj["mentions"]),
    )


def sentence_from_json(obj: dict) -> AnnotatedSentence:
    tokens = tuple(Token(i, t) for i, t in enumerate(obj["tokens"]))
    entities = tuple(cluster_from_json(c) for c in obj["entities"])
    return AnnotatedSentence(obj["sentence_id"], obj["source_article"], tokens, entities)


def serialize_sentence(s: AnnotatedSentence) -> str:
    return json.dumps(sentence_to_json(s), ensure_ascii=False)


def write_sentences_jsonl(sentences: Iterable[AnnotatedSentence], path) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as fh:
        for s in sentences:
            fh.write(serialize_sentence(s) + "\n")
            count += 1
    return count


def read_sentences_jsonl(path) -> Iterator[AnnotatedSentence]:
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                yield sentence_from_json(json.loads(line))
