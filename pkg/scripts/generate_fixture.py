#!/usr/bin/env python3
"""Generate a synthetic annotation fixture: corpus, schemas, KB pairs.

Planted sentences cover three relations (spouse via keywords and KB
pairs, child_of, date_of_birth) among type-compatible distractors, so a
full pipeline run exercises both filtering routes, date tagging, and
mixed verdicts.
"""

import argparse
import json
import random
from pathlib import Path

SCHEMAS = [
    {"name": "spouse", "subject_type": "PER", "object_type": "PER",
     "symmetric": True, "keywords": ["married", "wed"],
     "kb_pairs_path": "spouse.tsv"},
    {"name": "child_of", "subject_type": "PER", "object_type": "PER",
     "symmetric": False, "keywords": ["daughter of", "son of"]},
    {"name": "date_of_birth", "subject_type": "PER", "object_type": "DATE",
     "symmetric": False, "keywords": ["born"]},
]

MONTH_NAMES = ["January", "March", "June", "August", "October", "December"]
CITIES = ["Paris", "Lagos", "Osaka", "Quito", "Tartu", "Malmo"]
VERBS = ["visited", "photographed", "praised", "interviewed"]


def person(rng, prefix):
    return f"{prefix}{rng.randrange(10_000):04d}"


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", required=True)
    parser.add_argument("--sentences", type=int, default=200)
    parser.add_argument("--seed", type=int, default=11)
    args = parser.parse_args()

    rng = random.Random(args.seed)
    out_dir = Path(args.out_dir)
    (out_dir / "kb_pairs").mkdir(parents=True, exist_ok=True)

    lines = []
    kb_pairs = []

    def add(markup, article="fixture"):
        sid = f"s{len(lines):04d}"
        lines.append(f"{sid}\t{article}\t{markup}")

    # spouse: keyword route; a third guest PER keeps negative pairs available
    # even when every verdict is positive
    for i in range(10):
        a, b = person(rng, "Spka"), person(rng, "Spkb")
        if i % 2:
            add(f"[[a|PER|{a}]] married [[b|PER|{b}]] near "
                f"[[c|LOC|{rng.choice(CITIES)}]] .")
        else:
            add(f"[[a|PER|{a}]] married [[b|PER|{b}]] while "
                f"[[g|PER|{person(rng, 'Gue')}]] watched .")

    # spouse: distant-supervision route (no keyword in the sentence)
    for i in range(6):
        a, b = person(rng, "Spda"), person(rng, "Spdb")
        kb_pairs.append((a, b))
        add(f"[[a|PER|{a}]] and [[b|PER|{b}]] {rng.choice(VERBS)} "
            f"[[c|LOC|{rng.choice(CITIES)}]] together .")

    # child_of: three PER clusters for a rich negative space
    for i in range(12):
        c, m, f = person(rng, "Chc"), person(rng, "Chm"), person(rng, "Chf")
        add(f"[[a|PER|{c}]] was the daughter of [[b|PER|{m}]] and [[c|PER|{f}]] .")

    # date_of_birth: plain-text dates for the tagger to pick up; a second
    # year on most lines keeps a wrong DATE available as a negative pair
    for i in range(12):
        p = person(rng, "Dob")
        month = rng.choice(MONTH_NAMES)
        day = rng.randrange(1, 29)
        year = rng.randrange(1900, 2000)
        if i % 3:
            add(f"[[a|PER|{p}]] was born on {month} {day} , {year} and moved "
                f"away in {year + rng.randrange(18, 40)} .")
        else:
            add(f"[[a|PER|{p}]] was born on {month} {day} , {year} in "
                f"[[c|LOC|{rng.choice(CITIES)}]] .")

    # distractors: type-compatible but matching neither route
    while len(lines) < args.sentences:
        kind = rng.randrange(3)
        if kind == 0:
            add(f"[[a|PER|{person(rng, 'Dis')}]] {rng.choice(VERBS)} "
                f"[[c|LOC|{rng.choice(CITIES)}]] .")
        elif kind == 1:
            add(f"[[a|PER|{person(rng, 'Dis')}]] greeted "
                f"[[b|PER|{person(rng, 'Dis')}]] warmly .")
        else:
            add(f"the [[o|ORG|Guild{rng.randrange(100)}]] opened an office "
                f"in [[c|LOC|{rng.choice(CITIES)}]] .")

    rng.shuffle(lines)
    (out_dir / "corpus.wexea").write_text("\n".join(lines) + "\n")
    (out_dir / "schemas.json").write_text(json.dumps(SCHEMAS, indent=2) + "\n")
    (out_dir / "kb_pairs" / "spouse.tsv").write_text(
        "".join(f"{a}\t{b}\n" for a, b in kb_pairs))
    print(f"wrote {len(lines)} sentences, {len(kb_pairs)} kb pairs -> {out_dir}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
