#!/usr/bin/env python3
"""Scripted annotators driving a running annotation server over HTTP.

Annotator A takes every round-1 task, B every round-2 task with the same
deterministic decision rule (so they agree), except on one designated
sentence where B inverts the decision to force a tie-break, which C then
settles.  One designated sentence is deleted up front and must never be
served afterwards.
"""

import argparse
import hashlib
import json
import sys
import time
from collections import Counter

import httpx


def digest(sentence_id: str, relation: str) -> int:
    return int(hashlib.sha1(f"{sentence_id}|{relation}".encode()).hexdigest(), 16)


def typed_pairs(entities, relation):
    subjects = [c["entity_ref"] for c in entities
                if c["entity_type"] == relation["subject_type"]]
    objects = [c["entity_ref"] for c in entities
               if c["entity_type"] == relation["object_type"]]
    return [(s, o) for s in subjects for o in objects if s != o]


def decide(task):
    """Deterministic decision: ~1 in 4 sentences do not express the relation."""
    relation = task["relation"]
    d = digest(task["sentence_id"], relation["name"])
    pairs = typed_pairs(task["entities"], relation)
    if d % 4 == 0 or not pairs:
        return "not_expresses", []
    chosen = [pairs[0]]
    if d % 4 == 3 and len(pairs) > 1:
        chosen.append(pairs[1])
    return "expresses", chosen


def response_body(task, annotator, decision, pairs):
    entities = [dict(c) for c in task["entities"]]
    for c in entities:
        c.pop("color", None)
    return {
        "annotator_id": annotator,
        "relation_name": task["relation"]["name"],
        "sentence_id": task["sentence_id"],
        "round": task["round"],
        "decision": decision,
        "asserted_pairs": sorted([s, o] for s, o in pairs),
        "entity_edits": entities,
        "elapsed_seconds": 2.0 + digest(task["sentence_id"], annotator) % 9,
    }


def run_annotator(client, annotator, relations, flip_sentence=None):
    done = Counter()
    served = set()
    for relation in relations:
        while True:
            got = client.get("/api/task",
                             params={"annotator": annotator, "relation": relation})
            if got.status_code == 404:
                break
            got.raise_for_status()
            task = got.json()
            served.add(task["sentence_id"])
            decision, pairs = decide(task)
            if task["sentence_id"] == flip_sentence:
                if decision == "expresses":
                    decision, pairs = "not_expresses", []
                else:
                    decision, pairs = "expresses", typed_pairs(
                        task["entities"], task["relation"])[:1]
            posted = client.post("/api/response",
                                 json=response_body(task, annotator, decision, pairs))
            posted.raise_for_status()
            done[relation] += 1
    return done, served


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--base-url", default="http://127.0.0.1:8000")
    parser.add_argument("--candidates", required=True)
    parser.add_argument("--timeout", type=float, default=30.0)
    args = parser.parse_args()

    with open(args.candidates, encoding="utf-8") as fh:
        candidates = [json.loads(line) for line in fh if line.strip()]
    relations = sorted({c["relation_name"] for c in candidates})
    first_relation_ids = sorted(c["sentence_id"] for c in candidates
                                if c["relation_name"] == relations[0])
    disagreement_target = first_relation_ids[0]
    delete_target = first_relation_ids[-1]

    client = httpx.Client(base_url=args.base_url, timeout=10.0)
    deadline = time.time() + args.timeout
    while True:
        try:
            client.get("/api/stats").raise_for_status()
            break
        except httpx.HTTPError:
            if time.time() > deadline:
                print("server did not come up", file=sys.stderr)
                return 1
            time.sleep(0.2)

    deleted = client.post(f"/api/sentence/{delete_target}/delete")
    deleted.raise_for_status()

    totals = Counter()
    for annotator in ("A", "B", "C"):
        flip = disagreement_target if annotator == "B" else None
        counts, served = run_annotator(client, annotator, relations, flip_sentence=flip)
        if delete_target in served:
            print("deleted sentence was served", file=sys.stderr)
            return 1
        totals += counts
        print(f"annotator {annotator}: {dict(counts)}", file=sys.stderr)

    served_after_delete = client.get(
        "/api/task", params={"annotator": "Z", "relation": relations[0]})
    if served_after_delete.status_code == 200:
        payload = served_after_delete.json()
        if payload["sentence_id"] == delete_target:
            print("deleted sentence was served again", file=sys.stderr)
            return 1

    print(json.dumps({
        "responses": sum(totals.values()),
        "relations": relations,
        "deleted": delete_target,
        "tie_broken": disagreement_target,
    }))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
