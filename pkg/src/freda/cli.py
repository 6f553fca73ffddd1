"""Command-line pipeline: ingest, filter, serve, facts, export, kappa, eval, speed.

Each subcommand is a thin wrapper over one module.  Paths come from an
optional TOML config file; flags override.  Exit codes: 0 success,
1 validation error, 2 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace as dc_replace
from pathlib import Path

from . import agreement, corpus, evaluation, export, facts, filtering
from .config import FredaConfig, load_config
from .engine import (
    AnnotationEngine,
    EventLogWriter,
    read_event_log,
    render_speed_table,
    speed_report,
    speed_report_to_json,
    verdict_from_json,
    verdict_to_json,
)
from .errors import FredaError


def _require(value, flag: str):
    if value is None:
        raise ValueError(f"{flag} is required (flag or config)")
    return value


def _build_engine(log_path, schema_path, cfg: FredaConfig, *,
                  attach_sink: bool = False, approach_tag: str = "freda") -> AnnotationEngine:
    schemas = filtering.load_schemas(_require(schema_path, "--schemas"))
    log_path = Path(_require(log_path, "--log"))
    events = read_event_log(log_path) if log_path.exists() else []
    engine = AnnotationEngine.replay(
        events, schemas,
        lease_seconds=cfg.lease_minutes * 60.0,
        approach_tag=approach_tag,
    )
    if attach_sink:
        engine.attach_sink(EventLogWriter(log_path))
    return engine


def cmd_ingest(args, cfg: FredaConfig) -> int:
    out_path = _require(args.out or cfg.corpus_path, "--out")
    with open(args.infile, encoding="utf-8") as fh:
        sentences = list(corpus.read_corpus(fh))
    if not args.skip_dates:
        sentences = [corpus.tag_dates(s) for s in sentences]
    count = corpus.write_sentences_jsonl(sentences, out_path)
    print(f"ingested {count} sentences -> {out_path}")
    return 0


def cmd_filter(args, cfg: FredaConfig) -> int:
    corpus_path = _require(args.corpus or cfg.corpus_path, "--corpus")
    schemas = filtering.load_schemas(_require(args.schemas or cfg.schema_path, "--schemas"))
    kb_dir = args.kb_pairs_dir or cfg.kb_pairs_dir
    if args.relation:
        if args.relation not in schemas:
            raise ValueError(f"unknown relation {args.relation!r}")
        selected = [schemas[args.relation]]
    else:
        selected = list(schemas.values())
    candidates = []
    for schema in selected:
        pairs = filtering.resolve_kb_pairs(schema, kb_dir)
        sentences = corpus.read_sentences_jsonl(corpus_path)
        candidates.extend(
            filtering.select_candidates(sentences, schema, pairs, args.quota))
    count = filtering.write_candidates_jsonl(candidates, args.out)
    print(f"selected {count} candidates -> {args.out}")
    return 0


def _seed_candidates(engine: AnnotationEngine, candidates_path, corpus_path) -> int:
    sentences = {s.sentence_id: s
                 for s in corpus.read_sentences_jsonl(_require(corpus_path, "--corpus"))}
    added = 0
    for cand in filtering.read_candidates_jsonl(candidates_path):
        if cand.sentence_id not in sentences:
            raise ValueError(f"candidate references unknown sentence {cand.sentence_id!r}")
        before = len(engine.events())
        engine.add_candidate(sentences[cand.sentence_id], cand.relation_name)
        added += len(engine.events()) - before
    return added


def cmd_serve(args, cfg: FredaConfig) -> int:
    import uvicorn

    from .server import create_app

    engine = _build_engine(args.log or cfg.event_log_path,
                           args.schemas or cfg.schema_path, cfg, attach_sink=True,
                           approach_tag=args.approach_tag)
    if args.seed_candidates:
        added = _seed_candidates(engine, args.seed_candidates,
                                 args.corpus or cfg.corpus_path)
        print(f"seeded {added} new candidates", file=sys.stderr)
    app = create_app(engine)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def _verdicts_and_engine(args, cfg: FredaConfig):
    """Verdicts either replayed from an event log or read straight from JSONL."""
    if args.log:
        engine = _build_engine(args.log, args.schemas or cfg.schema_path, cfg)
        return engine.verdicts(), engine
    if not args.infile:
        raise ValueError("either --log or --in is required")
    with open(args.infile, encoding="utf-8") as fh:
        verdicts = [verdict_from_json(json.loads(line)) for line in fh if line.strip()]
    return verdicts, None


def cmd_facts(args, cfg: FredaConfig) -> int:
    verdicts, engine = _verdicts_and_engine(args, cfg)
    schemas = filtering.load_schemas(_require(args.schemas or cfg.schema_path, "--schemas"))
    all_facts = []
    for v in verdicts:
        if v.relation_name not in schemas:
            raise ValueError(f"verdict references unknown relation {v.relation_name!r}")
        all_facts.extend(facts.facts_from_verdict(v, schemas[v.relation_name]))
    count = facts.write_facts_jsonl(all_facts, args.out)
    stats = facts.corpus_statistics(verdicts, all_facts)
    relations = len({v.relation_name for v in verdicts})
    overall_kappa = None
    if engine is not None:
        report = agreement.build_agreement_report(engine.states())
        overall_kappa = report.overall[1]
    print(facts.render_statistics(stats, relations=relations, kappa=overall_kappa))
    if args.stats_out:
        payload = facts.statistics_to_json(stats)
        payload["relations"] = relations
        if overall_kappa is not None:
            payload["kappa"] = overall_kappa
        Path(args.stats_out).write_text(json.dumps(payload, indent=2) + "\n")
    if args.verdicts_out:
        with open(args.verdicts_out, "w", encoding="utf-8") as fh:
            for v in verdicts:
                fh.write(json.dumps(verdict_to_json(v), ensure_ascii=False) + "\n")
    print(f"wrote {count} facts -> {args.out}", file=sys.stderr)
    return 0


def cmd_export(args, cfg: FredaConfig) -> int:
    engine = _build_engine(args.log or cfg.event_log_path,
                           args.schemas or cfg.schema_path, cfg)
    ratio = args.ratio if args.ratio is not None else cfg.split_ratio
    seed = args.seed if args.seed is not None else cfg.split_seed
    out_dir = Path(_require(args.out_dir or cfg.export_dir, "--out-dir"))
    out_dir.mkdir(parents=True, exist_ok=True)
    verdicts = engine.verdicts()
    all_facts = []
    sentences_by_id = {}
    for v in verdicts:
        all_facts.extend(facts.facts_from_verdict(v, engine.schemas[v.relation_name]))
        sentences_by_id[(v.sentence_id, v.relation_name)] = dc_replace(
            engine.sentence(v.sentence_id), entities=v.final_entities)
    datasets = []
    for relation in sorted({v.relation_name for v in verdicts}):
        rel_sentences = {
            sid: s for (sid, rel), s in sentences_by_id.items() if rel == relation}
        ds = export.build_relation_dataset(
            relation, [f for f in all_facts if f.relation_name == relation],
            rel_sentences, ratio, seed)
        export.write_examples_jsonl(ds.train, out_dir / f"{relation}.train.jsonl")
        export.write_examples_jsonl(ds.test, out_dir / f"{relation}.test.jsonl")
        datasets.append(ds)
    manifest = export.dataset_manifest_json(datasets, ratio, seed)
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    print(f"exported {len(datasets)} relations -> {out_dir}")
    return 0


def cmd_kappa(args, cfg: FredaConfig) -> int:
    engine = _build_engine(args.log or cfg.event_log_path,
                           args.schemas or cfg.schema_path, cfg)
    report = agreement.build_agreement_report(engine.states())
    print(agreement.render_kappa_table(report))
    if args.out:
        Path(args.out).write_text(
            json.dumps(agreement.report_to_json(report), indent=2) + "\n")
    return 0


def cmd_eval(args, cfg: FredaConfig) -> int:
    gold = list(facts.read_facts_jsonl(args.gold))
    preds = list(evaluation.read_predictions_jsonl(args.pred))
    report = evaluation.evaluate(preds, gold)
    method = "macro" if args.macro else "micro"
    if args.interim:
        subset = [r.strip() for r in args.interim.split(",") if r.strip()]
        evaluation.aggregate(report, subset, "Interim", method=method)
    evaluation.aggregate(report, sorted(report.per_relation), "Total", method=method)
    print(evaluation.render_eval_table(report))
    if args.out:
        Path(args.out).write_text(
            json.dumps(evaluation.report_to_json(report), indent=2) + "\n")
    return 0


def cmd_speed(args, cfg: FredaConfig) -> int:
    engine = _build_engine(args.log or cfg.event_log_path,
                           args.schemas or cfg.schema_path, cfg,
                           approach_tag=args.approach_tag)
    means = speed_report(engine.timing_records())
    print(render_speed_table(means))
    if args.out:
        Path(args.out).write_text(
            json.dumps(speed_report_to_json(means), indent=2) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="freda")
    parser.add_argument("--config", help="TOML config file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse .wexea markup into canonical JSONL")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out")
    p.add_argument("--skip-dates", action="store_true")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("filter", help="select candidate sentences per relation")
    p.add_argument("--corpus")
    p.add_argument("--schemas")
    p.add_argument("--relation")
    p.add_argument("--quota", type=int, default=1000)
    p.add_argument("--kb-pairs-dir")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_filter)

    p = sub.add_parser("serve", help="run the annotation server")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--log")
    p.add_argument("--schemas")
    p.add_argument("--corpus")
    p.add_argument("--seed-candidates")
    p.add_argument("--approach-tag", default="freda")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("facts", help="extract labeled facts from verdicts")
    p.add_argument("--log")
    p.add_argument("--in", dest="infile", help="verdicts JSONL instead of --log")
    p.add_argument("--schemas")
    p.add_argument("--out", required=True)
    p.add_argument("--stats-out")
    p.add_argument("--verdicts-out")
    p.set_defaults(func=cmd_facts)

    p = sub.add_parser("export", help="compile per-relation train/test datasets")
    p.add_argument("--log")
    p.add_argument("--schemas")
    p.add_argument("--out-dir")
    p.add_argument("--ratio", type=float)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("kappa", help="inter-annotator agreement report")
    p.add_argument("--log")
    p.add_argument("--schemas")
    p.add_argument("--out")
    p.set_defaults(func=cmd_kappa)

    p = sub.add_parser("eval", help="score predictions against gold facts")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--interim", help="comma-separated relation subset")
    p.add_argument("--macro", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("speed", help="annotation speed report")
    p.add_argument("--log")
    p.add_argument("--schemas")
    p.add_argument("--approach-tag", default="freda")
    p.add_argument("--out")
    p.set_defaults(func=cmd_speed)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        return args.func(args, cfg)
    except FredaError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return 1
    except (ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: malformed_request: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: io: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
