"""Command line entry point: ``p2baudit stats|assess|evaluate|report``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .checklist import questions_for
from .common import Strategy
from .corpus import corpus_stats, load_manifest
from .dox import DEFAULT_THETA
from .errors import AuditError
from .evaluation.labels import load_expert_labels, load_participant_ratings, majority_labels
from .evaluation.survey import DEFAULT_THRESHOLDS
from .mocks import mock_embedder, mock_generator
from .pipeline import (
    MOCK_TIMESTAMP,
    AuditSettings,
    assess_direct,
    assess_retrieval,
    load_record,
    record_header,
    record_paths,
    write_record,
)
from .providers import GenerationConfig, build_embedder, build_generator, load_provider_config
from .reports import (
    agreement_matrix,
    assessment_summary,
    score_alignment,
    survey_table,
    survey_tests,
    to_text,
    to_tsv,
)
from .retrieval import DEFAULT_TOP_K

logger = logging.getLogger("p2baudit")

STRATEGIES = {"direct": [Strategy.DIRECT], "dox": [Strategy.RETRIEVAL_DOX],
              "both": [Strategy.DIRECT, Strategy.RETRIEVAL_DOX]}


def _write(out_dir, name, text):
    if out_dir is None:
        return
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / name).write_text(text, encoding="utf-8")


def cmd_stats(args) -> int:
    rows = [["Platform", "No. of Links", "Avg. Words/Doc"]]
    for path in args.manifests:
        corpus = load_manifest(path)
        s = corpus_stats(corpus)
        rows.append([corpus.platform_name, s.link_count, f"{s.avg_words_per_doc}"])
    sys.stdout.write(to_text(rows))
    _write(args.out, "corpus_stats.tsv", to_tsv(rows))
    return 0


def _providers(args):
    cfg = load_provider_config(args.config) if args.config else None
    if args.mock:
        cap = cfg.concurrency_cap if cfg else 4
        gen_cfg = cfg.generation_config() if cfg and cfg.generation else GenerationConfig("mock")
        return mock_generator(cap), mock_embedder(), gen_cfg, "mock", cap, MOCK_TIMESTAMP
    if cfg is None:
        raise AuditError("--config is required unless --mock is given")
    strategies = STRATEGIES[args.strategy]
    generator = build_generator(cfg)
    embedder = build_embedder(cfg) if Strategy.RETRIEVAL_DOX in strategies else None
    emb_id = cfg.embedding.model_id if cfg.embedding else ""
    return generator, embedder, cfg.generation_config(), emb_id, cfg.concurrency_cap, None


def _failed_record(corpus, strategy, model_id, settings, exc):
    rec = record_header(corpus, strategy, model_id, settings)
    rec["questions"] = []
    rec["failures"] = [{"question_id": q.id, "error": type(exc).__name__, "message": str(exc)}
                       for q in questions_for(corpus.platform_type)]
    return rec


def cmd_assess(args) -> int:
    corpora = [load_manifest(p) for p in args.manifests]
    generator, embedder, gen_cfg, emb_id, cap, stamp = _providers(args)
    settings = AuditSettings(theta=args.theta, k=args.k, aspect=args.aspect, max_workers=cap, timestamp=stamp)
    records, failures = [], []
    for corpus in corpora:
        for strategy in STRATEGIES[args.strategy]:
            try:
                if strategy is Strategy.DIRECT:
                    rec = assess_direct(corpus, generator, gen_cfg, settings)
                else:
                    rec = assess_retrieval(corpus, generator, embedder, gen_cfg, settings,
                                           embedding_model_id=emb_id)
            except AuditError as exc:
                rec = _failed_record(corpus, strategy, gen_cfg.model_id, settings, exc)
            path = write_record(rec, args.out)
            records.append(rec)
            for f in rec["failures"]:
                failures.append({"platform": corpus.platform_name, "strategy": strategy.value, **f})
                print(f"{corpus.platform_name} / {strategy.value} / {f['question_id']}: "
                      f"{f['error']}: {f['message']}", file=sys.stderr)
            logger.info("wrote %s", path)
    summary = to_text(assessment_summary(records))
    _write(args.out, "assessment_summary.tsv", to_tsv(assessment_summary(records)))
    _write(args.out, "failures.json", json.dumps(failures, indent=2, sort_keys=True) + "\n")
    sys.stdout.write(summary)
    return 1 if failures else 0


def cmd_evaluate(args) -> int:
    records = [load_record(p) for p in record_paths(args.records)]
    truth = majority_labels(load_expert_labels(args.labels)) if args.labels else {}
    out = []
    matrix = agreement_matrix(records, truth, seed=args.seed)
    rows = list(matrix.rows())
    _write(args.out, "agreement.tsv", to_tsv(rows))
    counts = {f"{p}|{c}": {"matches": v.matches, "total": v.total, "rate": str(v.rate)}
              for (p, c), v in matrix.cells.items()}
    for c in matrix.columns:
        pooled = matrix.pooled(c)
        counts[f"All|{c}"] = {"matches": pooled.matches, "total": pooled.total, "rate": str(pooled.rate)}
    _write(args.out, "agreement.json", json.dumps(counts, indent=2, sort_keys=True) + "\n")
    out.append("Agreement with the majority of experts\n" + to_text(rows))

    alignment = score_alignment(records, truth)
    if len(alignment) > 1:
        _write(args.out, "score_alignment.tsv", to_tsv(alignment))
        out.append("Retrieval scores by expert answer (Yes vs No)\n" + to_text(alignment))

    if args.ratings:
        ratings = load_participant_ratings(args.ratings)
        table = survey_table(ratings, args.min_minutes)
        _write(args.out, "survey_summary.tsv", to_tsv(table))
        out.append(f"Participant agreement (read >= {args.min_minutes:g} min)\n" + to_text(table))
        tests = survey_tests(ratings, thresholds=DEFAULT_THRESHOLDS)
        _write(args.out, "survey_tests.tsv", to_tsv(tests))
        out.append("One-sided Mann-Whitney U by reading-time threshold\n" + to_text(tests))

    text = "\n".join(out)
    _write(args.out, "summary.txt", text)
    sys.stdout.write(text)
    return 0


def cmd_report(args) -> int:
    records = [load_record(p) for p in record_paths(args.records)]
    rows = assessment_summary(records)
    _write(args.out, "assessment_summary.tsv", to_tsv(rows))
    sys.stdout.write(to_text(rows))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="p2baudit", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("stats", help="document counts and mean words per document")
    p.add_argument("manifests", nargs="+")
    p.add_argument("--out")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("assess", help="run assessment strategies and write evidence records")
    p.add_argument("manifests", nargs="+")
    p.add_argument("--config")
    p.add_argument("--strategy", choices=sorted(STRATEGIES), default="both")
    p.add_argument("--out", required=True)
    p.add_argument("--mock", action="store_true", help="use deterministic mock providers")
    p.add_argument("--theta", type=float, default=DEFAULT_THETA)
    p.add_argument("--k", type=int, default=DEFAULT_TOP_K)
    p.add_argument("--aspect")
    p.set_defaults(func=cmd_assess)

    p = sub.add_parser("evaluate", help="compare records with expert labels and summarise the survey")
    p.add_argument("records", nargs="+", help="record files or directories")
    p.add_argument("--labels", required=True, help="expert label CSV")
    p.add_argument("--ratings", help="participant rating CSV")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--min-minutes", type=float, default=0.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("report", help="summarise assessment records")
    p.add_argument("records", nargs="+")
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except AuditError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
