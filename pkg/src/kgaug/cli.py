"""Command-line interface: augment, assess, coverage, perturb-kg, stats."""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import assess, pipeline
from .embeddings import load_embeddings
from .errors import KgaugError
from .kg import load_kg
from .localize import load_lemma_table, load_stopwords


def _add_kg_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kg-entities", required=True, help="entities.tsv: entity<TAB>category")
    p.add_argument("--kg-triples", required=True, help="triples.tsv: head<TAB>relation<TAB>tail")


def _add_localize_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--embeddings", required=True, help="word-vector text file")
    p.add_argument("--lambda", dest="lam", type=float, default=0.9, help="similarity threshold (default 0.9)")
    p.add_argument("--no-sim-match", action="store_true", help="exact string matching only")
    p.add_argument("--stopwords", help="stopword file, one token per line (replaces the default list)")
    p.add_argument("--lemmas", help="lemma table file: form<TAB>lemma")
    p.add_argument("--mode", choices=["classification", "qa"], default="classification")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kgaug", description="Knowledge-graph-driven text data augmentation")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("augment", help="generate augmented samples from a labeled dataset")
    _add_kg_flags(p)
    _add_localize_flags(p)
    p.add_argument("--input", required=True, help="dataset file: {id, text, label} per line")
    p.add_argument("--output", required=True, help="augmented samples file")
    p.add_argument("--delta", type=float, default=0.75, help="confidence target (default 0.75)")
    p.add_argument("--per-origin", type=int, default=5, help="samples kept per origin (default 5)")
    p.add_argument("--clusters", default="AUTO", help="k for template clustering, or AUTO")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-kger", action="store_true", help="disable the graph-neighborhood view")
    p.add_argument("--no-trainer", action="store_true", help="disable the training-data view")
    p.add_argument("--no-assess", action="store_true", help="skip scoring; select uniformly at random")
    p.add_argument("--requests", help="scoring request file (default: <output>.requests.jsonl)")
    p.add_argument("--report", help="run report file (default: <output>.report.json)")
    p.add_argument("--final", help="final training file when assessment is skipped")

    p = sub.add_parser("assess", help="select scored candidates and build the final training file")
    p.add_argument("--input", required=True, help="original dataset file")
    p.add_argument("--augmented", required=True, help="augmented candidates file")
    p.add_argument("--confidence", required=True, help="confidence file from the scorer")
    p.add_argument("--output", required=True, help="final training file (originals + selections)")
    p.add_argument("--strategy", choices=[s.value for s in assess.Strategy], default="delta-k")
    p.add_argument("--delta", type=float, default=0.75)
    p.add_argument("--per-origin", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=["classification", "qa"], default="classification")

    p = sub.add_parser("coverage", help="novel-entity coverage of augmented texts")
    _add_kg_flags(p)
    _add_localize_flags(p)
    p.add_argument("--train", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--augmented", required=True)

    p = sub.add_parser("perturb-kg", help="randomly corrupt n%% of categories and relation types")
    _add_kg_flags(p)
    p.add_argument("--n", type=float, required=True, help="percentage in [0, 100]")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-entities", required=True)
    p.add_argument("--out-triples", required=True)

    p = sub.add_parser("stats", help="entity/category/relation/triple counts")
    _add_kg_flags(p)

    return parser


def _run_config(args: argparse.Namespace) -> pipeline.RunConfig:
    clusters = None if str(args.clusters).upper() == "AUTO" else int(args.clusters)
    return pipeline.RunConfig(
        lam=args.lam,
        delta=args.delta,
        per_origin=args.per_origin,
        clusters=clusters,
        seed=args.seed,
        sim_match=not args.no_sim_match,
        use_kger=not args.no_kger,
        use_trainer=not args.no_trainer,
        use_assess=not args.no_assess,
        mode=args.mode,
        stopwords=load_stopwords(args.stopwords) if args.stopwords else None,
        lemma_table=load_lemma_table(args.lemmas) if args.lemmas else None,
    )


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        if args.command == "augment":
            result = pipeline.run_augment(
                _run_config(args),
                args.kg_entities,
                args.kg_triples,
                args.embeddings,
                args.input,
                args.output,
                requests_path=args.requests,
                report_path=args.report,
                final_path=args.final,
            )
            print(json.dumps({k: v for k, v in result.report.items() if k != "config"}, ensure_ascii=False))
        elif args.command == "assess":
            cfg = assess.SelectionConfig(args.delta, args.per_origin, assess.Strategy(args.strategy))
            chosen = pipeline.resume_assess(
                args.input, args.augmented, args.confidence, args.output, cfg, args.seed, args.mode
            )
            print(json.dumps({"selected": len(chosen), "output": args.output}))
        elif args.command == "coverage":
            g = load_kg(args.kg_entities, args.kg_triples)
            table = load_embeddings(args.embeddings)
            result = pipeline.novel_entity_coverage(
                args.train,
                args.test,
                args.augmented,
                g,
                table,
                args.lam,
                mode=args.mode,
                stopwords=load_stopwords(args.stopwords) if args.stopwords else None,
                lemma_table=load_lemma_table(args.lemmas) if args.lemmas else None,
            )
            print(
                json.dumps(
                    {
                        "novel": result.novel,
                        "covered": result.covered,
                        "coverage": result.coverage,
                        "novelEmpty": result.novel_empty,
                    }
                )
            )
        elif args.command == "perturb-kg":
            pipeline.perturb_kg_files(
                args.kg_entities, args.kg_triples, args.n, args.seed, args.out_entities, args.out_triples
            )
            print(json.dumps({"entities": args.out_entities, "triples": args.out_triples}))
        elif args.command == "stats":
            print(json.dumps(load_kg(args.kg_entities, args.kg_triples).stats()))
    except KgaugError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
