"""Command-line interface: ingest, serve, recommend, simulate."""

from __future__ import annotations

import json
import os
import sys

import click

from .config import ApiConfig, load_config
from .corpus import CorpusError, load_corpus
from .session import EngineConfig, FolderEngine, SessionError
from .service import card_to_json
from . import simharness


@click.group()
def main():
    """Author-centric literature discovery engine."""


def _load_or_die(corpus_path):
    try:
        return load_corpus(corpus_path)
    except CorpusError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)


def _config(config_path, **overrides) -> ApiConfig:
    cfg = load_config(config_path)
    for key, value in overrides.items():
        if value is not None:
            setattr(cfg, key, value)
    return cfg


@main.command()
@click.argument("corpus", type=click.Path())
def ingest(corpus):
    """Load a corpus snapshot and print its index statistics."""
    index = _load_or_die(corpus)
    stats = {
        "papers": len(index),
        "authors": len(index.authors_by_id),
        "dangling_ref_count": index.dangling_ref_count,
        "embedding_dim": index.embedding_dim,
        "citation_edges": sum(len(s) for s in index.citing_index.values()),
    }
    click.echo(json.dumps(stats, indent=1))


@main.command()
@click.option("--corpus", required=True, type=click.Path())
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--port", type=int, default=None)
@click.option("--host", default=None)
@click.option("--seed", type=int, default=None)
@click.option("--now", "now_override", type=int, default=None,
              help="Days-since-epoch override for the recency window.")
@click.option("--snapshot-dir", type=click.Path(), default=None)
def serve(corpus, config_path, port, host, seed, now_override, snapshot_dir):
    """Run the HTTP service."""
    from .service import serve as run_service

    cfg = _config(config_path, corpus_path=corpus, port=port, host=host,
                  seed=seed, now_override=now_override,
                  snapshot_dir=snapshot_dir)
    index = _load_or_die(corpus)
    run_service(index, cfg)


@main.command()
@click.option("--corpus", required=True, type=click.Path())
@click.option("--folder-file", required=True, type=click.Path(),
              help="JSON file with topic_name, seed_paper_ids, and optional "
                   "committee / feedback / user_author_id.")
@click.option("--batches", "n_batches", type=int, default=1)
@click.option("--seed", type=int, default=0)
@click.option("--now", "now_override", type=int, default=None)
@click.option("--config", "config_path", type=click.Path(), default=None)
@click.option("--output", type=click.Path(), default=None,
              help="Write the JSON report here instead of stdout.")
def recommend(corpus, folder_file, n_batches, seed, now_override, config_path,
              output):
    """Print successive recommendation batches for a folder, deterministically."""
    index = _load_or_die(corpus)
    try:
        with open(folder_file, encoding="utf-8") as fh:
            spec = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        click.echo(f"error: invalid folder file: {exc}", err=True)
        sys.exit(2)
    cfg = _config(config_path, seed=seed, now_override=now_override)
    engine = FolderEngine(index, cfg.engine_config())
    try:
        folder = engine.create_folder(
            spec.get("folder_id", "cli"), spec.get("topic_name", "cli"),
            spec["seed_paper_ids"])
        folder.user_author_id = spec.get("user_author_id")
        for pid in spec.get("saved_paper_ids", []):
            engine.record_feedback(folder, "SavePaper", pid)
        for pid in spec.get("downvoted_paper_ids", []):
            engine.record_feedback(folder, "DownvotePaper", pid)
        for aid in spec.get("committee", []):
            engine.record_feedback(folder, "SaveAuthor", aid)
    except (SessionError, KeyError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    report = {"folder_id": folder.folder_id, "seed": seed, "batches": []}
    for i in range(n_batches):
        cards = engine.next_batch(folder)
        report["batches"].append({
            "batch_index": i,
            "model_version": folder.model_version,
            "cards": [card_to_json(c) for c in cards],
        })
    text = json.dumps(report, indent=1, sort_keys=True)
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        click.echo(text)


@main.command()
@click.option("--out-dir", required=True, type=click.Path())
@click.option("--communities", type=int, default=5)
@click.option("--authors-per-community", type=int, default=20)
@click.option("--papers-per-author", type=int, default=20)
@click.option("--intra-coauthor-prob", type=float, default=0.5)
@click.option("--intra-cite-prob", type=float, default=0.6)
@click.option("--cross-cite-prob", type=float, default=0.05)
@click.option("--policies", default="greedy-community-0,random")
@click.option("--steps", type=int, default=3)
@click.option("--seed", type=int, default=0)
@click.option("--no-figures", is_flag=True, default=False)
def simulate(out_dir, communities, authors_per_community, papers_per_author,
             intra_coauthor_prob, intra_cite_prob, cross_cite_prob, policies,
             steps, seed, no_figures):
    """Generate a planted-community corpus and run scripted agents on it."""
    os.makedirs(out_dir, exist_ok=True)
    params = simharness.SimParams(
        n_communities=communities,
        authors_per_community=authors_per_community,
        papers_per_author=papers_per_author,
        intra_coauthor_prob=intra_coauthor_prob,
        intra_cite_prob=intra_cite_prob,
        cross_cite_prob=cross_cite_prob,
        seed=seed,
    )
    corpus_path = os.path.join(out_dir, "corpus.jsonl")
    try:
        simharness.generate_corpus(params, corpus_path)
    except simharness.SimError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(1)
    index = load_corpus(corpus_path)
    runs = []
    for policy in [p.strip() for p in policies.split(",") if p.strip()]:
        try:
            runs.append(simharness.run_agent(index, policy, steps, seed))
        except simharness.SimError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)
    metrics_path = os.path.join(out_dir, "metrics.csv")
    simharness.write_metrics_csv(runs, metrics_path)
    click.echo(f"corpus: {corpus_path}")
    click.echo(f"metrics: {metrics_path}")
    if not no_figures:
        from .report import render_figures

        for path in render_figures(runs, out_dir):
            click.echo(f"figure: {path}")


if __name__ == "__main__":
    main()
