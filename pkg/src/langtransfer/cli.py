"""Command-line pipeline orchestration.

Every stage reads and writes plain files, so any stage can be replaced by
an external tool producing the same formats (notably `score`, whose matrix
TSV can come from a real neural pipeline). All randomness is seed
controlled; rerunning a subcommand with identical inputs overwrites its
outputs with identical content.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import corpus, proxy_mlm, selection, service, subword, transfer_graph
from .errors import InfeasibleError, InputError, ToolkitError, ValidationError

EXIT_VALIDATION = 1
EXIT_IO = 2
EXIT_INFEASIBLE = 3


def load_language_metas(path) -> dict[str, corpus.LanguageMeta]:
    """langs.tsv: code<TAB>family<TAB>script, optional header."""
    p = Path(path)
    if not p.exists():
        raise InputError(f"language metadata file not found: {p}")
    metas: dict[str, corpus.LanguageMeta] = {}
    for ln, line in enumerate(p.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip() or line.startswith("#"):
            continue
        cells = line.split("\t")
        if cells[0] == "code":
            continue
        if len(cells) != 3:
            raise ValidationError(f"{p}:{ln}: expected 3 columns")
        code, family, script = (c.strip() for c in cells)
        metas[code] = corpus.LanguageMeta(code=code, family=family, script=script)
    return metas


@click.group()
def main():
    """Build, analyze, and serve pretraining transfer graphs."""


def _run(fn):
    try:
        fn()
    except InfeasibleError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(EXIT_INFEASIBLE)
    except InputError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(EXIT_IO)
    except (ValidationError, ToolkitError) as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(EXIT_VALIDATION)
    except OSError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(EXIT_IO)


@main.command()
@click.option("--raw", "raw_dir", required=True, type=click.Path())
@click.option("--budget", default=corpus.DEFAULT_BUDGET, show_default=True, type=int)
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--meta", "meta_path", default=None, type=click.Path(), help="langs.tsv with code/family/script")
def sample(raw_dir, budget, seed, out_dir, meta_path):
    """Sample balanced partitions from per-language raw corpus directories."""

    def body():
        root = Path(raw_dir)
        if not root.is_dir():
            raise InputError(f"raw corpus root not found: {root}")
        metas = load_language_metas(meta_path) if meta_path else {}
        lang_dirs = sorted(d for d in root.iterdir() if d.is_dir())
        if not lang_dirs:
            raise InputError(f"no language directories under {root}")
        for d in lang_dirs:
            code = d.name
            meta = metas.get(code) or corpus.LanguageMeta(
                code=code, family="unknown", script="unknown"
            )
            raw = corpus.load_raw_corpus(d, meta)
            part = corpus.sample_partition(raw, budget=budget, seed=seed)
            corpus.write_partition(part, out_dir)
            note = " (underfull)" if part.char_count < budget else ""
            click.echo(f"{code}\t{part.char_count} chars{note}")

    _run(body)


@main.command("validate-balance")
@click.option("--sample", "sample_dir", required=True, type=click.Path())
@click.option("--full", "full_dir", required=True, type=click.Path())
@click.option("--vocab", "vocab_path", required=True, type=click.Path())
@click.option("--threshold", default=corpus.DEFAULT_EMD_THRESHOLD, show_default=True, type=float)
@click.option("--out", "out_path", default=None, type=click.Path())
def validate_balance_cmd(sample_dir, full_dir, vocab_path, threshold, out_path):
    """Compare sampled partitions against full corpora; TSV report."""

    def body():
        vocab = subword.SubwordVocabulary.load(vocab_path)
        partitions = corpus.list_partitions(sample_dir)
        if not partitions:
            raise InputError(f"no partitions in {sample_dir}")
        lines = ["language\tdist_name\temd\tpassed"]
        all_passed = True
        for part in partitions:
            full_path = Path(full_dir) / part.meta.code
            raw = corpus.load_raw_corpus(full_path, part.meta)
            sample_dist = corpus.length_distributions(part, vocab)
            full_dist = corpus.length_distributions(raw, vocab)
            report = corpus.validate_balance(sample_dist, full_dist, threshold)
            all_passed = all_passed and report.passed
            for name, emd in report.per_distribution_emd.items():
                lines.append(
                    f"{part.meta.code}\t{name}\t{emd:.6f}\t{str(emd < threshold).lower()}"
                )
        text = "\n".join(lines) + "\n"
        if out_path:
            Path(out_path).write_text(text, encoding="utf-8")
        click.echo(text, nl=False)
        if not all_passed:
            sys.exit(EXIT_VALIDATION)

    _run(body)


@main.command("train-vocab")
@click.option("--partitions", "part_dir", required=True, type=click.Path())
@click.option("--size", default=8000, show_default=True, type=int)
@click.option("--out", "out_path", required=True, type=click.Path())
def train_vocab(part_dir, size, out_path):
    """Train the shared subword vocabulary over all partitions."""

    def body():
        parts = corpus.list_partitions(part_dir)
        if not parts:
            raise InputError(f"no partitions in {part_dir}")
        vocab = subword.train_vocabulary(parts, size)
        vocab.save(out_path)
        click.echo(f"vocabulary of {len(vocab)} tokens written to {out_path}")

    _run(body)


@main.command()
@click.option("--partitions", "part_dir", required=True, type=click.Path())
@click.option("--vocab", "vocab_path", required=True, type=click.Path())
@click.option("--seeds", default="0", show_default=True, help="comma-separated seed list")
@click.option("--regime", default="joint", show_default=True, type=click.Choice(["joint", "sequential"]))
@click.option("--order", default=3, show_default=True, type=int)
@click.option("--alpha", default=0.1, show_default=True, type=float)
@click.option("--decay", default=0.5, show_default=True, type=float)
@click.option("--heldout", default=0.1, show_default=True, type=float,
              help="fraction of each partition reserved for evaluation")
@click.option("--out", "out_path", required=True, type=click.Path())
def score(part_dir, vocab_path, seeds, regime, order, alpha, decay, heldout, out_path):
    """Score all monolingual and bilingual configurations with the proxy."""

    def body():
        vocab = subword.SubwordVocabulary.load(vocab_path)
        parts = corpus.list_partitions(part_dir)
        seed_list = [int(s) for s in seeds.split(",") if s.strip()]
        config = proxy_mlm.ProxyConfig(
            order=order, smoothing_alpha=alpha, decay=decay, heldout_frac=heldout
        )
        matrix = proxy_mlm.score_all_pairs(
            parts, vocab, config=config, seeds=seed_list, regime=regime
        )
        proxy_mlm.write_score_matrix(matrix, out_path)
        click.echo(
            f"scored {len(matrix.languages)} languages, "
            f"{len(matrix.bilingual)} directed entries -> {out_path}"
        )

    _run(body)


@main.command("ingest-matrix")
@click.option("--in", "in_path", required=True, type=click.Path())
@click.option("--orientation", required=True, type=click.Choice(list(proxy_mlm.ORIENTATIONS)))
@click.option("--meta", "meta_path", default=None, type=click.Path())
def ingest_matrix(in_path, orientation, meta_path):
    """Validate an externally produced score matrix TSV."""

    def body():
        known = None
        if meta_path:
            known = list(load_language_metas(meta_path))
        matrix = proxy_mlm.ingest_score_matrix(in_path, known_codes=known)
        declared = _file_orientation(in_path)
        if declared != orientation:
            raise ValidationError(
                f"file declares orientation={declared}, flag says {orientation}"
            )
        click.echo(
            f"ok: {len(matrix.languages)} languages, {len(matrix.bilingual)} "
            f"bilingual entries, {len(matrix.mono)} monolingual entries"
        )

    _run(body)


def _file_orientation(path) -> str | None:
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("#") and "orientation=" in line:
            return line.split("orientation=", 1)[1].strip()
    return None


@main.command("build-graph")
@click.option("--matrix", "matrix_path", required=True, type=click.Path())
@click.option("--meta", "meta_path", default=None, type=click.Path())
@click.option("--wals", "wals_path", default=None, type=click.Path())
@click.option("--out", "out_path", required=True, type=click.Path())
def build_graph_cmd(matrix_path, meta_path, wals_path, out_path):
    """Build the full transfer graph document from a score matrix."""

    def body():
        metas = load_language_metas(meta_path) if meta_path else {}
        matrix = proxy_mlm.ingest_score_matrix(matrix_path, known_codes=list(metas) if metas else None)
        graph = transfer_graph.build_graph(matrix, metas)
        if wals_path:
            graph = service.attach_wals(graph, service.load_wals(wals_path))
        transfer_graph.export_graph(graph, out_path)
        click.echo(
            f"graph with {len(graph.nodes)} nodes and {len(graph.edges)} edges -> {out_path}"
        )

    _run(body)


@main.command()
@click.option("--graph", "graph_path", required=True, type=click.Path())
def analyze(graph_path):
    """Print reciprocity, mono correlations, bins, and factor chi-squares."""

    def body():
        graph = transfer_graph.load_graph(graph_path)
        r, test = transfer_graph.reciprocity_correlation(graph)
        click.echo(f"reciprocity: r={r:.4f} t={test.statistic:.3f} p={test.p_value:.4g}")
        for name, (rr, tt) in transfer_graph.mono_correlations(graph).items():
            click.echo(f"mono {name}: r={rr:.4f} t={tt.statistic:.3f} p={tt.p_value:.4g}")
        hist = transfer_graph.bin_histogram(graph)
        click.echo(
            "bins: " + " ".join(f"{b.value}={c}" for b, c in hist.items())
        )
        for name, (table, test_) in transfer_graph.script_family_analysis(graph).items():
            click.echo(
                f"factor {name}: chi2={test_.statistic:.4f} df={test_.df} p={test_.p_value:.4g}"
                + (" (degenerate)" if test_.degenerate else "")
            )

    _run(body)


@main.command()
@click.option("--graph", "graph_path", required=True, type=click.Path())
@click.option("--k", default=4, show_default=True, type=int)
@click.option("--mode", default="most_donating", show_default=True, type=click.Choice(list(selection.SELECTION_MODES)))
@click.option("--min-families", default=selection.DEFAULT_MIN_FAMILIES, show_default=True, type=int)
@click.option("--exclude", default="", help="comma-separated codes never selected")
@click.option("--force-include", default="", help="comma-separated codes always selected")
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--recipients-high", default="", help="comma-separated high-recipience set")
@click.option("--recipients-low", default="", help="comma-separated low-recipience set")
@click.option("--budget", default=selection.DEFAULT_BUDGET_CHARS, show_default=True, type=int)
@click.option("--id", "config_id", default=None)
@click.option("--out", "out_path", default=None, type=click.Path())
def select(graph_path, k, mode, min_families, exclude, force_include, seed,
           recipients_high, recipients_low, budget, config_id, out_path):
    """Select a donor set and emit a pretraining configuration manifest."""

    def body():
        graph = transfer_graph.load_graph(graph_path)
        excluded = [c for c in exclude.split(",") if c]
        forced = [c for c in force_include.split(",") if c]
        donors = selection.select_pretrain_set(
            graph, k=k, mode=mode, min_families=min_families,
            excluded=excluded, seed=seed, force_include=forced,
        )
        config = selection.PretrainConfig(
            id=config_id or mode,
            donors=tuple(donors),
            recipients_high=tuple(c for c in recipients_high.split(",") if c),
            recipients_low=tuple(c for c in recipients_low.split(",") if c),
            budget_chars=budget,
            mode=mode,
        )
        if out_path:
            selection.write_config_manifest(config, out_path)
        click.echo(f"donors: {','.join(donors) if donors else '(none)'}")
        if config.languages:
            click.echo(f"per-language allocation: {config.per_language_chars} chars")

    _run(body)


@main.command("check-hypotheses")
@click.option("--graph", "graph_path", required=True, type=click.Path())
@click.option("--results", "results_path", required=True, type=click.Path())
@click.option("--configs", "config_paths", required=True, multiple=True, type=click.Path())
@click.option("--out", "out_path", default=None, type=click.Path())
def check_hypotheses(graph_path, results_path, config_paths, out_path):
    """Evaluate the recipience and donation hypotheses on ingested results."""

    def body():
        graph = transfer_graph.load_graph(graph_path)
        configs = [selection.read_config_manifest(p) for p in config_paths]
        by_mode = {c.mode: c for c in configs}
        per_task = selection.load_downstream_results(results_path)
        report = []
        for task, results in sorted(per_task.items()):
            entries = {}
            first = configs[0]
            if first.recipients_high and first.recipients_low:
                h = selection.check_recipience_hypothesis(
                    results,
                    [c.id for c in configs],
                    first.recipients_high,
                    first.recipients_low,
                )
                entries["Eq9"] = h
            if all(m in by_mode for m in ("most_donating", "random", "least_donating")):
                shared = tuple(
                    sorted(set(first.recipients_high) | set(first.recipients_low))
                )
                entries["Eq10"] = selection.check_donation_hypothesis(
                    results,
                    by_mode["most_donating"].id,
                    by_mode["random"].id,
                    by_mode["least_donating"].id,
                    shared,
                )
            for hid, h in entries.items():
                tie_note = f" ties={','.join(h.ties)}" if h.ties else ""
                click.echo(
                    f"{task} {hid}: {h.satisfied} margins="
                    + ",".join(f"{m:+.4f}" for m in h.margins)
                    + tie_note
                )
                report.append({"task": task, **service._hypothesis_doc(h)})
        if out_path:
            Path(out_path).write_text(
                json.dumps(report, indent=1) + "\n", encoding="utf-8"
            )

    _run(body)


@main.command()
@click.option("--workspace", "workspace_dir", required=True, type=click.Path())
@click.option("--bind", default="127.0.0.1:8000", show_default=True)
@click.option("--cors-origin", default=None)
def serve(workspace_dir, bind, cors_origin):
    """Serve a built workspace over HTTP for the explorer."""

    def body():
        ws = service.load_workspace(workspace_dir)
        service.serve(ws, bind=bind, cors_origin=cors_origin)

    _run(body)


if __name__ == "__main__":
    main()
