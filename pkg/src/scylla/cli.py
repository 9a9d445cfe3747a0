"""Command line entry point.

Subcommands:

    scylla lex validate --lexicon PATH [--schemas PATH]
    scylla daisy --conllu PATH --lexicon PATH [--language L] [--dump-graph P] [--figure P]
    scylla translate --mode s|t --conllu PATH --lexicon PATH --provider CFG --target L ...
    scylla eval --metric bleu|ter|hter --hyp PATH --ref PATH [--post-edits P ...] ...

Exit codes: 0 success, 1 input or validation error, 2 provider failure
after retries.  Diagnostics go to stderr; results go to stdout or --out.
Flag values take precedence over SCYLLA_* environment variables.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from scylla import __version__
from scylla.daisy import assignments_for_sentence
from scylla.ingest import ConlluError, parse_conllu
from scylla.lexicon import LexiconError, collect_issues, load_lexicon, load_tqr_schemas
from scylla.metrics import MetricsError, display_percent, evaluate_corpus, hter
from scylla.providers import ProviderError, TransportError, load_dictionary, load_provider
from scylla.scylla_s import translate_s_with_hybrid
from scylla.scylla_t import translate_t

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_PROVIDER = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _env(name: str, default=None):
    return os.environ.get(f"SCYLLA_{name}", default)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="scylla", description="Frame-semantic terminology injection for MT")
    parser.add_argument("--version", action="version", version=f"scylla {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    lex = sub.add_parser("lex", help="lexicon utilities")
    lex_sub = lex.add_subparsers(dest="lex_command", required=True)
    validate = lex_sub.add_parser("validate", help="check a lexicon file against every invariant")
    validate.add_argument("--lexicon", required=True)
    validate.add_argument("--schemas", help="override the bundled TQR schema table")

    daisy_p = sub.add_parser("daisy", help="assign frames to the lemmas of parsed sentences")
    daisy_p.add_argument("--conllu", required=True)
    daisy_p.add_argument("--lexicon", required=True)
    daisy_p.add_argument("--language", default="br-pt")
    daisy_p.add_argument("--dump-graph", help="write the deterministic graph edge list here")
    daisy_p.add_argument("--figure", help="render the activation graph(s) to this PNG path")
    daisy_p.add_argument("--out")

    tr = sub.add_parser("translate", help="translate sentences with terminology injection")
    tr.add_argument("--mode", choices=["s", "t"], required=True)
    tr.add_argument("--conllu", required=True)
    tr.add_argument("--lexicon", required=True)
    tr.add_argument("--provider", required=True)
    tr.add_argument("--dictionary")
    tr.add_argument("--source", default="br-pt")
    tr.add_argument("--target", required=True)
    tr.add_argument("--n-best", type=int, default=None)
    tr.add_argument("--jw-threshold", type=float, default=None)
    tr.add_argument("--jobs", type=int, default=1)
    tr.add_argument("--trace", help="JSON-lines trace (injected spans / candidate scores)")
    tr.add_argument("--out")

    ev = sub.add_parser("eval", help="score hypotheses with BLEU, TER or HTER")
    ev.add_argument("--metric", choices=["bleu", "ter", "hter"], required=True)
    ev.add_argument("--hyp", required=True)
    ev.add_argument("--ref")
    ev.add_argument("--post-edits", nargs="+", default=[])
    ev.add_argument("--percent", action="store_true", help="display HTER as a percentage too")
    ev.add_argument("--jsonl", help="write full-precision JSON lines here ('-' for stdout)")
    ev.add_argument("--figures", help="render score charts into this directory")
    ev.add_argument("--out")
    return parser


def _read_lines(path: str) -> list[str]:
    return Path(path).read_text("utf-8").splitlines()


def _write_out(lines: list[str], out: str | None):
    text = "\n".join(lines) + ("\n" if lines else "")
    if out:
        Path(out).write_text(text, "utf-8")
    else:
        sys.stdout.write(text)


def _cmd_lex_validate(args) -> int:
    schemas = load_tqr_schemas(args.schemas) if args.schemas else None
    issues = collect_issues(args.lexicon, schemas=schemas)
    if issues:
        for issue in issues:
            sys.stderr.write(json.dumps(issue.as_dict(), ensure_ascii=False) + "\n")
        return EXIT_INPUT
    lexicon = load_lexicon(args.lexicon, schemas=schemas)
    print(
        f"ok: {len(lexicon.frames)} frames, {len(lexicon.frame_elements)} frame elements, "
        f"{len(lexicon.lexical_units)} lexical units, {len(lexicon.tqrs)} qualia relations"
    )
    return EXIT_OK


def _cmd_daisy(args) -> int:
    lexicon = load_lexicon(args.lexicon)
    sentences = parse_conllu(Path(args.conllu).read_text("utf-8"))
    lines = []
    dumps = []
    graphs = []
    for sentence in sentences:
        assignments, graph, _ = assignments_for_sentence(sentence, lexicon, args.language)
        graphs.append((sentence, graph))
        for a in assignments:
            score = a.lu_scores[a.chosen_lu]
            lines.append(
                f"{sentence.sent_id}\t{a.lemma_span.surface_lemma}\t{a.chosen_frame}\t{a.chosen_lu}\t{score:.9f}"
            )
        dumps.append(f"# sentence {sentence.sent_id}\n{graph.dump()}")
    _write_out(lines, args.out)
    if args.dump_graph:
        Path(args.dump_graph).write_text("".join(dumps), "utf-8")
    if args.figure:
        from scylla.report import render_graph_figure

        base = Path(args.figure)
        for i, (sentence, graph) in enumerate(graphs):
            target = base if len(graphs) == 1 else base.with_name(f"{base.stem}_{i + 1}{base.suffix}")
            render_graph_figure(graph, target, title=sentence.text or sentence.sent_id)
    return EXIT_OK


def _cmd_translate(args) -> int:
    lexicon = load_lexicon(args.lexicon)
    provider = load_provider(args.provider)
    dictionary = load_dictionary(args.dictionary) if args.dictionary else None
    sentences = parse_conllu(Path(args.conllu).read_text("utf-8"))

    n_best = args.n_best if args.n_best is not None else int(_env("N_BEST", 5))
    jw_threshold = args.jw_threshold if args.jw_threshold is not None else float(_env("JW_THRESHOLD", 0.85))

    def one(indexed):
        i, sentence = indexed
        if args.mode == "s":
            text, hybrid = translate_s_with_hybrid(
                sentence, lexicon, provider, args.target, source_language=args.source
            )
            spans = [
                {
                    "sentence": sentence.sent_id,
                    "span": [s.span_start, s.span_end],
                    "source_lu": s.source_lu,
                    "injected_lu": s.injected_lu,
                    "surface": s.surface,
                }
                for s in hybrid.injected_spans
            ]
            return text, spans
        trace = None
        if args.trace:
            trace = args.trace if len(sentences) == 1 else f"{args.trace}.{i + 1}"
        return (
            translate_t(
                sentence,
                lexicon,
                provider,
                dictionary,
                target_language=args.target,
                n_best=n_best,
                jw_threshold=jw_threshold,
                source_language=args.source,
                trace_path=trace,
            ),
            None,
        )

    # worker pool keeps input order regardless of completion order
    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(one, enumerate(sentences)))
    else:
        results = [one(item) for item in enumerate(sentences)]
    _write_out([text for text, _ in results], args.out)
    if args.mode == "s" and args.trace:
        rows = [span for _, spans in results for span in spans or []]
        _emit_jsonl(rows, args.trace)
    return EXIT_OK


def _cmd_eval(args) -> int:
    hyps = _read_lines(args.hyp)
    lines: list[str] = []
    json_rows: list[dict] = []

    if args.metric == "hter":
        if not args.post_edits:
            raise MetricsError("--metric hter requires --post-edits")
        edit_files = [_read_lines(p) for p in args.post_edits]
        for edits in edit_files:
            if len(edits) != len(hyps):
                raise MetricsError("post-edit files must be line-aligned with the hypothesis file")
        lines.append("id\thter")
        total = 0.0
        for i, hyp in enumerate(hyps):
            value = hter(hyp, [edits[i] for edits in edit_files])
            total += value
            shown = display_percent(value) if args.percent else f"{value:.2f}"
            lines.append(f"{i + 1}\t{shown}")
            json_rows.append({"id": str(i + 1), "hter": value})
        mean = total / len(hyps)
        lines.append(f"mean\t{display_percent(mean) if args.percent else f'{mean:.2f}'}")
        json_rows.append({"mean_hter": mean})
        _write_out(lines, args.out)
        _emit_jsonl(json_rows, args.jsonl)
        return EXIT_OK

    if not args.ref:
        raise MetricsError(f"--metric {args.metric} requires --ref")
    refs = _read_lines(args.ref)
    report = evaluate_corpus(hyps, refs)

    if args.metric == "ter":
        lines.append("id\tter\tins\tdel\tsub\tshift\tref_len")
        for s in report.per_sentence:
            b = s.breakdown
            lines.append(
                f"{s.id}\t{display_percent(s.ter)}\t{b.insertions}\t{b.deletions}\t{b.substitutions}"
                f"\t{b.shifts}\t{b.reference_length}"
            )
            json_rows.append(
                {
                    "id": s.id,
                    "ter": s.ter,
                    "insertions": b.insertions,
                    "deletions": b.deletions,
                    "substitutions": b.substitutions,
                    "shifts": b.shifts,
                    "reference_length": b.reference_length,
                }
            )
        lines.append(f"mean\t{display_percent(report.mean_ter)}")
        json_rows.append({"mean_ter": report.mean_ter})
    else:
        lines.append("id\tbleu")
        for s in report.per_sentence:
            lines.append(f"{s.id}\t{s.bleu_smoothed:.2f}")
            json_rows.append({"id": s.id, "bleu_smoothed": s.bleu_smoothed})
        lines.append(f"corpus\t{report.corpus_bleu:.2f}")
        json_rows.append({"corpus_bleu": report.corpus_bleu})

    _write_out(lines, args.out)
    _emit_jsonl(json_rows, args.jsonl)
    if args.figures:
        from scylla.report import render_eval_figures

        render_eval_figures(report, args.figures, metric=args.metric)
    return EXIT_OK


def _emit_jsonl(rows: list[dict], target: str | None):
    if not target:
        return
    text = "".join(json.dumps(row, ensure_ascii=False) + "\n" for row in rows)
    if target == "-":
        sys.stdout.write(text)
    else:
        Path(target).write_text(text, "utf-8")


def run(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        parser.print_usage(sys.stderr)
        return EXIT_INPUT

    try:
        if args.command == "lex":
            return _cmd_lex_validate(args)
        if args.command == "daisy":
            return _cmd_daisy(args)
        if args.command == "translate":
            return _cmd_translate(args)
        if args.command == "eval":
            return _cmd_eval(args)
        raise AssertionError(f"unhandled command {args.command!r}")
    except (TransportError, ProviderError) as exc:
        sys.stderr.write(f"provider error: {exc}\n")
        return EXIT_PROVIDER
    except (LexiconError, ConlluError, MetricsError, OSError, ValueError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
