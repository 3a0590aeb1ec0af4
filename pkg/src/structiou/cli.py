"""Command-line interface.

Subcommands:
  eval          Struct-IoU between two tree files (per sentence + corpus)
  parseval      bracket precision/recall/F1 between two tree files
  perturb       seeded boundary perturbations plus degradation summary
  ambiguity     synthetic PP-attachment comparison table
  correlate     grouped Spearman correlation between two score files
  oracle-check  randomized audit of the solver against brute force

Exit codes: 0 success, 1 usage error, 2 data error, 3 self-check failure.
All output is deterministic given the flags and seed. Sentence pairing
across files is positional: line k of the predicted file is scored
against line k of the gold file.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .align import MatchMode, max_weight_alignment
from .ambiguity import ambiguity_report
from .errors import CapacityError, DataError, UsageError
from .metric import struct_iou_corpus
from .oracle import OracleVariant, oracle_alignment, random_timed_tree
from .parseval import parseval_f1
from .perturb import PerturbSpec, apply_perturbation, sentence_rng
from .stats import GroupRecord, group_sample, spearman
from .treebank import (
    BoundaryTable,
    ParseTree,
    TreeNode,
    compact_silence,
    project_even,
    project_to_time,
    read_boundary_file,
    read_tree_file,
    serialize_bracketed,
    write_boundary_file,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_CHECK = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fmt(x: float) -> str:
    return f"{x:.4f}"


def _print_error(message: str) -> None:
    prefix = "error:"
    if sys.stderr.isatty() and not os.environ.get("NO_COLOR"):
        prefix = "\x1b[31merror:\x1b[0m"
    print(f"{prefix} {message}", file=sys.stderr)


def _write_text(out: str | None, text: str) -> None:
    if out:
        try:
            Path(out).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise DataError(f"{out}: {exc.strerror}") from exc
    else:
        sys.stdout.write(text)


def _mode(args) -> MatchMode:
    return MatchMode.UNLABELED if args.unlabeled else MatchMode.LABELED


def _read_trees(path: str) -> list[ParseTree]:
    try:
        with open(path, encoding="utf-8") as f:
            return read_tree_file(f)
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror}") from exc


def _read_bounds(path: str) -> list[BoundaryTable]:
    try:
        with open(path, encoding="utf-8") as f:
            return read_boundary_file(f)
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror}") from exc


def _project_corpus(
    trees: list[ParseTree], bounds_path: str | None, even: bool, role: str
) -> list[ParseTree]:
    if even:
        return [project_even(t) for t in trees]
    tables = _read_bounds(bounds_path)
    if len(tables) != len(trees):
        raise DataError(
            f"{role}: {len(trees)} trees but {len(tables)} boundary blocks"
        )
    return [
        project_to_time(t, compact_silence(tab))
        for t, tab in zip(trees, tables)
    ]


# ---------------------------------------------------------------------------
# eval


def cmd_eval(args) -> int:
    gold = _read_trees(args.gold)
    pred = _read_trees(args.pred)
    if len(gold) != len(pred):
        raise DataError(
            f"gold has {len(gold)} trees but pred has {len(pred)}"
        )
    if not gold:
        raise DataError("empty corpus")
    gold_t = _project_corpus(gold, args.gold_bounds, args.even, "gold")
    pred_t = _project_corpus(pred, args.pred_bounds, args.even, "pred")
    corpus = struct_iou_corpus(
        list(zip(pred_t, gold_t)),
        _mode(args),
        literal_normalization=args.literal_normalization,
    )
    if args.format == "json":
        payload = {
            "sentences": [
                {
                    "index": k,
                    "n1": s.n1,
                    "n2": s.n2,
                    "objective": s.objective,
                    "struct_iou": s.value,
                }
                for k, s in enumerate(corpus.per_sentence)
            ],
            "corpus": {
                "value": corpus.value,
                "sentence_mean": corpus.sentence_mean,
                "count": len(corpus.per_sentence),
            },
        }
        _write_text(args.out, json.dumps(payload, indent=2) + "\n")
    else:
        lines = ["index\tn1\tn2\tobjective\tstruct_iou"]
        for k, s in enumerate(corpus.per_sentence):
            lines.append(
                f"{k}\t{s.n1}\t{s.n2}\t{_fmt(s.objective)}\t{_fmt(s.value)}"
            )
        lines.append(f"# sentence_mean\t{_fmt(corpus.sentence_mean)}")
        lines.append(f"# corpus\t{_fmt(corpus.value)}")
        _write_text(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parseval


def cmd_parseval(args) -> int:
    gold = _read_trees(args.gold)
    pred = _read_trees(args.pred)
    if len(gold) != len(pred):
        raise DataError(
            f"gold has {len(gold)} trees but pred has {len(pred)}"
        )
    if not gold:
        raise DataError("empty corpus")
    mode = _mode(args)
    scores = [parseval_f1(g, p, mode) for g, p in zip(gold, pred)]
    matched = sum(s.matched for s in scores)
    total_gold = sum(s.gold_brackets for s in scores)
    total_pred = sum(s.pred_brackets for s in scores)
    micro_p = 100.0 * matched / total_pred if total_pred else 0.0
    micro_r = 100.0 * matched / total_gold if total_gold else 0.0
    micro_f = (
        2 * micro_p * micro_r / (micro_p + micro_r) if micro_p + micro_r else 0.0
    )
    if args.format == "json":
        payload = {
            "sentences": [
                {
                    "index": k,
                    "precision": s.precision,
                    "recall": s.recall,
                    "f1": s.f1,
                    "gold_brackets": s.gold_brackets,
                    "pred_brackets": s.pred_brackets,
                }
                for k, s in enumerate(scores)
            ],
            "micro": {"precision": micro_p, "recall": micro_r, "f1": micro_f},
        }
        _write_text(args.out, json.dumps(payload, indent=2) + "\n")
    else:
        lines = ["index\tprecision\trecall\tf1\tgold_brackets\tpred_brackets"]
        for k, s in enumerate(scores):
            lines.append(
                f"{k}\t{_fmt(s.precision)}\t{_fmt(s.recall)}\t{_fmt(s.f1)}"
                f"\t{s.gold_brackets}\t{s.pred_brackets}"
            )
        lines.append(
            f"# micro\t{_fmt(micro_p)}\t{_fmt(micro_r)}\t{_fmt(micro_f)}"
        )
        _write_text(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# perturb


def cmd_perturb(args) -> int:
    trees = _read_trees(args.gold)
    tables = [compact_silence(t) for t in _read_bounds(args.gold_bounds)]
    if len(trees) != len(tables):
        raise DataError(
            f"{len(trees)} trees but {len(tables)} boundary blocks"
        )
    if not trees:
        raise DataError("empty corpus")
    spec = PerturbSpec(args.mode, args.delta, args.seed)
    reference = [project_to_time(t, tab) for t, tab in zip(trees, tables)]
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    mode = _mode(args)
    rep_means = []
    for rep in range(args.reps):
        perturbed_trees: list[ParseTree] = []
        perturbed_tables: list[BoundaryTable] = []
        for k, (tree, table, timed) in enumerate(zip(trees, tables, reference)):
            rng = sentence_rng(args.seed, rep, k)
            if spec.mode == "noise":
                _, new_table = apply_perturbation(timed, table, spec, rng)
                new_tree = project_to_time(tree, new_table)
            else:
                new_tree, new_table = apply_perturbation(timed, table, spec, rng)
            perturbed_trees.append(new_tree)
            perturbed_tables.append(new_table)
        with open(out_dir / f"rep{rep}.trees", "w", encoding="utf-8") as f:
            for t in perturbed_trees:
                f.write(serialize_bracketed(t) + "\n")
        with open(out_dir / f"rep{rep}.bounds", "w", encoding="utf-8") as f:
            write_boundary_file(perturbed_tables, f)
        corpus = struct_iou_corpus(
            list(zip(perturbed_trees, reference)),
            mode,
            literal_normalization=args.literal_normalization,
        )
        rep_means.append(corpus.sentence_mean)
    mean = float(np.mean(rep_means))
    stddev = float(np.std(rep_means))
    lines = [
        "mode\tdelta\treps\tmean_struct_iou\tstddev_struct_iou",
        f"{args.mode}\t{args.delta}\t{args.reps}\t{_fmt(mean)}\t{_fmt(stddev)}",
    ]
    (out_dir / "summary.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {args.reps} repetitions to {out_dir} (mean {_fmt(mean)})")
    return EXIT_OK


# ---------------------------------------------------------------------------
# ambiguity


def cmd_ambiguity(args) -> int:
    report = ambiguity_report(args.n, args.samples, args.seed, args.gt_index)
    if args.format == "json":
        payload = {
            "n": report.n,
            "samples": report.samples,
            "seed": report.seed,
            "gt_index": report.gt_index,
            "parseval_random_mean": report.parseval_random_mean,
            "struct_iou_random_mean": report.struct_iou_random_mean,
            "parseval_plausible_lowest": report.parseval_plausible_lowest,
            "struct_iou_plausible_lowest": report.struct_iou_plausible_lowest,
        }
        _write_text(args.out, json.dumps(payload, indent=2) + "\n")
    else:
        lines = [
            "n\tsamples\tseed\tgt_index\tparseval_random_mean"
            "\tstruct_iou_random_mean\tparseval_plausible_lowest"
            "\tstruct_iou_plausible_lowest",
            f"{report.n}\t{report.samples}\t{report.seed}\t{report.gt_index}"
            f"\t{_fmt(report.parseval_random_mean)}"
            f"\t{_fmt(report.struct_iou_random_mean)}"
            f"\t{_fmt(report.parseval_plausible_lowest)}"
            f"\t{_fmt(report.struct_iou_plausible_lowest)}",
        ]
        _write_text(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# correlate


def _read_score_records(path: str) -> list[tuple[float, float]]:
    """Per-sentence (numerator, denominator) pairs from a score TSV.

    Understands the eval format (node-count-weighted struct_iou), the
    parseval format (micro-F1 reconstruction from counts), and generic
    index/value files (plain mean).
    """
    try:
        with open(path, encoding="utf-8") as f:
            lines = [
                ln.rstrip("\n") for ln in f
                if ln.strip() and not ln.startswith("#")
            ]
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror}") from exc
    if not lines:
        raise DataError(f"{path}: no rows")
    header = lines[0].split("\t")
    rows = [ln.split("\t") for ln in lines[1:]]
    col = {name: i for i, name in enumerate(header)}

    def need(row, name):
        try:
            return float(row[col[name]])
        except (ValueError, IndexError):
            raise DataError(f"{path}: bad value in column {name!r}") from None

    records = []
    if {"struct_iou", "n1", "n2"} <= col.keys():
        for row in rows:
            weight = need(row, "n1") + need(row, "n2")
            records.append((weight * need(row, "struct_iou"), weight))
    elif {"recall", "gold_brackets", "pred_brackets"} <= col.keys():
        for row in rows:
            gold_b = need(row, "gold_brackets")
            pred_b = need(row, "pred_brackets")
            matched = round(need(row, "recall") * gold_b / 100.0)
            records.append((200.0 * matched, gold_b + pred_b))
    elif "value" in col:
        for row in rows:
            records.append((need(row, "value"), 1.0))
    elif len(header) == 2:
        # headerless two-column file: index, value
        for row in [header, *rows]:
            try:
                records.append((float(row[1]), 1.0))
            except (ValueError, IndexError):
                raise DataError(f"{path}: expected numeric second column") from None
    else:
        raise DataError(f"{path}: unrecognized score file format")
    return records


def cmd_correlate(args) -> int:
    rec_a = _read_score_records(args.file_a)
    rec_b = _read_score_records(args.file_b)
    if len(rec_a) != len(rec_b):
        raise DataError(
            f"row count mismatch: {len(rec_a)} vs {len(rec_b)}"
        )
    records = [
        GroupRecord(a[0], a[1], b[0], b[1]) for a, b in zip(rec_a, rec_b)
    ]
    grouped = group_sample(records, args.group_size, args.seed, args.groups)
    xs = [g[0] for g in grouped.groups]
    ys = [g[1] for g in grouped.groups]
    rho = spearman(xs, ys)
    degenerate = grouped.degenerate()
    if degenerate:
        _print_error("degenerate grouping: a metric is constant across groups")
    if args.format == "json":
        payload = {
            "groups": [{"metric_a": a, "metric_b": b} for a, b in grouped.groups],
            "spearman": None if np.isnan(rho) else rho,
            "degenerate": degenerate,
        }
        _write_text(args.out, json.dumps(payload, indent=2) + "\n")
    else:
        lines = ["group\tmetric_a\tmetric_b"]
        for k, (a, b) in enumerate(grouped.groups):
            lines.append(f"{k}\t{_fmt(a)}\t{_fmt(b)}")
        lines.append(f"# spearman\t{'nan' if np.isnan(rho) else _fmt(rho)}")
        if degenerate:
            lines.append("# degenerate\ttrue")
        _write_text(args.out, "\n".join(lines) + "\n")
    return EXIT_OK


# ---------------------------------------------------------------------------
# oracle-check


def _node_payload(node: TreeNode) -> dict:
    return {
        "label": node.label,
        "start": node.start,
        "end": node.end,
        "word": node.word,
        "children": [_node_payload(c) for c in node.children],
    }


def cmd_oracle_check(args) -> int:
    rng = np.random.default_rng(np.random.SeedSequence(args.seed))
    failures = 0
    for trial in range(args.trials):
        t1 = random_timed_tree(rng, args.max_nodes)
        t2 = random_timed_tree(rng, args.max_nodes)
        mode = MatchMode.LABELED if trial % 2 else MatchMode.UNLABELED
        dp = max_weight_alignment(t1, t2, mode)
        ref = oracle_alignment(t1, t2, mode, OracleVariant.ORDER_CONSISTENT)
        if abs(dp.objective - ref.objective) > 1e-9:
            failures += 1
            out_dir = Path(args.out) if args.out else Path.cwd()
            out_dir.mkdir(parents=True, exist_ok=True)
            payload = {
                "trial": trial,
                "mode": mode.value,
                "solver_objective": dp.objective,
                "oracle_objective": ref.objective,
                "tree1": _node_payload(t1.root),
                "tree2": _node_payload(t2.root),
            }
            path = out_dir / f"oracle_counterexample_{trial}.json"
            path.write_text(json.dumps(payload, indent=2), encoding="utf-8")
            _print_error(
                f"trial {trial}: solver {dp.objective!r} != oracle "
                f"{ref.objective!r}; wrote {path}"
            )
    print(f"trials={args.trials} passed={args.trials - failures} failed={failures}")
    return EXIT_CHECK if failures else EXIT_OK


# ---------------------------------------------------------------------------
# parser wiring


def _add_mode_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--labeled", action="store_true", default=True,
                   help="match only equal-label nodes (default)")
    g.add_argument("--unlabeled", action="store_true",
                   help="ignore labels when matching")


def _add_output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("tsv", "json"), default="tsv")
    p.add_argument("--out", help="output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="structiou", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="Struct-IoU between two tree files")
    p.add_argument("--gold", required=True, help="gold tree file, one per line")
    p.add_argument("--pred", required=True, help="predicted tree file")
    p.add_argument("--gold-bounds", help="gold boundary file (TSV blocks)")
    p.add_argument("--pred-bounds", help="predicted boundary file")
    p.add_argument("--even", action="store_true",
                   help="project onto unit-length word segments instead of "
                        "boundary files")
    p.add_argument("--literal-normalization", action="store_true",
                   help="divide the alignment weight by n1+n2 without the "
                        "factor 2 (identical trees then score 0.5)")
    _add_mode_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("parseval", help="bracket P/R/F1 between two tree files")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    _add_mode_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=cmd_parseval)

    p = sub.add_parser("perturb",
                       help="perturb word boundaries and score degradation")
    p.add_argument("--gold", required=True, help="tree file to perturb")
    p.add_argument("--gold-bounds", required=True, help="matching boundary file")
    p.add_argument("--mode", required=True, choices=("noise", "insert", "delete"))
    p.add_argument("--delta", required=True, type=float,
                   help="perturbation level in [0, 1]")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--reps", type=int, default=5,
                   help="independent repetitions (default 5)")
    p.add_argument("--literal-normalization", action="store_true")
    p.add_argument("--out", required=True,
                   help="output directory for perturbed corpora and summary")
    _add_mode_flags(p)
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("ambiguity",
                       help="synthetic PP-attachment comparison table")
    p.add_argument("--n", required=True, type=int,
                   help="number of P-N repetitions in the template")
    p.add_argument("--samples", type=int, default=100,
                   help="random baseline trees (default 100)")
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--gt-index", type=int, default=None,
                   help="which plausible parse is the ground truth "
                        "(default: calibrated per template size)")
    _add_output_flags(p)
    p.set_defaults(func=cmd_ambiguity)

    p = sub.add_parser("correlate",
                       help="grouped Spearman correlation of two score files")
    p.add_argument("file_a", help="per-sentence score TSV (metric A)")
    p.add_argument("file_b", help="per-sentence score TSV (metric B)")
    p.add_argument("--group-size", type=int, default=10,
                   help="sentences per group (default 10)")
    p.add_argument("--groups", type=int, default=100,
                   help="number of groups; sampled with replacement across "
                        "groups, without within (default 100)")
    p.add_argument("--seed", type=int, default=0)
    _add_output_flags(p)
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("oracle-check",
                       help="randomized solver-vs-brute-force audit")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--max-nodes", type=int, default=8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="directory for counterexample dumps")
    p.set_defaults(func=cmd_oracle_check)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "even", False) and (
            getattr(args, "gold_bounds", None) or getattr(args, "pred_bounds", None)
        ):
            raise UsageError("--even excludes --gold-bounds/--pred-bounds")
        if args.command == "eval" and not args.even and not (
            args.gold_bounds and args.pred_bounds
        ):
            raise UsageError(
                "eval needs either --even or both --gold-bounds and --pred-bounds"
            )
        return args.func(args)
    except UsageError as exc:
        _print_error(str(exc))
        return EXIT_USAGE
    except CapacityError as exc:
        _print_error(str(exc))
        return EXIT_USAGE
    except DataError as exc:
        _print_error(str(exc))
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
