"""Command-line driver.

    ebparse parse --env FILE --lexicon FILE --goal CAT
                  [--mode basic|extended] [--all] [--denotations]
                  [--forest dot|json] [--trace]
                  (--input "w1 w2 ..." | --lattice FILE)

    ebparse bench --out-dir DIR [--lengths 4,8,16,32]
                  [--env-sizes 10,20,40,80] [--repeats 5]

Exit codes for parse: 0 when the goal is derivable, 1 on "no parse", 2 on
input or file format errors.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence, TextIO, Union

from .basic_parser import InputChart, parse_basic
from .categories import CategoryError, parse_category
from .environment import EnvFileError, load_environment
from .extended_parser import parse_extended
from .lexicon import LexiconError, load_lexicon
from .output import forest_to_dot, forest_to_json_text, format_trace, format_tree
from .relations import format_relation


class LatticeError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def load_lattice(source: Union[str, TextIO]) -> InputChart:
    """Parse a word-lattice file: lines ``edge <i> <j> <word> [<weight>]``."""
    text = source if isinstance(source, str) else source.read()
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] != "edge" or len(parts) not in (4, 5):
            raise LatticeError(f"malformed lattice line {raw!r}", lineno)
        try:
            i, j = int(parts[1]), int(parts[2])
        except ValueError:
            raise LatticeError(f"bad positions in {raw!r}", lineno)
        word = parts[3]
        weight = 1.0
        if len(parts) == 5:
            try:
                weight = float(parts[4])
            except ValueError:
                raise LatticeError(f"bad weight in {raw!r}", lineno)
        if i < 0 or i >= j:
            raise LatticeError(f"edge positions must satisfy 0 <= i < j, got {i}, {j}", lineno)
        if weight < 0:
            raise LatticeError(f"negative weight {weight}", lineno)
        edges.append((i, j, word, weight))
    return InputChart.from_edges(edges)


def _build_arg_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="ebparse")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse one input against an environment")
    p.add_argument("--env", required=True, help="environment file")
    p.add_argument("--lexicon", required=True, help="lexicon file")
    p.add_argument("--goal", required=True, help="goal category, e.g. NP or S\\NP_q")
    p.add_argument("--mode", choices=("basic", "extended"), default="extended")
    p.add_argument("--input", help="sentence text, whitespace tokenized")
    p.add_argument("--lattice", help="word lattice file")
    p.add_argument("--all", action="store_true", help="print every tree, not just the best")
    p.add_argument("--denotations", action="store_true", help="annotate trees with denotations")
    p.add_argument("--forest", choices=("dot", "json"), help="dump the full forest")
    p.add_argument("--trace", action="store_true", help="print the derivation trace")

    b = sub.add_parser("bench", help="scaling report with figures and CSV")
    b.add_argument("--out-dir", required=True)
    b.add_argument("--lengths", default="4,8,16,32")
    b.add_argument("--env-sizes", default="10,20,40,80")
    b.add_argument("--repeats", type=int, default=5)
    return top


def run_parse(args, out: TextIO, err: TextIO) -> int:
    if (args.input is None) == (args.lattice is None):
        print("error: exactly one of --input and --lattice is required", file=err)
        return 2
    try:
        with open(args.env, encoding="utf-8") as fh:
            env = load_environment(fh)
        with open(args.lexicon, encoding="utf-8") as fh:
            grammar = load_lexicon(fh, env)
        goal = parse_category(args.goal, grammar.quantifiers.keys())
        if args.lattice is not None:
            with open(args.lattice, encoding="utf-8") as fh:
                chart = load_lattice(fh)
        else:
            chart = InputChart.from_sentence(args.input.split())
    except (EnvFileError, LexiconError, CategoryError, LatticeError, OSError) as exc:
        print(f"error: {exc}", file=err)
        return 2

    if args.mode == "basic":
        forest = parse_basic(chart, grammar, env)
    else:
        forest = parse_extended(chart, grammar, env)
    for warning in forest.warnings:
        print(f"warning: {warning}", file=err)

    goals = forest.goal_items(goal)
    if not goals:
        print("no parse", file=out)
        return 1

    if args.all:
        trees = forest.all_trees(goal) if hasattr(forest, "all_trees") else [forest.best_tree(goal)]
        for k, tree in enumerate(trees, start=1):
            print(f"tree {k}: {format_tree(tree, args.denotations)}", file=out)
    else:
        tree = forest.best_tree(goal)
        print(format_tree(tree, args.denotations), file=out)
    best = max(goals, key=forest.score_denotational)
    print(f"goal denotation: {format_relation(forest.denotation(best))}", file=out)
    if args.forest == "json":
        print(forest_to_json_text(forest), file=out)
    elif args.forest == "dot":
        print(forest_to_dot(forest), file=out)
    if args.trace:
        print(format_trace(forest, best), file=out)
    return 0


def run_bench(args, out: TextIO, err: TextIO) -> int:
    from . import bench

    lengths = [int(x) for x in args.lengths.split(",") if x]
    env_sizes = [int(x) for x in args.env_sizes.split(",") if x]
    report = bench.run_report(args.out_dir, lengths, env_sizes, repeats=args.repeats)
    print(report.summary(), file=out)
    return 0


def main(argv: Optional[Sequence[str]] = None, out: TextIO = None, err: TextIO = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = _build_arg_parser().parse_args(argv)
    if args.command == "parse":
        return run_parse(args, out, err)
    return run_bench(args, out, err)


if __name__ == "__main__":
    sys.exit(main())
