"""Scaling report: parse-time growth in input length and denotation-engine
work growth in environment size, written as CSV plus log-log figures.

Inputs are synthetic right-branching modifier chains ("lemon in bin by
machine in bin ...") over generated environments, so the report is fully
deterministic apart from wall-clock noise, which the repeated-median
timing damps.
"""

from __future__ import annotations

import csv
import math
import random
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .basic_parser import InputChart, parse_basic
from .environment import Environment, load_environment
from .lexicon import Grammar, load_lexicon
from .relations import ops


_WORDS = ["lemon", "in", "bin", "by", "machine"]


def chain_sentence(n: int) -> list[str]:
    """First n words of the repeating modifier chain."""
    out = ["lemon"]
    tail = ["in", "bin", "by", "machine"]
    k = 0
    while len(out) < n:
        out.append(tail[k % 4])
        k += 1
    return out[:n]


def build_chain_fixture(n_entities: int, seed: int = 7, density: float = 1.0) -> tuple[Environment, Grammar]:
    """Environment with three entity sorts and two 3-ary linking relations
    whose sizes grow linearly in the entity count, plus the matching
    single-component lexicon."""
    rng = random.Random(seed)
    third = max(1, n_entities // 3)
    lemons = [f"l{k}" for k in range(third)]
    bins_ = [f"b{k}" for k in range(third)]
    machines = [f"m{k}" for k in range(n_entities - 2 * third)] or ["m0"]
    lines = ["entity " + " ".join(lemons + bins_ + machines)]

    def rel(name, members):
        body = "".join(f"({m})" for m in members)
        lines.append(f"relation {name} : NP {{ {body} }}")

    rel("lemon", lemons)
    rel("bin", bins_)
    rel("machine", machines)

    def link(name, hosts, args):
        pairs = []
        for host in hosts:
            if rng.random() <= density:
                arg = rng.choice(args)
                pairs.append(f"({arg},{host},{host})")
        lines.append(f"relation {name} : NP\\NP/NP {{ {''.join(pairs)} }}")

    link("in", lemons + machines, bins_)
    link("by", bins_ + lemons, machines)
    env = load_environment("\n".join(lines))
    lexicon = "\n".join(
        [
            "word lemon : NP = rel lemon",
            "word bin : NP = rel bin",
            "word machine : NP = rel machine",
            "word in : NP\\NP/NP = rel in",
            "word by : NP\\NP/NP = rel by",
        ]
    )
    grammar = load_lexicon(lexicon, env)
    return env, grammar


def _evaluate_forest(forest) -> None:
    for item in forest.items:
        forest.denotation(item)


def run_parse_scaling(lengths: Sequence[int], repeats: int = 5, n_entities: int = 12) -> list[dict]:
    env, grammar = build_chain_fixture(n_entities)
    rows = []
    for n in lengths:
        chart = InputChart.from_sentence(chain_sentence(n))
        times = []
        items = 0
        for _ in range(repeats):
            start = time.perf_counter()
            forest = parse_basic(chart, grammar, env)
            _evaluate_forest(forest)
            times.append(time.perf_counter() - start)
            items = len(forest)
        times.sort()
        rows.append(
            {
                "n": n,
                "median_seconds": times[len(times) // 2],
                "items": items,
            }
        )
    return rows


def run_denotation_scaling(env_sizes: Sequence[int], sentence_len: int = 9) -> list[dict]:
    words = chain_sentence(sentence_len)
    rows = []
    for size in env_sizes:
        env, grammar = build_chain_fixture(size)
        chart = InputChart.from_sentence(words)
        ops.reset()
        forest = parse_basic(chart, grammar, env)
        _evaluate_forest(forest)
        rows.append({"entities": size, "operations": ops.total, "items": len(forest)})
    return rows


def fit_loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of log y against log x."""
    lx = [math.log(x) for x in xs]
    ly = [math.log(max(y, 1e-12)) for y in ys]
    mx = sum(lx) / len(lx)
    my = sum(ly) / len(ly)
    num = sum((a - mx) * (b - my) for a, b in zip(lx, ly))
    den = sum((a - mx) ** 2 for a in lx)
    return num / den


@dataclass
class Report:
    parse_rows: list
    denot_rows: list
    parse_slope: float
    denot_slope: float
    out_dir: Path

    def summary(self) -> str:
        return (
            f"parse-time log-log slope: {self.parse_slope:.2f} over "
            f"n={[r['n'] for r in self.parse_rows]}\n"
            f"denotation-ops log-log slope: {self.denot_slope:.2f} over "
            f"|E|={[r['entities'] for r in self.denot_rows]}\n"
            f"report written to {self.out_dir}"
        )


def _write_csv(path: Path, rows: list[dict]) -> None:
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)


def _render_figure(path: Path, xs, ys, xlabel: str, ylabel: str, slope: float) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 4))
    ax.loglog(xs, ys, "o-", label=f"measured (slope {slope:.2f})")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def run_report(
    out_dir: str,
    lengths: Sequence[int] = (4, 8, 16, 32),
    env_sizes: Sequence[int] = (10, 20, 40, 80),
    repeats: int = 5,
) -> Report:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    parse_rows = run_parse_scaling(lengths, repeats=repeats)
    denot_rows = run_denotation_scaling(env_sizes)
    parse_slope = fit_loglog_slope(
        [r["n"] for r in parse_rows], [r["median_seconds"] for r in parse_rows]
    )
    denot_slope = fit_loglog_slope(
        [r["entities"] for r in denot_rows], [r["operations"] for r in denot_rows]
    )
    _write_csv(out / "parse_scaling.csv", parse_rows)
    _write_csv(out / "denotation_scaling.csv", denot_rows)
    _render_figure(
        out / "parse_scaling.png",
        [r["n"] for r in parse_rows],
        [r["median_seconds"] for r in parse_rows],
        "input length n",
        "median parse seconds",
        parse_slope,
    )
    _render_figure(
        out / "denotation_scaling.png",
        [r["entities"] for r in denot_rows],
        [r["operations"] for r in denot_rows],
        "entities in environment",
        "denotation engine operations",
        denot_slope,
    )
    return Report(parse_rows, denot_rows, parse_slope, denot_slope, out)
