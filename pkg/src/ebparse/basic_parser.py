"""Chart parser over single-category items [i, j, category].

Recognition fills a CKY-style chart closed under the two application rules
(functor before argument to the right, functor after argument to the left),
memoizing every item so the whole run is polynomial.  The chart doubles as a
shared packed forest: each item keeps back pointers to the rule applications
that proved it.  Denotations, denotation scores and Viterbi scores are
computed over the forest afterwards, and a best tree can be extracted top
down.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Optional, Sequence

from .categories import Category, Slash, alpha_equal, substitute, to_text, unify
from .environment import Environment, identity_relation
from .lexicon import Grammar, LexEntry
from .relations import Relation, UNIT, join, project, relation


class ParseError(ValueError):
    pass


class ScoreError(ValueError):
    """Missing probability or scorer misuse."""


@dataclass(frozen=True)
class BasicItem:
    i: int
    j: int
    cat: Category

    @property
    def cat_text(self) -> str:
        return to_text(self.cat)

    def __str__(self) -> str:
        return f"[{self.i},{self.j},{to_text(self.cat)}]"


@dataclass(frozen=True)
class Derivation:
    """One way of proving an item: a lexical edge or an application."""

    rule: str  # "lex" | "apply_r" | "apply_l"
    children: tuple  # items, functor first for applications
    word: Optional[str] = None
    weight: float = 1.0
    entry: Optional[LexEntry] = None

    @property
    def rank(self) -> int:
        return {"lex": 0, "apply_r": 1, "apply_l": 2}[self.rule]


@dataclass(frozen=True)
class InputChart:
    """Parser input: either a plain sentence or a word lattice.

    Edges are (i, j, word, weight); a plain sentence of k words yields the
    k unit edges (p, p+1, word, 1.0).
    """

    n: int
    edges: tuple

    @classmethod
    def from_sentence(cls, words: Sequence[str]) -> "InputChart":
        words = list(words)
        return cls(len(words), tuple((k, k + 1, w, 1.0) for k, w in enumerate(words)))

    @classmethod
    def from_edges(cls, edges: Iterable[tuple]) -> "InputChart":
        edges = tuple(edges)
        for i, j, word, weight in edges:
            if not 0 <= i < j:
                raise ParseError(f"bad edge span ({i}, {j})")
            if weight < 0:
                raise ParseError(f"negative edge weight {weight}")
        n = max((j for _, j, _, _ in edges), default=0)
        return cls(n, edges)


class Forest:
    """Shared packed forest over basic items."""

    def __init__(self, grammar: Grammar, env: Optional[Environment], n: int):
        self.grammar = grammar
        self.env = env
        self.n = n
        self.items: dict = {}  # BasicItem -> list[Derivation]
        self.warnings: list[str] = []
        self._denot: dict = {}
        self._deriv_denot: dict = {}
        self._sd: dict = {}

    def add(self, item: BasicItem, deriv: Derivation) -> bool:
        derivs = self.items.setdefault(item, [])
        if deriv in derivs:
            return False
        derivs.append(deriv)
        return True

    def __contains__(self, item: BasicItem) -> bool:
        return item in self.items

    def __len__(self) -> int:
        return len(self.items)

    # -- goal handling ----------------------------------------------------

    def goal_items(self, goal: Category) -> list[BasicItem]:
        out = [
            it
            for it in self.items
            if it.i == 0 and it.j == self.n and alpha_equal(goal, it.cat)
        ]
        return sorted(out, key=lambda it: to_text(it.cat))

    def recognizes(self, goal: Category) -> bool:
        return bool(self.goal_items(goal))

    # -- denotations -------------------------------------------------------

    def denotation(self, item: BasicItem) -> Relation:
        """Union over derivations of the composed denotation, memoized."""
        if item in self._denot:
            return self._denot[item]
        if self.env is None:
            raise ParseError("forest was built without an environment")
        out = None
        for deriv in self.items[item]:
            d = self.deriv_denotation(item, deriv)
            if out is not None and out.arity != d.arity:
                raise ParseError(
                    f"derivations of {item} disagree on denotation width "
                    f"({out.arity} vs {d.arity}); mixed evidence/total lexical "
                    "relation styles for one category cannot combine"
                )
            out = d if out is None else relation(d.arity, out.tuples | d.tuples)
        self._denot[item] = out
        return out

    def deriv_denotation(self, item: BasicItem, deriv: Derivation) -> Relation:
        key = (item, id(deriv))
        if key in self._deriv_denot:
            return self._deriv_denot[key]
        if deriv.rule == "lex":
            d = leaf_denotation(deriv.entry, item.cat, self.env)
        else:
            functor, argument = deriv.children
            d = project(join(self.denotation(functor), self.denotation(argument)))
        self._deriv_denot[key] = d
        return d

    # -- scores ------------------------------------------------------------

    def score_denotational(self, item: BasicItem) -> int:
        """Number of non-empty compositions in the best analysis of item."""
        if item in self._sd:
            return self._sd[item]
        best = max(self._sd_deriv(item, d) for d in self.items[item])
        self._sd[item] = best
        return best

    def _sd_deriv(self, item: BasicItem, deriv: Derivation) -> int:
        bonus = 1 if self.deriv_denotation(item, deriv) else 0
        return sum(self.score_denotational(c) for c in deriv.children) + bonus

    def score_viterbi(self, item: BasicItem, probs: dict, _memo=None) -> float:
        """Max over derivations of the child-score product times the rule
        probability.  probs maps ("lex", cat, word) and (parent, functor,
        argument) category-text keys to probabilities."""
        memo = _memo if _memo is not None else {}
        if item in memo:
            return memo[item]
        best = None
        for deriv in self.items[item]:
            p = _rule_prob(item, deriv, probs)
            score = p * deriv.weight if deriv.rule == "lex" else p
            for child in deriv.children:
                score *= self.score_viterbi(child, probs, memo)
            best = score if best is None else max(best, score)
        memo[item] = best
        return best

    # -- tree extraction ----------------------------------------------------

    def best_tree(self, goal: Category, scorer: str = "denotational", probs: Optional[dict] = None):
        roots = self.goal_items(goal)
        if not roots:
            raise ParseError(f"goal {to_text(goal)} is not derivable")
        if scorer == "denotational":
            score: Callable = self.score_denotational
            deriv_score = self._sd_deriv
        elif scorer == "viterbi":
            if probs is None:
                raise ScoreError("viterbi scoring needs a probability table")
            memo: dict = {}
            score = lambda it: self.score_viterbi(it, probs, memo)
            deriv_score = lambda it, d: _viterbi_deriv(self, it, d, probs, memo)
        else:
            raise ScoreError(f"unknown scorer {scorer!r}")
        root = max(roots, key=lambda it: (score(it), to_text(it.cat)))
        return self._expand(root, deriv_score)

    def _expand(self, item: BasicItem, deriv_score) -> "Tree":
        deriv = best_derivation(self.items[item], lambda d: deriv_score(item, d))
        denot = self.denotation(item) if self.env is not None else None
        if deriv.rule == "lex":
            return Tree(item.i, item.j, item.cat, word=deriv.word, denotation=denot)
        children = tuple(
            self._expand(c, deriv_score)
            for c in sorted(deriv.children, key=lambda c: c.i)
        )
        return Tree(item.i, item.j, item.cat, children=children, denotation=denot)

    def all_trees(self, goal: Category) -> list["Tree"]:
        """Every tree for the goal, by exhaustive back-pointer expansion."""
        out = []
        for root in self.goal_items(goal):
            out.extend(self._enumerate(root))
        return out

    def _enumerate(self, item: BasicItem) -> list["Tree"]:
        trees = []
        for deriv in self.items[item]:
            if deriv.rule == "lex":
                trees.append(Tree(item.i, item.j, item.cat, word=deriv.word))
                continue
            kids = [self._enumerate(c) for c in sorted(deriv.children, key=lambda c: c.i)]
            for left in kids[0]:
                for right in kids[1]:
                    trees.append(Tree(item.i, item.j, item.cat, children=(left, right)))
        return trees


def best_derivation(derivs: list, score):
    """Highest score; ties prefer lower rule rank, then lower split point,
    then child category text, keeping extraction deterministic.  Works for
    both parsers: items expose cat_text and a split-relevant j."""

    def key(d):
        split = d.children[0].j if d.children else -1
        texts = tuple(
            c.cat_text for c in sorted(d.children, key=lambda c: (c.i, c.j, c.cat_text))
        )
        return (-score(d), d.rank, split, texts, d.word or "")

    return min(derivs, key=key)


def _rule_prob(item: BasicItem, deriv: Derivation, probs: dict) -> float:
    if deriv.rule == "lex":
        key = ("lex", to_text(item.cat), deriv.word)
    else:
        functor, argument = deriv.children
        key = (to_text(item.cat), to_text(functor.cat), to_text(argument.cat))
    if key not in probs:
        raise ScoreError(f"missing probability for {key!r}")
    return probs[key]


def _viterbi_deriv(forest: Forest, item: BasicItem, deriv: Derivation, probs: dict, memo: dict) -> float:
    p = _rule_prob(item, deriv, probs)
    score = p * deriv.weight if deriv.rule == "lex" else p
    for child in deriv.children:
        score *= forest.score_viterbi(child, probs, memo)
    return score


@dataclass(frozen=True)
class Tree:
    i: int
    j: int
    cat: Category
    word: Optional[str] = None
    children: tuple = ()
    denotation: Optional[Relation] = None

    def leaves(self) -> list[str]:
        if self.word is not None:
            return [self.word]
        return [w for c in self.children for w in c.leaves()]

    def stripped(self) -> "Tree":
        """Copy without denotation annotations (for shape comparisons)."""
        return Tree(
            self.i,
            self.j,
            self.cat,
            word=self.word,
            children=tuple(c.stripped() for c in self.children),
        )


def leaf_denotation(entry: LexEntry, cat: Category, env: Environment) -> Relation:
    """Lexical relation for a seeded entry."""
    sem = entry.semantics
    if sem.kind == "rel":
        _, rel = env.lookup(sem.name, cat)
        return rel
    if sem.kind == "identity":
        return identity_relation(cat, env)
    # Quantifiers and conjunctions denote by name, not by relation; the join
    # identity keeps them neutral in any composition.
    return UNIT


# ---------------------------------------------------------------------------
# Parsing


def seed(input_chart: InputChart, grammar: Grammar) -> tuple[list, list[str]]:
    """Lexical items for every (edge, single-component entry) pair.  Unknown
    words are reported as warnings, not failures, so lattices with junk
    hypotheses still parse."""
    items = []
    warnings = []
    for i, j, word, weight in input_chart.edges:
        entries = grammar.lookup(word)
        if not entries:
            warnings.append(f"no lexical entry for {word!r} at {i}..{j}")
            continue
        usable = [e for e in entries if len(e.components) == 1]
        if not usable:
            warnings.append(
                f"word {word!r} at {i}..{j} has only multi-component entries; "
                "basic mode skips it"
            )
        for entry in usable:
            item = BasicItem(i, j, entry.components[0])
            deriv = Derivation("lex", (), word=word, weight=weight, entry=entry)
            items.append((item, deriv))
    return items, warnings


def parse_basic(
    input_chart: InputChart,
    grammar: Grammar,
    env: Optional[Environment] = None,
) -> Forest:
    """Close the chart under the two application rules."""
    forest = Forest(grammar, env, input_chart.n)
    by_span: dict = {}
    seeds, warnings = seed(input_chart, grammar)
    forest.warnings.extend(warnings)
    for item, deriv in seeds:
        forest.add(item, deriv)
        by_span.setdefault((item.i, item.j), []).append(item)

    n = input_chart.n
    for width in range(1, n + 1):
        for i in range(0, n - width + 1):
            j = i + width
            for k in range(i + 1, j):
                for left in by_span.get((i, k), []):
                    for right in by_span.get((k, j), []):
                        for item, deriv in _applications(left, right):
                            if forest.add(item, deriv) and deriv.rule != "lex":
                                cell = by_span.setdefault((item.i, item.j), [])
                                if item not in cell:
                                    cell.append(item)
    return forest


def _applications(left: BasicItem, right: BasicItem):
    """Both application rules on an adjacent item pair."""
    if isinstance(left.cat, Slash) and left.cat.right:
        subst = unify(left.cat.arg, right.cat)
        if subst is not None:
            cat = substitute(left.cat.result, subst)
            yield (
                BasicItem(left.i, right.j, cat),
                Derivation("apply_r", (left, right)),
            )
    if isinstance(right.cat, Slash) and not right.cat.right:
        subst = unify(right.cat.arg, left.cat)
        if subst is not None:
            cat = substitute(right.cat.result, subst)
            yield (
                BasicItem(left.i, right.j, cat),
                Derivation("apply_l", (right, left)),
            )


def recognize(input_chart: InputChart, grammar: Grammar, goal: Category) -> bool:
    """TRUE iff the goal spans the whole input."""
    return parse_basic(input_chart, grammar).recognizes(goal)
