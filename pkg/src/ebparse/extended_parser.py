"""Multi-component chart parser with quantifier and conjunction rules.

Items take the form [i, j, delta, sigma]: delta is the sequence of
unrecognized component categories whose last element is the category the
constituent is building toward, and sigma is the sequence of recognized
components (span plus category), head first.  Thirteen deduction rules close
the chart:

    R1/R2   function application merging into the head component
    R3/R4   function application opening a fresh component
    R5/R6   discharge of an empty component pair in delta
    R7-R9   conjunction skipping (gap creation over a conjunction)
    R10/R11 reassembly of discontinuous constituents over a conjunction
    R12     combination of adjacent recognized components
    R13     quantifier application on a quantified component

Denotations follow the attachment discipline: discharging a plain or
unquantified argument joins and projects, while a quantifier-bound argument
is joined with its restrictor field retained until R13 projects it away with
the quantifier's cardinality test.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Optional

from .categories import (
    Atom,
    BodyPlaceholder,
    Category,
    CategoryError,
    ConjPrime,
    Slash,
    UNQUANT,
    alpha_equal,
    attach_pending,
    fields as cat_fields,
    peel_pending,
    substitute,
    to_text,
    unify,
)
from .basic_parser import (
    InputChart,
    ParseError,
    Tree,
    best_derivation,
    leaf_denotation,
)
from .environment import Environment, totalize
from .lexicon import Grammar, LexEntry, bind_entry
from .relations import (
    Relation,
    conj_combine,
    entity_set,
    join,
    project,
    quant_project,
    relation,
)


@dataclass(frozen=True)
class Component:
    a: int
    b: int
    cat: Category

    def __str__(self) -> str:
        return f"<{self.a},{self.b},{to_text(self.cat)}>"


@dataclass(frozen=True)
class ExtItem:
    i: int
    j: int
    delta: tuple  # of Category; last element is the target
    sigma: tuple  # of Component; head first

    @property
    def target(self) -> Category:
        return self.delta[-1]

    @property
    def head(self) -> Component:
        return self.sigma[0]

    @property
    def cat_text(self) -> str:
        return to_text(self.target)

    def __str__(self) -> str:
        ds = " . ".join(to_text(d) for d in self.delta)
        ss = " ".join(str(c) for c in self.sigma)
        return f"[{self.i},{self.j}, {ds}, {ss}]"


@dataclass(frozen=True)
class ExtDerivation:
    rule: str
    children: tuple  # ExtItems; conventions per rule, see _main_child
    word: Optional[str] = None
    weight: float = 1.0
    entry: Optional[LexEntry] = None
    project: bool = False  # R1-R4: project the joined slot field
    restrictor_from_arg: bool = False  # R1-R4: children[1] supplies the restrictor
    op: str = ""  # R11: conjunction operator

    @property
    def rank(self) -> int:
        if self.rule == "lex":
            return 0
        return int(self.rule[1:])


_RETAINING = ("R1", "R2", "R3", "R4")


def _is_bound_np(c: Category) -> bool:
    return isinstance(c, Atom) and c.name == "NP" and c.mark.kind == "bound"


def _is_conj(c: Category) -> bool:
    return isinstance(c, Atom) and c.name == "Conj"


def _is_conj_item(item: "ExtItem") -> bool:
    """A seeded conjunction word: one component, the Conj atom with an
    operator, nothing else pending."""
    return (
        len(item.sigma) == 1
        and len(item.delta) == 1
        and _is_conj(item.target)
        and _is_conj(item.head.cat)
        and item.head.cat.op is not None
    )


def _subst_cats(cats: Iterable[Category], subst) -> tuple:
    if not subst:
        return tuple(cats)
    return tuple(substitute(c, subst) for c in cats)


def _subst_comps(comps: Iterable[Component], subst) -> tuple:
    if not subst:
        return tuple(comps)
    return tuple(Component(c.a, c.b, substitute(c.cat, subst)) for c in comps)


class ExtForest:
    """Shared packed forest over extended items."""

    def __init__(self, grammar: Grammar, env: Optional[Environment], n: int):
        self.grammar = grammar
        self.env = env
        self.n = n
        self.items: dict = {}  # ExtItem -> list[ExtDerivation]
        self.warnings: list[str] = []
        self._denot: dict = {}
        self._deriv_denot: dict = {}
        self._sd: dict = {}
        self._restrictor: dict = {}

    def add(self, item: ExtItem, deriv: ExtDerivation) -> bool:
        derivs = self.items.setdefault(item, [])
        if deriv in derivs:
            return False
        derivs.append(deriv)
        return True

    def __contains__(self, item: ExtItem) -> bool:
        return item in self.items

    def __len__(self) -> int:
        return len(self.items)

    # -- goal handling ------------------------------------------------------

    def goal_items(self, goal: Category) -> list[ExtItem]:
        out = []
        for it in self.items:
            if (
                it.i == 0
                and it.j == self.n
                and len(it.delta) == 1
                and len(it.sigma) == 1
                and it.head.a == 0
                and it.head.b == self.n
                and alpha_equal(goal, it.target)
            ):
                out.append(it)
        return sorted(out, key=lambda it: to_text(it.target))

    def recognizes(self, goal: Category) -> bool:
        return bool(self.goal_items(goal))

    # -- denotations ----------------------------------------------------------

    def denotation(self, item: ExtItem) -> Relation:
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

    def deriv_denotation(self, item: ExtItem, deriv: ExtDerivation) -> Relation:
        key = (item, id(deriv))
        if key in self._deriv_denot:
            return self._deriv_denot[key]
        d = self._compute_deriv_denotation(item, deriv)
        self._deriv_denot[key] = d
        return d

    def _compute_deriv_denotation(self, item: ExtItem, deriv: ExtDerivation) -> Relation:
        rule = deriv.rule
        if rule == "lex":
            return leaf_denotation(deriv.entry, item.head.cat, self.env)
        if rule in _RETAINING:
            functor, argument = deriv.children
            d = join(self.denotation(functor), self.denotation(argument))
            if deriv.project and d.arity > 0:
                d = project(d)
            return d
        if rule in ("R5", "R6", "R7", "R8", "R9", "R10", "R12"):
            return self.denotation(deriv.children[0])
        if rule == "R11":
            left, right = deriv.children
            return conj_combine(deriv.op, self.denotation(left), self.denotation(right))
        if rule == "R13":
            return self._quantify(deriv.children[0])
        raise ParseError(f"unknown rule {rule!r}")

    def _quantify(self, child: ExtItem) -> Relation:
        """Quantifier projection of the child item's denotation, totalizing
        under the closed world when the quantifier needs absent evidence."""
        qname = child.sigma[-1].cat.mark.name
        q = self.grammar.quantifiers[qname]
        a = self.denotation(child)
        kinds = cat_fields(child.target)
        expected = 1 + len(kinds)
        hosts = [
            tuple(self.env.entities) if k == "E" else (True, False)
            for k in kinds[:-1]
        ]
        rdom = sorted(self.restrictor_set(child))
        if a.arity == expected - 1 and kinds[-1] == "T":
            # evidence style: the truth result is implicit
            if q.evidence_safe:
                return quant_project(q, a, "entity")
            total = totalize(a, rdom, hosts)
            return quant_project(q, total, "entity")
        if a.arity == expected and kinds[-1] == "T":
            total = totalize(a, rdom, hosts)
            return quant_project(q, total, "truth")
        if a.arity == expected and kinds[-1] == "E":
            # entity result in the copy form (..., host, host)
            if q.evidence_safe:
                return quant_project(q, a, "entity")
            total = totalize(a, rdom, hosts)
            out = quant_project(q, total, "entity")
            return relation(out.arity + 1, (t + (t[-1],) for t in out.tuples))
        return quant_project(q, a, "entity")

    def restrictor_set(self, item: ExtItem) -> frozenset:
        """Denotation of the restrictor NP behind the item's pending
        quantifier, unioned over derivations."""
        if item in self._restrictor:
            return self._restrictor[item]
        self._restrictor[item] = frozenset()  # cycle guard; graph is acyclic
        out = set()
        for deriv in self.items[item]:
            if deriv.rule == "lex" or deriv.rule == "R11":
                continue
            if deriv.restrictor_from_arg:
                d = self.denotation(deriv.children[1])
                if d.arity == 1:
                    out.update(entity_set(d))
                continue
            main = _main_child(deriv)
            if main is not None:
                out.update(self.restrictor_set(main))
        result = frozenset(out)
        self._restrictor[item] = result
        return result

    # -- scores ---------------------------------------------------------------

    def score_denotational(self, item: ExtItem) -> int:
        if item in self._sd:
            return self._sd[item]
        self._sd[item] = 0  # cycle guard; graph is acyclic
        best = max(self._sd_deriv(item, d) for d in self.items[item])
        self._sd[item] = best
        return best

    def _sd_deriv(self, item: ExtItem, deriv: ExtDerivation) -> int:
        bonus = 1 if self.deriv_denotation(item, deriv) else 0
        return sum(self.score_denotational(c) for c in deriv.children) + bonus

    # -- tree extraction --------------------------------------------------------

    def best_tree(self, goal: Category) -> Tree:
        roots = self.goal_items(goal)
        if not roots:
            raise ParseError(f"goal {to_text(goal)} is not derivable")
        root = max(
            roots, key=lambda it: (self.score_denotational(it), to_text(it.target))
        )
        return self._expand(root)

    def _expand(self, item: ExtItem) -> Tree:
        deriv = self.best_deriv(item)
        denot = self.denotation(item) if self.env is not None else None
        if deriv.rule == "lex":
            return Tree(item.i, item.j, item.target, word=deriv.word, denotation=denot)
        if deriv.rule in _RETAINING or deriv.rule == "R11":
            kids = tuple(
                self._expand(c) for c in sorted(deriv.children, key=lambda c: c.i)
            )
            return Tree(item.i, item.j, item.target, children=kids, denotation=denot)
        # R10 keeps the conjunction word as a sibling; the skip-rule
        # witnesses (R7-R9) duplicate the opposite conjunct and are elided
        # from the display, like the other unary-progress rules
        main = _main_child(deriv)
        sub = self._expand(main)
        if deriv.rule == "R10":
            kids = tuple(sorted((sub, self._expand(deriv.children[1])), key=lambda t: t.i))
            return Tree(item.i, item.j, item.target, children=kids, denotation=denot)
        return Tree(
            item.i,
            item.j,
            item.target,
            word=sub.word,
            children=sub.children,
            denotation=denot,
        )

    def best_deriv(self, item: ExtItem) -> ExtDerivation:
        return best_derivation(
            self.items[item], lambda d: self._sd_deriv(item, d)
        )

    def all_trees(self, goal: Category) -> list:
        """Every distinct display tree for the goal."""
        out: list = []
        for root in self.goal_items(goal):
            for tree in self._enumerate(root):
                if tree not in out:
                    out.append(tree)
        return out

    def _enumerate(self, item: ExtItem) -> list:
        trees = []
        for deriv in self.items[item]:
            if deriv.rule == "lex":
                trees.append(Tree(item.i, item.j, item.target, word=deriv.word))
                continue
            if deriv.rule in _RETAINING or deriv.rule in ("R10", "R11"):
                kid_lists = [self._enumerate(c) for c in deriv.children]
                for combo in _product(kid_lists):
                    kids = tuple(sorted(combo, key=lambda t: (t.i, t.j)))
                    trees.append(Tree(item.i, item.j, item.target, children=kids))
                continue
            main = _main_child(deriv)
            for sub in self._enumerate(main):
                trees.append(
                    Tree(item.i, item.j, item.target, word=sub.word, children=sub.children)
                )
        return trees


def _main_child(deriv: ExtDerivation) -> Optional[ExtItem]:
    """The denotation-carrying antecedent."""
    if deriv.rule == "lex":
        return None
    if deriv.rule in _RETAINING:
        return deriv.children[1]
    return deriv.children[0]


def _product(lists: list) -> list:
    out = [()]
    for options in lists:
        out = [combo + (opt,) for combo in out for opt in options]
    return out


# ---------------------------------------------------------------------------
# Seeding


def seed_extended(input_chart: InputChart, grammar: Grammar) -> tuple[list, list[str]]:
    """Lexical items.  A single-component entry gamma seeds
    [i,j,(gamma),<i,j,gamma>]; a quantifier entry seeds its anchor with the
    anchor's result as the target and the entry's quantifier variable bound
    to the entry's quantifier."""
    items = []
    warnings = []
    for i, j, word, weight in input_chart.edges:
        entries = grammar.lookup(word)
        if not entries:
            warnings.append(f"no lexical entry for {word!r} at {i}..{j}")
            continue
        for entry in entries:
            comps = bind_entry(entry)
            anchor = comps[-1]
            if len(comps) == 1:
                delta = (anchor,)
            else:
                delta = comps[:-1] + (anchor.result,)
            item = ExtItem(i, j, delta, (Component(i, j, anchor),))
            deriv = ExtDerivation("lex", (), word=word, weight=weight, entry=entry)
            items.append((item, deriv))
    return items, warnings


# ---------------------------------------------------------------------------
# Rules


def _functor_ready(item: ExtItem, right: bool) -> bool:
    """Can item act as the applying functor of R1/R2?  It must consist of a
    single recognized component covering its whole span whose category is a
    functor in the wanted direction with the item's target as a result."""
    if len(item.sigma) != 1:
        return False
    head = item.head
    if head.a != item.i or head.b != item.j:
        return False
    cat = head.cat
    if not isinstance(cat, Slash) or cat.right != right:
        return False
    return peel_pending(cat, item.target) is not None


def _pure_functor(item: ExtItem, right: bool) -> bool:
    """R3/R4 functors are single-component items with nothing pending."""
    return (
        _functor_ready(item, right)
        and len(item.delta) == 1
        and item.delta[0] == item.head.cat
    )


def _attach_existing(functor: ExtItem, argument: ExtItem, right: bool):
    """R1 (right) / R2 (left): apply functor to the argument item's target,
    merging the functor's span into the argument's head component."""
    if not _functor_ready(functor, right):
        return None
    if right:
        if functor.j != argument.i or argument.head.a != argument.i:
            return None
    else:
        if argument.j != functor.i or argument.head.b != argument.j:
            return None
    cf = functor.head.cat
    pend_f = peel_pending(cf, functor.target)
    pend_a = peel_pending(argument.head.cat, argument.target)
    if pend_a is None:
        return None
    subst = unify(cf.arg, argument.target)
    if subst is None:
        return None
    # A quantifier-bound argument must stay a separate component so the
    # quantifier rule can discharge it: only the fresh-component rules take
    # those (merging here would orphan the retained restrictor field).
    if _is_bound_np(substitute(cf.arg, subst)):
        return None
    core = cf.result
    new_target = functor.target if pend_f else cf.result
    head_cat = substitute(attach_pending(core, pend_a), subst)
    new_target = substitute(new_target, subst)
    if right:
        span = (functor.i, argument.j)
        head = Component(functor.i, argument.head.b, head_cat)
    else:
        span = (argument.i, functor.j)
        head = Component(argument.head.a, functor.j, head_cat)
    delta = (
        _subst_cats(functor.delta[:-1], subst)
        + _subst_cats(argument.delta[:-1], subst)
        + (new_target,)
    )
    sigma = (head,) + _subst_comps(argument.sigma[1:], subst)
    slot = substitute(cf.arg, subst)
    retain = _is_bound_np(slot) or (bool(pend_f) and _is_bound_np(new_target))
    item = ExtItem(span[0], span[1], delta, sigma)
    deriv = ExtDerivation(
        "R1" if right else "R2",
        (functor, argument),
        project=not retain,
        restrictor_from_arg=retain,
    )
    return item, deriv


def _attach_fresh(functor: ExtItem, argument: ExtItem, right: bool):
    """R3 (right) / R4 (left): the functor becomes a fresh recognized
    component; the argument's trailing unrecognized pair (body pattern,
    argument category) is consumed."""
    if not _pure_functor(functor, right):
        return None
    if right:
        if functor.j != argument.i:
            return None
    else:
        if argument.j != functor.i:
            return None
    if len(argument.delta) < 2:
        return None
    pattern, argpat = argument.delta[-2], argument.delta[-1]
    cf = functor.head.cat
    subst = unify(pattern, cf)
    if subst is None:
        return None
    subst = unify(argpat, cf.arg, subst)
    if subst is None:
        return None
    residue = substitute(cf.result, subst)
    span = (functor.i, argument.j) if right else (argument.i, functor.j)
    delta = _subst_cats(argument.delta[:-2], subst) + (residue,)
    sigma = (
        Component(functor.i, functor.j, substitute(cf, subst)),
    ) + _subst_comps(argument.sigma, subst)
    slot = substitute(cf.arg, subst)
    retain = _is_bound_np(slot)
    item = ExtItem(span[0], span[1], delta, sigma)
    deriv = ExtDerivation(
        "R3" if right else "R4",
        (functor, argument),
        project=not retain,
        restrictor_from_arg=retain,
    )
    return item, deriv


def _discharge_empty(item: ExtItem):
    """R5/R6: a trailing functor-argument pair in delta collapses without
    consuming input."""
    if len(item.delta) < 2:
        return None
    pattern, argpat = item.delta[-2], item.delta[-1]
    if not isinstance(pattern, Slash):
        return None
    subst = unify(pattern.arg, argpat)
    if subst is None:
        return None
    delta = _subst_cats(item.delta[:-2], subst) + (substitute(pattern.result, subst),)
    sigma = _subst_comps(item.sigma, subst)
    new = ExtItem(item.i, item.j, delta, sigma)
    rule = "R5" if pattern.right else "R6"
    return new, ExtDerivation(rule, (item,))


def _conj_consume(conj: ExtItem, item: ExtItem):
    """R7: a conjunction immediately left of an item turns the item's target
    into a partial result Conj'."""
    if not _is_conj_item(conj) or conj.j != item.i:
        return None
    op = conj.head.cat.op
    delta = item.delta[:-1] + (ConjPrime(item.target, op),)
    new = ExtItem(conj.i, item.j, delta, item.sigma)
    return new, ExtDerivation("R7", (item, conj))


def _conj_extend_left(item: ExtItem, witness: ExtItem):
    """R8: an item with a trailing Conj' extends left over a witness of the
    matching plain category, keeping its own component yield."""
    if witness.j != item.i:
        return None
    last = item.delta[-1]
    if not isinstance(last, ConjPrime):
        return None
    if witness.delta != item.delta[:-1] + (last.inner,):
        return None
    delta = item.delta[:-1] + (last.inner,)
    new = ExtItem(witness.i, item.j, delta, item.sigma)
    return new, ExtDerivation("R8", (item, witness))


def _conj_extend_right(item: ExtItem, witness: ExtItem):
    """R9: an item extends right over a witness carrying the matching
    Conj' target, keeping its own component yield."""
    if item.j != witness.i:
        return None
    wlast = witness.delta[-1]
    if not isinstance(wlast, ConjPrime):
        return None
    if witness.delta[:-1] != item.delta[:-1] or wlast.inner != item.delta[-1]:
        return None
    new = ExtItem(item.i, witness.j, item.delta, item.sigma)
    return new, ExtDerivation("R9", (item, witness))


def _conj_prime_trailing(item: ExtItem, conj: ExtItem):
    """R10: a conjunction left-adjacent to the trailing recognized component
    absorbs into it as a partial result Conj'."""
    if not _is_conj_item(conj) or len(item.delta) != 1:
        return None
    last = item.sigma[-1]
    if _is_bound_np(last.cat):
        return None  # quantifier still pending on this component
    if conj.j != last.a or conj.i < item.i:
        return None
    op = conj.head.cat.op
    comp = Component(conj.i, last.b, ConjPrime(last.cat, op))
    new = ExtItem(item.i, item.j, item.delta, item.sigma[:-1] + (comp,))
    return new, ExtDerivation("R10", (item, conj))


def _reassemble(left: ExtItem, right: ExtItem):
    """R11: two items identical except for their trailing components, one a
    Conj' and one plain and adjacent, merge; the duplicated earlier
    components must cover identical yields."""
    if left.i != right.i or left.j != right.j:
        return None
    if len(left.delta) != 1 or left.delta != right.delta:
        return None
    if len(left.sigma) != len(right.sigma) or len(left.sigma) < 1:
        return None
    if left.sigma[:-1] != right.sigma[:-1]:
        return None
    ltail, rtail = left.sigma[-1], right.sigma[-1]
    if not isinstance(ltail.cat, ConjPrime) or isinstance(rtail.cat, ConjPrime):
        return None
    if _is_bound_np(rtail.cat):
        return None  # quantifier still pending on this component
    if ltail.cat.inner != rtail.cat or rtail.b != ltail.a:
        return None
    comp = Component(rtail.a, ltail.b, rtail.cat)
    new = ExtItem(left.i, left.j, left.delta, left.sigma[:-1] + (comp,))
    return new, ExtDerivation("R11", (left, right), op=ltail.cat.op)


def _combine_components(item: ExtItem):
    """R12 (both directions): the last two recognized components merge when
    one is a functor over the other and their spans are adjacent."""
    if len(item.sigma) < 2:
        return None
    f_comp, a_comp = item.sigma[-2], item.sigma[-1]
    if _is_bound_np(a_comp.cat):
        return None  # quantifier still pending on this component
    cat = f_comp.cat
    if not isinstance(cat, Slash):
        return None
    if cat.right:
        if f_comp.b != a_comp.a:
            return None
        span = (f_comp.a, a_comp.b)
    else:
        if a_comp.b != f_comp.a:
            return None
        span = (a_comp.a, f_comp.b)
    subst = unify(cat.arg, a_comp.cat)
    if subst is None:
        return None
    comp = Component(span[0], span[1], substitute(cat.result, subst))
    sigma = _subst_comps(item.sigma[:-2], subst) + (comp,)
    delta = _subst_cats(item.delta, subst)
    new = ExtItem(item.i, item.j, delta, sigma)
    return new, ExtDerivation("R12", (item,))


def _apply_quantifier(item: ExtItem):
    """R13: rewrite the trailing quantified component to unquantified and,
    in the head component that will discharge it, the matching argument
    subscript; the denotation side applies the quantifier function."""
    if len(item.sigma) < 2:
        return None
    last = item.sigma[-1]
    if not _is_bound_np(last.cat):
        return None
    if any(isinstance(d, BodyPlaceholder) for d in item.delta):
        return None
    try:
        cat_fields(item.target)
    except CategoryError:
        return None
    unquant = Atom("NP", UNQUANT)
    sigma = list(item.sigma)
    sigma[-1] = Component(last.a, last.b, unquant)
    head = sigma[0]
    if isinstance(head.cat, Slash) and head.cat.arg == last.cat:
        sigma[0] = Component(head.a, head.b, Slash(head.cat.result, unquant, head.cat.right))
    new = ExtItem(item.i, item.j, item.delta, tuple(sigma))
    return new, ExtDerivation("R13", (item,))


# ---------------------------------------------------------------------------
# Agenda closure


def parse_extended(
    input_chart: InputChart,
    grammar: Grammar,
    env: Optional[Environment] = None,
) -> ExtForest:
    """Fixpoint over R1-R13 from the lexical seeds."""
    forest = ExtForest(grammar, env, input_chart.n)
    by_start: dict = {}
    by_end: dict = {}
    all_items: list = []

    def register(item: ExtItem):
        by_start.setdefault(item.i, []).append(item)
        by_end.setdefault(item.j, []).append(item)
        all_items.append(item)

    agenda = deque()

    def push(result):
        if result is None:
            return
        item, deriv = result
        known = item in forest.items
        if forest.add(item, deriv) and not known:
            register(item)
            agenda.append(item)

    seeds, warnings = seed_extended(input_chart, grammar)
    forest.warnings.extend(warnings)
    for item, deriv in seeds:
        push((item, deriv))

    while agenda:
        x = agenda.popleft()
        is_conj = _is_conj_item(x)

        # applications with x as functor
        for a in list(by_start.get(x.j, [])):
            push(_attach_existing(x, a, right=True))
            push(_attach_fresh(x, a, right=True))
        for a in list(by_end.get(x.i, [])):
            push(_attach_existing(x, a, right=False))
            push(_attach_fresh(x, a, right=False))
        # applications with x as argument
        for f in list(by_end.get(x.i, [])):
            push(_attach_existing(f, x, right=True))
            push(_attach_fresh(f, x, right=True))
        for f in list(by_start.get(x.j, [])):
            push(_attach_existing(f, x, right=False))
            push(_attach_fresh(f, x, right=False))

        # unary rules
        push(_discharge_empty(x))
        push(_combine_components(x))
        push(_apply_quantifier(x))

        # conjunction skipping
        if is_conj:
            for it in list(by_start.get(x.j, [])):
                push(_conj_consume(x, it))
            for it in list(all_items):
                push(_conj_prime_trailing(it, x))
        else:
            for c in list(by_end.get(x.i, [])):
                push(_conj_consume(c, x))
            _conj_prime_with_any_conj(x, by_end, push)
        # R8/R9 pairings: x as main and as witness
        for w in list(by_end.get(x.i, [])):
            push(_conj_extend_left(x, w))
        for m in list(by_start.get(x.j, [])):
            push(_conj_extend_left(m, x))
        for w in list(by_start.get(x.j, [])):
            push(_conj_extend_right(x, w))
        for m in list(by_end.get(x.i, [])):
            push(_conj_extend_right(m, x))
        # R11 pairings
        for other in list(by_start.get(x.i, [])):
            if other.j == x.j:
                push(_reassemble(x, other))
                push(_reassemble(other, x))

    return forest


def _conj_prime_with_any_conj(item: ExtItem, by_end: dict, push) -> None:
    """R10 candidates for a newly added non-conjunction item."""
    if len(item.delta) != 1 or not item.sigma:
        return None
    c_pos = item.sigma[-1].a
    for c in list(by_end.get(c_pos, [])):
        push(_conj_prime_trailing(item, c))
    return None
