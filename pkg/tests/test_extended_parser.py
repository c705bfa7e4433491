import random

import pytest

from ebparse.basic_parser import InputChart, parse_basic
from ebparse.categories import (
    BodyPlaceholder,
    ConjPrime,
    parse_category,
    to_text,
)
from ebparse.extended_parser import (
    Component,
    ExtItem,
    parse_extended,
    seed_extended,
)
from ebparse.relations import format_relation

from conftest import random_fixture, sentence


def find_items(forest, predicate):
    return [it for it in forest.items if predicate(it)]


def delta_text(item):
    return " . ".join(to_text(d) for d in item.delta)


def sigma_text(item):
    return " ".join(f"<{c.a},{c.b},{to_text(c.cat)}>" for c in item.sigma)


def assert_item(forest, span, delta, sigma, denotation=None):
    """The chart contains an item with the given delta/sigma texts."""
    matches = [
        it
        for it in forest.items
        if (it.i, it.j) == span and delta_text(it) == delta and sigma_text(it) == sigma
    ]
    assert matches, f"no item [{span}, {delta}, {sigma}] in chart"
    (it,) = matches
    if denotation is not None:
        assert format_relation(forest.denotation(it)) == denotation
    return it


# ---------------------------------------------------------------------------
# seeding


def test_seed_single_component(pantry):
    env, g = pantry
    items, _ = seed_extended(sentence("containing"), g)
    ((it, deriv),) = [x for x in items]
    assert delta_text(it) == "S\\NP_q/NP_r"
    assert sigma_text(it) == "<0,1,S\\NP_q/NP_r>"


def test_seed_quantifier_entry(pantry):
    env, g = pantry
    items, _ = seed_extended(InputChart.from_edges([(1, 2, "one", 1.0)]), g)
    (it, _), = items
    assert (it.i, it.j) == (1, 2)
    assert delta_text(it) == (
        "X\\NP_exactly_one . NP_exactly_one\\NP_exactly_one . NP_exactly_one"
    )
    assert sigma_text(it) == "<1,2,NP_exactly_one/NP_e>"


def test_seed_conjunction(pantry):
    env, g = pantry
    items, _ = seed_extended(InputChart.from_edges([(2, 3, "and", 1.0)]), g)
    (it, _), = items
    assert delta_text(it) == "Conj"
    assert it.head.cat.op == "and"


def test_seed_unknown_word_warns(pantry):
    env, g = pantry
    items, warnings = seed_extended(sentence("zzz"), g)
    assert items == []
    assert warnings


# ---------------------------------------------------------------------------
# the quantified-conjunction derivation, step by step

PHRASE = "containing one orange and one lemon"


@pytest.fixture(scope="module")
def pantry_forest(pantry):
    env, g = pantry
    return parse_extended(sentence(PHRASE), g, env)


def test_restrictor_attachment(pantry_forest):
    # "one orange": anchor consumed the restrictor; denotation is the
    # restrictor set
    assert_item(
        pantry_forest,
        (1, 3),
        "X\\NP_exactly_one . NP_exactly_one\\NP_exactly_one . NP_exactly_one",
        "<1,3,NP_exactly_one>",
        "{o1, o2, o3, o4}",
    )


def test_empty_component_discharge(pantry_forest):
    assert_item(
        pantry_forest,
        (1, 3),
        "X\\NP_exactly_one . NP_exactly_one",
        "<1,3,NP_exactly_one>",
        "{o1, o2, o3, o4}",
    )


def test_conjunction_skip_widens_both_sides(pantry_forest):
    # orange side widened over "and one lemon", component yield unchanged
    assert_item(
        pantry_forest,
        (1, 6),
        "X\\NP_exactly_one . NP_exactly_one",
        "<1,3,NP_exactly_one>",
        "{o1, o2, o3, o4}",
    )
    # lemon side widened back over "orange and"
    assert_item(
        pantry_forest,
        (1, 6),
        "X\\NP_exactly_one . NP_exactly_one",
        "<4,6,NP_exactly_one>",
        "{l1, l2, l3}",
    )


def test_no_conjunction_rules_without_conj_token(pantry):
    env, g = pantry
    forest = parse_extended(sentence("containing one orange"), g, env)
    for it in forest.items:
        assert not any(isinstance(d, ConjPrime) for d in it.delta)


def test_fresh_attachment_keeps_restrictor_field(pantry_forest):
    assert_item(
        pantry_forest,
        (0, 6),
        "S\\NP_q",
        "<0,1,S\\NP_q/NP_exactly_one> <1,3,NP_exactly_one>",
        "{(o1,x1)}",
    )
    assert_item(
        pantry_forest,
        (0, 6),
        "S\\NP_q",
        "<0,1,S\\NP_q/NP_exactly_one> <4,6,NP_exactly_one>",
        "{(l2,x1), (l3,x3)}",
    )


def test_quantifier_application_rewrites_subscripts(pantry_forest):
    assert_item(
        pantry_forest,
        (0, 6),
        "S\\NP_q",
        "<0,1,S\\NP_q/NP_e> <1,3,NP_e>",
        "{x1}",
    )
    assert_item(
        pantry_forest,
        (0, 6),
        "S\\NP_q",
        "<0,1,S\\NP_q/NP_e> <4,6,NP_e>",
        "{x1, x3}",
    )


def test_reassembly_and_combination(pantry_forest):
    assert_item(
        pantry_forest,
        (0, 6),
        "S\\NP_q",
        "<0,1,S\\NP_q/NP_e> <3,6,Conj'[and](NP_e)>",
        "{x1, x3}",
    )
    assert_item(
        pantry_forest,
        (0, 6),
        "S\\NP_q",
        "<0,1,S\\NP_q/NP_e> <1,6,NP_e>",
        "{x1}",
    )
    goal = assert_item(
        pantry_forest, (0, 6), "S\\NP_q", "<0,6,S\\NP_q>", "{x1}"
    )
    assert pantry_forest.goal_items(parse_category("S\\NP_q")) == [goal]


def test_or_variant_unions(pantry):
    env, g = pantry
    forest = parse_extended(sentence("containing one orange or one lemon"), g, env)
    (goal,) = forest.goal_items(parse_category("S\\NP_q"))
    assert format_relation(forest.denotation(goal)) == "{x1, x3}"


def test_mismatched_duplicate_yields_block_reassembly(pantry):
    """Reassembly needs byte-identical duplicated components; with two
    different verbs the shared prefixes differ and conjunction fails."""
    from ebparse.environment import load_environment
    from ebparse.lexicon import load_lexicon

    env = load_environment(
        "entity o1 l1 x1\n"
        "relation orange : NP { (o1) }\n"
        "relation lemon : NP { (l1) }\n"
        "relation containing : S\\NP/NP { (o1,x1) }\n"
        "relation holding : S\\NP/NP { (l1,x1) }\n"
    )
    g = load_lexicon(
        "word containing : S\\NP_q/NP_r = rel containing\n"
        "word holding : S\\NP_q/NP_r = rel holding\n"
        "word one : X\\NP_q . NP_q\\NP_q . NP_q/NP_e = quant exactly_one\n"
        "word orange : NP_e = rel orange\n"
        "word lemon : NP_e = rel lemon\n"
        "word and : Conj = conj and\n",
        env,
    )
    # "containing one orange and holding one lemon" still parses as plain
    # verb-phrase conjunction, but the duplicated-body analysis (an NP_e
    # component spanning both conjuncts under a single verb component) must
    # not arise: the two verbs cover different yields.
    forest = parse_extended(
        sentence("containing one orange and holding one lemon"), g, env
    )
    assert forest.goal_items(parse_category("S\\NP_q"))
    merged_np = [
        it
        for it in forest.items
        if len(it.sigma) == 2
        and to_text(it.sigma[1].cat) == "NP_e"
        and (it.sigma[1].a, it.sigma[1].b) == (1, 7)
    ]
    assert not merged_np


def test_reassembly_prefixes_byte_identical(pantry_forest):
    for item, derivs in pantry_forest.items.items():
        for d in derivs:
            if d.rule == "R11":
                left, right = d.children
                assert left.sigma[:-1] == right.sigma[:-1]


# ---------------------------------------------------------------------------
# negative quantifier over a modifier (closed-world totalization)


def test_boy_with_no_backpack(locker):
    env, g = locker
    forest = parse_extended(sentence("the boy with no backpack"), g, env)
    (goal,) = forest.goal_items(parse_category("NP_e"))
    assert format_relation(forest.denotation(goal)) == "{boyC}"


def test_boy_with_some_backpack(locker):
    env, g = locker
    forest = parse_extended(sentence("the boy with some backpack"), g, env)
    (goal,) = forest.goal_items(parse_category("NP_e"))
    assert format_relation(forest.denotation(goal)) == "{boyA, boyB}"


def test_no_over_empty_evidence_passes_every_host(locker):
    env, g = locker
    # nothing is 'with' anything in this variant
    from ebparse.environment import load_environment
    from ebparse.lexicon import load_lexicon
    from conftest import LOCKER_LEX

    env2 = load_environment(
        "entity boyA boyB k1\n"
        "relation boy : NP { (boyA)(boyB) }\n"
        "relation backpack : NP { (k1) }\n"
        "relation with : NP\\NP/NP { }\n"
    )
    g2 = load_lexicon(LOCKER_LEX, env2)
    forest = parse_extended(sentence("the boy with no backpack"), g2, env2)
    (goal,) = forest.goal_items(parse_category("NP_e"))
    assert format_relation(forest.denotation(goal)) == "{boyA, boyB}"


# ---------------------------------------------------------------------------
# verb duplication for conjoined quantified NPs


def test_duplicated_verb_conjunction(wardrobe):
    env, g = wardrobe
    forest = parse_extended(
        sentence("wearing some glasses and some blue pants"), g, env
    )
    (goal,) = forest.goal_items(parse_category("S\\NP_q"))
    # c1 wears glasses g1 and blue pants p1; the naive intersection of
    # glasses and pants entities would be empty
    assert format_relation(forest.denotation(goal)) == "{c1}"


def test_extended_deterministic_across_input_orders(pantry):
    env, g = pantry
    words = PHRASE.split()
    base = [(k, k + 1, w, 1.0) for k, w in enumerate(words)]
    rng = random.Random(3)
    reference = None
    for _ in range(20):
        edges = base[:]
        rng.shuffle(edges)
        forest = parse_extended(InputChart.from_edges(edges), g, env)
        tree = forest.best_tree(parse_category("S\\NP_q")).stripped()
        if reference is None:
            reference = tree
        assert tree == reference


def test_all_trees_enumeration(pantry):
    env, g = pantry
    forest = parse_extended(sentence(PHRASE), g, env)
    trees = forest.all_trees(parse_category("S\\NP_q"))
    assert trees
    for t in trees:
        assert sorted(set(t.leaves())) <= sorted(set(PHRASE.split()))


def test_three_component_chain_merges_pairwise():
    """Adjacent recognized components combine two at a time."""
    from ebparse.extended_parser import _combine_components

    np = parse_category("NP")
    np_np = parse_category("NP/NP")
    item = ExtItem(
        0,
        3,
        (np,),
        (
            Component(0, 1, np_np),
            Component(1, 2, np_np),
            Component(2, 3, np),
        ),
    )
    step1, deriv1 = _combine_components(item)
    assert deriv1.rule == "R12"
    assert sigma_text(step1) == "<0,1,NP/NP> <1,3,NP>"
    step2, deriv2 = _combine_components(step1)
    assert sigma_text(step2) == "<0,3,NP>"
    assert _combine_components(step2) is None


def test_single_component_item_does_not_combine():
    from ebparse.extended_parser import _combine_components

    np = parse_category("NP")
    item = ExtItem(0, 1, (np,), (Component(0, 1, np),))
    assert _combine_components(item) is None


def test_nested_quantifiers_sentence_level(pantry):
    """Subject and object quantifiers apply in sequence; the sentence
    denotes the zero-arity truth witness."""
    from ebparse.environment import load_environment
    from ebparse.lexicon import load_lexicon

    env = load_environment(
        "entity o1 o2 x1 x3\n"
        "relation orange : NP { (o1)(o2) }\n"
        "relation bin : NP { (x1)(x3) }\n"
        "relation containing : S\\NP/NP { (o1,x1) }\n"
    )
    g = load_lexicon(
        "word containing : S\\NP_q/NP_r = rel containing\n"
        "word one : X\\NP_q . NP_q\\NP_q . NP_q/NP_e = quant exactly_one\n"
        "word orange : NP_e = rel orange\n"
        "word bin : NP_e = rel bin\n",
        env,
    )
    forest = parse_extended(sentence("one bin containing one orange"), g, env)
    (goal,) = forest.goal_items(parse_category("S"))
    # exactly one bin (x1) contains exactly one orange: true
    assert format_relation(forest.denotation(goal)) == "{()}"


def test_total_style_relation_flows_truth_annotated(pantry):
    """A verb relation loaded with explicit truth values keeps a total
    truth-annotated denotation through quantification and conjunction."""
    from ebparse.environment import load_environment
    from ebparse.lexicon import load_lexicon

    env = load_environment(
        "entity o1 o2 l1 x1 x3\n"
        "relation orange : NP { (o1)(o2) }\n"
        "relation lemon : NP { (l1) }\n"
        "relation containing : S\\NP/NP {"
        " (o1,x1,true)(l1,x1,true)(l1,x3,false)(o1,x3,false) }\n"
    )
    g = load_lexicon(
        "word containing : S\\NP_q/NP_r = rel containing\n"
        "word one : X\\NP_q . NP_q\\NP_q . NP_q/NP_e = quant exactly_one\n"
        "word orange : NP_e = rel orange\n"
        "word lemon : NP_e = rel lemon\n"
        "word and : Conj = conj and\n",
        env,
    )
    forest = parse_extended(sentence("containing one orange and one lemon"), g, env)
    (goal,) = forest.goal_items(parse_category("S\\NP_q"))
    d = forest.denotation(goal)
    assert d.arity == 2
    assert ("x1", True) in d.tuples
    assert all(t[1] is False for t in d.tuples if t[0] != "x1")
    assert len(d) == len(env.entities)  # total over every possible subject


def test_extended_equals_basic_on_modifier_chain(warehouse):
    env, g = warehouse
    chart = sentence("lemon in bin by machine")
    fb = parse_basic(chart, g, env)
    fe = parse_extended(chart, g, env)
    goal = parse_category("NP")
    assert fb.best_tree(goal).stripped() == fe.best_tree(goal).stripped()
    basics = {(it.i, it.j, to_text(it.cat)) for it in fb.items}
    exts = {(it.i, it.j, to_text(it.target)) for it in fe.items}
    assert basics == exts


# ---------------------------------------------------------------------------
# conservativity against the basic parser


def as_basic_views(forest):
    views = {}
    for it in forest.items:
        assert len(it.sigma) == 1 and len(it.delta) == 1
        assert it.head.a == it.i and it.head.b == it.j
        assert it.delta[0] == it.head.cat
        views[(it.i, it.j, to_text(it.target))] = it
    return views


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_conservative_on_plain_grammars(seed):
    rng = random.Random(seed)
    for _ in range(10):
        env, g, words = random_fixture(rng)
        chart = sentence(" ".join(words))
        fb = parse_basic(chart, g, env)
        fe = parse_extended(chart, g, env)
        basics = {(it.i, it.j, to_text(it.cat)): it for it in fb.items}
        exts = as_basic_views(fe)
        assert basics.keys() == exts.keys()
        for key, bit in basics.items():
            assert fb.denotation(bit) == fe.denotation(exts[key])
            assert fb.score_denotational(bit) == fe.score_denotational(exts[key])


# ---------------------------------------------------------------------------
# structural invariants


def test_within_worst_case_throughout(pantry_forest):
    """Denotations stay inside the worst case of the item's category once
    every quantifier on the item has been discharged; while one is pending
    the denotation additionally carries the restrictor field, which must
    hold entities of the universe."""
    from ebparse.environment import within_worst_case
    from ebparse.categories import contains_pattern, CategoryError
    from ebparse.categories import fields

    def has_bound(cat):
        mark = getattr(cat, "mark", None)
        if mark is not None and mark.kind == "bound":
            return True
        return any(has_bound(sub) for sub in _subcats(cat))

    def _subcats(cat):
        from ebparse.categories import Slash, ConjPrime, BodyPlaceholder

        if isinstance(cat, Slash):
            return (cat.result, cat.arg)
        if isinstance(cat, ConjPrime):
            return (cat.inner,)
        if isinstance(cat, BodyPlaceholder):
            return (cat.arg,)
        return ()

    env = pantry_forest.env
    universe = env.entity_set
    for it in pantry_forest.items:
        d = pantry_forest.denotation(it)
        if any(has_bound(c.cat) for c in it.sigma):
            # pending quantifier: every entity value must still live in the
            # universe (the restrictor field included)
            for t in d.tuples:
                for v in t:
                    assert isinstance(v, bool) or v in universe
            continue
        cat = it.target
        if contains_pattern(cat):
            continue
        try:
            fields(cat)
        except CategoryError:
            continue
        if d.arity > 0:
            assert within_worst_case(d, cat, env), str(it)


def test_component_spans_inside_item(pantry_forest):
    for it in pantry_forest.items:
        for comp in it.sigma:
            assert it.i <= comp.a < comp.b <= it.j
        spans = sorted((c.a, c.b) for c in it.sigma)
        for (a1, b1), (a2, b2) in zip(spans, spans[1:]):
            assert b1 <= a2, f"overlapping components in {it}"


def test_component_count_bounded(pantry_forest, pantry):
    env, g = pantry
    bound = g.max_components
    for it in pantry_forest.items:
        assert len(it.sigma) <= bound


def test_derivation_measure_strictly_decreases(pantry_forest):
    def measure(item):
        covered = sum(c.b - c.a for c in item.sigma)
        bound_marks = sum(
            1 for c in item.sigma if getattr(c.cat, "mark", None) and c.cat.mark.kind == "bound"
        )
        return (item.j - item.i, covered, -len(item.delta), -bound_marks, -len(item.sigma))

    for item, derivs in pantry_forest.items.items():
        for d in derivs:
            for child in d.children:
                assert measure(child) < measure(item), (str(item), d.rule, str(child))


def test_item_count_polynomial_bound(pantry):
    env, g = pantry
    n_cats = len(g.nonterminals)
    c = g.max_components
    for n in (4, 6):
        words = PHRASE.split()[:n]
        forest = parse_extended(sentence(" ".join(words)), g, env)
        assert len(forest) <= n**4 * n_cats**c


def test_empty_item_count_growth_is_polynomial():
    """Item counts along growing modifier chains fit a cubic-ish log-log
    slope, so closure does not blow up super-polynomially."""
    from ebparse.bench import build_chain_fixture, chain_sentence, fit_loglog_slope

    env, g = build_chain_fixture(9)
    counts = []
    lengths = [4, 8, 16, 32]
    for n in lengths:
        forest = parse_extended(sentence(" ".join(chain_sentence(n))), g, env)
        counts.append(len(forest))
    slope = fit_loglog_slope(lengths, counts)
    assert slope <= 3.5, (lengths, counts, slope)
