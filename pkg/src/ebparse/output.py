"""Rendering of parse results: bracketed trees, forest dumps, traces.

The JSON forest schema is:

    {"items": [{"id", "i", "j", "delta", "sigma", "cat", "denotation",
                "score"}],
     "derivations": [{"parent", "rule", "children"}]}

where delta is a list of category strings, sigma a list of
{"a", "b", "cat"} component records (basic items have the single component
covering their span), and denotation a list of value-string tuples using the
literals "true"/"false".
"""

from __future__ import annotations

import json
from typing import Optional, Union

from .basic_parser import BasicItem, Forest, Tree
from .categories import to_text
from .extended_parser import (
    ExtForest,
    ExtItem,
    _apply_quantifier,
    _attach_existing,
    _attach_fresh,
    _combine_components,
    _conj_consume,
    _conj_extend_left,
    _conj_extend_right,
    _conj_prime_trailing,
    _discharge_empty,
    _reassemble,
)
from .relations import Relation, format_relation, format_value

AnyForest = Union[Forest, ExtForest]


def format_tree(tree: Tree, denotations: bool = False) -> str:
    """Bracketed tree with category labels, optionally annotated with each
    node's denotation."""
    label = to_text(tree.cat)
    if denotations and tree.denotation is not None:
        label += " " + format_relation(tree.denotation)
    if tree.word is not None and not tree.children:
        return f"[{label} {tree.word!r}]"
    inner = " ".join(format_tree(c, denotations) for c in tree.children)
    return f"[{label} {inner}]"


def _sorted_items(forest: AnyForest) -> list:
    def key(item):
        if isinstance(item, BasicItem):
            return (item.i, item.j, to_text(item.cat), "")
        return (
            item.i,
            item.j,
            " . ".join(to_text(d) for d in item.delta),
            " ".join(str(c) for c in item.sigma),
        )

    return sorted(forest.items, key=key)


def _denotation_json(rel: Optional[Relation]):
    if rel is None:
        return None
    return sorted([format_value(v) for v in t] for t in rel.tuples)


def forest_to_json(forest: AnyForest, with_scores: bool = True) -> dict:
    items = _sorted_items(forest)
    ids = {item: k for k, item in enumerate(items)}
    out_items = []
    for item in items:
        if isinstance(item, BasicItem):
            delta = [to_text(item.cat)]
            sigma = [{"a": item.i, "b": item.j, "cat": to_text(item.cat)}]
            cat = to_text(item.cat)
        else:
            delta = [to_text(d) for d in item.delta]
            sigma = [{"a": c.a, "b": c.b, "cat": to_text(c.cat)} for c in item.sigma]
            cat = to_text(item.target)
        rec = {
            "id": ids[item],
            "i": item.i,
            "j": item.j,
            "delta": delta,
            "sigma": sigma,
            "cat": cat,
        }
        if forest.env is not None:
            rec["denotation"] = _denotation_json(forest.denotation(item))
            if with_scores:
                rec["score"] = forest.score_denotational(item)
        out_items.append(rec)
    derivs = []
    for item in items:
        for d in forest.items[item]:
            rule = d.rule
            if rule == "R11":
                rule = f"R11[{d.op}]"
            rec = {"parent": ids[item], "rule": rule, "children": [ids[c] for c in d.children]}
            if d.rule == "lex":
                rec["word"] = d.word
            derivs.append(rec)
    return {"items": out_items, "derivations": derivs}


def forest_to_json_text(forest: AnyForest) -> str:
    return json.dumps(forest_to_json(forest), indent=2, sort_keys=True)


def forest_to_dot(forest: AnyForest) -> str:
    """GraphViz rendering: one node per item labeled with category and
    denotation, one point node per rule application."""
    items = _sorted_items(forest)
    ids = {item: k for k, item in enumerate(items)}
    lines = ["digraph forest {", "  node [shape=box];"]
    for item in items:
        cat = to_text(item.cat) if isinstance(item, BasicItem) else to_text(item.target)
        label = f"{item.i},{item.j} {cat}"
        if forest.env is not None:
            label += "\\n" + format_relation(forest.denotation(item))
        lines.append(f'  n{ids[item]} [label="{label}"];')
    k = 0
    for item in items:
        for d in forest.items[item]:
            if not d.children:
                continue
            lines.append(f"  d{k} [shape=point];")
            for child in d.children:
                lines.append(f"  n{ids[child]} -> d{k};")
            lines.append(f'  d{k} -> n{ids[item]} [label="{d.rule}"];')
            k += 1
    lines.append("}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Traces


def format_trace(forest: AnyForest, goal_item) -> str:
    """Numbered rule firings along the goal item's preferred derivation,
    children before parents, lexical seeds listed first unnumbered."""
    lines: list[str] = []
    seen = set()
    counter = [0]

    def visit(item):
        if item in seen:
            return
        seen.add(item)
        if isinstance(forest, Forest):
            deriv = _best_basic_deriv(forest, item)
        else:
            deriv = forest.best_deriv(item)
        for child in sorted(deriv.children, key=lambda c: (c.i, c.j, str(c))):
            visit(child)
        denot = ""
        if forest.env is not None:
            denot = "  " + format_relation(forest.denotation(item))
        if deriv.rule == "lex":
            lines.append(f"   seed {item}{denot}")
        else:
            counter[0] += 1
            rule = deriv.rule
            if rule == "R11":
                rule = f"R11[{deriv.op}]"
            lines.append(f"({counter[0]:2d}) {rule:<8s} {item}{denot}")

    visit(goal_item)
    return "\n".join(lines)


def _best_basic_deriv(forest: Forest, item: BasicItem):
    from .basic_parser import best_derivation

    return best_derivation(forest.items[item], lambda d: forest._sd_deriv(item, d))


# ---------------------------------------------------------------------------
# Forest verification


def verify_forest_json(doc: dict, forest: AnyForest) -> list[str]:
    """Re-verify an emitted JSON forest against the live chart and the rule
    definitions.  Returns a list of discrepancies (empty means verified)."""
    problems: list[str] = []
    live = {}
    for rec in doc["items"]:
        item = _rebuild_item(rec, forest)
        if item not in forest.items:
            problems.append(f"item {rec['id']} not present in the chart")
            continue
        live[rec["id"]] = item

    for rec in doc["derivations"]:
        parent = live.get(rec["parent"])
        children = [live.get(c) for c in rec["children"]]
        if parent is None or any(c is None for c in children):
            problems.append(f"derivation {rec} references unknown items")
            continue
        rule = rec["rule"]
        if rule == "lex":
            continue
        if isinstance(forest, Forest):
            ok = _check_basic_apply(rule, parent, children)
        else:
            ok = _check_ext_rule(rule, parent, children)
        if not ok:
            problems.append(f"rule {rule} does not rederive item {rec['parent']}")
    return problems


def _rebuild_item(rec: dict, forest: AnyForest):
    from .categories import parse_category

    quantifiers = forest.grammar.quantifiers.keys()
    if isinstance(forest, Forest):
        return BasicItem(rec["i"], rec["j"], parse_category(rec["cat"], quantifiers))
    # Extended item texts include Conj'/operator forms that are not part of
    # the file surface syntax, so rebuild by matching against live items.
    for item in forest.items:
        if isinstance(item, ExtItem) and item.i == rec["i"] and item.j == rec["j"]:
            if [to_text(d) for d in item.delta] == rec["delta"] and [
                {"a": c.a, "b": c.b, "cat": to_text(c.cat)} for c in item.sigma
            ] == rec["sigma"]:
                return item
    return None


def _check_basic_apply(rule: str, parent: BasicItem, children: list) -> bool:
    from .basic_parser import _applications

    functor, argument = children
    left, right = (functor, argument) if functor.i <= argument.i else (argument, functor)
    for item, deriv in _applications(left, right):
        if item == parent and deriv.rule == rule:
            return True
    return False


def _check_ext_rule(rule: str, parent: ExtItem, children: list) -> bool:
    op = None
    if rule.startswith("R11["):
        op, rule = rule[4:-1], "R11"
    candidates = []
    if rule in ("R1", "R2"):
        candidates.append(_attach_existing(children[0], children[1], right=rule == "R1"))
    elif rule in ("R3", "R4"):
        candidates.append(_attach_fresh(children[0], children[1], right=rule == "R3"))
    elif rule in ("R5", "R6"):
        candidates.append(_discharge_empty(children[0]))
    elif rule == "R7":
        candidates.append(_conj_consume(children[1], children[0]))
    elif rule == "R8":
        candidates.append(_conj_extend_left(children[0], children[1]))
    elif rule == "R9":
        candidates.append(_conj_extend_right(children[0], children[1]))
    elif rule == "R10":
        candidates.append(_conj_prime_trailing(children[0], children[1]))
    elif rule == "R11":
        candidates.append(_reassemble(children[0], children[1]))
    elif rule == "R12":
        candidates.append(_combine_components(children[0]))
    elif rule == "R13":
        candidates.append(_apply_quantifier(children[0]))
    for cand in candidates:
        if cand is None:
            continue
        item, deriv = cand
        if item == parent and deriv.rule == rule and (op is None or deriv.op == op):
            return True
    return False
