import json

from ebparse.basic_parser import parse_basic
from ebparse.categories import parse_category
from ebparse.extended_parser import parse_extended
from ebparse.output import (
    forest_to_dot,
    forest_to_json,
    forest_to_json_text,
    format_trace,
    format_tree,
    verify_forest_json,
)

from conftest import sentence


def test_format_tree_with_denotations(warehouse):
    env, g = warehouse
    forest = parse_basic(sentence("the lemon"), g, env)
    tree = forest.best_tree(parse_category("NP"))
    assert format_tree(tree) == "[NP [NP/NP 'the'] [NP 'lemon']]"
    annotated = format_tree(tree, denotations=True)
    assert "{l1, l2, l3, l4}" in annotated


def test_json_schema_fields(warehouse):
    env, g = warehouse
    forest = parse_basic(sentence("lemon in bin"), g, env)
    doc = forest_to_json(forest)
    assert set(doc.keys()) == {"items", "derivations"}
    for rec in doc["items"]:
        assert {"id", "i", "j", "delta", "sigma", "cat", "denotation", "score"} <= set(rec)
    kinds = {d["rule"] for d in doc["derivations"]}
    assert "lex" in kinds and ("apply_l" in kinds or "apply_r" in kinds)
    # denotation values are strings with true/false literals
    for rec in doc["items"]:
        for t in rec["denotation"]:
            assert all(isinstance(v, str) for v in t)


def test_json_round_trip_verifies_basic(warehouse):
    env, g = warehouse
    forest = parse_basic(sentence("lemon in bin by machine"), g, env)
    doc = json.loads(forest_to_json_text(forest))
    assert verify_forest_json(doc, forest) == []


def test_json_round_trip_verifies_extended(pantry):
    env, g = pantry
    forest = parse_extended(sentence("containing one orange and one lemon"), g, env)
    doc = json.loads(forest_to_json_text(forest))
    assert verify_forest_json(doc, forest) == []


def test_json_verifier_catches_tampering(warehouse):
    env, g = warehouse
    forest = parse_basic(sentence("lemon in bin"), g, env)
    doc = forest_to_json(forest)
    tampered = [d for d in doc["derivations"] if d["rule"] != "lex"]
    tampered[0] = dict(tampered[0], rule="apply_r" if tampered[0]["rule"] == "apply_l" else "apply_l")
    doc["derivations"] = tampered
    assert verify_forest_json(doc, forest)


def test_dot_output_nodes_and_edges(warehouse):
    env, g = warehouse
    forest = parse_basic(sentence("the lemon"), g, env)
    dot = forest_to_dot(forest)
    assert dot.startswith("digraph forest {")
    assert '"0,2 NP' in dot
    assert "-> d0" in dot


def test_trace_covers_derivation(pantry):
    env, g = pantry
    forest = parse_extended(sentence("containing one orange and one lemon"), g, env)
    (goal,) = forest.goal_items(parse_category("S\\NP_q"))
    trace = format_trace(forest, goal)
    for fragment in ["R7", "R3", "R13", "R10", "R11[and]", "R12", "{x1}"]:
        assert fragment in trace, fragment
    # numbered steps in order
    lines = [l for l in trace.splitlines() if l.startswith("(")]
    assert [int(l.split(")")[0][1:]) for l in lines] == list(range(1, len(lines) + 1))


def test_output_bytes_deterministic(warehouse):
    env, g = warehouse
    a = forest_to_json_text(parse_basic(sentence("lemon in bin by machine"), g, env))
    b = forest_to_json_text(parse_basic(sentence("lemon in bin by machine"), g, env))
    assert a == b
