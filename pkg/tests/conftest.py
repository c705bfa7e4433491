import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ebparse.basic_parser import InputChart
from ebparse.environment import load_environment
from ebparse.lexicon import load_lexicon

FIXTURES = Path(__file__).parent.parent / "fixtures"

WAREHOUSE_ENV = (FIXTURES / "warehouse.env").read_text()
WAREHOUSE_LEX = (FIXTURES / "warehouse.lex").read_text()
PANTRY_ENV = (FIXTURES / "pantry.env").read_text()
PANTRY_LEX = (FIXTURES / "pantry.lex").read_text()

LOCKER_ENV = """
entity boyA boyB boyC
entity k1 k2
entity m1
relation boy : NP { (boyA)(boyB)(boyC) }
relation backpack : NP { (k1)(k2) }
relation with : NP\\NP/NP { (k1,boyA,boyA)(k2,boyB,boyB) }
"""

LOCKER_LEX = """
word the : NP_e/NP_e = identity
word boy : NP_e = rel boy
word backpack : NP_e = rel backpack
word with : NP_e\\NP_e/NP_w = rel with
word no : X\\NP_q . NP_q\\NP_q . NP_q/NP_e = quant no
word some : X\\NP_q . NP_q\\NP_q . NP_q/NP_e = quant some
word all : X\\NP_q . NP_q\\NP_q . NP_q/NP_e = quant all
"""

WARDROBE_ENV = """
entity c1 c2 c3
entity g1 g2
entity p1 p2
relation glasses : NP { (g1)(g2) }
relation pants : NP { (p1)(p2) }
relation blue : NP/NP { (p1,p1) }
relation wearing : S\\NP/NP { (g1,c1)(g2,c2)(p1,c1)(p2,c3) }
"""

WARDROBE_LEX = """
word wearing : S\\NP_q/NP_r = rel wearing
word some : X\\NP_q . NP_q\\NP_q . NP_q/NP_e = quant some
word glasses : NP_e = rel glasses
word blue : NP_e/NP_e = rel blue
word pants : NP_e = rel pants
word and : Conj = conj and
word or : Conj = conj or
"""


def build(env_text, lex_text):
    env = load_environment(env_text)
    return env, load_lexicon(lex_text, env)


@pytest.fixture(scope="session")
def warehouse():
    return build(WAREHOUSE_ENV, WAREHOUSE_LEX)


@pytest.fixture(scope="session")
def pantry():
    return build(PANTRY_ENV, PANTRY_LEX)


@pytest.fixture(scope="session")
def locker():
    return build(LOCKER_ENV, LOCKER_LEX)


@pytest.fixture(scope="session")
def wardrobe():
    return build(WARDROBE_ENV, WARDROBE_LEX)


def sentence(text):
    return InputChart.from_sentence(text.split())


# ---------------------------------------------------------------------------
# Random single-component fixtures for the oracle and conservativity runs

_CATS = [
    ("NP", 1),
    ("NP/NP", 2),
    ("NP\\NP", 2),
    ("NP\\NP/NP", 3),
    ("S\\NP", 2),
    ("S\\NP/NP", 3),
]


def random_fixture(rng: random.Random):
    """A random environment, single-component lexicon and sentence with at
    most 8 entities and category valency at most 3."""
    n_entities = rng.randint(2, 8)
    entities = [f"e{k}" for k in range(n_entities)]
    lines = ["entity " + " ".join(entities)]
    n_words = rng.randint(3, 6)
    lex_lines = []
    for w in range(n_words):
        cat_text, val = _CATS[rng.randrange(len(_CATS))]
        name = f"w{w}"
        evidence = cat_text.startswith("S") and rng.random() < 0.7
        width = val - 1 if evidence else val
        max_tuples = min(8, n_entities**width)
        tuples = set()
        for _ in range(rng.randint(0, max_tuples)):
            tup = tuple(rng.choice(entities) for _ in range(width))
            if not evidence and cat_text == "NP\\NP/NP":
                tup = (tup[0], tup[1], tup[1])  # copy form for NP modifiers
            elif not evidence and cat_text in ("NP/NP", "NP\\NP"):
                tup = (tup[0], tup[0])
            elif not evidence and cat_text.startswith("S"):
                tup = tup[:-1] + (rng.random() < 0.5,)
            tuples.add(tup)
        body = "".join(
            "(" + ",".join("true" if v is True else "false" if v is False else v for v in t) + ")"
            for t in sorted(tuples, key=str)
        )
        lines.append(f"relation {name} : {cat_text} {{ {body} }}")
        lex_lines.append(f"word {name} : {cat_text} = rel {name}")
    env = load_environment("\n".join(lines))
    grammar = load_lexicon("\n".join(lex_lines), env)
    words = [f"w{rng.randrange(n_words)}" for _ in range(rng.randint(1, 7))]
    return env, grammar, words
