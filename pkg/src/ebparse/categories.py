"""Category language: atoms, slashes, quantifier subscripts, and unification.

Categories are immutable values built from the atoms S, NP and Conj plus the
two slash constructors.  ``gamma / delta`` wants a ``delta`` to its right,
``gamma \\ delta`` wants one to its left.  NP atoms additionally carry a
quantifier mark (see :class:`QuantMark`).  Two pattern-only constructors
appear in lexical entries: the category variable ``X`` and the body
placeholder, which matches any functor whose next undischarged argument is a
marked NP.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Optional, Union


class CategoryError(ValueError):
    """Malformed or unsupported category."""


class CategorySyntaxError(CategoryError):
    """Surface syntax error, with the offending position."""

    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at column {pos + 1}: {text!r}")
        self.text = text
        self.pos = pos


# ---------------------------------------------------------------------------
# Quantifier marks


@dataclass(frozen=True)
class QuantMark:
    """Subscript on an NP atom.

    kind is one of "plain" (no subscript), "unquant" (the ``_e`` subscript),
    "var" (a quantifier variable such as ``_q``), or "bound" (a named
    quantifier such as ``_some``).
    """

    kind: str
    name: str = ""

    def __str__(self) -> str:
        if self.kind == "plain":
            return ""
        if self.kind == "unquant":
            return "_e"
        return "_" + self.name


PLAIN = QuantMark("plain")
UNQUANT = QuantMark("unquant")


def mark_var(name: str) -> QuantMark:
    return QuantMark("var", name)


def mark_bound(name: str) -> QuantMark:
    return QuantMark("bound", name)


# ---------------------------------------------------------------------------
# Category constructors


@dataclass(frozen=True)
class Atom:
    """S, NP or Conj.  Only NP may carry a non-plain mark.

    Conj atoms seeded from the lexicon carry the conjunction operator so that
    rival conjunctions are distinct chart values; the operator does not
    surface in printed category text.
    """

    name: str
    mark: QuantMark = PLAIN
    op: Optional[str] = None

    def __post_init__(self):
        if self.name != "NP" and self.mark != PLAIN:
            raise CategoryError(f"subscript not allowed on atom {self.name}")
        if self.op is not None and self.name != "Conj":
            raise CategoryError("operator annotation is only for Conj")


@dataclass(frozen=True)
class Slash:
    """``result/arg`` when right is true, ``result\\arg`` otherwise."""

    result: "Category"
    arg: "Category"
    right: bool


@dataclass(frozen=True)
class Var:
    """Category variable; lexical entry patterns only."""

    name: str


@dataclass(frozen=True)
class BodyPlaceholder:
    """Matches any functor whose next undischarged argument unifies with arg.

    Normal form of the directional body components ``X\\NP_q`` and ``X/NP_q``
    of a quantifier entry: one placeholder covers both slash directions.
    """

    arg: "Category"


@dataclass(frozen=True)
class ConjPrime:
    """Partial conjunction result over an inner category, e.g. Conj'(NP_e)."""

    inner: "Category"
    op: str


Category = Union[Atom, Slash, Var, BodyPlaceholder, ConjPrime]

S = Atom("S")
NP = Atom("NP")
CONJ = Atom("Conj")


def np_marked(mark: QuantMark) -> Atom:
    return Atom("NP", mark)


# ---------------------------------------------------------------------------
# Printing


def to_text(c: Category) -> str:
    """Canonical surface form; slashes print left-associatively."""
    if isinstance(c, Atom):
        return c.name + str(c.mark)
    if isinstance(c, Var):
        return c.name
    if isinstance(c, BodyPlaceholder):
        return "X\\" + _arg_text(c.arg)
    if isinstance(c, ConjPrime):
        return f"Conj'[{c.op}]({to_text(c.inner)})"
    if isinstance(c, Slash):
        op = "/" if c.right else "\\"
        return to_text(c.result) + op + _arg_text(c.arg)
    raise CategoryError(f"unprintable category {c!r}")


def _arg_text(c: Category) -> str:
    text = to_text(c)
    return f"({text})" if isinstance(c, Slash) else text


# ---------------------------------------------------------------------------
# Parsing

_ATOM_RE = re.compile(r"[A-Za-z]+")
_SUB_RE = re.compile(r"[A-Za-z0-9_']+")
_KNOWN_ATOMS = ("S", "NP", "Conj", "X")


class _Scanner:
    def __init__(self, text: str, quantifiers: Optional[Iterable[str]]):
        self.text = text
        self.pos = 0
        self.quantifiers = frozenset(quantifiers or ())

    def error(self, message: str) -> CategorySyntaxError:
        return CategorySyntaxError(message, self.text, self.pos)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def category(self) -> Category:
        left = self.part()
        while self.peek() in ("/", "\\"):
            op = self.text[self.pos]
            self.pos += 1
            right = self.part()
            left = Slash(left, right, op == "/")
        return left

    def part(self) -> Category:
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            inner = self.category()
            if self.peek() != ")":
                raise self.error("expected ')'")
            self.pos += 1
            return inner
        return self.atom()

    def atom(self) -> Category:
        self.skip_ws()
        m = _ATOM_RE.match(self.text, self.pos)
        if not m:
            raise self.error("expected category atom")
        name = m.group(0)
        if name not in _KNOWN_ATOMS:
            raise self.error(f"unknown atom {name!r}")
        self.pos = m.end()
        mark = PLAIN
        if self.pos < len(self.text) and self.text[self.pos] == "_":
            sub_pos = self.pos
            self.pos += 1
            sm = _SUB_RE.match(self.text, self.pos)
            if not sm:
                raise self.error("expected subscript after '_'")
            sub = sm.group(0)
            self.pos = sm.end()
            if name != "NP":
                self.pos = sub_pos
                raise self.error(f"subscript on non-NP atom {name!r}")
            if sub == "e":
                mark = UNQUANT
            elif sub in self.quantifiers:
                mark = mark_bound(sub)
            else:
                mark = mark_var(sub)
        if name == "X":
            return Var(name)
        return Atom(name, mark)


def parse_category(text: str, quantifiers: Optional[Iterable[str]] = None) -> Category:
    """Parse one category.  Subscripts naming a known quantifier become bound
    marks; ``_e`` is the unquantified mark; other subscripts are variables.
    """
    scanner = _Scanner(text, quantifiers)
    cat = scanner.category()
    scanner.skip_ws()
    if scanner.pos != len(text):
        raise scanner.error("trailing input after category")
    return cat


def parse_components(text: str, quantifiers: Optional[Iterable[str]] = None) -> tuple[Category, ...]:
    """Parse a '.'-separated component sequence, as written in lexicon files."""
    parts = text.split(".")
    if not parts or any(not p.strip() for p in parts):
        raise CategoryError(f"empty component in {text!r}")
    return tuple(parse_category(p.strip(), quantifiers) for p in parts)


# ---------------------------------------------------------------------------
# Denotation shape


def fields(c: Category) -> tuple[str, ...]:
    """Denotation field kinds, first-discharged argument first, result last.

    "E" marks an entity position, "T" a truth position.
    """
    if isinstance(c, Atom):
        if c.name == "NP":
            return ("E",)
        if c.name == "S":
            return ("T",)
        raise CategoryError(f"{c.name} has no denotation type")
    if isinstance(c, Slash):
        return fields(c.arg) + fields(c.result)
    raise CategoryError(f"variable category has no denotation type: {to_text(c)}")


def arity(c: Category) -> int:
    """Denotation tuple width of c; rejects variable categories."""
    return len(fields(c))


# ---------------------------------------------------------------------------
# Substitutions and unification

Subst = dict  # keys ("cat", name) -> Category, ("mark", name) -> QuantMark


def _resolve_mark(m: QuantMark, subst: Subst) -> QuantMark:
    seen = set()
    while m.kind == "var" and ("mark", m.name) in subst:
        if m.name in seen:
            break
        seen.add(m.name)
        m = subst[("mark", m.name)]
    return m


def _resolve_cat(c: Category, subst: Subst) -> Category:
    seen = set()
    while isinstance(c, Var) and ("cat", c.name) in subst:
        if c.name in seen:
            break
        seen.add(c.name)
        c = subst[("cat", c.name)]
    return c


def _unify_marks(a: QuantMark, b: QuantMark, subst: Subst) -> bool:
    a = _resolve_mark(a, subst)
    b = _resolve_mark(b, subst)
    if a == b:
        return True
    if a.kind == "var":
        subst[("mark", a.name)] = b
        return True
    if b.kind == "var":
        subst[("mark", b.name)] = a
        return True
    return False


def _unify(a: Category, b: Category, subst: Subst) -> bool:
    a = _resolve_cat(a, subst)
    b = _resolve_cat(b, subst)
    if isinstance(a, Var):
        if a == b:
            return True
        subst[("cat", a.name)] = b
        return True
    if isinstance(b, Var):
        subst[("cat", b.name)] = a
        return True
    if isinstance(a, BodyPlaceholder) or isinstance(b, BodyPlaceholder):
        pat, con = (a, b) if isinstance(a, BodyPlaceholder) else (b, a)
        if isinstance(con, BodyPlaceholder):
            return _unify(pat.arg, con.arg, subst)
        # The placeholder matches a functor whose next undischarged argument
        # unifies with its NP pattern; the residue binds the X variable.
        if isinstance(con, Slash) and _unify(pat.arg, con.arg, subst):
            subst.setdefault(("cat", "X"), con.result)
            return True
        return False
    if isinstance(a, Atom) and isinstance(b, Atom):
        return a.name == b.name and a.op == b.op and _unify_marks(a.mark, b.mark, subst)
    if isinstance(a, Slash) and isinstance(b, Slash):
        return (
            a.right == b.right
            and _unify(a.result, b.result, subst)
            and _unify(a.arg, b.arg, subst)
        )
    if isinstance(a, ConjPrime) and isinstance(b, ConjPrime):
        return a.op == b.op and _unify(a.inner, b.inner, subst)
    return False


def unify(pattern: Category, concrete: Category, subst: Optional[Subst] = None) -> Optional[Subst]:
    """Most general substitution making the two categories equal, or None.

    Variables may occur on either side; quantifier variables bind to marks
    and must be consistent across one call chain (pass the running subst).
    """
    s: Subst = dict(subst) if subst else {}
    if _unify(pattern, concrete, s):
        return s
    return None


def substitute(c: Category, subst: Subst) -> Category:
    c = _resolve_cat(c, subst)
    if isinstance(c, Atom):
        if c.mark.kind == "var":
            return Atom(c.name, _resolve_mark(c.mark, subst), c.op)
        return c
    if isinstance(c, Slash):
        return Slash(substitute(c.result, subst), substitute(c.arg, subst), c.right)
    if isinstance(c, BodyPlaceholder):
        return BodyPlaceholder(substitute(c.arg, subst))
    if isinstance(c, ConjPrime):
        return ConjPrime(substitute(c.inner, subst), c.op)
    return c


def alpha_equal(a: Category, b: Category) -> bool:
    """Structural equality up to a consistent one-to-one renaming of
    category variables and quantifier variables."""
    fwd: dict = {}
    bwd: dict = {}

    def marks(x: QuantMark, y: QuantMark) -> bool:
        if x.kind == "var" and y.kind == "var":
            if ("m", x.name) in fwd and fwd[("m", x.name)] != y.name:
                return False
            if ("m", y.name) in bwd and bwd[("m", y.name)] != x.name:
                return False
            fwd[("m", x.name)] = y.name
            bwd[("m", y.name)] = x.name
            return True
        return x == y

    def go(x: Category, y: Category) -> bool:
        if isinstance(x, Var) and isinstance(y, Var):
            if ("c", x.name) in fwd and fwd[("c", x.name)] != y.name:
                return False
            if ("c", y.name) in bwd and bwd[("c", y.name)] != x.name:
                return False
            fwd[("c", x.name)] = y.name
            bwd[("c", y.name)] = x.name
            return True
        if isinstance(x, Atom) and isinstance(y, Atom):
            return x.name == y.name and x.op == y.op and marks(x.mark, y.mark)
        if isinstance(x, Slash) and isinstance(y, Slash):
            return x.right == y.right and go(x.result, y.result) and go(x.arg, y.arg)
        if isinstance(x, BodyPlaceholder) and isinstance(y, BodyPlaceholder):
            return go(x.arg, y.arg)
        if isinstance(x, ConjPrime) and isinstance(y, ConjPrime):
            return x.op == y.op and go(x.inner, y.inner)
        return False

    return go(a, b)


# ---------------------------------------------------------------------------
# Pending-argument bookkeeping shared by the parsers


def peel_pending(head: Category, target: Category) -> Optional[list[tuple[bool, Category]]]:
    """Argument slashes to peel off head (outermost first) to reach target,
    or None if target is not a result prefix of head."""
    pending: list[tuple[bool, Category]] = []
    c = head
    while c != target:
        if not isinstance(c, Slash):
            return None
        pending.append((c.right, c.arg))
        c = c.result
    return pending


def attach_pending(core: Category, pending: list[tuple[bool, Category]]) -> Category:
    for right, arg in reversed(pending):
        core = Slash(core, arg, right)
    return core


def contains_pattern(c: Category) -> bool:
    """True if c contains a category variable or body placeholder."""
    if isinstance(c, (Var, BodyPlaceholder)):
        return True
    if isinstance(c, Slash):
        return contains_pattern(c.result) or contains_pattern(c.arg)
    if isinstance(c, ConjPrime):
        return contains_pattern(c.inner)
    return False


def same_shape(a: Category, b: Category) -> bool:
    """Equal slash skeleton and atom names, ignoring quantifier marks.

    Denotation shapes depend only on the skeleton, so relations declared
    with plain NP atoms serve entries whose atoms carry marks.
    """
    if isinstance(a, Atom) and isinstance(b, Atom):
        return a.name == b.name
    if isinstance(a, Slash) and isinstance(b, Slash):
        return a.right == b.right and same_shape(a.result, b.result) and same_shape(a.arg, b.arg)
    return False
