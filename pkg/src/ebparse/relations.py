"""Finite-relation algebra: natural join, projection, quantifier projection.

Relations are sets of uniform-arity tuples whose values are entity ids
(strings) or truth values (bools).  The join is prefix-based: two tuples
combine when the shorter one is a prefix of the longer one, so a functor's
denotation lines up with its argument's on the most recently discharged
field.  All operations are pure; a module-level counter tracks the work done
so complexity claims can be checked.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Union

Value = Union[str, bool]
Tuple_ = tuple  # tuples of Value


class RelationError(ValueError):
    """Ill-formed relation or operation misuse."""


@dataclass(frozen=True)
class Relation:
    """Immutable set of equal-arity tuples.  The zero-arity relation over the
    empty tuple is the join identity."""

    arity: int
    tuples: frozenset

    def __post_init__(self):
        if self.arity < 0:
            raise RelationError("negative arity")
        for t in self.tuples:
            if len(t) != self.arity:
                raise RelationError(
                    f"tuple {t!r} does not match declared arity {self.arity}"
                )
            for v in t:
                if not isinstance(v, (str, bool)):
                    raise RelationError(f"bad value {v!r} in tuple {t!r}")

    def __len__(self) -> int:
        return len(self.tuples)

    def __bool__(self) -> bool:
        return bool(self.tuples)

    def __iter__(self):
        return iter(self.tuples)


def relation(arity: int, tuples: Iterable[Iterable[Value]] = ()) -> Relation:
    return Relation(arity, frozenset(tuple(t) for t in tuples))


def empty(arity: int) -> Relation:
    return Relation(arity, frozenset())


UNIT = relation(0, [()])  # {<>}: join identity


def entity_set(rel: Relation) -> frozenset:
    """Entity ids of an arity-1 relation."""
    if rel.arity != 1:
        raise RelationError(f"expected arity-1 relation, got arity {rel.arity}")
    return frozenset(t[0] for t in rel.tuples)


# ---------------------------------------------------------------------------
# Operation counting (for the complexity checks)


class OpCounter:
    """Counts elementary tuple touches across algebra calls."""

    def __init__(self):
        self.total = 0

    def add(self, n: int):
        self.total += n

    def reset(self):
        self.total = 0


ops = OpCounter()


# ---------------------------------------------------------------------------
# Core operations


def join(a: Relation, b: Relation) -> Relation:
    """Natural join on shared tuple prefixes.

    Keeps each tuple of the wider operand whose prefix of the narrower
    operand's arity occurs in the narrower operand; result arity is the
    larger of the two.  Runs linearly in the sum of the cardinalities.
    """
    ops.add(len(a) + len(b))
    if a.arity == b.arity:
        return Relation(a.arity, a.tuples & b.tuples)
    longer, shorter = (a, b) if a.arity > b.arity else (b, a)
    if shorter.arity == 0:
        return longer if shorter.tuples else empty(longer.arity)
    keys = shorter.tuples
    k = shorter.arity
    return Relation(longer.arity, frozenset(t for t in longer.tuples if t[:k] in keys))


def project(a: Relation) -> Relation:
    """Drop the first field (the most recently discharged argument)."""
    if a.arity < 1:
        raise RelationError("cannot project a zero-arity relation")
    ops.add(len(a))
    return Relation(a.arity - 1, frozenset(t[1:] for t in a.tuples))


# ---------------------------------------------------------------------------
# Generalized quantifiers


@dataclass(frozen=True)
class QuantifierFn:
    """Named cardinality test.  predicate(nR, nS) compares the restrictor
    count against the body count.  evidence_safe marks quantifiers whose
    result over raw TRUE-evidence equals the result over the closed-world
    totalization (upward monotone ones)."""

    name: str
    predicate: Callable[[int, int], bool]
    evidence_safe: bool = False


def default_quantifiers() -> dict[str, QuantifierFn]:
    return {
        "some": QuantifierFn("some", lambda nr, ns: ns >= 1, evidence_safe=True),
        "no": QuantifierFn("no", lambda nr, ns: ns == 0),
        "all": QuantifierFn("all", lambda nr, ns: ns == nr),
        "exactly_one": QuantifierFn("exactly_one", lambda nr, ns: ns == 1),
        "exactly_two": QuantifierFn("exactly_two", lambda nr, ns: ns == 2),
        "most": QuantifierFn("most", lambda nr, ns: 2 * ns > nr),
    }


def eval_quantifier(q: QuantifierFn, n_restrictor: int, n_body: int) -> bool:
    if not 0 <= n_body <= n_restrictor:
        raise RelationError(
            f"body count {n_body} outside [0, {n_restrictor}] for {q.name}"
        )
    return bool(q.predicate(n_restrictor, n_body))


def _truth_final(rel: Relation) -> bool:
    return bool(rel.tuples) and all(isinstance(t[-1], bool) for t in rel.tuples)


def quant_project(q: QuantifierFn, a: Relation, mode: str) -> Relation:
    """Quantifier projection over field 1 (the restrictor entity).

    Groups a by the remainder fields, excluding a trailing truth field when
    present; per group nR is the group size and nS the count of TRUE bodies
    (every tuple counts as TRUE for evidence-style input).  In "entity" mode
    the remainder tuple survives iff the quantifier holds; in "truth" mode
    the remainder is emitted with the quantifier's verdict appended.
    """
    if mode not in ("entity", "truth"):
        raise RelationError(f"unknown quant_project mode {mode!r}")
    if a.arity < 2:
        raise RelationError("quant_project needs arity >= 2")
    truth_last = _truth_final(a)
    if mode == "truth" and a.tuples and not truth_last:
        raise RelationError("truth-result mode needs a truth-typed final field")
    groups: dict[tuple, list[int]] = {}
    for t in a.tuples:
        key = t[1:-1] if truth_last else t[1:]
        ns = 1 if (t[-1] if truth_last else True) else 0
        cell = groups.setdefault(key, [0, 0])
        cell[0] += 1
        cell[1] += ns
    ops.add(len(a) + len(groups))
    out = set()
    for key, (nr, ns) in groups.items():
        verdict = eval_quantifier(q, nr, ns)
        if mode == "truth":
            out.add(key + (verdict,))
        elif verdict:
            out.add(key)
    out_arity = a.arity - 2 if (mode == "entity" and truth_last) else a.arity - 1
    return Relation(out_arity, frozenset(out))


# ---------------------------------------------------------------------------
# Conjunction


def conj_combine(op: str, a: Relation, b: Relation) -> Relation:
    """Combine equal-arity denotations under "and" or "or".

    Evidence-style operands intersect (and) or union (or).  When both
    operands are truth-annotated totals, the final fields combine pointwise
    by the truth table instead, keeping the annotation total.
    """
    if op not in ("and", "or"):
        raise RelationError(f"unknown conjunction operator {op!r}")
    if a.arity != b.arity:
        raise RelationError(f"arity mismatch {a.arity} vs {b.arity}")
    if _truth_final(a) and _truth_final(b) and a.arity >= 1:
        left = {t[:-1]: t[-1] for t in a.tuples}
        right = {t[:-1]: t[-1] for t in b.tuples}
        ops.add(len(a) + len(b))
        combined = set()
        for key in left.keys() & right.keys():
            x, y = left[key], right[key]
            combined.add(key + ((x and y) if op == "and" else (x or y),))
        return Relation(a.arity, frozenset(combined))
    if op == "and":
        return join(a, b)
    ops.add(len(a) + len(b))
    return Relation(a.arity, a.tuples | b.tuples)


# ---------------------------------------------------------------------------
# Display


def format_value(v: Value) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return v


def _sort_key(t: tuple):
    return tuple((1, "t" if v else "f") if isinstance(v, bool) else (0, v) for v in t)


def format_relation(rel: Relation) -> str:
    """Canonical display: {a, b} for arity 1, {(a,b), ...} otherwise."""
    items = sorted(rel.tuples, key=_sort_key)
    if rel.arity == 1:
        body = ", ".join(format_value(t[0]) for t in items)
    else:
        body = ", ".join("(" + ",".join(format_value(v) for v in t) + ")" for t in items)
    return "{" + body + "}"
