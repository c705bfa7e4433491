"""Entity universe and named lexical relations, loaded from a text format.

An environment file is line oriented with ``#`` comments:

    entity <id> <id> ...
    relation <name> : <category> { (<value>,<value>,...) ... }

Values are entity ids or the literals ``true``/``false``; whitespace inside
the braces is free, and a brace block may span lines.  Every stored relation
must fit inside the worst-case denotation of its category.  Relations for
truth-resulting categories may omit the final truth field, in which case the
tuples are read as TRUE evidence; entity-resulting categories always carry
their full width.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, TextIO, Union

from .categories import (
    Atom,
    Category,
    CategoryError,
    Slash,
    fields,
    parse_category,
    same_shape,
    to_text,
)
from .relations import Relation, RelationError, Value, ops, relation


class EnvFileError(ValueError):
    """Environment file problem, annotated with a line number."""

    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


_ID_RE = re.compile(r"[^\s(){},#:]+$")


@dataclass(frozen=True)
class Environment:
    """Immutable entity universe plus named relations keyed (name, category)."""

    entities: tuple[str, ...]
    relations: dict

    @property
    def entity_set(self) -> frozenset:
        return frozenset(self.entities)

    def lookup(self, name: str, category: Optional[Category] = None) -> tuple[Category, Relation]:
        """Resolve a relation by name; when several categories share the
        name, the one whose slash skeleton matches the given category wins
        (quantifier marks do not change a relation's shape)."""
        matches = [(c, r) for (n, c), r in self.relations.items() if n == name]
        if category is not None:
            matches = [(c, r) for c, r in matches if same_shape(c, category)]
        if not matches:
            raise KeyError(f"no relation named {name!r}" + (f" for category {to_text(category)}" if category else ""))
        if len(matches) > 1:
            raise KeyError(f"relation name {name!r} is ambiguous")
        return matches[0]


def _valid_id(token: str) -> bool:
    return bool(_ID_RE.match(token)) and token not in ("true", "false")


def load_environment(source: Union[str, TextIO]) -> Environment:
    """Parse and validate an environment file (text or file object)."""
    text = source if isinstance(source, str) else source.read()
    entities: list[str] = []
    seen = set()
    relations: dict = {}

    lines = text.splitlines()
    idx = 0
    while idx < len(lines):
        lineno = idx + 1
        line = lines[idx].split("#", 1)[0].strip()
        idx += 1
        if not line:
            continue
        if line.startswith("entity"):
            tokens = line.split()[1:]
            if not tokens:
                raise EnvFileError("entity line declares no ids", lineno)
            for tok in tokens:
                if not _valid_id(tok):
                    raise EnvFileError(f"invalid entity id {tok!r}", lineno)
                if tok in seen:
                    raise EnvFileError(f"duplicate entity id {tok!r}", lineno)
                seen.add(tok)
                entities.append(tok)
            continue
        if line.startswith("relation"):
            # accumulate through the closing brace
            block = line
            while "{" in block and "}" not in block.split("{", 1)[1]:
                if idx >= len(lines):
                    raise EnvFileError("unterminated relation block", lineno)
                block += " " + lines[idx].split("#", 1)[0].strip()
                idx += 1
            name, cat, rel = _parse_relation(block, lineno, seen)
            key = (name, cat)
            if key in relations:
                raise EnvFileError(f"duplicate relation {name!r} : {to_text(cat)}", lineno)
            relations[key] = rel
            continue
        raise EnvFileError(f"unrecognized directive {line.split()[0]!r}", lineno)

    return Environment(tuple(sorted(entities)), relations)


_REL_RE = re.compile(r"relation\s+(\S+)\s*:\s*([^{]+)\{(.*)\}\s*$", re.S)


def _parse_relation(block: str, lineno: int, entities: set) -> tuple[str, Category, Relation]:
    m = _REL_RE.match(block)
    if not m:
        raise EnvFileError("malformed relation declaration", lineno)
    name, cat_text, body = m.group(1), m.group(2).strip(), m.group(3)
    if not _valid_id(name):
        raise EnvFileError(f"invalid relation name {name!r}", lineno)
    try:
        cat = parse_category(cat_text)
    except CategoryError as exc:
        raise EnvFileError(f"bad category for relation {name!r}: {exc}", lineno)
    try:
        kinds = fields(cat)
    except CategoryError as exc:
        raise EnvFileError(f"category {cat_text!r} has no denotation type: {exc}", lineno)

    tuples = []
    for tup_text in _iter_tuples(body, lineno):
        values = tuple(v.strip() for v in tup_text.split(",")) if tup_text.strip() else ()
        if values == ("",):
            raise EnvFileError("empty tuple", lineno)
        tuples.append(_parse_tuple(values, kinds, name, lineno, entities))

    widths = {len(t) for t in tuples}
    if len(widths) > 1:
        raise EnvFileError(f"mixed tuple widths in relation {name!r}", lineno)
    full = len(kinds)
    width = widths.pop() if widths else (full - 1 if kinds[-1] == "T" else full)
    if width not in _allowed_widths(kinds):
        raise EnvFileError(
            f"relation {name!r} tuples have arity {width}, category {cat_text!r} needs {full}",
            lineno,
        )
    return name, cat, relation(width, tuples)


def _allowed_widths(kinds: tuple[str, ...]) -> set[int]:
    allowed = {len(kinds)}
    if kinds[-1] == "T":
        allowed.add(len(kinds) - 1)  # evidence style drops the truth result
    return allowed


def _iter_tuples(body: str, lineno: int):
    pos = 0
    while pos < len(body):
        ch = body[pos]
        if ch.isspace():
            pos += 1
            continue
        if ch != "(":
            raise EnvFileError(f"expected '(' in relation body, found {ch!r}", lineno)
        end = body.find(")", pos)
        if end < 0:
            raise EnvFileError("unterminated tuple", lineno)
        yield body[pos + 1 : end]
        pos = end + 1


def _parse_tuple(values, kinds, name, lineno, entities) -> tuple:
    if len(values) not in _allowed_widths(kinds):
        raise EnvFileError(
            f"tuple {values!r} in relation {name!r} has arity {len(values)}, expected {len(kinds)}",
            lineno,
        )
    out = []
    for v, kind in zip(values, kinds):
        if v in ("true", "false"):
            if kind != "T":
                raise EnvFileError(f"truth literal {v!r} in entity position of {name!r}", lineno)
            out.append(v == "true")
        else:
            if kind != "E":
                raise EnvFileError(f"entity {v!r} in truth position of {name!r}", lineno)
            if v not in entities:
                raise EnvFileError(f"undeclared entity {v!r} in relation {name!r}", lineno)
            out.append(v)
    return tuple(out)


# ---------------------------------------------------------------------------
# Worst-case denotations


def worst_case(c: Category, env: Environment, limit: int = 4) -> Relation:
    """Full product denotation of c: entity fields range over the universe,
    truth fields over {TRUE, FALSE}.  Guarded by an arity limit since the
    product grows as |E|^v."""
    kinds = fields(c)
    if len(kinds) > limit:
        raise RelationError(f"arity {len(kinds)} exceeds worst-case limit {limit}")
    domains: list[Sequence[Value]] = [
        tuple(env.entities) if k == "E" else (True, False) for k in kinds
    ]
    tuples = frozenset(itertools.product(*domains))
    ops.add(len(tuples))
    return Relation(len(kinds), tuples)


def within_worst_case(rel: Relation, c: Category, env: Environment) -> bool:
    """Check rel against the field structure of c without materializing the
    product; accepts the evidence-style width for truth-resulting c."""
    kinds = fields(c)
    if rel.arity not in _allowed_widths(kinds):
        return False
    universe = env.entity_set
    for t in rel.tuples:
        for v, kind in zip(t, kinds):
            if kind == "E" and (isinstance(v, bool) or v not in universe):
                return False
            if kind == "T" and not isinstance(v, bool):
                return False
    return True


def identity_relation(c: Category, env: Environment) -> Relation:
    """Identity semantics for NP modifiers: pairs (e, e) for NP/NP and NP\\NP,
    diagonal triples (e, e, e) for the NP\\NP/NP copy form."""
    shape = _np_slash_shape(c)
    if shape == 2:
        return relation(2, ((e, e) for e in env.entities))
    if shape == 3:
        return relation(3, ((e, e, e) for e in env.entities))
    raise RelationError(f"identity semantics undefined for category {to_text(c)}")


def _np_slash_shape(c: Category) -> int:
    def is_np(x) -> bool:
        return isinstance(x, Atom) and x.name == "NP"

    if isinstance(c, Slash) and is_np(c.arg):
        if is_np(c.result):
            return 2
        inner = c.result
        if isinstance(inner, Slash) and is_np(inner.arg) and is_np(inner.result):
            return 3
    return 0


# ---------------------------------------------------------------------------
# Closed-world totalization


def totalize(
    a: Relation,
    restrictor_domain: Iterable[str],
    host_domains: Sequence[Iterable[Value]],
) -> Relation:
    """Complete an evidence relation into a truth-annotated total relation.

    The output ranges over restrictor_domain x host_domains with a trailing
    truth field, TRUE exactly where a corresponding evidence tuple exists.
    Accepted input shapes, for h = len(host_domains):

    * arity h+1: plain evidence (restrictor, hosts...);
    * arity h+2 with a truth final field: already annotated, TRUE rows are
      the evidence (making totalize idempotent on total relations);
    * arity h+2 with an entity final field equal to the last host: the copy
      form (restrictor, host, host), whose duplicate lifts to the truth slot.
    """
    hosts = [tuple(d) for d in host_domains]
    restrictors = tuple(restrictor_domain)
    width = len(hosts) + 1
    evidence = set()
    for t in a.tuples:
        if len(t) == width:
            evidence.add(t)
        elif len(t) == width + 1:
            last = t[-1]
            if isinstance(last, bool):
                if last:
                    evidence.add(t[:-1])
            elif len(t) >= 2 and last == t[-2]:
                evidence.add(t[:-1])
            else:
                raise RelationError(
                    f"tuple {t!r} is neither truth-annotated nor a copy form"
                )
        else:
            raise RelationError(
                f"tuple width {len(t)} does not fit 1 restrictor + {len(hosts)} host fields"
            )
    out = set()
    for combo in itertools.product(restrictors, *hosts):
        out.add(combo + (combo in evidence,))
    ops.add(len(out) + len(a))
    return Relation(width + 1, frozenset(out))
