"""Lexicon: words mapped to component-category entries with semantics.

Lexicon file format (UTF-8, ``#`` comments), one entry per line:

    word <surface> : <category>('.' <category>)* = rel <name>
                                                 | identity
                                                 | quant <name>
                                                 | conj (and|or)

Multi-component entries belong to quantifier words.  Their body component may
be written in either slash direction (``X\\NP_q`` or ``X/NP_q``); both
normalize to a single direction-neutral placeholder, so one entry serves
both attachment sides.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, TextIO, Union

from .categories import (
    Atom,
    BodyPlaceholder,
    Category,
    CategoryError,
    ConjPrime,
    Slash,
    Var,
    contains_pattern,
    mark_bound,
    parse_components,
    substitute,
    to_text,
    unify,
)
from .environment import Environment, within_worst_case
from .relations import default_quantifiers


class LexiconError(ValueError):
    """Lexicon file or entry problem, annotated with a line number."""

    def __init__(self, message: str, line: Optional[int] = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


@dataclass(frozen=True)
class Semantics:
    """Attachment of meaning to an entry: a named lexical relation, the
    identity relation, a named quantifier, or a conjunction operator."""

    kind: str  # "rel" | "identity" | "quant" | "conj"
    name: str = ""


@dataclass(frozen=True)
class LexEntry:
    word: str
    components: tuple  # of Category; the last component is the anchor
    semantics: Semantics

    @property
    def anchor(self) -> Category:
        return self.components[-1]

    def quant_var(self) -> str:
        """Name of the entry's quantifier variable (anchor result mark)."""
        return self.anchor.result.mark.name


@dataclass(frozen=True)
class Grammar:
    entries: dict  # word -> tuple[LexEntry, ...]
    quantifiers: dict  # name -> QuantifierFn
    nonterminals: frozenset

    def lookup(self, word: str) -> tuple:
        return self.entries.get(word, ())

    @property
    def max_components(self) -> int:
        return max(
            (len(e.components) for es in self.entries.values() for e in es),
            default=1,
        )


_ENTRY_RE = re.compile(r"word\s+(\S+)\s*:\s*(.+?)\s*=\s*(.+)$")


def load_lexicon(
    source: Union[str, TextIO],
    env: Environment,
    quantifiers: Optional[dict] = None,
) -> Grammar:
    """Parse, normalize and validate a lexicon against an environment."""
    text = source if isinstance(source, str) else source.read()
    registry = dict(quantifiers) if quantifiers is not None else default_quantifiers()
    entries: dict = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _ENTRY_RE.match(line)
        if not m:
            raise LexiconError("malformed lexicon line", lineno)
        word, cats_text, sem_text = m.groups()
        try:
            components = parse_components(cats_text, registry.keys())
        except CategoryError as exc:
            raise LexiconError(f"bad category for {word!r}: {exc}", lineno)
        semantics = _parse_semantics(sem_text.strip(), word, lineno)
        entry = _normalize_entry(word, components, semantics, lineno)
        _validate_entry(entry, env, registry, lineno)
        bucket = entries.setdefault(word, [])
        if entry not in bucket:
            bucket.append(entry)

    frozen = {w: tuple(es) for w, es in entries.items()}
    return Grammar(frozen, registry, _nonterminal_closure(frozen))


def _parse_semantics(text: str, word: str, lineno: int) -> Semantics:
    parts = text.split()
    if parts == ["identity"]:
        return Semantics("identity")
    if len(parts) == 2 and parts[0] == "rel":
        return Semantics("rel", parts[1])
    if len(parts) == 2 and parts[0] == "quant":
        return Semantics("quant", parts[1])
    if len(parts) == 2 and parts[0] == "conj" and parts[1] in ("and", "or"):
        return Semantics("conj", parts[1])
    raise LexiconError(f"bad semantics {text!r} for word {word!r}", lineno)


def _normalize_entry(word, components, semantics, lineno) -> LexEntry:
    """Rewrite a directional body component into the neutral placeholder and
    tag Conj entries with their operator."""
    comps = list(components)
    if semantics.kind == "quant":
        if len(comps) < 2:
            raise LexiconError(f"quantifier entry {word!r} needs multiple components", lineno)
        body = comps[0]
        if isinstance(body, Slash) and isinstance(body.result, Var):
            comps[0] = BodyPlaceholder(body.arg)
        if not isinstance(comps[0], BodyPlaceholder):
            raise LexiconError(
                f"first component of quantifier entry {word!r} must be X\\NP_q or X/NP_q",
                lineno,
            )
    if semantics.kind == "conj":
        if comps != [Atom("Conj")]:
            raise LexiconError(f"conj semantics on non-Conj category for {word!r}", lineno)
        comps = [Atom("Conj", op=semantics.name)]
    return LexEntry(word, tuple(comps), semantics)


def _is_np(c: Category) -> bool:
    return isinstance(c, Atom) and c.name == "NP"


def _validate_entry(entry: LexEntry, env: Environment, registry: dict, lineno: int):
    sem = entry.semantics
    comps = entry.components
    if sem.kind == "quant":
        if sem.name not in registry:
            raise LexiconError(f"unknown quantifier {sem.name!r}", lineno)
        anchor = entry.anchor
        if not (
            isinstance(anchor, Slash)
            and _is_np(anchor.result)
            and anchor.result.mark.kind == "var"
            and _is_np(anchor.arg)
            and anchor.arg.mark.kind == "unquant"
        ):
            raise LexiconError(
                f"quantifier anchor must be NP_q/NP_e or NP_q\\NP_e, got {to_text(anchor)}",
                lineno,
            )
        qvar = anchor.result.mark.name
        for comp in comps:
            for mark in _collect_marks(comp):
                if mark.kind == "var" and mark.name != qvar:
                    raise LexiconError(
                        f"inconsistent quantifier variable {mark.name!r} in entry {entry.word!r}",
                        lineno,
                    )
        return
    if len(comps) != 1:
        raise LexiconError(
            f"multi-component entry {entry.word!r} requires quantifier semantics", lineno
        )
    cat = comps[0]
    if contains_pattern(cat):
        raise LexiconError(
            f"single-component entry {entry.word!r} must be variable-free", lineno
        )
    if sem.kind == "conj":
        return
    if sem.kind == "identity":
        from .environment import _np_slash_shape

        if _np_slash_shape(cat) == 0:
            raise LexiconError(
                f"identity semantics needs an NP modifier category, got {to_text(cat)}", lineno
            )
        return
    # rel
    try:
        rel_cat, rel = env.lookup(sem.name, cat)
    except KeyError as exc:
        raise LexiconError(str(exc), lineno)
    if not within_worst_case(rel, cat, env):
        raise LexiconError(
            f"relation {sem.name!r} does not fit category {to_text(cat)}", lineno
        )


def _collect_marks(c: Category):
    if isinstance(c, Atom):
        yield c.mark
    elif isinstance(c, Slash):
        yield from _collect_marks(c.result)
        yield from _collect_marks(c.arg)
    elif isinstance(c, BodyPlaceholder):
        yield from _collect_marks(c.arg)
    elif isinstance(c, ConjPrime):
        yield from _collect_marks(c.inner)


def bind_entry(entry: LexEntry) -> tuple:
    """Component sequence with the entry's quantifier variable bound to its
    quantifier name, as seeded into a chart."""
    if entry.semantics.kind != "quant":
        return entry.components
    qvar = entry.quant_var()
    subst = {("mark", qvar): mark_bound(entry.semantics.name)}
    return tuple(substitute(c, subst) for c in entry.components)


# ---------------------------------------------------------------------------
# Nonterminal closure and productions


def _subcategories(c: Category):
    yield c
    if isinstance(c, Slash):
        yield from _subcategories(c.result)
        yield from _subcategories(c.arg)
    elif isinstance(c, BodyPlaceholder):
        yield from _subcategories(c.arg)
    elif isinstance(c, ConjPrime):
        yield from _subcategories(c.inner)


def _nonterminal_closure(entries: dict) -> frozenset:
    n = set()
    for es in entries.values():
        for entry in es:
            for comp in bind_entry(entry):
                n.update(_subcategories(comp))
    return frozenset(n)


@dataclass(frozen=True)
class Production:
    """Descriptor of one grammar production."""

    kind: str  # "lex" | "apply"
    parent: Category
    right: tuple  # lex: (word,); apply: (functor, argument)


def productions(g: Grammar) -> frozenset:
    """Production closure: one lexical production per entry component set
    plus application productions for every functor reachable from them.
    Quantifier variables instantiate against the available argument
    categories during closure."""
    prods = set()
    heads = set()
    for word, es in g.entries.items():
        for entry in es:
            comps = bind_entry(entry)
            if len(comps) == 1:
                prods.add(Production("lex", comps[0], (word,)))
            for comp in comps:
                if not contains_pattern(comp):
                    heads.add(comp)

    changed = True
    while changed:
        changed = False
        for functor in list(heads):
            if not isinstance(functor, Slash):
                continue
            for argument in list(heads):
                subst = unify(functor.arg, argument)
                if subst is None:
                    continue
                parent = substitute(functor.result, subst)
                prod = Production(
                    "apply", parent, (substitute(functor, subst), argument)
                )
                if prod not in prods:
                    prods.add(prod)
                    changed = True
                if parent not in heads:
                    heads.add(parent)
                    changed = True
    return frozenset(prods)


def format_lexicon(g: Grammar) -> str:
    """Stable text rendering of a grammar, reloadable as a lexicon file."""
    lines = []
    for word in sorted(g.entries):
        for entry in g.entries[word]:
            cats = " . ".join(_entry_component_text(c) for c in entry.components)
            sem = entry.semantics
            if sem.kind == "identity":
                rhs = "identity"
            elif sem.kind == "rel":
                rhs = f"rel {sem.name}"
            elif sem.kind == "quant":
                rhs = f"quant {sem.name}"
            else:
                rhs = f"conj {sem.name}"
            lines.append(f"word {word} : {cats} = {rhs}")
    return "\n".join(lines) + "\n"


def _entry_component_text(c: Category) -> str:
    if isinstance(c, Atom) and c.name == "Conj":
        return "Conj"
    return to_text(c)
