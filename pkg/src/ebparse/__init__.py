"""Environment-based parsing: categorial grammar charts whose constituents
are interpreted against a finite entity/relation model as they are built,
with quantifiers and conjunctions handled by multi-component items."""

from .categories import (
    Atom,
    BodyPlaceholder,
    Category,
    CategoryError,
    ConjPrime,
    QuantMark,
    Slash,
    Var,
    arity,
    parse_category,
    parse_components,
    to_text,
    unify,
)
from .environment import (
    EnvFileError,
    Environment,
    identity_relation,
    load_environment,
    totalize,
    worst_case,
)
from .relations import (
    QuantifierFn,
    Relation,
    conj_combine,
    default_quantifiers,
    eval_quantifier,
    join,
    project,
    quant_project,
    relation,
)
from .lexicon import Grammar, LexEntry, LexiconError, Semantics, load_lexicon, productions
from .basic_parser import (
    BasicItem,
    Forest,
    InputChart,
    ParseError,
    Tree,
    parse_basic,
    recognize,
)
from .extended_parser import Component, ExtForest, ExtItem, parse_extended
from .cli import LatticeError, load_lattice, main

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
