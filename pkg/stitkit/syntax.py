"""stitkit Syntax — formula AST, grammar, parsing/printing and the ability-to-stit translation.

One AST serves both languages: the strategic one-shot language (``[a]``, ``[E:a]``)
and the classical stit language (``[stit:a]``). Purity predicates tell them apart.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Iterator

from lark import Lark, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, UnexpectedToken

from stitkit.models import FormulaPurityError, FormulaSyntaxError

logger = logging.getLogger(__name__)

AgentId = str

IDENTIFIER = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")

# Reserved atom behind the "true"/"false" literals; not typeable in the grammar.
TOP_ATOM = "_top"

RESERVED_WORDS = frozenset({"box", "dia", "true", "false"})


def is_identifier(name: str) -> bool:
    """True for a well-formed atom/agent token that is not a keyword."""
    return bool(IDENTIFIER.match(name)) and name not in RESERVED_WORDS


# ── AST ────────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class Formula:
    """Base class of every formula node. Nodes are immutable and hashable."""

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class Atom(Formula):
    name: str

    def __post_init__(self):
        if self.name != TOP_ATOM and not is_identifier(self.name):
            raise ValueError(f"invalid atom name: {self.name!r}")


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Box(Formula):
    arg: Formula


@dataclass(frozen=True)
class Dia(Formula):
    arg: Formula


@dataclass(frozen=True)
class _AgentModality(Formula):
    agent: AgentId
    arg: Formula

    def __post_init__(self):
        if not is_identifier(self.agent):
            raise ValueError(f"invalid agent name: {self.agent!r}")


@dataclass(frozen=True)
class Ability(_AgentModality):
    """[i]φ: agent i is able to see to it that φ."""


@dataclass(frozen=True)
class AbilityDual(_AgentModality):
    """<i>φ := ~[i]~φ."""


@dataclass(frozen=True)
class ForallCore(_AgentModality):
    """[E:i]φ: φ holds throughout every core cell of i (i could not prevent φ)."""


@dataclass(frozen=True)
class ForallCoreDual(_AgentModality):
    """<E:i>φ := ~[E:i]~φ: i can execute an action which does not prevent φ."""


@dataclass(frozen=True)
class Stit(_AgentModality):
    """[stit:i]φ: i's current choice guarantees φ."""


@dataclass(frozen=True)
class StitDual(_AgentModality):
    """<stit:i>φ := ~[stit:i]~φ."""


TOP: Formula = Or(Atom(TOP_ATOM), Not(Atom(TOP_ATOM)))
BOTTOM: Formula = Not(TOP)

_BINARY = (Or, And, Implies, Iff)
_UNARY = (Not, Box, Dia)
_AGENTIVE = (Ability, AbilityDual, ForallCore, ForallCoreDual, Stit, StitDual)
_STRATEGIC = (Ability, AbilityDual, ForallCore, ForallCoreDual)
_CLASSICAL = (Stit, StitDual)
_DUALS = {AbilityDual: Ability, ForallCoreDual: ForallCore, StitDual: Stit}


def children(f: Formula) -> tuple[Formula, ...]:
    """Immediate subformulas of f."""
    if isinstance(f, _BINARY):
        return (f.left, f.right)
    if isinstance(f, (*_UNARY, *_AGENTIVE)):
        return (f.arg,)
    return ()


def subformulas(f: Formula) -> Iterator[Formula]:
    """All subformulas of f, children before parents."""
    for child in children(f):
        yield from subformulas(child)
    yield f


def conjunction(parts: Iterable[Formula]) -> Formula:
    """Left-nested conjunction of a nonempty sequence."""
    parts = list(parts)
    if not parts:
        return TOP
    return reduce(And, parts)


# ── Grammar & parsing ─────────────────────────────────────────────────

GRAMMAR = r"""
    ?start: iff

    ?iff: imp
        | iff "<->" imp              -> iff

    ?imp: disj
        | disj "->" imp              -> implies

    ?disj: conj
         | disj "|" conj             -> or_

    ?conj: unary
         | conj "&" unary            -> and_

    ?unary: "~" unary                -> not_
          | "box" unary              -> box
          | "dia" unary              -> dia
          | "[" NAME "]" unary       -> ability
          | "<" NAME ">" unary       -> ability_dual
          | "[E:" NAME "]" unary     -> forall_core
          | "<E:" NAME ">" unary     -> forall_core_dual
          | "[stit:" NAME "]" unary  -> stit
          | "<stit:" NAME ">" unary  -> stit_dual
          | primary

    ?primary: "true"                 -> true
            | "false"                -> false
            | NAME                   -> atom
            | "(" iff ")"

    NAME: /[A-Za-z][A-Za-z0-9_]*/

    %import common.WS
    %ignore WS
"""


class _ReservedName(Exception):
    """A keyword in a position the grammar reads as a name."""

    def __init__(self, token):
        super().__init__(str(token))
        self.token = token


def _name(token) -> str:
    if str(token) in RESERVED_WORDS:
        raise _ReservedName(token)
    return str(token)


@v_args(inline=True)
class _ToFormula(Transformer):
    def iff(self, left, right):
        return Iff(left, right)

    def implies(self, left, right):
        return Implies(left, right)

    def or_(self, left, right):
        return Or(left, right)

    def and_(self, left, right):
        return And(left, right)

    def not_(self, arg):
        return Not(arg)

    def box(self, arg):
        return Box(arg)

    def dia(self, arg):
        return Dia(arg)

    def ability(self, agent, arg):
        return Ability(_name(agent), arg)

    def ability_dual(self, agent, arg):
        return AbilityDual(_name(agent), arg)

    def forall_core(self, agent, arg):
        return ForallCore(_name(agent), arg)

    def forall_core_dual(self, agent, arg):
        return ForallCoreDual(_name(agent), arg)

    def stit(self, agent, arg):
        return Stit(_name(agent), arg)

    def stit_dual(self, agent, arg):
        return StitDual(_name(agent), arg)

    def true(self):
        return TOP

    def false(self):
        return BOTTOM

    def atom(self, name):
        return Atom(_name(name))


_PARSER = Lark(GRAMMAR, parser="lalr", transformer=_ToFormula())


def _terminal_display(name: str) -> str:
    if name == "$END":
        return "end of input"
    if name == "NAME":
        return "identifier"
    try:
        pattern = _PARSER.get_terminal(name).pattern
    except KeyError:
        return name
    return pattern.value if pattern.type == "str" else name


# Keywords share NAME's lexer slot; they are accepted exactly where "(" is.
_KEYWORDS = ("box", "dia", "true", "false")


def _allowed_display(allowed) -> list[str]:
    expected = [_terminal_display(t) for t in allowed]
    if "NAME" in allowed and "LPAR" in allowed:
        expected.extend(_KEYWORDS)
    return expected


def _byte_offset(text: str, char_pos: int) -> int:
    if char_pos < 0:
        return len(text.encode("utf-8"))
    return len(text[:char_pos].encode("utf-8"))


def parse(text: str) -> Formula:
    """Parse concrete syntax into a Formula (sugar preserved; see normalize).

    Raises:
        FormulaSyntaxError: with the byte offset of the offending input and the
            set of tokens the grammar would have accepted there.
    """
    try:
        return _PARSER.parse(text)
    except UnexpectedEOF as e:
        expected = [_terminal_display(t) for t in e.expected]
        raise FormulaSyntaxError(text, _byte_offset(text, -1), expected) from None
    except UnexpectedToken as e:
        expected = [_terminal_display(t) for t in e.expected]
        pos = e.token.start_pos if e.token.start_pos is not None else -1
        if e.token.type == "$END":
            pos = -1
        raise FormulaSyntaxError(text, _byte_offset(text, pos), expected) from None
    except UnexpectedCharacters as e:
        expected = _allowed_display(set(e.allowed or ()))
        raise FormulaSyntaxError(text, _byte_offset(text, e.pos_in_stream), expected) from None
    except UnexpectedInput as e:
        raise FormulaSyntaxError(text, _byte_offset(text, -1), [], detail=str(e)) from None
    except _ReservedName as e:
        offset = _byte_offset(text, e.token.start_pos)
        raise FormulaSyntaxError(text, offset, ["identifier"], detail=f"reserved word {e}") from None


# ── Printing ──────────────────────────────────────────────────────────

_PRECEDENCE = {Iff: 1, Implies: 2, Or: 3, And: 4}
_SYMBOL = {Iff: "<->", Implies: "->", Or: "|", And: "&"}
_RIGHT_ASSOC = {Implies}
_UNARY_PREFIX = {Box: "box ", Dia: "dia "}
_AGENT_PREFIX = {
    Ability: ("[", "]"),
    AbilityDual: ("<", ">"),
    ForallCore: ("[E:", "]"),
    ForallCoreDual: ("<E:", ">"),
    Stit: ("[stit:", "]"),
    StitDual: ("<stit:", ">"),
}
_ATOMIC_LEVEL = 5


def _level(f: Formula) -> int:
    if f == TOP or f == BOTTOM:
        return _ATOMIC_LEVEL
    return _PRECEDENCE.get(type(f), _ATOMIC_LEVEL)


def render(f: Formula) -> str:
    """Print f with the minimum parentheses needed to re-parse to the same AST."""
    if f == TOP:
        return "true"
    if f == BOTTOM:
        return "false"
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Not):
        return "~" + _wrap_operand(f.arg)
    if isinstance(f, (Box, Dia)):
        return _UNARY_PREFIX[type(f)] + _wrap_operand(f.arg)
    if isinstance(f, _AGENTIVE):
        opening, closing = _AGENT_PREFIX[type(f)]
        return f"{opening}{f.agent}{closing} " + _wrap_operand(f.arg)
    if isinstance(f, _BINARY):
        level = _PRECEDENCE[type(f)]
        right_assoc = type(f) in _RIGHT_ASSOC
        left = render(f.left)
        if _level(f.left) < level or (_level(f.left) == level and right_assoc):
            left = f"({left})"
        right = render(f.right)
        if _level(f.right) < level or (_level(f.right) == level and not right_assoc):
            right = f"({right})"
        return f"{left} {_SYMBOL[type(f)]} {right}"
    raise TypeError(f"not a formula: {f!r}")


def _wrap_operand(f: Formula) -> str:
    text = render(f)
    return f"({text})" if _level(f) < _ATOMIC_LEVEL else text


# ── Normalization & structure ─────────────────────────────────────────


def normalize(f: Formula) -> Formula:
    """Rewrite into the core connectives {Atom, Not, Or, Box, Ability, ForallCore, Stit}."""
    match f:
        case Atom():
            return f
        case Not(arg):
            return Not(normalize(arg))
        case Or(left, right):
            return Or(normalize(left), normalize(right))
        case And(left, right):
            return Not(Or(Not(normalize(left)), Not(normalize(right))))
        case Implies(left, right):
            return Or(Not(normalize(left)), normalize(right))
        case Iff(left, right):
            forward = Implies(left, right)
            backward = Implies(right, left)
            return normalize(And(forward, backward))
        case Box(arg):
            return Box(normalize(arg))
        case Dia(arg):
            return Not(Box(Not(normalize(arg))))
        case AbilityDual() | ForallCoreDual() | StitDual():
            base = _DUALS[type(f)]
            return Not(base(f.agent, Not(normalize(f.arg))))
        case Ability() | ForallCore() | Stit():
            return type(f)(f.agent, normalize(f.arg))
    raise TypeError(f"not a formula: {f!r}")


def is_osstit_pure(f: Formula) -> bool:
    """No classical stit operator occurs in f."""
    return not any(isinstance(g, _CLASSICAL) for g in subformulas(f))


def is_cstit_pure(f: Formula) -> bool:
    """No strategic operator ([i], [E:i] or their duals) occurs in f."""
    return not any(isinstance(g, _STRATEGIC) for g in subformulas(f))


def vars_of(f: Formula) -> set[str]:
    """Atoms of f, excluding the reserved atom behind true/false."""
    return {g.name for g in subformulas(f) if isinstance(g, Atom) and g.name != TOP_ATOM}


def agents_of(f: Formula) -> set[AgentId]:
    return {g.agent for g in subformulas(f) if isinstance(g, _AGENTIVE)}


def modal_depth(f: Formula) -> int:
    """Maximal nesting of modalities; Dia and the duals count as the modality they abbreviate."""
    below = max((modal_depth(c) for c in children(f)), default=0)
    if isinstance(f, (Box, Dia, *_AGENTIVE)):
        return below + 1
    return below


# ── Translation ───────────────────────────────────────────────────────


def translate_tr(f: Formula) -> Formula:
    """Translate a strategic formula into classical stit: [i]φ becomes dia [stit:i] tr(φ).

    Homomorphic on every other connective; the ability dual follows from its definition.

    Raises:
        FormulaPurityError: if f contains a classical stit operator, or [E:i]/<E:i>,
            for which no translation clause exists.
    """
    if not is_osstit_pure(f):
        raise FormulaPurityError(f"translate_tr expects a strategic formula: {render(f)}")
    if any(isinstance(g, (ForallCore, ForallCoreDual)) for g in subformulas(f)):
        raise FormulaPurityError(f"no translation clause for [E:i]: {render(f)}")
    return _tr(f)


def _tr(f: Formula) -> Formula:
    match f:
        case Atom():
            return f
        case Not(arg):
            return Not(_tr(arg))
        case Box(arg):
            return Box(_tr(arg))
        case Dia(arg):
            return Dia(_tr(arg))
        case Or(l, r) | And(l, r) | Implies(l, r) | Iff(l, r):
            return type(f)(_tr(l), _tr(r))
        case Ability(agent, arg):
            return Dia(Stit(agent, _tr(arg)))
        case AbilityDual(agent, arg):
            return Not(Dia(Stit(agent, Not(_tr(arg)))))
    raise FormulaPurityError(f"no translation clause for {type(f).__name__}")
