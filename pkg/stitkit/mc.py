"""stitkit Model checking — strategic formulas over neighbourhood models.

Extensions are computed bottom-up with one memo table per call, so every distinct
subformula is evaluated once over the whole state set.
"""

from __future__ import annotations

import logging

from stitkit.models import FormulaPurityError
from stitkit.nbhd import NbhdModel, Subset, core, is_subset, member, relation_Ri
from stitkit.syntax import (
    Ability,
    AbilityDual,
    And,
    Atom,
    Box,
    Dia,
    ForallCore,
    ForallCoreDual,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    Stit,
    StitDual,
    render,
)

logger = logging.getLogger(__name__)


def extension(model: NbhdModel, f: Formula) -> Subset:
    """⟦f⟧: the set of states where f is true.

    □ is the universal modality; [i]φ holds at w iff ⟦φ⟧ ∈ N_i(w); [E:i]φ holds at w iff
    every state of every core cell of i at w satisfies φ.

    Raises:
        FormulaPurityError: on a classical stit operator.
        UnknownSymbolError: on an agent the frame does not have.
    """
    return _extension(model, f, {})


def _extension(model: NbhdModel, f: Formula, memo: dict[Formula, Subset]) -> Subset:
    cached = memo.get(f)
    if cached is not None:
        return cached
    frame = model.frame
    full = frame.full
    match f:
        case Atom(name):
            result = model.value(name)
        case Not(arg):
            result = full & ~_extension(model, arg, memo)
        case Or(left, right):
            result = _extension(model, left, memo) | _extension(model, right, memo)
        case And(left, right):
            result = _extension(model, left, memo) & _extension(model, right, memo)
        case Implies(left, right):
            result = (full & ~_extension(model, left, memo)) | _extension(model, right, memo)
        case Iff(left, right):
            result = full & ~(_extension(model, left, memo) ^ _extension(model, right, memo))
        case Box(arg):
            result = full if _extension(model, arg, memo) == full else 0
        case Dia(arg):
            result = full if _extension(model, arg, memo) else 0
        case Ability(agent, arg):
            x = _extension(model, arg, memo)
            result = _states_where(model, lambda w: member(frame, agent, w, x))
        case AbilityDual(agent, arg):
            x = full & ~_extension(model, arg, memo)
            result = _states_where(model, lambda w: not member(frame, agent, w, x))
        case ForallCore(agent, arg):
            x = _extension(model, arg, memo)
            result = _states_where(model, lambda w: is_subset(_core_union(model, agent, w), x))
        case ForallCoreDual(agent, arg):
            x = _extension(model, arg, memo)
            result = _states_where(model, lambda w: bool(_core_union(model, agent, w) & x))
        case Stit() | StitDual():
            raise FormulaPurityError(f"classical stit operator in a neighbourhood model: {render(f)}")
        case _:
            raise TypeError(f"not a formula: {f!r}")
    memo[f] = result
    return result


def _states_where(model: NbhdModel, predicate) -> Subset:
    mask = 0
    for w in range(len(model.states)):
        if predicate(w):
            mask |= 1 << w
    return mask


def _core_union(model: NbhdModel, agent: str, w: int) -> Subset:
    covered = 0
    for cell in core(model.frame, agent, w):
        covered |= cell
    return covered


def eval(model: NbhdModel, state: str, f: Formula) -> bool:
    """Truth of f at a state."""
    w = model.states.index(state)
    return bool(extension(model, f) >> w & 1)


def eval_ability_core(model: NbhdModel, state: str, agent: str, f: Formula) -> bool:
    """[agent]f by the core clause: some core cell at the state lies inside ⟦f⟧."""
    w = model.states.index(state)
    x = extension(model, f)
    return any(is_subset(cell, x) for cell in core(model.frame, agent, w))


def eval_forall_rel(model: NbhdModel, state: str, agent: str, f: Formula) -> bool:
    """[E:agent]f by the relational clause: every R_agent-successor of the state satisfies f.

    Raises:
        PreconditionError: if the agent's neighbourhoods vary between states.
    """
    w = model.states.index(state)
    relation = relation_Ri(model.frame, agent)
    return is_subset(relation.successors(w), extension(model, f))


def eval_box_empty_coalition(model: NbhdModel, state: str, f: Formula) -> bool:
    """box f read as the ability of the empty coalition, whose neighbourhood is {W} closed upwards."""
    model.states.index(state)
    return extension(model, f) == model.frame.full
