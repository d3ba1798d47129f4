"""Hypothesis strategies for formulas, frames and models."""

from hypothesis import strategies as st

from stitkit.nbhd import NbhdFrame, NbhdModel, StateSet, minimal_elements
from stitkit.syntax import (
    Ability,
    AbilityDual,
    And,
    Atom,
    Box,
    Dia,
    ForallCore,
    ForallCoreDual,
    Iff,
    Implies,
    Not,
    Or,
    Stit,
    StitDual,
)

ATOMS = ["p", "q", "r"]
AGENTS = ["a", "b"]

_UNARY = [Not, Box, Dia]
_BINARY = [Or, And, Implies, Iff]
_STRATEGIC = [Ability, AbilityDual, ForallCore, ForallCoreDual]


def formulas(agentive=tuple(_STRATEGIC + [Stit, StitDual]), max_leaves=12):
    """Formulas over ATOMS and AGENTS using the given agentive operators."""
    atoms = st.sampled_from(ATOMS).map(Atom)

    def extend(inner):
        return st.one_of(
            st.tuples(st.sampled_from(_UNARY), inner).map(lambda t: t[0](t[1])),
            st.tuples(st.sampled_from(_BINARY), inner, inner).map(lambda t: t[0](t[1], t[2])),
            st.tuples(st.sampled_from(list(agentive)), st.sampled_from(AGENTS), inner).map(
                lambda t: t[0](t[1], t[2])
            ),
        )

    return st.recursive(atoms, extend, max_leaves=max_leaves)


def strategic_formulas(max_leaves=10):
    return formulas(agentive=_STRATEGIC, max_leaves=max_leaves)


def ability_formulas(max_leaves=10):
    """Strategic formulas without [E:i], the domain of tr."""
    return formulas(agentive=[Ability, AbilityDual], max_leaves=max_leaves)


@st.composite
def antichains(draw, n):
    full = (1 << n) - 1
    picks = draw(st.lists(st.integers(min_value=1, max_value=full), min_size=1, max_size=4))
    return minimal_elements(picks)


@st.composite
def frames(draw, max_states=4, agents=tuple(AGENTS), uniform=False):
    """Arbitrary frames; ``uniform`` gives every agent the same generators at all states."""
    n = draw(st.integers(min_value=1, max_value=max_states))
    gens = []
    for _ in agents:
        if uniform:
            row = draw(antichains(n))
            gens.append(tuple(row for _ in range(n)))
        else:
            gens.append(tuple(draw(antichains(n)) for _ in range(n)))
    states = StateSet(tuple(f"w{k + 1}" for k in range(n)))
    return NbhdFrame(states, tuple(agents), tuple(gens))


@st.composite
def models(draw, max_states=4, agents=tuple(AGENTS), uniform=False):
    frame = draw(frames(max_states=max_states, agents=agents, uniform=uniform))
    bits = st.integers(min_value=0, max_value=frame.full)
    valuation = {atom: draw(bits) for atom in ATOMS}
    return NbhdModel(frame, tuple(valuation.items()))
