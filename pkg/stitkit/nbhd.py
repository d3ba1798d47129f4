"""stitkit Neighbourhood frames — one-shot strategic stit frames, cores and frame-class checks.

Subsets of the state set are ``int`` bitmasks over the state order (bit k = k-th state).
A neighbourhood N_i(w) is never materialized: it is stored as its generator antichain,
and X ∈ N_i(w) iff some generator is contained in X.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations, permutations
from typing import Iterable, Iterator, Mapping, Sequence

from stitkit.models import CheckReport, FrameValidationError, PreconditionError, UnknownSymbolError
from stitkit.syntax import AgentId, is_identifier

logger = logging.getLogger(__name__)

Subset = int

SUPPLEMENT_LIMIT = 12


# ── Subset helpers ────────────────────────────────────────────────────


def members(mask: Subset) -> tuple[int, ...]:
    """Indices of the bits set in mask, ascending."""
    out = []
    k = 0
    while mask:
        if mask & 1:
            out.append(k)
        mask >>= 1
        k += 1
    return tuple(out)


def is_subset(x: Subset, y: Subset) -> bool:
    return x & ~y == 0


def canonical(masks: Iterable[Subset]) -> tuple[Subset, ...]:
    """Deduplicate and order subsets by their sorted member indices."""
    return tuple(sorted(set(masks), key=lambda m: (members(m), m)))


def minimal_elements(masks: Iterable[Subset]) -> tuple[Subset, ...]:
    """The ⊆-minimal elements: X such that no Y ≠ X in the family has Y ⊆ X."""
    family = set(masks)
    return canonical(x for x in family if not any(y != x and is_subset(y, x) for y in family))


def is_antichain(masks: Sequence[Subset]) -> bool:
    return len(minimal_elements(masks)) == len(set(masks)) == len(masks)


# ── State sets ────────────────────────────────────────────────────────


@dataclass(frozen=True)
class StateSet:
    """Ordered, nonempty list of distinct state names."""

    names: tuple[str, ...]
    _index: dict[str, int] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        if not self.names:
            raise FrameValidationError("states", "state set must be nonempty")
        if len(set(self.names)) != len(self.names):
            raise FrameValidationError("states", f"duplicate state names in {list(self.names)}")
        object.__setattr__(self, "_index", {name: k for k, name in enumerate(self.names)})

    def __len__(self) -> int:
        return len(self.names)

    def __iter__(self) -> Iterator[str]:
        return iter(self.names)

    def __contains__(self, name: object) -> bool:
        return name in self._index

    @property
    def full(self) -> Subset:
        return (1 << len(self.names)) - 1

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownSymbolError(f"unknown state: {name!r}") from None

    def subset(self, names: Iterable[str]) -> Subset:
        """Bitmask of the named states."""
        mask = 0
        for name in names:
            mask |= 1 << self.index(name)
        return mask

    def names_of(self, mask: Subset) -> list[str]:
        """State names of a subset in state order."""
        return [self.names[k] for k in members(mask)]


# ── Frames and models ─────────────────────────────────────────────────


@dataclass(frozen=True)
class NbhdFrame:
    """Finite neighbourhood frame: gens[agent][state] is the generator antichain of N_agent(state).

    Construction enforces: every generator family is a nonempty antichain without the empty
    set, inside W. Class conditions (ind), (nec), (un) are checks, not constructor constraints.
    """

    states: StateSet
    agents: tuple[AgentId, ...]
    gens: tuple[tuple[tuple[Subset, ...], ...], ...]
    _agent_index: dict[str, int] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(self.agents))
        if not self.agents:
            raise FrameValidationError("agents", "agent set must be nonempty")
        if len(set(self.agents)) != len(self.agents):
            raise FrameValidationError("agents", f"duplicate agents in {list(self.agents)}")
        for agent in self.agents:
            if not is_identifier(agent):
                raise FrameValidationError("agents", f"invalid agent name {agent!r}")
        object.__setattr__(self, "_agent_index", {a: k for k, a in enumerate(self.agents)})
        gens = tuple(tuple(canonical(per_state) for per_state in per_agent) for per_agent in self.gens)
        object.__setattr__(self, "gens", gens)
        self._validate()

    def _validate(self) -> None:
        if len(self.gens) != len(self.agents):
            raise FrameValidationError("gens", "one generator table per agent required")
        full = self.states.full
        for agent, per_agent in zip(self.agents, self.gens):
            if len(per_agent) != len(self.states):
                raise FrameValidationError("gens", f"agent {agent}: generators required at every state")
            for w, family in zip(self.states, per_agent):
                where = f"agent {agent} at {w}"
                if not family:
                    raise FrameValidationError("N", f"{where}: generator family is empty")
                if 0 in family:
                    raise FrameValidationError("D", f"{where}: empty set among generators")
                if any(not is_subset(g, full) for g in family):
                    raise FrameValidationError("gens", f"{where}: generator outside the state set")
                if not is_antichain(family):
                    raise FrameValidationError("antichain", f"{where}: generators are not an antichain")

    # --- construction helpers ---

    @classmethod
    def from_names(
        cls,
        states: Sequence[str],
        agents: Sequence[AgentId],
        choice: Mapping[AgentId, Mapping[str, Sequence[Sequence[str]]]],
    ) -> NbhdFrame:
        """Build from per-state generator lists given by state names."""
        state_set = StateSet(tuple(states))
        table = []
        for agent in agents:
            if agent not in choice:
                raise FrameValidationError("gens", f"no choice given for agent {agent}")
            per_state = choice[agent]
            unknown = set(per_state) - set(state_set.names)
            if unknown:
                raise UnknownSymbolError(f"agent {agent}: unknown states {sorted(unknown)}")
            row = []
            for w in state_set:
                if w not in per_state:
                    raise FrameValidationError("gens", f"agent {agent}: no generators at {w}")
                row.append(tuple(state_set.subset(cell) for cell in per_state[w]))
            table.append(tuple(row))
        return cls(state_set, tuple(agents), tuple(table))

    @classmethod
    def uniform(
        cls,
        states: Sequence[str],
        agents: Sequence[AgentId],
        cores: Mapping[AgentId, Sequence[Sequence[str]]],
    ) -> NbhdFrame:
        """Build a frame whose generators are the same at every state, so (nec) holds."""
        return cls.from_names(
            states, agents, {a: {w: cores[a] for w in states} for a in agents if a in cores}
        )

    # --- accessors ---

    @property
    def full(self) -> Subset:
        return self.states.full

    def agent_index(self, agent: AgentId) -> int:
        try:
            return self._agent_index[agent]
        except KeyError:
            raise UnknownSymbolError(f"unknown agent: {agent!r}") from None

    def generators(self, agent: AgentId, state: str | int) -> tuple[Subset, ...]:
        w = state if isinstance(state, int) else self.states.index(state)
        return self.gens[self.agent_index(agent)][w]

    def is_uniform(self, agent: AgentId) -> bool:
        rows = self.gens[self.agent_index(agent)]
        return all(row == rows[0] for row in rows)


@dataclass(frozen=True)
class NbhdModel:
    """A frame plus a valuation; atoms absent from the valuation denote ∅."""

    frame: NbhdFrame
    valuation: tuple[tuple[str, Subset], ...] = ()
    _values: dict[str, Subset] = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        items = self.valuation.items() if isinstance(self.valuation, Mapping) else self.valuation
        pairs = tuple(sorted((str(p), int(mask)) for p, mask in items))
        full = self.frame.full
        for atom, mask in pairs:
            if not is_identifier(atom):
                raise FrameValidationError("valuation", f"invalid atom name {atom!r}")
            if not is_subset(mask, full):
                raise FrameValidationError("valuation", f"V({atom}) is not a subset of the states")
        object.__setattr__(self, "valuation", pairs)
        object.__setattr__(self, "_values", dict(pairs))

    @classmethod
    def from_names(cls, frame: NbhdFrame, valuation: Mapping[str, Iterable[str]]) -> NbhdModel:
        return cls(frame, tuple((p, frame.states.subset(ws)) for p, ws in valuation.items()))

    @property
    def states(self) -> StateSet:
        return self.frame.states

    def value(self, atom: str) -> Subset:
        return self._values.get(atom, 0)

    def with_valuation(self, valuation: Mapping[str, Subset]) -> NbhdModel:
        return NbhdModel(self.frame, tuple(valuation.items()))


# ── Neighbourhood algebra ─────────────────────────────────────────────


def core(frame: NbhdFrame, agent: AgentId, state: str | int) -> tuple[Subset, ...]:
    """Non-monotonic core of N_agent(state): its ⊆-minimal members (= the generators)."""
    return minimal_elements(frame.generators(agent, state))


def member(frame: NbhdFrame, agent: AgentId, state: str | int, x: Subset) -> bool:
    """X ∈ N_agent(state) iff some generator is included in X."""
    return any(is_subset(g, x) for g in frame.generators(agent, state))


def supplement(frame: NbhdFrame, agent: AgentId, state: str | int) -> tuple[Subset, ...]:
    """Explicit up-closure of the generators: every X ⊆ W in N_agent(state)."""
    if len(frame.states) > SUPPLEMENT_LIMIT:
        raise PreconditionError(
            f"supplement materializes 2^|W| sets; refusing |W|={len(frame.states)} > {SUPPLEMENT_LIMIT}"
        )
    gens = frame.generators(agent, state)
    return canonical(x for x in range(frame.full + 1) if any(is_subset(g, x) for g in gens))


def _witness_sets(frame: NbhdFrame, **sets: Subset) -> dict[str, list[str]]:
    return {key: frame.states.names_of(mask) for key, mask in sets.items()}


# ── Frame conditions ──────────────────────────────────────────────────


def check_basic(frame: NbhdFrame) -> CheckReport:
    """Neighbourhood conditions re-checked on a built frame: antichain, (N), (D)."""
    full = frame.full
    for agent in frame.agents:
        for w in frame.states:
            gens = frame.generators(agent, w)
            if not is_antichain(gens):
                return CheckReport.fail("basic", {"property": "antichain", "agent": agent, "state": w})
            if not member(frame, agent, w, full):
                return CheckReport.fail("basic", {"property": "N", "agent": agent, "state": w})
            if member(frame, agent, w, 0):
                return CheckReport.fail("basic", {"property": "D", "agent": agent, "state": w})
    return CheckReport.ok("basic")


def check_ind(frame: NbhdFrame) -> CheckReport:
    """Independence of distinct agents: their core cells pairwise intersect at every state."""
    for w in frame.states:
        for a, b in combinations(frame.agents, 2):
            for x in core(frame, a, w):
                for y in core(frame, b, w):
                    if x & y == 0:
                        witness = {"state": w, "agents": [a, b], **_witness_sets(frame, X=x, Y=y)}
                        logger.debug(f"check_ind | fails | state={w} | agents={a},{b}")
                        return CheckReport.fail("ind", witness)
    return CheckReport.ok("ind")


def check_ind_complement(frame: NbhdFrame) -> CheckReport:
    """The interchangeable (ind) form: X ∈ N_a(w) implies W∖X ∉ N_b(w), for a ≠ b."""
    full = frame.full
    for w in frame.states:
        for a, b in permutations(frame.agents, 2):
            for x in core(frame, a, w):
                if member(frame, b, w, full & ~x):
                    witness = {
                        "state": w,
                        "agents": [a, b],
                        **_witness_sets(frame, X=x, complement=full & ~x),
                    }
                    return CheckReport.fail("ind_complement", witness)
    return CheckReport.ok("ind_complement")


def nec_violation(frame: NbhdFrame) -> tuple[AgentId, int, int, Subset] | None:
    """First (agent, w, w', X) with X ∈ N(w) ∖ N(w'), or None when (nec) holds."""
    for agent in frame.agents:
        rows = frame.gens[frame.agent_index(agent)]
        first = rows[0]
        for k, row in enumerate(rows[1:], start=1):
            if row == first:
                continue
            for g in first:
                if not member(frame, agent, k, g):
                    return agent, 0, k, g
            for g in row:
                if not member(frame, agent, 0, g):
                    return agent, k, 0, g
    return None


def check_nec(frame: NbhdFrame) -> CheckReport:
    """Historical necessity of abilities: each agent's generators are identical at all states."""
    found = nec_violation(frame)
    if found is None:
        return CheckReport.ok("nec")
    agent, w, w2, x = found
    names = frame.states.names
    witness = {"agent": agent, "state": names[w], "other_state": names[w2], **_witness_sets(frame, X=x)}
    return CheckReport.fail("nec", witness)


def check_un(frame: NbhdFrame) -> CheckReport:
    """Core cells of every agent jointly cover W at every state."""
    full = frame.full
    for agent in frame.agents:
        for w in frame.states:
            covered = 0
            for cell in core(frame, agent, w):
                covered |= cell
            if covered != full:
                witness = {"agent": agent, "state": w, **_witness_sets(frame, uncovered=full & ~covered)}
                return CheckReport.fail("un", witness)
    return CheckReport.ok("un")


def check_partition_cores(frame: NbhdFrame) -> CheckReport:
    """Core cells are pairwise disjoint for every agent and state."""
    for agent in frame.agents:
        for w in frame.states:
            for x, y in combinations(core(frame, agent, w), 2):
                if x & y:
                    witness = {
                        "agent": agent,
                        "state": w,
                        **_witness_sets(frame, X=x, Y=y, overlap=x & y),
                    }
                    return CheckReport.fail("partition", witness)
    return CheckReport.ok("partition")


def is_class_C(frame: NbhdFrame) -> CheckReport:
    """Osstit frame class: construction invariants plus (ind), (nec) and (un)."""
    checks = [check_basic(frame), check_ind(frame), check_nec(frame), check_un(frame)]
    return CheckReport.conjoin("class_C", checks)


def is_class_P(frame: NbhdFrame) -> CheckReport:
    """Class C frames whose cores partition W."""
    checks = [check_basic(frame), check_ind(frame), check_nec(frame), check_un(frame)]
    checks.append(check_partition_cores(frame))
    return CheckReport.conjoin("class_P", checks)


# ── The relation behind [E:i] ─────────────────────────────────────────


@dataclass(frozen=True)
class AgentRelation:
    """R_i = (⋃ core_i)² together with its equivalence-relation properties over its domain."""

    agent: AgentId
    domain: Subset
    pairs: frozenset[tuple[int, int]]
    reflexive: bool
    symmetric: bool
    transitive: bool

    def related(self, x: int, y: int) -> bool:
        return (x, y) in self.pairs

    def successors(self, x: int) -> Subset:
        mask = 0
        for a, b in self.pairs:
            if a == x:
                mask |= 1 << b
        return mask

    def named_pairs(self, states: StateSet) -> list[tuple[str, str]]:
        return sorted((states.names[a], states.names[b]) for a, b in self.pairs)


def relation_Ri(frame: NbhdFrame, agent: AgentId) -> AgentRelation:
    """The relation whose box is [E:agent]; needs (nec) so the choice of state is immaterial.

    Raises:
        PreconditionError: if the agent's generators differ between states.
    """
    if not frame.is_uniform(agent):
        raise PreconditionError(f"relation_Ri needs (nec) for agent {agent}")
    covered = 0
    for cell in core(frame, agent, 0):
        covered |= cell
    domain_members = members(covered)
    pairs = frozenset((x, y) for x in domain_members for y in domain_members)
    reflexive = all((x, x) in pairs for x in domain_members)
    symmetric = all((y, x) in pairs for x, y in pairs)
    transitive = all((x, z) in pairs for x, y in pairs for y2, z in pairs if y == y2)
    return AgentRelation(agent, covered, pairs, reflexive, symmetric, transitive)
