"""stitkit Generators — random formulas, valuations, frames and BT+AC models.

Everything takes an explicit ``random.Random`` so callers control reproducibility.
"""

from __future__ import annotations

import logging
import random
import string
from itertools import product
from typing import Literal, Sequence

from stitkit.btac import BTACModel, BTFrame, histories
from stitkit.models import FrameStyle, FrameValidationError, PreconditionError
from stitkit.nbhd import (
    NbhdFrame,
    NbhdModel,
    StateSet,
    Subset,
    check_ind,
    check_nec,
    check_un,
    is_class_C,
    minimal_elements,
)
from stitkit.syntax import (
    Ability,
    AbilityDual,
    AgentId,
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
)

logger = logging.getLogger(__name__)

PERTURB_ATTEMPTS = 20

ViolationKind = Literal["ind", "nec", "un"]


def agent_names(count: int) -> list[AgentId]:
    """a, b, c, ... then a1, b1, ... for larger counts."""
    letters = string.ascii_lowercase
    return [letters[k % 26] + (str(k // 26) if k >= 26 else "") for k in range(count)]


def state_names(count: int) -> list[str]:
    return [f"w{k + 1}" for k in range(count)]


# ── Formulas & valuations ─────────────────────────────────────────────


def random_formula(
    rng: random.Random,
    atoms: Sequence[str],
    agents: Sequence[AgentId],
    depth: int,
    allow_forall_core: bool = True,
    language: Literal["osstit", "cstit"] = "osstit",
) -> Formula:
    """A random formula of modal depth at most ``depth``, sugar included."""
    if depth < 0:
        raise PreconditionError("depth must be nonnegative")
    if language == "osstit":
        agentive = [Ability, AbilityDual]
        if allow_forall_core:
            agentive += [ForallCore, ForallCoreDual]
    else:
        agentive = [Stit, StitDual]
    return _formula(rng, list(atoms), list(agents), depth, agentive, size=4)


def _formula(rng, atoms, agents, depth, agentive, size) -> Formula:
    if size <= 0 or rng.random() < 0.25:
        return Atom(rng.choice(atoms))
    roll = rng.random()
    if roll < 0.2:
        return Not(_formula(rng, atoms, agents, depth, agentive, size - 1))
    if roll < 0.5 or depth == 0:
        op = rng.choice([Or, And, Implies, Iff])
        left = _formula(rng, atoms, agents, depth, agentive, size - 1)
        return op(left, _formula(rng, atoms, agents, depth, agentive, size - 1))
    inner = _formula(rng, atoms, agents, depth - 1, agentive, size - 1)
    if rng.random() < 0.3:
        return rng.choice([Box, Dia])(inner)
    return rng.choice(agentive)(rng.choice(agents), inner)


def random_valuation(rng: random.Random, states: StateSet | int, atoms: Sequence[str]) -> dict[str, Subset]:
    count = states if isinstance(states, int) else len(states)
    return {atom: rng.getrandbits(count) if count else 0 for atom in atoms}


# ── Frames ────────────────────────────────────────────────────────────


def _cells_from_coordinates(coords: Sequence[int], width: int) -> tuple[Subset, ...]:
    cells = [0] * width
    for w, c in enumerate(coords):
        cells[c] |= 1 << w
    return tuple(cell for cell in cells if cell)


def grid_frame(shape: Sequence[int], agents: Sequence[AgentId] | None = None) -> NbhdFrame:
    """One state per coordinate tuple; agent k's core cells are the preimages of coordinate k."""
    agents = list(agents) if agents is not None else agent_names(len(shape))
    if len(agents) != len(shape) or any(k <= 0 for k in shape):
        raise PreconditionError("grid_frame needs one positive extent per agent")
    tuples = list(product(*(range(k) for k in shape)))
    states = StateSet(tuple(state_names(len(tuples))))
    gens = []
    for k in range(len(agents)):
        cells = _cells_from_coordinates([t[k] for t in tuples], shape[k])
        gens.append(tuple(cells for _ in tuples))
    return NbhdFrame(states, tuple(agents), tuple(gens))


def random_class_c_frame(
    rng: random.Random,
    n_states: int,
    agents: Sequence[AgentId],
    style: FrameStyle | str = FrameStyle.GRID,
) -> NbhdFrame:
    """A random frame in class C.

    Grid: every state gets one coordinate per agent, each coordinate combination is used at
    least once, and agent k's cells are the preimages of coordinate k. Perturbed: a grid
    frame whose cells are then merged or overlapped, keeping the frame in class C.
    """
    style = FrameStyle(style)
    if n_states <= 0 or not agents:
        raise PreconditionError("a frame needs at least one state and one agent")
    extents = []
    room = n_states
    for _ in agents:
        k = rng.randint(1, max(1, room))
        extents.append(k)
        room //= k
    combos = list(product(*(range(k) for k in extents)))
    coords = combos + [rng.choice(combos) for _ in range(n_states - len(combos))]
    rng.shuffle(coords)
    rows = [list(_cells_from_coordinates([c[k] for c in coords], extents[k])) for k in range(len(agents))]
    frame = _uniform_frame(n_states, agents, rows)
    if style is FrameStyle.PERTURBED:
        frame = _perturb(rng, frame, rows)
    return frame


def _uniform_frame(n_states: int, agents: Sequence[AgentId], rows: Sequence[Sequence[Subset]]) -> NbhdFrame:
    states = StateSet(tuple(state_names(n_states)))
    gens = tuple(tuple(tuple(row) for _ in range(n_states)) for row in rows)
    return NbhdFrame(states, tuple(agents), gens)


def _perturb(rng: random.Random, frame: NbhdFrame, rows: list[list[Subset]]) -> NbhdFrame:
    full = frame.full
    n = len(frame.states)
    for _ in range(PERTURB_ATTEMPTS):
        k = rng.randrange(len(rows))
        cells = list(rows[k])
        if rng.random() < 0.5 and len(cells) > 1:
            x, y = rng.sample(cells, 2)
            cells = [c for c in cells if c not in (x, y)] + [x | y]
        else:
            extra = rng.randint(1, full)
            cells.append(extra)
        cells = list(minimal_elements(cells))
        candidate_rows = [row if j != k else cells for j, row in enumerate(rows)]
        try:
            candidate = _uniform_frame(n, frame.agents, candidate_rows)
        except FrameValidationError:
            continue
        if is_class_C(candidate).holds:
            rows[k] = cells
            frame = candidate
    return frame


def random_antichain(rng: random.Random, full: Subset, size: int | None = None) -> tuple[Subset, ...]:
    """A nonempty antichain of nonempty subsets of ``full``."""
    size = size if size is not None else rng.randint(1, 3)
    picks = [rng.randint(1, full) for _ in range(size)]
    return minimal_elements(picks)


def random_partition(rng: random.Random, states: Sequence[int], blocks: int | None = None) -> list[Subset]:
    """A random partition of the given state indices into nonempty cells."""
    states = list(states)
    blocks = blocks if blocks is not None else rng.randint(1, len(states))
    blocks = max(1, min(blocks, len(states)))
    rng.shuffle(states)
    cells = [0] * blocks
    for k, w in enumerate(states):
        cells[k if k < blocks else rng.randrange(blocks)] |= 1 << w
    return cells


def random_frame(rng: random.Random, n_states: int, agents: Sequence[AgentId]) -> NbhdFrame:
    """An arbitrary frame: random generator antichains at every state, no class conditions."""
    full = (1 << n_states) - 1
    gens = tuple(
        tuple(random_antichain(rng, full) for _ in range(n_states)) for _ in agents
    )
    return NbhdFrame(StateSet(tuple(state_names(n_states))), tuple(agents), gens)


def random_nbhd_model(
    rng: random.Random,
    n_states: int,
    agents: Sequence[AgentId],
    atoms: Sequence[str],
    style: FrameStyle | str | None = None,
    class_c: bool = True,
) -> NbhdModel:
    if class_c:
        style = style if style is not None else rng.choice(list(FrameStyle))
        frame = random_class_c_frame(rng, n_states, agents, style)
    else:
        frame = random_frame(rng, n_states, agents)
    return NbhdModel(frame, tuple(random_valuation(rng, n_states, atoms).items()))


def frames_violating(kind: ViolationKind, rng: random.Random) -> NbhdFrame:
    """A frame that violates exactly the named one of (ind), (nec), (un)."""
    n = rng.randint(2, 5)
    everything = (1 << n) - 1
    if kind == "ind":
        # Two agents sharing one partition with at least two cells.
        cells = random_partition(rng, range(n), rng.randint(2, n))
        rows = [cells, list(reversed(cells))]
        agents = agent_names(2)
    elif kind == "nec":
        first = random_partition(rng, range(n))
        other = random_partition(rng, range(n))
        while sorted(other) == sorted(first):
            other = random_partition(rng, range(n))
        per_state = [first] + [rng.choice([first, other]) for _ in range(n - 1)]
        if all(sorted(row) == sorted(first) for row in per_state):
            per_state[rng.randrange(1, n)] = other
        states = StateSet(tuple(state_names(n)))
        gens = (tuple(tuple(row) for row in per_state), tuple((everything,) for _ in range(n)))
        frame = NbhdFrame(states, tuple(agent_names(2)), gens)
        return _confirm(frame, kind)
    elif kind == "un":
        missing = rng.randrange(n)
        covered = [w for w in range(n) if w != missing and rng.random() < 0.7] or [(missing + 1) % n]
        rows = [random_partition(rng, covered), [everything]]
        agents = agent_names(2)
    else:
        raise PreconditionError(f"unknown frame condition: {kind!r}")
    return _confirm(_uniform_frame(n, agents, rows), kind)


def _confirm(frame: NbhdFrame, kind: ViolationKind) -> NbhdFrame:
    results = {"ind": check_ind(frame), "nec": check_nec(frame), "un": check_un(frame)}
    wrong = [name for name, report in results.items() if report.holds == (name == kind)]
    if wrong:
        raise FrameValidationError(kind, f"generated frame gets {wrong} wrong")
    return frame


# ── BT+AC models ──────────────────────────────────────────────────────


def random_tree(rng: random.Random, max_moments: int, max_children: int) -> BTFrame:
    """A random finite tree rooted at m1; each moment has at most ``max_children`` children."""
    count = rng.randint(1, max_moments)
    moments = [f"m{k + 1}" for k in range(count)]
    children = {m: 0 for m in moments}
    edges = []
    for k in range(1, count):
        parent = rng.choice([m for m in moments[:k] if children[m] < max_children])
        children[parent] += 1
        edges.append((parent, moments[k]))
    return BTFrame.from_edges(moments, edges)


def random_btac_model(
    rng: random.Random,
    max_moments: int,
    max_children: int,
    agents: Sequence[AgentId],
    atoms: Sequence[str],
) -> BTACModel:
    """A valid random BT+AC model; choices at each moment are laid out as a grid over H_m."""
    frame = random_tree(rng, max_moments, max_children)
    hs = histories(frame)
    choice: dict[str, dict[str, list[list[str]]]] = {agent: {} for agent in agents}
    for m in frame.moments:
        through = [h.name for h in hs if m in h]
        extents = []
        room = len(through)
        for _ in agents:
            k = rng.randint(1, max(1, room))
            extents.append(k)
            room //= k
        combos = list(product(*(range(k) for k in extents)))
        coords = combos + [rng.choice(combos) for _ in range(len(through) - len(combos))]
        rng.shuffle(coords)
        for k, agent in enumerate(agents):
            cells: dict[int, list[str]] = {}
            for h, c in zip(through, coords):
                cells.setdefault(c[k], []).append(h)
            choice[agent][m] = [cells[c] for c in sorted(cells)]
    indices = [(m, h.name) for m in frame.moments for h in hs if m in h]
    valuation = {atom: [idx for idx in indices if rng.random() < 0.5] for atom in atoms}
    return BTACModel.build(frame, agents, choice, valuation)
