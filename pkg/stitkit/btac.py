"""stitkit BT+AC — finite branching-time frames with agents and choices, classical stit semantics."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations
from typing import Iterable, Mapping, Sequence

from stitkit.models import (
    CheckReport,
    FormulaPurityError,
    FrameValidationError,
    UnknownSymbolError,
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
    is_identifier,
    render,
)

logger = logging.getLogger(__name__)

BRUTE_FORCE_LIMIT = 16


# ── Frames and histories ──────────────────────────────────────────────


@dataclass(frozen=True)
class BTFrame:
    """Finite moments with a strict order given as (earlier, later) pairs.

    Frame conditions are checked by check_frame, so violating frames can be built and reported.
    """

    moments: tuple[str, ...]
    order: frozenset[tuple[str, str]]

    def __post_init__(self):
        object.__setattr__(self, "moments", tuple(self.moments))
        object.__setattr__(self, "order", frozenset((str(a), str(b)) for a, b in self.order))
        if not self.moments:
            raise FrameValidationError("moments", "moment set must be nonempty")
        if len(set(self.moments)) != len(self.moments):
            raise FrameValidationError("moments", f"duplicate moments in {list(self.moments)}")
        known = set(self.moments)
        for a, b in self.order:
            if a not in known or b not in known:
                raise UnknownSymbolError(f"order pair ({a}, {b}) names an unknown moment")

    @classmethod
    def from_edges(cls, moments: Sequence[str], edges: Iterable[tuple[str, str]]) -> BTFrame:
        """Build from immediate-successor edges; the order is their transitive closure."""
        order = set(edges)
        changed = True
        while changed:
            changed = False
            for a, b in list(order):
                for c, d in list(order):
                    if b == c and (a, d) not in order:
                        order.add((a, d))
                        changed = True
        return cls(tuple(moments), frozenset(order))

    def before(self, a: str, b: str) -> bool:
        return (a, b) in self.order

    def comparable(self, a: str, b: str) -> bool:
        return a == b or (a, b) in self.order or (b, a) in self.order

    def check_moment(self, m: str) -> str:
        if m not in self.moments:
            raise UnknownSymbolError(f"unknown moment: {m!r}")
        return m

    @cached_property
    def maximal_moments(self) -> tuple[str, ...]:
        later = {a for a, _ in self.order}
        return tuple(m for m in self.moments if m not in later)


@dataclass(frozen=True)
class History:
    """A maximal chain of moments, named after its maximal element."""

    name: str
    moments: frozenset[str]

    def __contains__(self, m: object) -> bool:
        return m in self.moments


def history_name(maximal_moment: str) -> str:
    return f"h:{maximal_moment}"


@dataclass(frozen=True)
class Index:
    """Moment/history pair m/h with h passing through m."""

    moment: str
    history: str

    def __str__(self) -> str:
        return f"{self.moment}/{self.history}"


def check_frame(frame: BTFrame) -> CheckReport:
    """Irreflexivity, transitivity and backward linearity of the order."""
    for m in frame.moments:
        if frame.before(m, m):
            return CheckReport.fail("bt_frame", {"property": "irreflexive", "moment": m})
    for a, b in sorted(frame.order):
        for c in frame.moments:
            if frame.before(b, c) and not frame.before(a, c):
                return CheckReport.fail(
                    "bt_frame", {"property": "transitive", "moments": [a, b, c]}
                )
    for m in frame.moments:
        below = [p for p in frame.moments if frame.before(p, m)]
        for p, q in combinations(below, 2):
            if not frame.comparable(p, q):
                return CheckReport.fail(
                    "bt_frame", {"property": "backward_linearity", "moment": m, "incomparable": [p, q]}
                )
    return CheckReport.ok("bt_frame")


def _require_frame(frame: BTFrame) -> None:
    report = check_frame(frame)
    if not report.holds:
        raise FrameValidationError("bt_frame", f"frame invariant violated: {report.witness}")


def _is_chain(frame: BTFrame, moments: Iterable[str]) -> bool:
    return all(frame.comparable(a, b) for a, b in combinations(moments, 2))


def histories(frame: BTFrame) -> tuple[History, ...]:
    """All histories, as the down-sets of the maximal moments.

    Each candidate is re-checked against the general definition (a chain that no further
    moment extends) before it is returned.
    """
    _require_frame(frame)
    result = []
    for top in frame.maximal_moments:
        chain = frozenset([top, *(m for m in frame.moments if frame.before(m, top))])
        if not _is_chain(frame, chain):
            raise FrameValidationError("history", f"down-set of {top} is not a chain")
        if any(_is_chain(frame, chain | {m}) for m in frame.moments if m not in chain):
            raise FrameValidationError("history", f"down-set of {top} is not maximal")
        result.append(History(history_name(top), chain))
    logger.debug(f"histories | moments={len(frame.moments)} | histories={len(result)}")
    return tuple(result)


def histories_brute_force(frame: BTFrame) -> frozenset[frozenset[str]]:
    """Maximal chains by exhaustive subset enumeration; an oracle for small frames."""
    moments = frame.moments
    if len(moments) > BRUTE_FORCE_LIMIT:
        raise FrameValidationError("history", f"brute force refuses {len(moments)} moments")
    chains = []
    for mask in range(1, 1 << len(moments)):
        subset = frozenset(m for k, m in enumerate(moments) if mask >> k & 1)
        if _is_chain(frame, subset):
            chains.append(subset)
    return frozenset(c for c in chains if not any(c < other for other in chains))


def histories_through(frame: BTFrame, m: str) -> tuple[History, ...]:
    """H_m: the histories passing through m."""
    frame.check_moment(m)
    return tuple(h for h in histories(frame) if m in h)


# ── Models ────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class BTACModel:
    """Branching-time frame with agents, per-moment choice partitions and an index valuation.

    choice[(agent, moment)] lists the cells as sets of history names; a moment with no
    entry gets the vacuous choice {H_m}. Invariants are reported by validate_btac.
    """

    frame: BTFrame
    agents: tuple[AgentId, ...]
    choice: tuple[tuple[tuple[AgentId, str], tuple[frozenset[str], ...]], ...] = ()
    valuation: tuple[tuple[str, frozenset[Index]], ...] = ()
    _choice: dict = field(init=False, repr=False, compare=False, hash=False)
    _values: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "agents", tuple(self.agents))
        if not self.agents:
            raise FrameValidationError("agents", "agent set must be nonempty")
        if len(set(self.agents)) != len(self.agents):
            raise FrameValidationError("agents", f"duplicate agents in {list(self.agents)}")
        for agent in self.agents:
            if not is_identifier(agent):
                raise FrameValidationError("agents", f"invalid agent name {agent!r}")
        choice = tuple(
            sorted(((str(a), str(m)), tuple(frozenset(c) for c in cells)) for (a, m), cells in self.choice)
        )
        valuation = tuple(sorted((str(p), frozenset(idx)) for p, idx in self.valuation))
        object.__setattr__(self, "choice", choice)
        object.__setattr__(self, "valuation", valuation)
        object.__setattr__(self, "_choice", dict(choice))
        object.__setattr__(self, "_values", dict(valuation))

    @classmethod
    def build(
        cls,
        frame: BTFrame,
        agents: Sequence[AgentId],
        choice: Mapping[AgentId, Mapping[str, Sequence[Sequence[str]]]],
        valuation: Mapping[str, Iterable[tuple[str, str]]],
    ) -> BTACModel:
        """Build from nested name mappings, as read from a BT+AC file."""
        entries = tuple(
            ((agent, m), tuple(frozenset(cell) for cell in cells))
            for agent, per_moment in choice.items()
            for m, cells in per_moment.items()
        )
        values = tuple(
            (p, frozenset(Index(m, h) for m, h in pairs)) for p, pairs in valuation.items()
        )
        return cls(frame, tuple(agents), entries, values)

    @cached_property
    def histories(self) -> tuple[History, ...]:
        return histories(self.frame)

    @cached_property
    def _history_by_name(self) -> dict[str, History]:
        return {h.name: h for h in self.histories}

    @cached_property
    def _through(self) -> dict[str, tuple[str, ...]]:
        return {m: tuple(h.name for h in self.histories if m in h) for m in self.frame.moments}

    def history(self, name: str) -> History:
        try:
            return self._history_by_name[name]
        except KeyError:
            raise UnknownSymbolError(f"unknown history: {name!r}") from None

    def through(self, m: str) -> tuple[str, ...]:
        """Names of the histories in H_m."""
        self.frame.check_moment(m)
        return self._through[m]

    def indices(self) -> list[Index]:
        return [Index(m, h) for m in self.frame.moments for h in self.through(m)]

    def cells(self, agent: AgentId, m: str) -> tuple[frozenset[str], ...]:
        """Choice^m_agent; the vacuous partition {H_m} when none was declared."""
        if agent not in self.agents:
            raise UnknownSymbolError(f"unknown agent: {agent!r}")
        declared = self._choice.get((agent, m))
        if declared is None:
            return (frozenset(self.through(m)),)
        return declared

    def cell_of(self, agent: AgentId, idx: Index) -> frozenset[str]:
        for cell in self.cells(agent, idx.moment):
            if idx.history in cell:
                return cell
        raise UnknownSymbolError(f"{idx} lies in no choice cell of {agent}")

    def holds_atom(self, atom: str, idx: Index) -> bool:
        return idx in self._values.get(atom, frozenset())

    def check_index(self, idx: Index) -> Index:
        if idx.history not in self.through(idx.moment):
            raise UnknownSymbolError(f"invalid index {idx}: history does not pass through moment")
        return idx


# ── Semantics ─────────────────────────────────────────────────────────


def eval_cstit(model: BTACModel, idx: Index, f: Formula) -> bool:
    """Truth of a classical stit formula at an index.

    □ quantifies over H_m at the fixed moment; [stit:i] over the cell of Choice^m_i holding h.

    Raises:
        FormulaPurityError: on a strategic operator.
        UnknownSymbolError: on an invalid index or unknown agent.
    """
    model.check_index(idx)
    return _eval(model, idx, f, {})


def _eval(model: BTACModel, idx: Index, f: Formula, memo: dict) -> bool:
    key = (f, idx)
    if key in memo:
        return memo[key]
    m = idx.moment

    def at(h: str, g: Formula) -> bool:
        return _eval(model, Index(m, h), g, memo)

    match f:
        case Atom(name):
            result = model.holds_atom(name, idx)
        case Not(arg):
            result = not _eval(model, idx, arg, memo)
        case Or(left, right):
            result = _eval(model, idx, left, memo) or _eval(model, idx, right, memo)
        case And(left, right):
            result = _eval(model, idx, left, memo) and _eval(model, idx, right, memo)
        case Implies(left, right):
            result = (not _eval(model, idx, left, memo)) or _eval(model, idx, right, memo)
        case Iff(left, right):
            result = _eval(model, idx, left, memo) == _eval(model, idx, right, memo)
        case Box(arg):
            result = all(at(h, arg) for h in model.through(m))
        case Dia(arg):
            result = any(at(h, arg) for h in model.through(m))
        case Stit(agent, arg):
            result = all(at(h, arg) for h in sorted(model.cell_of(agent, idx)))
        case StitDual(agent, arg):
            result = any(at(h, arg) for h in sorted(model.cell_of(agent, idx)))
        case Ability() | AbilityDual() | ForallCore() | ForallCoreDual():
            raise FormulaPurityError(f"strategic operator in a BT+AC model: {render(f)}")
        case _:
            raise TypeError(f"not a formula: {f!r}")
    memo[key] = result
    return result


# ── Validation ────────────────────────────────────────────────────────


def validate_btac(model: BTACModel) -> CheckReport:
    """Frame conditions, choice partitions, independence of agents and valuation indices."""
    frame_report = check_frame(model.frame)
    if not frame_report.holds:
        return CheckReport.conjoin("btac", [frame_report])
    checks = [frame_report, _check_partitions(model)]
    if checks[-1].holds:
        checks.append(_check_independence(model))
    checks.append(_check_valuation(model))
    report = CheckReport.conjoin("btac", checks)
    logger.debug(f"validate_btac | holds={report.holds}")
    return report


def _check_partitions(model: BTACModel) -> CheckReport:
    for (agent, m), cells in model.choice:
        if agent not in model.agents:
            return CheckReport.fail("partition", {"property": "unknown_agent", "agent": agent})
        if m not in model.frame.moments:
            return CheckReport.fail("partition", {"property": "unknown_moment", "moment": m})
        h_m = set(model.through(m))
        seen: set[str] = set()
        for cell in cells:
            if not cell:
                return CheckReport.fail("partition", {"property": "empty_cell", "agent": agent, "moment": m})
            stray = sorted(cell - h_m)
            if stray:
                return CheckReport.fail(
                    "partition", {"property": "not_in_H_m", "agent": agent, "moment": m, "histories": stray}
                )
            overlap = sorted(cell & seen)
            if overlap:
                return CheckReport.fail(
                    "partition", {"property": "overlap", "agent": agent, "moment": m, "histories": overlap}
                )
            seen |= cell
        if seen != h_m:
            return CheckReport.fail(
                "partition",
                {"property": "cover", "agent": agent, "moment": m, "uncovered": sorted(h_m - seen)},
            )
    return CheckReport.ok("partition")


def _check_independence(model: BTACModel) -> CheckReport:
    for m in model.frame.moments:
        for a, b in combinations(model.agents, 2):
            for x in model.cells(a, m):
                for y in model.cells(b, m):
                    if not x & y:
                        witness = {"moment": m, "agents": [a, b], "X": sorted(x), "Y": sorted(y)}
                        return CheckReport.fail("independence", witness)
    return CheckReport.ok("independence")


def _check_valuation(model: BTACModel) -> CheckReport:
    for atom, indices in model.valuation:
        for idx in sorted(indices, key=lambda i: (i.moment, i.history)):
            if idx.moment not in model.frame.moments or idx.history not in model.through(idx.moment):
                return CheckReport.fail("valuation", {"atom": atom, "index": [idx.moment, idx.history]})
    return CheckReport.ok("valuation")
