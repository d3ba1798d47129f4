"""stitkit Morphisms — bounded core morphisms between neighbourhood frames.

Includes the two-frame fixture showing that partition cores are not modally definable,
and a bounded test of modal equivalence along a morphism.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Mapping

from stitkit.models import CheckReport, FrameValidationError, PreconditionError, UnknownSymbolError
from stitkit.nbhd import NbhdFrame, NbhdModel, Subset, core, members, member
from stitkit.syntax import TOP, Ability, Atom, Box, Formula, Not, Or, render

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CoreMorphism:
    """A total map from the source states to the target states, stored by state index."""

    source: NbhdFrame
    target: NbhdFrame
    mapping: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "mapping", tuple(self.mapping))
        if len(self.mapping) != len(self.source.states):
            raise FrameValidationError("morphism", "map must be defined on every source state")
        if any(not 0 <= v < len(self.target.states) for v in self.mapping):
            raise FrameValidationError("morphism", "map sends a state outside the target")

    @classmethod
    def from_names(cls, source: NbhdFrame, target: NbhdFrame, mapping: Mapping[str, str]) -> CoreMorphism:
        unknown = sorted(set(mapping) - set(source.states))
        if unknown:
            raise UnknownSymbolError(f"map names unknown source states {unknown}")
        missing = [w for w in source.states if w not in mapping]
        if missing:
            raise FrameValidationError("morphism", f"map is not total: missing {missing}")
        return cls(source, target, tuple(target.states.index(mapping[w]) for w in source.states))

    def __call__(self, w: int) -> int:
        return self.mapping[w]

    def image(self, x: Subset) -> Subset:
        """f[X] as a target subset."""
        mask = 0
        for w in members(x):
            mask |= 1 << self.mapping[w]
        return mask

    def preimage(self, y: Subset) -> Subset:
        mask = 0
        for w, v in enumerate(self.mapping):
            if y >> v & 1:
                mask |= 1 << w
        return mask

    def named(self) -> dict[str, str]:
        src, tgt = self.source.states.names, self.target.states.names
        return {src[w]: tgt[v] for w, v in enumerate(self.mapping)}


def identity(frame: NbhdFrame) -> CoreMorphism:
    return CoreMorphism(frame, frame, tuple(range(len(frame.states))))


def compose(first: CoreMorphism, second: CoreMorphism) -> CoreMorphism:
    """second ∘ first.

    Raises:
        PreconditionError: if first's target is not second's source.
    """
    if first.target != second.source:
        raise PreconditionError("compose: target of the first map is not the source of the second")
    return CoreMorphism(first.source, second.target, tuple(second(v) for v in first.mapping))


# ── Conditions ────────────────────────────────────────────────────────


def is_bounded_core_morphism(m: CoreMorphism) -> CheckReport:
    """Forth: each source core cell maps onto a target core cell. Back: each target core cell is such an image."""
    src, tgt = m.source, m.target
    if set(src.agents) != set(tgt.agents):
        witness = {"property": "agents", "source": list(src.agents), "target": list(tgt.agents)}
        return CheckReport.fail("bounded_core_morphism", witness)
    names = src.states.names
    for agent in src.agents:
        for w in range(len(names)):
            source_cells = core(src, agent, w)
            target_cells = core(tgt, agent, m(w))
            images = {m.image(x) for x in source_cells}
            for x in source_cells:
                if m.image(x) not in target_cells:
                    witness = {
                        "property": "forth",
                        "agent": agent,
                        "state": names[w],
                        "X": src.states.names_of(x),
                        "image": tgt.states.names_of(m.image(x)),
                    }
                    return CheckReport.fail("bounded_core_morphism", witness)
            for y in target_cells:
                if y not in images:
                    witness = {
                        "property": "back",
                        "agent": agent,
                        "state": names[w],
                        "Y": tgt.states.names_of(y),
                    }
                    return CheckReport.fail("bounded_core_morphism", witness)
    return CheckReport.ok("bounded_core_morphism")


def is_surjective(m: CoreMorphism) -> bool:
    return set(m.mapping) == set(range(len(m.target.states)))


def surjectivity_report(m: CoreMorphism) -> CheckReport:
    if is_surjective(m):
        return CheckReport.ok("surjective")
    missed = [v for v in m.target.states if m.target.states.index(v) not in set(m.mapping)]
    return CheckReport.fail("surjective", {"missed": missed})


# ── Modal equivalence ─────────────────────────────────────────────────


def pushforward(m: CoreMorphism, model: NbhdModel) -> NbhdModel:
    """The target model with V₂(p) = f[V₁(p)].

    Raises:
        PreconditionError: if some V₁(p) is not a union of fibers of f.
    """
    valuation = {}
    for atom, bits in model.valuation:
        if m.preimage(m.image(bits)) != bits:
            raise PreconditionError(f"V({atom}) is not a union of fibers of the map")
        valuation[atom] = m.image(bits)
    return NbhdModel(m.target, tuple(valuation.items()))


def check_modal_equivalence(m: CoreMorphism, source_model: NbhdModel, depth: int) -> CheckReport:
    """Every formula over atoms, ~, |, box and [i] up to the modal depth has the same value at w and f(w).

    Formulas are enumerated up to their pair of extensions in source and target: two
    formulas with the same pair generate the same pairs under every connective.

    Raises:
        PreconditionError: if m is not a surjective bounded core morphism, the model is not
            over m's source, or the valuation is not fiber-compatible.
    """
    if source_model.frame != m.source:
        raise PreconditionError("the source model is not over the morphism's source frame")
    bounded = is_bounded_core_morphism(m)
    if not bounded.holds:
        raise PreconditionError(f"not a bounded core morphism: {bounded.witness}")
    if not is_surjective(m):
        raise PreconditionError("the morphism is not surjective")
    target_model = pushforward(m, source_model)
    src, tgt = m.source, m.target

    pairs: dict[tuple[Subset, Subset], Formula] = {(src.full, tgt.full): TOP}
    for atom, bits in source_model.valuation:
        pairs.setdefault((bits, target_model.value(atom)), Atom(atom))
    pairs = _boolean_closure(pairs, src.full, tgt.full)
    for level in range(depth):
        modal = {}
        for (x, y), f in pairs.items():
            modal.setdefault((_box(x, src.full), _box(y, tgt.full)), Box(f))
            for agent in src.agents:
                key = (_ability(src, agent, x), _ability(tgt, agent, y))
                modal.setdefault(key, Ability(agent, f))
        pairs = _boolean_closure({**modal, **pairs}, src.full, tgt.full)
        logger.debug(f"check_modal_equivalence | depth={level + 1} | classes={len(pairs)}")

    names = src.states.names
    for (x, y), f in sorted(pairs.items(), key=lambda item: len(render(item[1]))):
        for w in range(len(names)):
            at_source = bool(x >> w & 1)
            at_target = bool(y >> m(w) & 1)
            if at_source != at_target:
                witness = {
                    "formula": render(f),
                    "state": names[w],
                    "image": tgt.states.names[m(w)],
                    "source_value": at_source,
                    "target_value": at_target,
                }
                return CheckReport.fail("modal_equivalence", witness, depth=depth)
    return CheckReport.ok("modal_equivalence", depth=depth, classes=len(pairs))


def _box(x: Subset, full: Subset) -> Subset:
    return full if x == full else 0


def _ability(frame: NbhdFrame, agent: str, x: Subset) -> Subset:
    mask = 0
    for w in range(len(frame.states)):
        if member(frame, agent, w, x):
            mask |= 1 << w
    return mask


def _boolean_closure(pairs: dict, src_full: Subset, tgt_full: Subset) -> dict:
    closed = dict(pairs)
    frontier = list(closed.items())
    while frontier:
        added = []
        for (x, y), f in frontier:
            key = (src_full & ~x, tgt_full & ~y)
            if key not in closed:
                closed[key] = Not(f)
                added.append((key, closed[key]))
            for (x2, y2), g in list(closed.items()):
                key = (x | x2, y | y2)
                if key not in closed:
                    closed[key] = Or(f, g)
                    added.append((key, closed[key]))
        frontier = added
    return closed


# ── Fixture ───────────────────────────────────────────────────────────


def partition_fixture() -> tuple[NbhdFrame, NbhdFrame, CoreMorphism]:
    """F₁ has partition cores, F₂ does not, and f: F₁ → F₂ is a surjective bounded core morphism.

    Both frames vary their cores between states, so neither satisfies (nec).
    """
    f1 = NbhdFrame.from_names(
        ["w1", "w2", "w3", "w4"],
        ["a"],
        {
            "a": {
                "w1": [["w1", "w2"], ["w3", "w4"]],
                "w2": [["w1", "w2", "w3", "w4"]],
                "w3": [["w1", "w2", "w3", "w4"]],
                "w4": [["w1", "w2", "w3", "w4"]],
            }
        },
    )
    f2 = NbhdFrame.from_names(
        ["w1", "w2", "w3"],
        ["a"],
        {
            "a": {
                "w1": [["w1", "w2"], ["w2", "w3"]],
                "w2": [["w1", "w2", "w3"]],
                "w3": [["w1", "w2", "w3"]],
            }
        },
    )
    f = CoreMorphism.from_names(f1, f2, {"w1": "w1", "w2": "w2", "w3": "w3", "w4": "w2"})
    return f1, f2, f
