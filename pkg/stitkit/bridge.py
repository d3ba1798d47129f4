"""stitkit Bridge — per-moment neighbourhood models of a BT+AC model, disjoint unions, and tr.

A BT+AC model seen at one moment m is a one-shot neighbourhood model over the indices m/h;
the union of these models over all moments carries the whole BT+AC model, and an ability
formula φ holds there exactly where its translation tr(φ) holds in the BT+AC model.
"""

from __future__ import annotations

import logging
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

from stitkit.btac import BTACModel, BTFrame, Index, eval_cstit, history_name
from stitkit.generators import agent_names, random_btac_model, random_formula
from stitkit.mc import eval as eval_osstit
from stitkit.models import (
    CheckReport,
    FrameValidationError,
    PreconditionError,
    UnknownSymbolError,
)
from stitkit.nbhd import NbhdFrame, NbhdModel, StateSet, core, is_class_P
from stitkit.syntax import Formula, render, translate_tr

logger = logging.getLogger(__name__)

ROOT_MOMENT = "root"


# ── Per-moment extraction ─────────────────────────────────────────────


def bt_to_osstit(model: BTACModel, m: str) -> NbhdModel:
    """The one-shot model at m: states are the indices m/h, generators the cells of Choice^m_i.

    The generators are the same at every state, so the result satisfies (nec).
    """
    model.frame.check_moment(m)
    through = model.through(m)
    states = StateSet(tuple(str(Index(m, h)) for h in through))
    position = {h: k for k, h in enumerate(through)}

    def mask(cell) -> int:
        bits = 0
        for h in cell:
            if h not in position:
                raise UnknownSymbolError(f"history {h} does not pass through {m}")
            bits |= 1 << position[h]
        return bits

    gens = []
    for agent in model.agents:
        row = tuple(mask(cell) for cell in model.cells(agent, m))
        gens.append(tuple(row for _ in through))
    valuation = {}
    for atom, indices in model.valuation:
        valuation[atom] = mask(idx.history for idx in indices if idx.moment == m)
    frame = NbhdFrame(states, model.agents, tuple(gens))
    return NbhdModel(frame, tuple(valuation.items()))


def component_state(n: int, state: str) -> str:
    """Name of a component state inside a disjoint union."""
    return f"c{n}:{state}"


def disjoint_union(models: Sequence[NbhdModel]) -> NbhdModel:
    """Union of models over a shared agent set; component n's state w becomes ``c{n}:w``.

    Generators of a component are kept as they are; their up-closure in the larger state
    set gives X ∈ N_i(w) iff X ∩ W_n ∈ N^n_i(w).

    Raises:
        PreconditionError: on an empty list.
        FrameValidationError: if the components disagree on the agent set.
    """
    if not models:
        raise PreconditionError("disjoint_union needs at least one model")
    agents = models[0].frame.agents
    for n, model in enumerate(models):
        if set(model.frame.agents) != set(agents):
            raise FrameValidationError(
                "agents", f"component {n} has agents {list(model.frame.agents)}, expected {list(agents)}"
            )

    names: list[str] = []
    gens: list[list[tuple[int, ...]]] = [[] for _ in agents]
    valuation: dict[str, int] = {}
    offset = 0
    for n, model in enumerate(models):
        frame = model.frame
        names.extend(component_state(n, w) for w in frame.states)
        for k, agent in enumerate(agents):
            for w in range(len(frame.states)):
                gens[k].append(tuple(g << offset for g in frame.generators(agent, w)))
        for atom, bits in model.valuation:
            valuation[atom] = valuation.get(atom, 0) | bits << offset
        offset += len(frame.states)

    frame = NbhdFrame(StateSet(tuple(names)), agents, tuple(tuple(row) for row in gens))
    logger.debug(f"disjoint_union | components={len(models)} | states={offset}")
    return NbhdModel(frame, tuple(valuation.items()))


# ── Translation equivalence ─────────────────────────────────────────────


def check_translation_equiv(model: BTACModel, f: Formula) -> CheckReport:
    """At every index m/h: the union of per-moment models satisfies f iff the BT+AC model satisfies tr(f).

    box is read per component (the moment's own indices). The union-wide reading of box is
    evaluated too; indices where it disagrees are listed in the details, not treated as failure.

    Raises:
        FormulaPurityError: if f is outside the domain of tr.
    """
    translated = translate_tr(f)
    moments = model.frame.moments
    components = [bt_to_osstit(model, m) for m in moments]
    union = disjoint_union(components)

    global_mismatches = []
    checked = 0
    for n, (m, component) in enumerate(zip(moments, components)):
        for h in model.through(m):
            idx = Index(m, h)
            state = str(idx)
            expected = eval_cstit(model, idx, translated)
            actual = eval_osstit(component, state, f)
            checked += 1
            if actual != expected:
                witness = {
                    "index": [m, h],
                    "formula": render(f),
                    "translation": render(translated),
                    "osstit_value": actual,
                    "cstit_value": expected,
                }
                logger.info(f"check_translation_equiv | fails | index={idx}")
                return CheckReport.fail("translation_equiv", witness, indices=checked)
            if eval_osstit(union, component_state(n, state), f) != expected:
                global_mismatches.append([m, h])

    if global_mismatches:
        logger.warning(
            f"check_translation_equiv | union-wide box disagrees | formula={render(f)} "
            f"| indices={len(global_mismatches)}"
        )
    return CheckReport.ok(
        "translation_equiv", indices=checked, union_wide_box_mismatches=global_mismatches
    )


@dataclass
class SweepItem:
    """One random BT+AC model with its formulas; the unit of work of a translation sweep."""

    index: int
    report: Optional[CheckReport] = None
    formulas: int = 0


def translation_sweep(
    models: int = 200,
    formulas_per_model: int = 20,
    seed: Optional[int] = None,
    depth: int = 3,
    max_moments: int = 4,
    max_children: int = 4,
    workers: Optional[int] = None,
) -> CheckReport:
    """check_translation_equiv over random BT+AC models and random strategic formulas.

    Each model is drawn from its own generator seeded by (seed, model index); results are
    merged in model order, so the report depends only on the arguments.
    """
    from config import settings

    seed = settings.seed if seed is None else seed
    workers = settings.workers if workers is None else workers
    atoms = ["p", "q"]

    def run_item(item: SweepItem) -> SweepItem:
        rng = random.Random(f"{seed}:{item.index}")
        agents = agent_names(rng.randint(1, 2))
        bt = random_btac_model(rng, max_moments, max_children, agents, atoms)
        for _ in range(formulas_per_model):
            f = random_formula(rng, atoms, agents, depth, allow_forall_core=False)
            report = check_translation_equiv(bt, f)
            item.formulas += 1
            if not report.holds:
                item.report = report
                break
        return item

    items = [SweepItem(k) for k in range(models)]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        done = list(executor.map(run_item, items))

    total = sum(item.formulas for item in done)
    for item in done:
        if item.report is not None:
            witness = {"model_index": item.index, **(item.report.witness or {})}
            return CheckReport.fail("translation_sweep", witness, models=models, formulas=total)
    logger.info(f"translation_sweep | holds | models={models} | formulas={total}")
    return CheckReport.ok("translation_sweep", models=models, formulas=total)


# ── Class P models as one-step BT+AC models ───────────────────────────


def leaf_moment(state: str) -> str:
    return f"m:{state}"


def p_state_index(state: str) -> Index:
    """The root index standing for a state of the source model of p_model_to_btac."""
    return Index(ROOT_MOMENT, history_name(leaf_moment(state)))


def p_model_to_btac(model: NbhdModel) -> BTACModel:
    """A root moment with one leaf per state; the agents' root choices are the core cells.

    Raises:
        PreconditionError: unless the frame is in class P.
    """
    frame = model.frame
    report = is_class_P(frame)
    if not report.holds:
        raise PreconditionError(f"p_model_to_btac needs a class P frame: {report.witness}")
    states = list(frame.states)
    leaves = [leaf_moment(w) for w in states]
    bt_frame = BTFrame((ROOT_MOMENT, *leaves), frozenset((ROOT_MOMENT, leaf) for leaf in leaves))

    def cell_histories(mask: int) -> list[str]:
        return [history_name(leaf_moment(w)) for w in frame.states.names_of(mask)]

    choice = {
        agent: {ROOT_MOMENT: [cell_histories(cell) for cell in core(frame, agent, 0)]}
        for agent in frame.agents
    }
    valuation = {}
    for atom, bits in model.valuation:
        valuation[atom] = [
            (ROOT_MOMENT, history_name(leaf_moment(w))) for w in frame.states.names_of(bits)
        ]
    return BTACModel.build(bt_frame, frame.agents, choice, valuation)
