"""stitkit Logic — axiom schemas, soundness fuzzing, falsifying valuations and bounded validity search."""

from __future__ import annotations

import logging
import random
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import permutations, product
from typing import Callable, NamedTuple, Optional, Sequence

from stitkit.generators import agent_names, random_class_c_frame, random_formula, random_nbhd_model
from stitkit.mc import extension
from stitkit.model_files import dump_nbhd_model
from stitkit.models import (
    AxiomTag,
    CheckReport,
    FormulaPurityError,
    FrameStyle,
    FuzzConfig,
    PreconditionError,
    SearchBounds,
    SearchResult,
    SearchTimeout,
    Verdict,
)
from stitkit.nbhd import (
    NbhdFrame,
    NbhdModel,
    StateSet,
    Subset,
    canonical,
    check_ind,
    check_un,
    core,
    members,
    nec_violation,
)
from stitkit.syntax import (
    BOTTOM,
    TOP,
    Ability,
    AgentId,
    And,
    Atom,
    Box,
    Dia,
    ForallCore,
    Formula,
    Iff,
    Implies,
    Not,
    Or,
    agents_of,
    conjunction,
    is_osstit_pure,
    normalize,
    render,
    vars_of,
)

logger = logging.getLogger(__name__)


# ── Schemas ───────────────────────────────────────────────────────────


@dataclass(frozen=True)
class AxiomSchema:
    """An axiom schema with formula and agent slots; Ind takes one formula per agent."""

    tag: AxiomTag
    formula_slots: int
    agent_slots: int
    build: Callable[[list[Formula], list[AgentId]], Formula] = field(repr=False, compare=False)
    variadic: bool = False


def _ind(fs: list[Formula], agents: list[AgentId]) -> Formula:
    abilities = conjunction(Ability(a, f) for a, f in zip(agents, fs))
    return Implies(abilities, Dia(conjunction(fs)))


def _forall(agents, f):
    return ForallCore(agents[0], f)


SCHEMAS: dict[AxiomTag, AxiomSchema] = {
    schema.tag: schema
    for schema in [
        AxiomSchema(AxiomTag.INCL, 1, 1, lambda f, a: Implies(Box(f[0]), Ability(a[0], f[0]))),
        AxiomSchema(
            AxiomTag.M,
            2,
            1,
            lambda f, a: Implies(
                Ability(a[0], And(f[0], f[1])), And(Ability(a[0], f[0]), Ability(a[0], f[1]))
            ),
        ),
        AxiomSchema(AxiomTag.N, 0, 1, lambda f, a: Ability(a[0], TOP)),
        AxiomSchema(AxiomTag.D, 0, 1, lambda f, a: Not(Ability(a[0], BOTTOM))),
        AxiomSchema(AxiomTag.POS, 1, 1, lambda f, a: Iff(Box(f[0]), ForallCore(a[0], f[0]))),
        AxiomSchema(
            AxiomTag.NEC_A, 1, 1, lambda f, a: Implies(Ability(a[0], f[0]), Box(Ability(a[0], f[0])))
        ),
        AxiomSchema(AxiomTag.IND, 1, 1, _ind, variadic=True),
        AxiomSchema(
            AxiomTag.K_BOX,
            2,
            0,
            lambda f, a: Implies(Box(Implies(f[0], f[1])), Implies(Box(f[0]), Box(f[1]))),
        ),
        AxiomSchema(AxiomTag.T_BOX, 1, 0, lambda f, a: Implies(Box(f[0]), f[0])),
        AxiomSchema(AxiomTag.FOUR_BOX, 1, 0, lambda f, a: Implies(Box(f[0]), Box(Box(f[0])))),
        AxiomSchema(
            AxiomTag.FIVE_BOX, 1, 0, lambda f, a: Implies(Not(Box(f[0])), Box(Not(Box(f[0]))))
        ),
        AxiomSchema(
            AxiomTag.K_EXISTS,
            2,
            1,
            lambda f, a: Implies(
                _forall(a, Implies(f[0], f[1])), Implies(_forall(a, f[0]), _forall(a, f[1]))
            ),
        ),
        AxiomSchema(AxiomTag.T_EXISTS, 1, 1, lambda f, a: Implies(_forall(a, f[0]), f[0])),
        AxiomSchema(
            AxiomTag.FOUR_EXISTS, 1, 1, lambda f, a: Implies(_forall(a, f[0]), _forall(a, _forall(a, f[0])))
        ),
        AxiomSchema(
            AxiomTag.B_EXISTS, 1, 1, lambda f, a: Implies(f[0], _forall(a, Not(_forall(a, Not(f[0])))))
        ),
        AxiomSchema(
            AxiomTag.FIVE_EXISTS,
            1,
            1,
            lambda f, a: Implies(Not(_forall(a, f[0])), _forall(a, Not(_forall(a, f[0])))),
        ),
    ]
}


def instantiate(
    schema: AxiomSchema | AxiomTag | str, formulas: Sequence[Formula], agents: Sequence[AgentId]
) -> Formula:
    """Fill the slots of a schema.

    Ind accepts any nonempty list of distinct agents with one formula each.

    Raises:
        PreconditionError: on an arity mismatch.
    """
    if not isinstance(schema, AxiomSchema):
        schema = SCHEMAS[AxiomTag(schema)]
    formulas, agents = list(formulas), list(agents)
    if schema.variadic:
        if not agents or len(formulas) != len(agents):
            raise PreconditionError(f"{schema.tag.value}: needs one formula per agent")
        if len(set(agents)) != len(agents):
            raise PreconditionError(f"{schema.tag.value}: agents must be distinct")
    elif len(formulas) != schema.formula_slots or len(agents) != schema.agent_slots:
        raise PreconditionError(
            f"{schema.tag.value}: expects {schema.formula_slots} formulas and {schema.agent_slots} "
            f"agents, got {len(formulas)} and {len(agents)}"
        )
    return schema.build(formulas, agents)


def random_instance(
    rng: random.Random, schema: AxiomSchema, atoms: Sequence[str], agents: Sequence[AgentId], depth: int
) -> Formula:
    """An instance over random subformulas; Ind gets a random nonempty set of distinct agents."""
    if schema.variadic:
        chosen = rng.sample(list(agents), rng.randint(1, len(agents)))
    else:
        chosen = [rng.choice(list(agents)) for _ in range(schema.agent_slots)]
    slots = len(chosen) if schema.variadic else schema.formula_slots
    formulas = [random_formula(rng, atoms, agents, depth) for _ in range(slots)]
    return instantiate(schema, formulas, chosen)


# ── Frame generation & soundness ──────────────────────────────────────


def generate_frame(
    states: int, agents: int | Sequence[AgentId], seed: int = 0, style: FrameStyle | str = FrameStyle.GRID
) -> NbhdFrame:
    """A class C frame with the given number of states.

    Raises:
        PreconditionError: on a nonpositive state or agent count.
    """
    names = agent_names(agents) if isinstance(agents, int) else list(agents)
    return random_class_c_frame(random.Random(seed), states, names, style)


@dataclass
class FuzzItem:
    """One random model and the schema instances checked on it."""

    index: int
    instances: int = 0
    witness: Optional[dict] = None


def soundness_fuzz(config: FuzzConfig | None = None) -> CheckReport:
    """Check schema instances on random models; any witness is a soundness bug.

    Model k is drawn from a generator seeded by (seed, k), so the report depends only on the
    configuration, not on how items are scheduled across workers.
    """
    config = config or FuzzConfig()
    bounds = config.bounds
    schemas = [SCHEMAS[AxiomTag(tag)] for tag in config.schemas]
    atom_pool = ["p", "q", "r", "s", "t"][: max(1, bounds.atom_count)]
    if bounds.atom_count > len(atom_pool):
        atom_pool += [f"p{k}" for k in range(bounds.atom_count - len(atom_pool))]

    def run_item(item: FuzzItem) -> FuzzItem:
        rng = random.Random(f"{config.seed}:{item.index}")
        n_states = rng.randint(1, bounds.max_states)
        agents = agent_names(rng.randint(1, bounds.agent_count))
        atoms = atom_pool[: rng.randint(1, len(atom_pool))]
        model = random_nbhd_model(rng, n_states, agents, atoms, class_c=config.class_c)
        full = model.frame.full
        for schema in schemas:
            for _ in range(config.formulas_per_schema):
                instance = random_instance(rng, schema, atoms, agents, config.depth)
                item.instances += 1
                ext = extension(model, instance)
                if ext != full:
                    state = model.states.names[members(full & ~ext)[0]]
                    item.witness = {
                        "model_index": item.index,
                        "schema": schema.tag.value,
                        "instance": render(instance),
                        "state": state,
                        "model": dump_nbhd_model(model),
                    }
                    return item
        return item

    items = [FuzzItem(k) for k in range(config.frames)]
    with ThreadPoolExecutor(max_workers=config.workers) as executor:
        done = list(executor.map(run_item, items))

    instances = sum(item.instances for item in done)
    for item in done:
        if item.witness is not None:
            logger.info(f"soundness_fuzz | fails | schema={item.witness['schema']}")
            return CheckReport.fail("soundness_fuzz", item.witness, models=config.frames, instances=instances)
    logger.info(f"soundness_fuzz | holds | models={config.frames} | instances={instances}")
    return CheckReport.ok("soundness_fuzz", models=config.frames, instances=instances)


# ── Falsifying valuations ─────────────────────────────────────────────


class Falsification(NamedTuple):
    """A valuation and an axiom instance that is false at ``state`` under it."""

    valuation: dict[str, Subset]
    instance: Formula
    state: str

    def model(self, frame: NbhdFrame) -> NbhdModel:
        return NbhdModel(frame, tuple(self.valuation.items()))


def falsify_ind(frame: NbhdFrame) -> Falsification:
    """V(p) = X, V(q) = Y for disjoint core cells of two agents; the Ind instance fails at the state.

    Raises:
        PreconditionError: if the frame satisfies (ind).
    """
    report = check_ind(frame)
    if report.holds:
        raise PreconditionError("falsify_ind needs a frame violating (ind)")
    w = report.witness
    a, b = w["agents"]
    valuation = {"p": frame.states.subset(w["X"]), "q": frame.states.subset(w["Y"])}
    instance = instantiate(AxiomTag.IND, [Atom("p"), Atom("q")], [a, b])
    return Falsification(valuation, instance, w["state"])


def falsify_nec(frame: NbhdFrame) -> Falsification:
    """V(p) = X with X ∈ N_i(w) ∖ N_i(w'); the NecA instance fails at w.

    Raises:
        PreconditionError: if the frame satisfies (nec).
    """
    found = nec_violation(frame)
    if found is None:
        raise PreconditionError("falsify_nec needs a frame violating (nec)")
    agent, w, _, x = found
    instance = instantiate(AxiomTag.NEC_A, [Atom("p")], [agent])
    return Falsification({"p": x}, instance, frame.states.names[w])


def falsify_un(frame: NbhdFrame) -> Falsification:
    """V(p) = the union of the agent's core cells at w; the Pos instance fails at w.

    Raises:
        PreconditionError: if the frame satisfies (un).
    """
    report = check_un(frame)
    if report.holds:
        raise PreconditionError("falsify_un needs a frame violating (un)")
    agent, state = report.witness["agent"], report.witness["state"]
    covered = 0
    for cell in core(frame, agent, state):
        covered |= cell
    instance = instantiate(AxiomTag.POS, [Atom("p")], [agent])
    return Falsification({"p": covered}, instance, state)


# ── Bounded validity search ───────────────────────────────────────────


@lru_cache(maxsize=None)
def covering_antichains(n: int) -> tuple[tuple[Subset, ...], ...]:
    """Every antichain of nonempty subsets of an n-element set whose union is the whole set.

    Ordered by size, then by the member indices of the cells.
    """
    full = (1 << n) - 1
    subsets = list(canonical(range(1, full + 1)))
    found: list[tuple[Subset, ...]] = []

    def extend(start: int, chosen: list[Subset], covered: Subset) -> None:
        if chosen and covered == full:
            found.append(tuple(chosen))
        for k in range(start, len(subsets)):
            s = subsets[k]
            if any(s & c == s or s & c == c for c in chosen):
                continue
            chosen.append(s)
            extend(k + 1, chosen, covered | s)
            chosen.pop()

    extend(0, [], 0)
    found = [canonical(cells) for cells in found]
    return tuple(sorted(set(found), key=lambda cells: (len(cells), [members(c) for c in cells])))


def _permute(mask: Subset, perm: Sequence[int]) -> Subset:
    out = 0
    for w in members(mask):
        out |= 1 << perm[w]
    return out


@lru_cache(maxsize=None)
def _canonical_first_agent(n: int) -> tuple[tuple[Subset, ...], ...]:
    """Covers that are least among their images under state permutations."""
    perms = list(permutations(range(n)))
    keep = []
    for cells in covering_antichains(n):
        key = [members(c) for c in cells]
        if all(
            key <= [members(c) for c in canonical(_permute(c, p) for c in cells)] for p in perms
        ):
            keep.append(cells)
    return tuple(keep)


def _independent(x: Sequence[Subset], y: Sequence[Subset]) -> bool:
    return all(a & b for a in x for b in y)


def search_agents(f: Formula, agent_count: int) -> list[AgentId]:
    """The formula's agents, padded with fresh names up to ``agent_count``."""
    agents = sorted(agents_of(f))
    for name in agent_names(agent_count + len(agents)):
        if len(agents) >= max(agent_count, 1):
            break
        if name not in agents:
            agents.append(name)
    return agents


def validity_search(f: Formula, bounds: SearchBounds | None = None) -> SearchResult:
    """Look for a class C countermodel with at most ``bounds.max_states`` states.

    Frames are enumerated by size, then per agent over uniform covering antichains
    (the first agent's up to a permutation of states) satisfying (ind) pairwise, and
    every valuation of the formula's atoms is tried. The first countermodel found is
    one of minimal size.

    Raises:
        FormulaPurityError: on a classical stit operator.
        PreconditionError: if the formula has more atoms than the bound allows.
        SearchTimeout: when ``bounds.max_seconds`` is exceeded.
    """
    from config import settings

    bounds = bounds or SearchBounds(
        max_states=settings.max_states,
        agent_count=settings.agent_count,
        atom_count=settings.atom_count,
        max_seconds=settings.max_seconds,
    )
    if not is_osstit_pure(f):
        raise FormulaPurityError(f"validity_search expects a strategic formula: {render(f)}")
    atoms = sorted(vars_of(f))
    if len(atoms) > bounds.atom_count:
        raise PreconditionError(f"formula has {len(atoms)} atoms, bound is {bounds.atom_count}")
    agents = search_agents(f, bounds.agent_count)

    started = time.monotonic()
    explored = 0

    def elapsed_ms() -> int:
        return int((time.monotonic() - started) * 1000)

    for n in range(1, bounds.max_states + 1):
        states = StateSet(tuple(f"w{k + 1}" for k in range(n)))
        full = states.full
        for cores in _independent_cores(n, len(agents)):
            gens = tuple(tuple(cells for _ in range(n)) for cells in cores)
            frame = NbhdFrame(states, tuple(agents), gens)
            for values in product(range(full + 1), repeat=len(atoms)):
                explored += 1
                if explored % 256 == 0 and time.monotonic() - started > bounds.max_seconds:
                    logger.warning(f"validity_search | timeout | explored={explored} | size={n}")
                    raise SearchTimeout(explored, elapsed_ms())
                model = NbhdModel(frame, tuple(zip(atoms, values)))
                ext = extension(model, f)
                if ext != full:
                    state = states.names[members(full & ~ext)[0]]
                    logger.info(f"validity_search | countermodel | states={n} | explored={explored}")
                    witness = {"model": dump_nbhd_model(model), "state": state}
                    return SearchResult(
                        verdict=Verdict.COUNTERMODEL,
                        witness=witness,
                        states_explored=explored,
                        elapsed_ms=elapsed_ms(),
                    )
    logger.info(f"validity_search | valid_up_to_bound | max_states={bounds.max_states} | explored={explored}")
    return SearchResult(verdict=Verdict.VALID_UP_TO_BOUND, states_explored=explored, elapsed_ms=elapsed_ms())


def _independent_cores(n: int, agent_count: int):
    """Tuples of per-agent covering antichains, pairwise independent."""
    first_choices = _canonical_first_agent(n)
    others = covering_antichains(n)

    def extend(chosen: list[tuple[Subset, ...]]):
        if len(chosen) == agent_count:
            yield tuple(chosen)
            return
        pool = first_choices if not chosen else others
        for cells in pool:
            if all(_independent(cells, prior) for prior in chosen):
                chosen.append(cells)
                yield from extend(chosen)
                chosen.pop()

    yield from extend([])


# ── Rules ─────────────────────────────────────────────────────────────


def _valid_in(model: NbhdModel, f: Formula) -> bool:
    return extension(model, f) == model.frame.full


def derivability_smoke(
    schemas: Sequence[AxiomTag | str] | None = None, models: int = 40, seed: int = 0, depth: int = 2
) -> CheckReport:
    """Semantic counterparts of MP and RE on a sample of class C models.

    MP: φ and φ → ψ valid in a model make ψ valid there. RE: φ ≡ ψ valid in a model makes
    [i]φ ≡ [i]ψ, [E:i]φ ≡ [E:i]ψ and box φ ≡ box ψ valid there. Premises that fail leave
    nothing to check.
    """
    tags = [AxiomTag(t) for t in schemas] if schemas is not None else list(AxiomTag)
    rng = random.Random(f"smoke:{seed}")
    atoms = ["p", "q"]
    mp_applied = re_applied = 0
    for k in range(models):
        agents = agent_names(rng.randint(1, 2))
        model = random_nbhd_model(rng, rng.randint(1, 4), agents, atoms)
        instances = [random_instance(rng, SCHEMAS[tag], atoms, agents, depth) for tag in tags]
        for phi in instances:
            for psi in [rng.choice(instances), random_formula(rng, atoms, agents, depth)]:
                bridge = Implies(phi, psi)
                if _valid_in(model, phi) and _valid_in(model, bridge):
                    mp_applied += 1
                    if not _valid_in(model, psi):
                        witness = {"model_index": k, "premise": render(phi), "conclusion": render(psi)}
                        return CheckReport.conjoin("derivability", [CheckReport.fail("MP", witness)])

        phi = random_formula(rng, atoms, agents, depth)
        candidates = [normalize(phi), Not(Not(phi)), Or(phi, phi), And(phi, TOP)]
        candidates.append(random_formula(rng, atoms, agents, depth))
        for psi in candidates:
            if not _valid_in(model, Iff(phi, psi)):
                continue
            re_applied += 1
            agent = rng.choice(agents)
            for wrap in (lambda g: Ability(agent, g), lambda g: ForallCore(agent, g), Box):
                if not _valid_in(model, Iff(wrap(phi), wrap(psi))):
                    witness = {"model_index": k, "left": render(wrap(phi)), "right": render(wrap(psi))}
                    return CheckReport.conjoin("derivability", [CheckReport.fail("RE", witness)])

    checks = [CheckReport.ok("MP", applied=mp_applied), CheckReport.ok("RE", applied=re_applied)]
    logger.info(f"derivability_smoke | holds | mp={mp_applied} | re={re_applied}")
    return CheckReport.conjoin("derivability", checks)
