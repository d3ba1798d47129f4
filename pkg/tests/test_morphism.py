"""Tests for bounded core morphisms and modal equivalence along them."""

import random
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st
from strategies import models

from stitkit import mc
from stitkit.generators import agent_names, random_frame
from stitkit.models import FrameValidationError, PreconditionError, UnknownSymbolError
from stitkit.morphism import (
    CoreMorphism,
    check_modal_equivalence,
    compose,
    identity,
    is_bounded_core_morphism,
    is_surjective,
    partition_fixture,
    pushforward,
    surjectivity_report,
)
from stitkit.nbhd import NbhdModel, check_partition_cores
from stitkit.syntax import Ability, AbilityDual, Atom, Box, Dia, Not, Or


def single_agent_formulas():
    """Formulas over p and q using box and [a] only."""
    atoms = st.sampled_from(["p", "q"]).map(Atom)

    def extend(inner):
        return st.one_of(
            st.tuples(st.sampled_from([Not, Box, Dia]), inner).map(lambda t: t[0](t[1])),
            st.tuples(inner, inner).map(lambda t: Or(*t)),
            st.tuples(st.sampled_from([Ability, AbilityDual]), inner).map(lambda t: t[0]("a", t[1])),
        )

    return st.recursive(atoms, extend, max_leaves=8)


def bounded_maps(source, target):
    """Every bounded core morphism from source to target."""
    for mapping in product(range(len(target.states)), repeat=len(source.states)):
        m = CoreMorphism(source, target, mapping)
        if is_bounded_core_morphism(m).holds:
            yield m


@pytest.fixture
def fiber_model(fixture_frames):
    """F1 with V(p) = {w2, w4}, a union of fibers of f."""
    f1, _, _ = fixture_frames
    return NbhdModel.from_names(f1, {"p": ["w2", "w4"]})


class TestConstruction:
    def test_fixture_map(self, fixture_frames):
        _, _, f = fixture_frames
        assert f.named() == {"w1": "w1", "w2": "w2", "w3": "w3", "w4": "w2"}
        assert f(3) == 1

    def test_image_and_preimage(self, fixture_frames):
        _, _, f = fixture_frames
        assert f.image(0b1000) == 0b010
        assert f.preimage(0b010) == 0b1010

    def test_unknown_source_state(self, fixture_frames):
        f1, f2, _ = fixture_frames
        with pytest.raises(UnknownSymbolError):
            CoreMorphism.from_names(f1, f2, {"w1": "w1", "w2": "w2", "w3": "w3", "w4": "w2", "w9": "w1"})

    def test_unknown_target_state(self, fixture_frames):
        f1, f2, _ = fixture_frames
        with pytest.raises(UnknownSymbolError):
            CoreMorphism.from_names(f1, f2, {"w1": "w1", "w2": "w2", "w3": "w3", "w4": "w4"})

    def test_partial_map(self, fixture_frames):
        f1, f2, _ = fixture_frames
        with pytest.raises(FrameValidationError):
            CoreMorphism.from_names(f1, f2, {"w1": "w1"})

    def test_identity_and_compose(self, fixture_frames):
        f1, _, f = fixture_frames
        assert compose(identity(f1), f) == f
        with pytest.raises(PreconditionError):
            compose(f, identity(f1))


class TestBoundedCoreMorphism:
    def test_fixture_is_bounded_and_surjective(self, fixture_frames):
        _, _, f = fixture_frames
        assert is_bounded_core_morphism(f).holds
        assert is_surjective(f)
        assert surjectivity_report(f).holds

    def test_partition_cores_are_not_preserved(self, fixture_frames):
        f1, f2, _ = fixture_frames
        assert check_partition_cores(f1).holds
        assert not check_partition_cores(f2).holds

    def test_reverse_map_fails_forth(self, fixture_frames):
        f1, f2, _ = fixture_frames
        back = CoreMorphism.from_names(f2, f1, {"w1": "w1", "w2": "w2", "w3": "w3"})
        report = is_bounded_core_morphism(back)
        assert report.witness == {
            "property": "forth",
            "agent": "a",
            "state": "w1",
            "X": ["w2", "w3"],
            "image": ["w2", "w3"],
        }
        assert surjectivity_report(back).witness == {"missed": ["w4"]}

    def test_agent_sets_must_match(self, two_cell_model, grid_model):
        m = CoreMorphism.from_names(two_cell_model.frame, grid_model.frame, {"w1": "w1", "w2": "w2"})
        assert is_bounded_core_morphism(m).witness["property"] == "agents"

    def test_identity_is_bounded(self, grid_model):
        assert is_bounded_core_morphism(identity(grid_model.frame)).holds


class TestModalEquivalence:
    def test_pushforward(self, fixture_frames, fiber_model):
        _, _, f = fixture_frames
        target = pushforward(f, fiber_model)
        assert target.states.names_of(target.value("p")) == ["w2"]

    def test_fixture_preserves_formulas(self, fixture_frames, fiber_model):
        _, _, f = fixture_frames
        report = check_modal_equivalence(f, fiber_model, 2)
        assert report.holds
        assert report.details["depth"] == 2

    @given(single_agent_formulas())
    def test_agrees_with_the_model_checker(self, formula):
        f1, _, f = partition_fixture()
        source = NbhdModel.from_names(f1, {"p": ["w2", "w4"], "q": ["w3"]})
        target = pushforward(f, source)
        for k, w in enumerate(source.states):
            image = target.states.names[f(k)]
            assert mc.eval(source, w, formula) == mc.eval(target, image, formula)

    def test_valuation_must_respect_fibers(self, fixture_frames, f1_model):
        _, _, f = fixture_frames
        with pytest.raises(PreconditionError):
            check_modal_equivalence(f, f1_model, 1)

    def test_model_must_be_over_the_source(self, fixture_frames, grid_model):
        _, _, f = fixture_frames
        with pytest.raises(PreconditionError):
            check_modal_equivalence(f, grid_model, 1)

    def test_requires_a_bounded_morphism(self, fixture_frames):
        f1, f2, _ = fixture_frames
        back = CoreMorphism.from_names(f2, f1, {"w1": "w1", "w2": "w2", "w3": "w3"})
        with pytest.raises(PreconditionError):
            check_modal_equivalence(back, NbhdModel(f2), 1)

    @given(models(max_states=3, agents=("a",)), st.integers(min_value=0, max_value=2))
    def test_identity_preserves_everything(self, model, depth):
        assert check_modal_equivalence(identity(model.frame), model, depth).holds


class TestRandomMorphisms:
    """Small random frames, every map between them."""

    def test_composition_stays_bounded(self):
        rng = random.Random("compose")
        composed = 0
        for _ in range(150):
            agents = agent_names(rng.randint(1, 2))
            n = rng.randint(2, 4)
            m = rng.randint(1, min(n, 3))
            k = rng.randint(1, m)
            a, b, c = (random_frame(rng, size, agents) for size in (n, m, k))
            firsts = list(bounded_maps(a, b))
            seconds = list(bounded_maps(b, c)) if firsts else []
            for f in firsts:
                for g in seconds:
                    assert is_bounded_core_morphism(compose(f, g)).holds, (f.named(), g.named())
                    composed += 1
        assert composed > 0

    def test_equivalence_under_fiber_valuations(self):
        rng = random.Random("equivalence")
        checked = 0
        for _ in range(200):
            agents = agent_names(rng.randint(1, 2))
            n = rng.randint(1, 4)
            source = random_frame(rng, n, agents)
            target = random_frame(rng, rng.randint(1, min(n, 3)), agents)
            for f in bounded_maps(source, target):
                if not is_surjective(f):
                    continue
                valuation = {atom: f.preimage(rng.randrange(target.states.full + 1)) for atom in ("p", "q")}
                model = NbhdModel(source, tuple(valuation.items()))
                report = check_modal_equivalence(f, model, 2)
                assert report.holds, report.witness
                checked += 1
        assert checked > 0
