"""Tests for the random generators of formulas, frames and models."""

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from stitkit.btac import check_frame, validate_btac
from stitkit.generators import (
    agent_names,
    frames_violating,
    grid_frame,
    random_btac_model,
    random_class_c_frame,
    random_formula,
    random_frame,
    random_nbhd_model,
    random_partition,
    random_tree,
    random_valuation,
    state_names,
)
from stitkit.models import FormulaPurityError, FrameStyle, PreconditionError
from stitkit.nbhd import check_basic, check_ind, check_nec, check_un, is_class_C, is_class_P
from stitkit.syntax import agents_of, is_cstit_pure, is_osstit_pure, modal_depth, translate_tr, vars_of

seeds = st.integers(min_value=0, max_value=100_000)


class TestNames:
    def test_agent_names(self):
        assert agent_names(3) == ["a", "b", "c"]
        assert agent_names(28)[26:] == ["a1", "b1"]

    def test_state_names(self):
        assert state_names(2) == ["w1", "w2"]


class TestRandomFormula:
    @given(seeds, st.integers(min_value=0, max_value=3))
    def test_respects_depth_and_symbols(self, seed, depth):
        f = random_formula(random.Random(seed), ["p", "q"], ["a", "b"], depth)
        assert modal_depth(f) <= depth
        assert vars_of(f) <= {"p", "q"}
        assert agents_of(f) <= {"a", "b"}
        assert is_osstit_pure(f)

    @given(seeds)
    def test_without_forall_core_is_in_the_domain_of_tr(self, seed):
        f = random_formula(random.Random(seed), ["p"], ["a"], 3, allow_forall_core=False)
        assert is_cstit_pure(translate_tr(f))

    @given(seeds)
    def test_cstit_language(self, seed):
        f = random_formula(random.Random(seed), ["p"], ["a"], 2, language="cstit")
        assert is_cstit_pure(f)

    def test_negative_depth(self):
        with pytest.raises(PreconditionError):
            random_formula(random.Random(0), ["p"], ["a"], -1)

    def test_reproducible(self):
        first = random_formula(random.Random(42), ["p", "q"], ["a"], 3)
        assert random_formula(random.Random(42), ["p", "q"], ["a"], 3) == first

    def test_cstit_formula_is_not_translatable(self):
        rng = random.Random(1)
        found = None
        for _ in range(200):
            f = random_formula(rng, ["p"], ["a"], 2, language="cstit")
            if agents_of(f):
                found = f
                break
        assert found is not None
        with pytest.raises(FormulaPurityError):
            translate_tr(found)


class TestFrames:
    def test_grid_frame(self):
        frame = grid_frame([2, 3])
        assert len(frame.states) == 6
        assert frame.agents == ("a", "b")
        assert len(frame.generators("a", 0)) == 2
        assert len(frame.generators("b", 0)) == 3
        assert is_class_P(frame).holds

    def test_grid_frame_shape_mismatch(self):
        with pytest.raises(PreconditionError):
            grid_frame([2, 2], ["a"])

    @given(seeds, st.integers(min_value=1, max_value=6), st.integers(min_value=1, max_value=3),
           st.sampled_from(list(FrameStyle)))
    def test_class_c_frames(self, seed, n, agents, style):
        frame = random_class_c_frame(random.Random(seed), n, agent_names(agents), style)
        assert len(frame.states) == n
        assert is_class_C(frame).holds

    @given(seeds, st.integers(min_value=1, max_value=6))
    def test_grid_style_partitions(self, seed, n):
        frame = random_class_c_frame(random.Random(seed), n, ["a", "b"], FrameStyle.GRID)
        assert is_class_P(frame).holds

    def test_no_states(self):
        with pytest.raises(PreconditionError):
            random_class_c_frame(random.Random(0), 0, ["a"])

    @given(seeds, st.integers(min_value=1, max_value=5))
    def test_arbitrary_frames_are_well_formed(self, seed, n):
        assert check_basic(random_frame(random.Random(seed), n, ["a", "b"])).holds

    @given(seeds, st.integers(min_value=1, max_value=6))
    def test_partition(self, seed, n):
        cells = random_partition(random.Random(seed), range(n))
        assert all(cells)
        assert sum(bin(c).count("1") for c in cells) == n
        combined = 0
        for c in cells:
            assert combined & c == 0
            combined |= c
        assert combined == (1 << n) - 1


class TestViolations:
    """Each generated frame breaks exactly the named condition."""

    @given(seeds, st.sampled_from(["ind", "nec", "un"]))
    def test_exactly_one_condition_fails(self, seed, kind):
        frame = frames_violating(kind, random.Random(seed))
        results = {"ind": check_ind(frame), "nec": check_nec(frame), "un": check_un(frame)}
        assert [name for name, report in results.items() if not report.holds] == [kind]

    def test_unknown_kind(self):
        with pytest.raises(PreconditionError):
            frames_violating("partition", random.Random(0))


class TestModels:
    @given(seeds)
    def test_nbhd_model(self, seed):
        model = random_nbhd_model(random.Random(seed), 4, ["a"], ["p", "q"])
        assert is_class_C(model.frame).holds
        assert {atom for atom, _ in model.valuation} == {"p", "q"}

    @given(seeds)
    def test_unrestricted_model(self, seed):
        model = random_nbhd_model(random.Random(seed), 3, ["a", "b"], ["p"], class_c=False)
        assert check_basic(model.frame).holds

    def test_valuation_fits_states(self):
        valuation = random_valuation(random.Random(5), 3, ["p", "q", "r"])
        assert all(0 <= bits < 8 for bits in valuation.values())

    @given(seeds)
    def test_trees_are_frames(self, seed):
        frame = random_tree(random.Random(seed), 7, 2)
        assert check_frame(frame).holds
        later = [b for _, b in frame.order]
        assert "m1" not in later

    @given(seeds)
    def test_btac_models_are_valid(self, seed):
        model = random_btac_model(random.Random(seed), 5, 3, ["a", "b", "c"], ["p"])
        assert validate_btac(model).holds
