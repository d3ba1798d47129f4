"""Tests for formula parsing, printing, normalization and the translation tr."""

import pytest
from hypothesis import given, settings
from strategies import ability_formulas, formulas

from stitkit.models import FormulaPurityError, FormulaSyntaxError
from stitkit.syntax import (
    BOTTOM,
    TOP,
    Ability,
    AbilityDual,
    And,
    Atom,
    Box,
    Dia,
    ForallCore,
    Iff,
    Implies,
    Not,
    Or,
    Stit,
    agents_of,
    is_cstit_pure,
    is_osstit_pure,
    modal_depth,
    normalize,
    parse,
    render,
    translate_tr,
    vars_of,
)

p, q, r = Atom("p"), Atom("q"), Atom("r")


class TestParse:
    """Concrete syntax to AST."""

    def test_ability(self):
        assert parse("[a] p") == Ability("a", p)

    def test_dia_stit_and_its_normal_form(self):
        f = parse("dia [stit:a] p")
        assert f == Dia(Stit("a", p))
        assert normalize(f) == Not(Box(Not(Stit("a", p))))

    def test_forall_core(self):
        assert parse("[E:a] (p -> q)") == ForallCore("a", Implies(p, q))

    def test_literals(self):
        assert parse("true") == TOP
        assert parse("false") == BOTTOM

    def test_ability_dual(self):
        assert parse("<a> p") == AbilityDual("a", p)

    def test_implication_is_right_associative(self):
        assert parse("p -> q -> r") == Implies(p, Implies(q, r))

    def test_iff_is_left_associative(self):
        assert parse("p <-> q <-> r") == Iff(Iff(p, q), r)

    def test_precedence(self):
        assert parse("p | q & r") == Or(p, And(q, r))
        assert parse("~p & q") == And(Not(p), q)
        assert parse("box p -> q") == Implies(Box(p), q)

    def test_agent_named_like_a_prefix(self):
        assert parse("[E] p") == Ability("E", p)
        assert parse("[stit] p") == Ability("stit", p)

    def test_whitespace_is_insignificant(self):
        assert parse("[a]p&[b]q->dia(p&q)") == parse("[a] p & [b] q -> dia (p & q)")


class TestParseErrors:
    """Syntax errors carry a byte offset and the expected tokens."""

    def test_unexpected_end(self):
        with pytest.raises(FormulaSyntaxError) as exc:
            parse("[a] ")
        assert exc.value.offset == 4
        assert "identifier" in exc.value.expected

    def test_unexpected_character(self):
        with pytest.raises(FormulaSyntaxError) as exc:
            parse("p @ q")
        assert exc.value.offset == 2

    def test_unbalanced_parenthesis(self):
        with pytest.raises(FormulaSyntaxError):
            parse("(p | q")

    def test_reserved_word_as_agent(self):
        with pytest.raises(FormulaSyntaxError) as exc:
            parse("[box] p")
        assert exc.value.offset == 1
        assert exc.value.expected == ["identifier"]

    def test_reserved_word_offset_inside_formula(self):
        with pytest.raises(FormulaSyntaxError) as exc:
            parse("p & [box] q")
        assert exc.value.offset == 5
        assert exc.value.expected == ["identifier"]

    @pytest.mark.parametrize(
        "text, offset",
        [("<true> p", 1), ("[E:dia] p", 3), ("<E:box> p", 3), ("[stit:false] p", 6), ("<stit:box> p", 6)],
    )
    def test_reserved_word_in_every_agent_position(self, text, offset):
        with pytest.raises(FormulaSyntaxError) as exc:
            parse(text)
        assert exc.value.offset == offset

    def test_offset_deep_in_formula(self):
        with pytest.raises(FormulaSyntaxError) as exc:
            parse("(p | q) & ~[b] (p | ä)")
        assert exc.value.offset == len("(p | q) & ~[b] (p | ".encode("utf-8"))

    def test_unexpected_character_lists_keywords(self):
        with pytest.raises(FormulaSyntaxError) as exc:
            parse("p & ä")
        assert exc.value.offset == 4
        assert {"box", "dia", "true", "false", "identifier", "("} <= set(exc.value.expected)

    def test_end_of_input_lists_keywords(self):
        with pytest.raises(FormulaSyntaxError) as exc:
            parse("p &")
        assert {"box", "dia", "true", "false", "identifier", "("} <= set(exc.value.expected)

    def test_agent_position_lists_no_keywords(self):
        with pytest.raises(FormulaSyntaxError) as exc:
            parse("[ä] p")
        assert "box" not in exc.value.expected

    def test_expected_tokens_are_sorted(self):
        with pytest.raises(FormulaSyntaxError) as exc:
            parse("p &")
        assert exc.value.expected == sorted(set(exc.value.expected))


class TestRender:
    """AST to concrete syntax with minimal parentheses."""

    def test_ability(self):
        assert render(Ability("a", p)) == "[a] p"

    def test_box(self):
        assert render(Box(p)) == "box p"

    def test_negated_disjunction(self):
        assert render(Not(Or(p, q))) == "~(p | q)"

    def test_literals(self):
        assert render(TOP) == "true"
        assert render(Not(Ability("a", BOTTOM))) == "~[a] false"

    def test_implication_chain(self):
        assert render(Implies(Implies(p, q), r)) == "(p -> q) -> r"
        assert render(Implies(p, Implies(q, r))) == "p -> q -> r"

    def test_str_uses_render(self):
        assert str(ForallCore("b", And(p, q))) == "[E:b] (p & q)"

    @given(formulas())
    @settings(max_examples=300)
    def test_round_trip(self, f):
        assert parse(render(f)) == f
        assert normalize(parse(render(f))) == normalize(f)


class TestNormalize:
    """Definitional expansion into the core connectives."""

    def test_implication(self):
        assert normalize(Implies(p, q)) == Or(Not(p), q)

    def test_conjunction(self):
        assert normalize(And(p, q)) == Not(Or(Not(p), Not(q)))

    def test_dual(self):
        assert normalize(AbilityDual("a", p)) == Not(Ability("a", Not(p)))

    @given(formulas())
    def test_idempotent(self, f):
        assert normalize(normalize(f)) == normalize(f)


class TestStructure:
    """vars_of, agents_of, modal_depth and the purity predicates."""

    def test_vars_of(self):
        assert vars_of(parse("[a] p | box q")) == {"p", "q"}

    def test_vars_of_ignores_literals(self):
        assert vars_of(parse("[a] true")) == set()

    def test_agents_of(self):
        assert agents_of(parse("[a][E:b] p")) == {"a", "b"}

    def test_modal_depth(self):
        assert modal_depth(parse("[a] box p")) == 2
        assert modal_depth(parse("p & ~q")) == 0

    def test_purity(self):
        assert is_osstit_pure(parse("[a] p & [E:b] q"))
        assert not is_osstit_pure(parse("[stit:a] p"))
        assert is_cstit_pure(parse("box [stit:a] p"))
        assert not is_cstit_pure(parse("<E:a> p"))


class TestTranslate:
    """tr sends [i] to dia [stit:i] and is homomorphic elsewhere."""

    def test_ability(self):
        assert render(translate_tr(parse("[a] p"))) == "dia [stit:a] p"

    def test_atom(self):
        assert translate_tr(p) == p

    def test_nested(self):
        assert render(translate_tr(parse("box [a] (p | q)"))) == "box dia [stit:a] (p | q)"

    def test_rejects_forall_core(self):
        with pytest.raises(FormulaPurityError):
            translate_tr(parse("[E:a] p"))

    def test_rejects_classical_stit(self):
        with pytest.raises(FormulaPurityError):
            translate_tr(parse("[stit:a] p"))

    @given(ability_formulas())
    def test_preserves_symbols_and_bounds_depth(self, f):
        g = translate_tr(f)
        assert is_cstit_pure(g)
        assert vars_of(g) == vars_of(f)
        assert agents_of(g) == agents_of(f)
        d = modal_depth(f)
        assert d <= modal_depth(g) <= 2 * d
