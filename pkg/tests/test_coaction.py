from fractions import Fraction

import pytest

import coaction
import graphs
from coaction import UNIT, CoactionExpression, de_rham, motivic
from errors import EnvelopeExceeded


def Idr(n, gamma, pinched=()):
    return de_rham(graphs.CutQuotientGraph(n=n, pinched=frozenset(pinched)), gamma)


def Im(n, keep):
    return motivic(graphs.quotient_keeping(n, keep))


class TestSymbols:
    def test_point_graph_is_unit(self):
        assert motivic(graphs.point_graph(3)) == UNIT
        assert de_rham(graphs.point_graph(3), ()) == UNIT

    def test_rendering(self):
        assert str(Im(3, (1, 3))) == "I^m(n=3;pinch=2)"
        assert str(Idr(4, (2, 1))) == "I^dr(n=4, {1,2})"

    def test_cut_graphs_rejected(self):
        with pytest.raises(coaction.BadSubset):
            motivic(graphs.cut(graphs.n_gon(2), 1))
        with pytest.raises(coaction.BadSubset):
            Idr(3, (2,), pinched=(2,))


class TestCoaction:
    def test_bubble(self):
        rho = coaction.coaction(2)
        assert rho.terms() == [
            (Fraction(1), UNIT, Idr(2, ())),
            (Fraction(1), Im(2, (1, 2)), Idr(2, (1, 2))),
        ]
        assert coaction.render_text(rho) == "1 ⊗ I^dr(n=2, {}) + I^m(n=2) ⊗ I^dr(n=2, {1,2})"

    def test_triangle_raw(self):
        raw = coaction.coaction(3, normalize=False)
        assert len(raw) == 9
        assert (Im(3, (1,)), Idr(3, (1,))) not in raw.data
        assert raw.data[(Im(3, (2,)), Idr(3, (2,)))] == 1
        assert raw.data[(Im(3, (1,)), Idr(3, (2,)))] == -1

    def test_triangle_normal_form(self):
        rho = coaction.coaction(3)
        assert len(rho) == 9
        assert all(right != Idr(3, (3,)) for _, _, right in rho.terms())
        assert rho.data[(Im(3, (1,)), Idr(3, (1,)))] == 1
        assert rho.data[(Im(3, (3,)), Idr(3, (1,)))] == -1

    @pytest.mark.parametrize("n,count", [(2, 2), (3, 9), (4, 8), (5, 35), (6, 32)])
    def test_term_counts(self, n, count):
        assert len(coaction.coaction(n)) == count

    @pytest.mark.parametrize("n", [2, 4, 6])
    def test_even_n_has_no_odd_cuts(self, n):
        assert all(len(right.gamma) % 2 == 0 for _, _, right in coaction.coaction(n).terms())

    @pytest.mark.parametrize("n", [3, 5])
    def test_reference_edge_drops_out(self, n):
        reference = coaction.coaction(n, j=1)
        for j in range(2, n + 1):
            assert coaction.coaction(n, j=j) == reference

    def test_tadpole_has_no_coaction(self):
        with pytest.raises(coaction.TooSmall):
            coaction.coaction(1)

    def test_bad_reference_edge(self):
        with pytest.raises(coaction.BadSubset):
            coaction.coaction(3, j=4)

    def test_edge_envelope(self, monkeypatch):
        monkeypatch.delenv('NGON_MAX_EDGES', raising=False)
        with pytest.raises(EnvelopeExceeded):
            coaction.coaction(11)
        with pytest.raises(EnvelopeExceeded):
            coaction.coproduct(11, (1, 2))


class TestCoproduct:
    def test_top_cut_is_grouplike(self):
        delta = coaction.coproduct(2, {1, 2})
        assert delta.terms() == [(Fraction(1), Idr(2, (1, 2)), Idr(2, (1, 2)))]

    def test_odd_cut_of_bubble(self):
        raw = coaction.coproduct(2, {1}, normalize=False)
        assert len(raw) == 2
        assert raw.data[(Idr(2, (1,), pinched=(2,)), Idr(2, (1,)))] == 1
        assert coaction.coproduct(2, {1}).is_zero()
        assert coaction.render_text(coaction.coproduct(2, {1})) == "0"

    def test_empty_cut_of_triangle(self):
        assert len(coaction.coproduct(3, (), normalize=False)) == 8

    def test_box_terms(self):
        raw = coaction.coproduct(4, (1, 2), normalize=False)
        assert raw.data[(Idr(4, (1, 2)), Idr(4, (1, 2, 3, 4)))] == 1
        assert raw.data[(Idr(4, (1, 2), pinched=(3, 4)), Idr(4, (1, 2)))] == 1
        assert len(raw) == 4

    @pytest.mark.parametrize("gamma", [(3,), (1, 1), (0,)])
    def test_bad_subset(self, gamma):
        with pytest.raises(coaction.BadSubset):
            coaction.coproduct(2, gamma)


class TestNormalForm:
    def test_zero_sum(self):
        expr = CoactionExpression()
        for i in (1, 2, 3):
            expr.add(1, UNIT, Idr(3, (i,)))
        assert coaction.normal_form(expr).is_zero()

    def test_parity(self):
        expr = CoactionExpression()
        expr.add(1, UNIT, Idr(4, (2,)))
        assert coaction.normal_form(expr).is_zero()

    def test_highest_edge_is_eliminated(self):
        expr = CoactionExpression()
        expr.add(2, UNIT, Idr(5, (5,)))
        normal = coaction.normal_form(expr)
        assert normal.data == {(UNIT, Idr(5, (i,))): Fraction(-2) for i in (1, 2, 3, 4)}

    def test_quotient_parent_uses_its_own_edges(self):
        expr = CoactionExpression()
        expr.add(1, UNIT, Idr(5, (4,), pinched=(2, 5)))
        normal = coaction.normal_form(expr)
        assert normal.data == {
            (UNIT, Idr(5, (1,), pinched=(2, 5))): Fraction(-1),
            (UNIT, Idr(5, (3,), pinched=(2, 5))): Fraction(-1),
        }

    def test_idempotent(self):
        raw = coaction.coaction(5, normalize=False)
        once = coaction.normal_form(raw)
        assert coaction.normal_form(once) == once


class TestCoassociativity:
    @pytest.mark.parametrize("n", range(2, 7))
    def test_holds(self, n):
        report = coaction.check_coassociativity(n)
        assert report
        assert report.counterexample is None
        assert report.terms_checked > 0

    def test_range(self):
        with pytest.raises(coaction.TooSmall):
            coaction.check_coassociativity(9)


class TestExpressions:
    def test_arithmetic(self):
        a = coaction.coaction(3)
        assert (a - a).is_zero()
        assert (2 * a).data[(UNIT, Idr(3, ()))] == 2
        assert (a + a) == 2 * a
        assert -a == a * -1

    def test_arity_mismatch(self):
        with pytest.raises(ValueError):
            CoactionExpression().add(1, UNIT)
        with pytest.raises(ValueError):
            CoactionExpression(arity=2) + CoactionExpression(arity=3)

    def test_apply_to_slot(self):
        rho = coaction.coaction(2)
        triple = coaction.apply_to_slot(rho, 1, coaction.coproduct_of_symbol)
        assert triple.arity == 3
        assert triple.data[(UNIT, UNIT, Idr(2, ()))] == 1
        assert triple.data[(Im(2, (1, 2)), Idr(2, (1, 2)), Idr(2, (1, 2)))] == 1
        assert len(triple) == 5

    def test_render_signs(self):
        expr = CoactionExpression()
        expr.add(-1, UNIT, Idr(3, (1,)))
        expr.add(Fraction(3, 2), UNIT, Idr(3, (2,)))
        assert coaction.render_text(expr) == "-1 ⊗ I^dr(n=3, {1}) + 3/2·1 ⊗ I^dr(n=3, {2})"

    def test_render_coefficient_on_motivic_factor(self):
        expr = CoactionExpression()
        expr.add(-2, Im(3, (1, 3)), Idr(3, (1, 3)))
        assert coaction.render_text(expr) == "-2·I^m(n=3;pinch=2) ⊗ I^dr(n=3, {1,3})"
