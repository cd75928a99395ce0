from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from condexp.errors import DimensionMismatch, SchemaError
from condexp.measure import (
    Cell,
    CellKind,
    MeasureSpaceModel,
    constant_function,
    functions_equal,
    indicator_of_cells,
    linear_combination,
)

from helpers import point_cell, rich_cell, saturated_cell, space, step, unit_rich_space

F = Fraction


class TestSpaceValidation:
    def test_masses_must_sum_to_one(self):
        with pytest.raises(SchemaError):
            space(rich_cell("a", F(1, 2)))

    def test_positive_mass(self):
        with pytest.raises(SchemaError):
            space(Cell("a", F(0), CellKind.RICH, "a"), rich_cell("b", F(1)))

    def test_saturated_cell_needs_singleton_block(self):
        with pytest.raises(SchemaError):
            space(
                Cell("a", F(1, 2), CellKind.SATURATED, "g"),
                Cell("b", F(1, 2), CellKind.RICH, "g"),
            )

    def test_duplicate_ids_rejected(self):
        with pytest.raises(SchemaError):
            space(rich_cell("a", F(1, 2)), rich_cell("a", F(1, 2)))


class TestIntegrate:
    def test_constant_one(self):
        sp = unit_rich_space()
        f = step(sp, {"c": 1})
        assert sp.integrate(f) == (F(1),)

    def test_quarter_support(self):
        sp = unit_rich_space()
        f = step(sp, {"c": [(F(1, 4), 1), (1, 0)]})
        assert sp.integrate(f) == (F(1, 4),)

    def test_two_cells_average(self):
        sp = space(rich_cell("a", F(1, 2)), rich_cell("b", F(1, 2)))
        f = step(sp, {"a": 0, "b": 1})
        assert sp.integrate(f) == (F(1, 2),)

    def test_dimension_mismatch(self):
        sp = unit_rich_space()
        f = step(sp, {"c": (1, 2)}, dim=2)
        bad = step(sp, {"c": 1})
        assert sp.integrate(f) == (F(1), F(2))
        with pytest.raises(DimensionMismatch):
            linear_combination(sp, [(F(1), f), (F(1), bad)])


class TestConditionalExpectation:
    def test_single_rich_block_averages(self):
        sp = unit_rich_space()
        f = step(sp, {"c": [(F(1, 4), 1), (1, 0)]})
        e = sp.conditional_expectation(f)
        assert functions_equal(sp, e, step(sp, {"c": F(1, 4)}))

    def test_saturated_cell_is_identity(self):
        sp = space(saturated_cell("D"))
        f = step(sp, {"D": [(F(1, 3), 5), (1, 2)]})
        assert functions_equal(sp, sp.conditional_expectation(f), f)

    def test_mixed_block_weighted_average(self):
        sp = space(
            rich_cell("r", F(1, 2), block="g"),
            point_cell("p", F(1, 2), block="g"),
        )
        f = step(sp, {"r": 0, "p": 1})
        e = sp.conditional_expectation(f)
        assert functions_equal(sp, e, step(sp, {"r": F(1, 2), "p": F(1, 2)}))

    def test_law_of_total_expectation(self):
        sp = space(
            rich_cell("a", F(1, 3), block="g"),
            rich_cell("b", F(1, 3), block="g"),
            saturated_cell("D", F(1, 3)),
        )
        f = step(sp, {"a": [(F(1, 2), 3), (1, 1)], "b": 2, "D": [(F(1, 4), 7), (1, 0)]})
        assert sp.integrate(sp.conditional_expectation(f)) == sp.integrate(f)

    def test_idempotent(self):
        sp = space(rich_cell("a", F(2, 5), block="g"), rich_cell("b", F(3, 5), block="g"))
        f = step(sp, {"a": [(F(1, 2), 1), (1, 4)], "b": 2})
        e1 = sp.conditional_expectation(f)
        e2 = sp.conditional_expectation(e1)
        assert functions_equal(sp, e1, e2)

    def test_identity_on_all_saturated_space(self):
        sp = space(saturated_cell("D1", F(1, 2)), saturated_cell("D2", F(1, 2)))
        f = step(sp, {"D1": [(F(1, 2), 1), (1, 0)], "D2": 3})
        assert functions_equal(sp, sp.conditional_expectation(f), f)


class TestHasGAtom:
    def test_all_rich(self):
        sp = space(rich_cell("a", F(1, 2)), rich_cell("b", F(1, 2)))
        assert sp.has_g_atom() == (False, None)

    def test_saturated_witness(self):
        sp = space(saturated_cell("D"))
        assert sp.has_g_atom() == (True, "D")

    def test_point_mass_witness(self):
        sp = space(rich_cell("r", F(1, 2)), point_cell("p", F(1, 2)))
        assert sp.has_g_atom() == (True, "p")


@st.composite
def random_space_and_functions(draw):
    n_cells = draw(st.integers(1, 4))
    masses = [draw(st.integers(1, 4)) for _ in range(n_cells)]
    total = sum(masses)
    cells = []
    for i, m in enumerate(masses):
        block = f"g{draw(st.integers(0, 1))}"
        cells.append(Cell(f"c{i}", F(m, total), CellKind.RICH, block))
    sp = MeasureSpaceModel(tuple(cells))
    def rand_fn():
        per_cell = {}
        for c in sp.cells:
            cuts = sorted(set(draw(st.lists(st.integers(1, 7), min_size=0, max_size=2))))
            uptos = [F(x, 8) for x in cuts] + [F(1)]
            per_cell[c.id] = [
                (u, F(draw(st.integers(-4, 4)), draw(st.integers(1, 3)))) for u in uptos
            ]
        return per_cell
    return sp, rand_fn(), rand_fn()


class TestLinearityProperties:
    @settings(max_examples=30, deadline=None, derandomize=True)
    @given(random_space_and_functions(), st.integers(-3, 3), st.integers(-3, 3))
    def test_conditional_expectation_linear(self, data, a, b):
        sp, f_data, g_data = data
        f = step(sp, {cid: pieces for cid, pieces in f_data.items()})
        g = step(sp, {cid: pieces for cid, pieces in g_data.items()})
        combo = linear_combination(sp, [(F(a), f), (F(b), g)])
        lhs = sp.conditional_expectation(combo)
        rhs = linear_combination(
            sp,
            [(F(a), sp.conditional_expectation(f)), (F(b), sp.conditional_expectation(g))],
        )
        assert functions_equal(sp, lhs, rhs)

    @settings(max_examples=30, deadline=None, derandomize=True)
    @given(random_space_and_functions())
    def test_total_expectation(self, data):
        sp, f_data, _ = data
        f = step(sp, {cid: pieces for cid, pieces in f_data.items()})
        assert sp.integrate(sp.conditional_expectation(f)) == sp.integrate(f)


class TestHelpers:
    def test_indicator(self):
        sp = space(rich_cell("a", F(1, 2)), point_cell("p", F(1, 2)))
        ind = indicator_of_cells(sp, ["p"])
        assert sp.integrate(ind) == (F(1, 2),)

    def test_constant(self):
        sp = unit_rich_space()
        f = constant_function(sp, (F(2), F(3)))
        assert sp.integrate(f) == (F(2), F(3))
