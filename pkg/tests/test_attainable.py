import itertools
import random
from fractions import Fraction

import pytest

from condexp.attainable import (
    AtomObstruction,
    block_set,
    cond_exp_set,
    convexify_witness,
    derandomize_selection,
    dyadic_indicator,
    indicator_correspondence,
    limit_escape_certificate,
    membership,
    rademacher_escape,
    uhc_audit,
)
from condexp.correspondences import (
    FiniteIndexedCorrespondence,
    Selection,
    mixed_value,
    selection_value,
)
from condexp.errors import AtomObstructionError, NotSaturated, SaturatedBlock
from condexp.measure import Cell, functions_equal, linear_combination

from helpers import (
    binary_F,
    point_cell,
    rich_cell,
    saturated_cell,
    space,
    step,
    unit_rich_space,
)
from test_correspondences import mix, sel

F = Fraction


class TestBlockSet:
    def test_rich_binary_interval(self):
        sp = unit_rich_space()
        bs = block_set(binary_F(sp), "c")
        assert bs.polytopes() == [((F(0),), (F(1),))]

    def test_point_only_nonconvex(self):
        sp = space(point_cell("p"))
        bs = block_set(binary_F(sp), "p")
        assert bs.polytopes() == [((F(0),),), ((F(1),),)]
        assert not bs.contains((F(1, 2),))

    def test_mixed_block_union_covers_interval(self):
        # brute force: point choices {0, 1/2} translated by rich range [0, 1/2]
        sp = space(rich_cell("r", F(1, 2), block="g"), point_cell("p", F(1, 2), block="g"))
        bs = block_set(binary_F(sp), "g")
        assert bs.polytopes() == [
            ((F(0),), (F(1, 2),)),
            ((F(1, 2),), (F(1),)),
        ]
        for num in range(0, 9):
            assert bs.contains((F(num, 8),))

    def test_saturated_block_rejected(self):
        sp = space(saturated_cell("D"))
        with pytest.raises(SaturatedBlock):
            block_set(binary_F(sp), "D")

    def test_support_function(self):
        sp = unit_rich_space()
        bs = block_set(binary_F(sp), "c")
        assert bs.support((F(1),)) == 1
        assert bs.support((F(-1),)) == 0


def brute_force_averages(Fc, block_label, grid):
    """All block averages of selections constant on a sub-grid, exact."""
    sp = Fc.space
    cells = sp.blocks[block_label]
    mass = sp.block_mass(block_label)
    per_cell_options = []
    for c in cells:
        if c.has_inner:
            pieces = Fc.refinement_on(c)
            combos_per_piece = []
            for lo, hi in pieces:
                values = Fc.branch_values(c, lo)
                width = (hi - lo) / grid
                counts = itertools.combinations_with_replacement(range(len(values)), grid)
                sums = set()
                for combo in counts:
                    total = tuple(
                        sum(values[k][d] for k in combo) * width * c.mass
                        for d in range(Fc.dim)
                    )
                    sums.add(total)
                combos_per_piece.append(sorted(sums))
            cell_sums = set()
            for picks in itertools.product(*combos_per_piece):
                cell_sums.add(
                    tuple(sum(p[d] for p in picks) for d in range(Fc.dim))
                )
            per_cell_options.append(sorted(cell_sums))
        else:
            per_cell_options.append(
                sorted(
                    {
                        tuple(x * c.mass for x in v)
                        for v in Fc.branch_values(c, F(0))
                    }
                )
            )
    out = set()
    for picks in itertools.product(*per_cell_options):
        out.add(tuple(sum(p[d] for p in picks) / mass for d in range(Fc.dim)))
    return sorted(out)


class TestBlockSetOracle:
    def test_brute_force_members_are_exact_members(self):
        sp = space(rich_cell("r", F(1, 2), block="g"), point_cell("p", F(1, 2), block="g"))
        b0 = step(sp, {"r": [(F(1, 2), 0), (1, 2)], "p": 1})
        b1 = step(sp, {"r": 3, "p": 4})
        Fc = FiniteIndexedCorrespondence(sp, (b0, b1))
        bs = block_set(Fc, "g")
        cloud = brute_force_averages(Fc, "g", grid=4)
        for point in cloud:
            assert bs.contains(point)

    def test_cloud_hits_every_vertex(self):
        sp = unit_rich_space()
        b0 = step(sp, {"c": (0, 0)}, dim=2)
        b1 = step(sp, {"c": (1, 0)}, dim=2)
        b2 = step(sp, {"c": (0, 1)}, dim=2)
        Fc = FiniteIndexedCorrespondence(sp, (b0, b1, b2))
        cloud = brute_force_averages(Fc, "c", grid=4)
        (poly,) = block_set(Fc, "c").polytopes()
        for v in poly:
            assert v in cloud


class TestMembership:
    def test_midpoint_on_rich_cell(self):
        sp = unit_rich_space()
        res = membership(binary_F(sp), step(sp, {"c": F(1, 2)}))
        assert res.member

    def test_midpoint_on_saturated_cell(self):
        sp = space(saturated_cell("D"))
        res = membership(binary_F(sp), step(sp, {"D": F(1, 2)}))
        assert not res.member
        assert res.certificate.kind == "saturated"
        assert res.certificate.distance == F(1, 2)

    def test_midpoint_on_point_block(self):
        sp = space(point_cell("p"))
        res = membership(binary_F(sp), step(sp, {"p": F(1, 2)}))
        assert not res.member
        assert res.certificate.distance == F(1, 2)

    def test_tolerance_path(self):
        sp = space(point_cell("p"))
        near = F(1) + F(1, 10**12)
        res = membership(binary_F(sp), step(sp, {"p": near}), tolerance=F(1, 10**9))
        assert res.member


class TestConvexifyWitness:
    def test_quarter_blend_on_rich_cell(self):
        sp = unit_rich_space()
        Fc = binary_F(sp)
        s1, s2 = sel(sp, {"c": 0}), sel(sp, {"c": 1})
        s0 = convexify_witness(Fc, s1, s2, F(1, 4))
        assert isinstance(s0, Selection)
        assert s0.assignments["c"] == ((F(1, 4), 0), (F(1), 1))
        e = sp.conditional_expectation(selection_value(Fc, s0))
        assert functions_equal(sp, e, step(sp, {"c": F(3, 4)}))

    def test_alpha_zero_endpoint(self):
        sp = unit_rich_space()
        Fc = binary_F(sp)
        s1, s2 = sel(sp, {"c": 0}), sel(sp, {"c": 1})
        s0 = convexify_witness(Fc, s1, s2, F(0))
        e = sp.conditional_expectation(selection_value(Fc, s0))
        e2 = sp.conditional_expectation(selection_value(Fc, s2))
        assert functions_equal(sp, e, e2)

    def test_point_block_obstruction(self):
        sp = space(point_cell("p"))
        Fc = binary_F(sp)
        out = convexify_witness(Fc, sel(sp, {"p": 0}), sel(sp, {"p": 1}), F(1, 2))
        assert isinstance(out, AtomObstruction)
        assert out.cell_id == "p"
        assert out.alpha == F(1, 2)

    def test_saturated_obstruction(self):
        sp = space(saturated_cell("D"))
        Fc = binary_F(sp)
        out = convexify_witness(Fc, sel(sp, {"D": 0}), sel(sp, {"D": 1}), F(1, 3))
        assert isinstance(out, AtomObstruction)

    def test_achievable_blend_on_atom_space(self):
        # mixed block where the target is reachable despite the point cell
        sp = space(rich_cell("r", F(1, 2), block="g"), point_cell("p", F(1, 2), block="g"))
        Fc = binary_F(sp)
        s1, s2 = sel(sp, {"r": 0, "p": 0}), sel(sp, {"r": 1, "p": 1})
        s0 = convexify_witness(Fc, s1, s2, F(1, 2))
        assert isinstance(s0, Selection)
        e = sp.conditional_expectation(selection_value(Fc, s0))
        target = linear_combination(
            sp,
            [
                (F(1, 2), sp.conditional_expectation(selection_value(Fc, s1))),
                (F(1, 2), sp.conditional_expectation(selection_value(Fc, s2))),
            ],
        )
        assert functions_equal(sp, e, target)

    def test_multi_block_random_exact(self):
        rng = random.Random(3)
        for _ in range(25):
            sp = space(
                rich_cell("a", F(1, 3), block="g"),
                rich_cell("b", F(1, 3), block="g"),
                rich_cell("c", F(1, 3), block="h"),
            )
            branches = []
            for _k in range(3):
                branches.append(
                    step(
                        sp,
                        {
                            cid: [
                                (F(1, 2), rng.randint(-3, 3)),
                                (1, rng.randint(-3, 3)),
                            ]
                            for cid in ["a", "b", "c"]
                        },
                    )
                )
            Fc = FiniteIndexedCorrespondence(sp, tuple(branches))
            s1 = sel(sp, {cid: rng.randrange(3) for cid in ["a", "b", "c"]})
            s2 = sel(sp, {cid: rng.randrange(3) for cid in ["a", "b", "c"]})
            alpha = F(rng.randint(0, 6), 6)
            s0 = convexify_witness(Fc, s1, s2, alpha)
            assert isinstance(s0, Selection)
            e0 = sp.conditional_expectation(selection_value(Fc, s0))
            target = linear_combination(
                sp,
                [
                    (alpha, sp.conditional_expectation(selection_value(Fc, s1))),
                    (1 - alpha, sp.conditional_expectation(selection_value(Fc, s2))),
                ],
            )
            assert functions_equal(sp, e0, target)


class TestDerandomize:
    def test_half_half(self):
        sp = unit_rich_space()
        Fc = binary_F(sp)
        s = derandomize_selection(Fc, mix(sp, {"c": ["1/2", "1/2"]}))
        assert s.assignments["c"] == ((F(1, 2), 0), (F(1), 1))
        assert sp.integrate(selection_value(Fc, s)) == (F(1, 2),)

    def test_one_hot_passthrough(self):
        sp = space(rich_cell("r", F(1, 2)), point_cell("p", F(1, 2)))
        Fc = binary_F(sp)
        s = derandomize_selection(Fc, mix(sp, {"r": [0, 1], "p": [1, 0]}))
        assert s.assignments["p"] == 0
        assert s.assignments["r"] == ((F(1), 1),)

    def test_piecewise_average(self):
        sp = unit_rich_space()
        b0 = step(sp, {"c": [(F(1, 2), 2), (1, 2)]})
        b1 = step(sp, {"c": [(F(1, 2), 4), (1, 4)]})
        Fc = FiniteIndexedCorrespondence(sp, (b0, b1))
        s = derandomize_selection(Fc, mix(sp, {"c": ["3/4", "1/4"]}))
        assert sp.integrate(selection_value(Fc, s)) == (F(5, 2),)

    def test_piecewise_integral_identity(self):
        sp = unit_rich_space()
        b0 = step(sp, {"c": [(F(1, 3), 1), (1, -2)]})
        b1 = step(sp, {"c": 5})
        Fc = FiniteIndexedCorrespondence(sp, (b0, b1))
        m = mix(sp, {"c": [(F(1, 2), ["2/3", "1/3"]), (1, ["1/4", "3/4"])]})
        s = derandomize_selection(Fc, m)
        mv = mixed_value(Fc, m)
        sv = selection_value(Fc, s)
        # the split preserves the integral piece by piece, not just overall
        for lo, hi in Fc.refinement_on(sp.cells[0], m.breakpoints_on(sp.cells[0])):
            got = _integral_over(sp.cells[0], sv, lo, hi)
            want = _integral_over(sp.cells[0], mv, lo, hi)
            assert got == want

    def test_atom_obstruction(self):
        sp = space(point_cell("p"))
        Fc = binary_F(sp)
        with pytest.raises(AtomObstructionError):
            derandomize_selection(Fc, mix(sp, {"p": ["1/2", "1/2"]}))

    def test_positive_weight_support_only(self):
        sp = unit_rich_space()
        Fc = binary_F(sp)
        s = derandomize_selection(Fc, mix(sp, {"c": [0, 1]}))
        assert all(k == 1 for _, k in s.assignments["c"])


def _integral_over(cell, f, lo, hi):
    total = F(0)
    for plo, phi, v in f.pieces_on(cell):
        a, b = max(plo, lo), min(phi, hi)
        if b > a:
            total += (b - a) * v[0]
    return total * cell.mass


class TestRademacher:
    def test_m1_integral(self):
        sp = space(saturated_cell("D"))
        phi, report = rademacher_escape(sp, "D", 1)
        assert report.integral == F(1, 2)
        assert phi.assignments["D"] == ((F(1, 2), 1), (F(1), 0))

    def test_constant_test_function(self):
        sp = space(saturated_cell("D"))
        psi = step(sp, {"D": 1})
        _, report = rademacher_escape(sp, "D", 5, tests=[psi])
        entry = report.tests[0]
        assert entry.lhs == entry.rhs == F(1, 2)

    def test_level2_values(self):
        sp = space(saturated_cell("D"))
        psi = step(
            sp,
            {"D": [(F(1, 4), 1), (F(1, 2), 2), (F(3, 4), 3), (1, 4)]},
        )
        _, report = rademacher_escape(sp, "D", 3, tests=[psi])
        entry = report.tests[0]
        assert entry.level == 2
        assert entry.lhs == F(5, 4)
        assert entry.rhs == F(5, 4)

    def test_requires_saturated(self):
        sp = unit_rich_space()
        with pytest.raises(NotSaturated):
            rademacher_escape(sp, "c", 2)

    def test_identities_all_levels_small_m(self):
        sp = space(saturated_cell("D", F(1, 2)), rich_cell("r", F(1, 2)))
        for m in range(1, 7):
            denom = 2 ** (m - 1)
            tests = [
                dyadic_indicator(sp, "D", F(i, denom), F(i + 1, denom))
                for i in range(denom)
            ]
            _, report = rademacher_escape(sp, "D", m, tests=tests)
            for entry in report.tests:
                assert entry.holds


class TestLimitEscape:
    def test_full_mass(self):
        sp = space(saturated_cell("D"))
        assert limit_escape_certificate(sp, "D") == F(1, 2)

    def test_half_mass(self):
        sp = space(saturated_cell("D", F(1, 2)), rich_cell("r", F(1, 2)))
        assert limit_escape_certificate(sp, "D") == F(1, 4)

    def test_rich_rejected_but_member(self):
        sp = unit_rich_space()
        with pytest.raises(NotSaturated):
            limit_escape_certificate(sp, "c")
        Fc = indicator_correspondence(sp, "c")
        half = step(sp, {"c": F(1, 2)})
        assert membership(Fc, half).member


class TestUhcAudit:
    def test_rich_cell(self):
        sp = space(rich_cell("D", F(1, 2)), rich_cell("r", F(1, 2)))
        report = uhc_audit(sp, "D", depth=6)
        assert report.limit_in_H0
        assert report.defect == 0
        assert report.averages_constant

    @pytest.mark.parametrize(
        "mass,expected",
        [(F(1), F(1, 2)), (F(1, 2), F(1, 4)), (F(1, 3), F(1, 6))],
    )
    def test_saturated_cell(self, mass, expected):
        cells = [saturated_cell("D", mass)]
        if mass != 1:
            cells.append(rich_cell("r", 1 - mass))
        sp = space(*cells)
        report = uhc_audit(sp, "D", depth=6)
        assert not report.limit_in_H0
        assert report.defect == expected
        assert report.identities_ok


class TestCondExpSetAssembly:
    def test_regions_and_saturated_split(self):
        sp = space(
            rich_cell("r", F(1, 2), block="g"),
            point_cell("p", F(1, 4), block="g"),
            saturated_cell("D", F(1, 4)),
        )
        ces = cond_exp_set(binary_F(sp))
        assert set(ces.regions) == {"g"}
        assert ces.saturated_cells == ("D",)


class TestHighDimension:
    def test_membership_and_support_beyond_vertex_dimension(self):
        # in dimension 4 only LP membership and support queries are offered
        sp = unit_rich_space()
        b0 = step(sp, {"c": (0, 0, 0, 0)}, dim=4)
        b1 = step(sp, {"c": (1, 0, 0, 0)}, dim=4)
        b2 = step(sp, {"c": (0, 1, 1, 0)}, dim=4)
        Fc = FiniteIndexedCorrespondence(sp, (b0, b1, b2))
        bs = block_set(Fc, "c")
        mid = tuple(F(x, 3) for x in (1, 1, 1, 0))
        assert bs.contains(mid)
        assert not bs.contains((F(1), F(1), F(1), F(1)))
        assert bs.support((F(1), F(0), F(0), F(0))) == 1
        assert bs.support((F(1), F(1), F(1), F(1))) == 2
        from condexp.errors import UnsupportedDimension

        with pytest.raises(UnsupportedDimension):
            bs.polytopes()


class TestMembershipAtomDichotomy:
    def test_half_indicator_membership_iff_target_rich(self):
        # off-target cells are single-valued for the indicator correspondence,
        # so the midpoint is attainable exactly when the target cell is rich
        from condexp.measure import CellKind, indicator_of_cells

        rng = random.Random(77)
        for _ in range(25):
            n = rng.randint(1, 4)
            masses = [rng.randint(1, 4) for _ in range(n)]
            total = sum(masses)
            kind_pool = [CellKind.RICH] * 3 + [CellKind.SATURATED, CellKind.POINT_MASS]
            kinds = [rng.choice(kind_pool) for _ in range(n)]
            cells = []
            for i, (m, k) in enumerate(zip(masses, kinds)):
                block = f"c{i}" if k is CellKind.SATURATED else f"g{rng.randrange(2)}"
                cells.append(Cell(f"c{i}", F(m, total), k, block))
            sp = space(*cells)
            target = rng.randrange(n)
            Fc = indicator_correspondence(sp, f"c{target}")
            half = linear_combination(
                sp,
                [
                    (
                        F(1, 2),
                        sp.conditional_expectation(
                            indicator_of_cells(sp, [f"c{target}"])
                        ),
                    )
                ],
            )
            result = membership(Fc, half)
            assert result.member == (cells[target].kind is CellKind.RICH)
