import random
from fractions import Fraction

import pytest
from scipy import integrate

from condexp.errors import BoundaryPoint, BudgetExceeded
from condexp.pennies import (
    IntervalUnionStrategy,
    PenniesGame,
    TrianglePrior,
    balance_defect,
    behavioral_profile_gain,
    cyclic_deviation,
    grid_strategies,
    interim_weight,
    no_pure_equilibrium_search,
    profile_values,
    pure_profile_gain,
    uniform_rows,
)

F = Fraction


def iv(*pairs):
    return tuple((F(a), F(b)) for a, b in pairs)


def strategy(m, *unions):
    return IntervalUnionStrategy(tuple(iv(*u) for u in unions))


class TestTrianglePrior:
    def test_total_mass(self):
        assert TrianglePrior.total_mass() == 1

    def test_marginals_integrate_to_one(self):
        assert TrianglePrior.marginal_masses() == (F(1), F(1))

    def test_reconstruction_identity_on_rationals(self):
        rng = random.Random(2)
        for _ in range(50):
            l1 = F(rng.randint(1, 19), 20)
            l2 = F(rng.randint(1, 19), 20)
            assert TrianglePrior.reconstruction_identity(l1, l2)

    def test_conditional_density_value(self):
        # 1 / (2 * (1 - 1/4) * 1/2) = 4/3
        assert TrianglePrior.conditional_density(F(1, 4), F(1, 2)) == F(4, 3)


class TestInterimWeight:
    def test_full_set(self):
        assert interim_weight(iv((0, 1)), F(1, 3), side=2) == 1
        assert interim_weight(iv((0, 1)), F(2, 3), side=1) == 1

    def test_half_set_at_three_quarters(self):
        assert interim_weight(iv((0, "1/2")), F(3, 4), side=2) == F(2, 3)

    def test_saturating_clip(self):
        assert interim_weight(iv((0, "1/2")), F(1, 4), side=2) == 1

    def test_boundary_rejected(self):
        with pytest.raises(BoundaryPoint):
            interim_weight(iv((0, 1)), F(0), side=2)
        with pytest.raises(BoundaryPoint):
            interim_weight(iv((0, 1)), F(1), side=1)

    def test_closed_form_matches_quadrature(self):
        # oracle: integrate conditional density against the player-1 marginal
        rng = random.Random(7)
        for _ in range(25):
            a = rng.randint(0, 6)
            b = rng.randint(a + 1, 8)
            E = iv((F(a, 8), F(b, 8)))
            l2 = F(rng.randint(1, 15), 16)

            def integrand(l1, l2f=float(l2)):
                if not 0 < l1 <= l2f:
                    return 0.0
                cond = 1.0 / (2.0 * (1.0 - l1) * l2f)
                return cond * 2.0 * (1.0 - l1)

            expected, _err = integrate.quad(
                integrand, float(E[0][0]), float(E[0][1]), limit=200
            )
            got = interim_weight(E, l2, side=2)
            assert abs(float(got) - expected) < 1e-10

    def test_player1_side_quadrature(self):
        rng = random.Random(8)
        for _ in range(25):
            a = rng.randint(0, 6)
            b = rng.randint(a + 1, 8)
            E = iv((F(a, 8), F(b, 8)))
            l1 = F(rng.randint(1, 15), 16)

            def integrand(l2, l1f=float(l1)):
                if not l1f <= l2 < 1:
                    return 0.0
                cond = 1.0 / (2.0 * (1.0 - l1f) * l2)
                return cond * 2.0 * l2

            expected, _err = integrate.quad(
                integrand, float(E[0][0]), float(E[0][1]), limit=200
            )
            got = interim_weight(E, l1, side=1)
            assert abs(float(got) - expected) < 1e-10


class TestBalanceDefect:
    def test_halves_for_two_actions(self):
        part = strategy(2, [(0, "1/2")], [("1/2", 1)])
        assert balance_defect(part, side=2) == F(1, 4)

    def test_halves_side_one(self):
        # mirror computation: integrand 2*max|eta'_j - (1-l)/2| gives l/2 on
        # the left half and (1-l)/2 on the right, total 1/4
        part = strategy(2, [(0, "1/2")], [("1/2", 1)])
        assert balance_defect(part, side=1) == F(1, 4)

    def test_degenerate_single_action(self):
        part = IntervalUnionStrategy((iv((0, 1)),))
        assert balance_defect(part, side=2) == 0
        assert balance_defect(part, side=1) == 0

    def test_strict_positivity_random(self):
        rng = random.Random(12)
        for _ in range(40):
            m = rng.choice([2, 3])
            r = 8
            arr = [rng.randrange(m) for _ in range(r)]
            part = IntervalUnionStrategy.from_grid(arr, m)
            assert balance_defect(part, side=2) > 0
            assert balance_defect(part, side=1) > 0


class TestGains:
    def test_all_first_action_pair(self):
        game = PenniesGame(2)
        f1 = strategy(2, [(0, 1)], [])
        f2 = strategy(2, [(0, 1)], [])
        g1, g2 = pure_profile_gain(game, f1, f2)
        assert g2 == 2
        assert g1 == 0  # player 1 is already matching everywhere

    def test_values_zero_sum(self):
        game = PenniesGame(3)
        rng = random.Random(3)
        for _ in range(10):
            a1 = [rng.randrange(3) for _ in range(8)]
            a2 = [rng.randrange(3) for _ in range(8)]
            f1 = IntervalUnionStrategy.from_grid(a1, 3)
            f2 = IntervalUnionStrategy.from_grid(a2, 3)
            u1, u2 = profile_values(game, f1, f2)
            assert u1 + u2 == 0

    def test_uniform_behavioral_profile_has_zero_gains(self):
        for m in (2, 3):
            for variant in ("type-irrelevant", "independent-types"):
                game = PenniesGame(m, variant)
                gains = behavioral_profile_gain(
                    game, uniform_rows(m), uniform_rows(m)
                )
                assert gains == (F(0), F(0))

    def test_best_response_gain_is_zero(self):
        game = PenniesGame(2)
        rng = random.Random(5)
        for _ in range(10):
            arr = [rng.randrange(2) for _ in range(8)]
            f1 = IntervalUnionStrategy.from_grid(arr, 2)
            dev = cyclic_deviation(game, f1, side=2)
            g1, g2 = pure_profile_gain(game, f1, dev)
            assert g2 >= 0
            # the cyclic deviation is the exact pointwise best response here,
            # so the deviator's remaining gain vanishes
            assert g2 == 0

    def test_cyclic_deviation_payoff_nonnegative(self):
        rng = random.Random(6)
        for m in (2, 3):
            game = PenniesGame(m)
            for _ in range(10):
                arr = [rng.randrange(m) for _ in range(8)]
                f1 = IntervalUnionStrategy.from_grid(arr, m)
                dev = cyclic_deviation(game, f1, side=2)
                _u1, u2 = profile_values(game, f1, dev)
                assert u2 >= 0
                arr2 = [rng.randrange(m) for _ in range(8)]
                f2 = IntervalUnionStrategy.from_grid(arr2, m)
                dev1 = cyclic_deviation(game, f2, side=1)
                u1, _u2 = profile_values(game, dev1, f2)
                assert u1 >= 0


class TestSearch:
    def test_budget_guard(self):
        with pytest.raises(BudgetExceeded):
            no_pure_equilibrium_search(PenniesGame(2), budget=9)

    def test_grid_strategy_count(self):
        assert len(grid_strategies(2, 8, 2)) == 2 + 7 * 2 + 21 * 2
        assert len(grid_strategies(3, 8, 1)) == 3 + 7 * 6

    def test_m2_exhaustive_pass(self):
        report = no_pure_equilibrium_search(PenniesGame(2), budget=2, grid=8)
        assert report.passed
        assert report.min_gain > F(1, 100)
        assert report.uniform_gains == (F(0), F(0))

    def test_float_matches_exact_on_sample(self):
        game = PenniesGame(2)
        strategies = grid_strategies(2, 8, 1)
        from condexp.pennies import _float_gain_matrices

        gain1, gain2 = _float_gain_matrices(2, 8, strategies)
        rng = random.Random(9)
        for _ in range(15):
            i1 = rng.randrange(len(strategies))
            i2 = rng.randrange(len(strategies))
            f1 = IntervalUnionStrategy.from_grid(strategies[i1], 2)
            f2 = IntervalUnionStrategy.from_grid(strategies[i2], 2)
            g1, g2 = pure_profile_gain(game, f1, f2)
            assert abs(float(g1) - gain1[i1, i2]) < 1e-9
            assert abs(float(g2) - gain2[i1, i2]) < 1e-9


class TestSampledSearch:
    def test_large_budget_samples_and_passes(self):
        report = no_pure_equilibrium_search(
            PenniesGame(2), budget=3, grid=16, epsilon=F(1, 100), max_strategies=220
        )
        assert not report.exhaustive
        assert report.strategies == 220
        assert report.passed  # sampled family still has no near-equilibrium
        assert report.min_gain > F(1, 100)

    def test_sampling_deterministic(self):
        a = no_pure_equilibrium_search(
            PenniesGame(2), budget=3, grid=16, max_strategies=150, seed=5
        )
        b = no_pure_equilibrium_search(
            PenniesGame(2), budget=3, grid=16, max_strategies=150, seed=5
        )
        assert a == b


def rect_triangle_area(a, b, c, d):
    """Exact area of [a,b) x [c,d) intersected with {l1 <= l2}."""
    # integrate over l2 in [c,d): max(0, min(b, l2) - a)
    total = F(0)
    # breakpoints of the integrand at l2 = a and l2 = b
    points = sorted({c, d, min(max(a, c), d), min(max(b, c), d)})
    for lo, hi in zip(points, points[1:]):
        if hi <= lo:
            continue
        mid = (lo + hi) / 2
        if mid <= a:
            continue
        if mid >= b:
            total += (b - a) * (hi - lo)
        else:
            # integrand l2 - a, affine
            total += (hi - lo) * ((lo + hi) / 2 - a)
    return total


class TestTriangleGeometryOracle:
    def test_profile_values_against_direct_double_integral(self):
        # independent oracle: U2 = sum over grid boxes of u2 * 2 * area of
        # the box under the diagonal; no cumulative machinery involved
        rng = random.Random(17)
        r = 8
        for m in (2, 3):
            game = PenniesGame(m)
            for _ in range(12):
                a1 = [rng.randrange(m) for _ in range(r)]
                a2 = [rng.randrange(m) for _ in range(r)]
                f1 = IntervalUnionStrategy.from_grid(a1, m)
                f2 = IntervalUnionStrategy.from_grid(a2, m)
                u2_direct = F(0)
                for i in range(r):
                    for j in range(r):
                        area = rect_triangle_area(
                            F(i, r), F(i + 1, r), F(j, r), F(j + 1, r)
                        )
                        u2_direct += -F(game.payoff(a1[i], a2[j])) * 2 * area
                _u1, u2 = profile_values(game, f1, f2)
                assert u2 == u2_direct

    def test_behavioral_values_against_direct_double_integral(self):
        rng = random.Random(18)
        m, r = 2, 4
        game = PenniesGame(m)
        for _ in range(8):
            def rows():
                out = []
                for k in range(r):
                    w = F(rng.randint(0, 3), 3)
                    w = min(w, F(1))
                    out.append((F(k + 1, r), (w, 1 - w)))
                return tuple(out)

            rows1, rows2 = rows(), rows()
            u2_direct = F(0)
            for i in range(r):
                for j in range(r):
                    area = rect_triangle_area(F(i, r), F(i + 1, r), F(j, r), F(j + 1, r))
                    w1 = rows1[i][1]
                    w2 = rows2[j][1]
                    blend = sum(
                        -F(game.payoff(x1, x2)) * w1[x1] * w2[x2]
                        for x1 in range(m)
                        for x2 in range(m)
                    )
                    u2_direct += blend * 2 * area
            _u1, u2 = profile_values(game, rows1, rows2)
            assert u2 == u2_direct
