"""Cyclic matching pennies under the triangular prior, in closed form.

The joint type distribution is uniform on the triangle 0 <= l1 <= l2 <= 1.
Its density against the product of its own marginals is 1/(2(1-l1)l2), and
the density-weighted interim integrals collapse to plain Lebesgue measures:
integrating the conditional density over a player-1 set E at a player-2 type
l2 gives measure(E intersect [0, l2]) / l2, and symmetrically
measure(E intersect [l1, 1]) / (1 - l1) on the other side.  (The cancellation
is literal: the conditional density times the opposing marginal density is
the indicator of the triangle.)  Everything downstream is therefore exact
piecewise-affine integration: deviation gains, balance defects, and the
profile search that certifies no pure profile is close to equilibrium.

Both variants, the type-irrelevant game with the triangular prior and the
independent-types game with density-weighted payoffs, share these integrals
entry for entry, so one arithmetic serves both.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import BoundaryPoint, BudgetExceeded, SchemaError
from .factories import cyclic_payoff
from .piecewise import (
    integrate_affine,
    integrate_envelope,
    intervals_clip,
    intervals_measure,
    normalize_intervals,
)

ZERO = Fraction(0)
ONE = Fraction(1)

VARIANTS = ("type-irrelevant", "independent-types")


class TrianglePrior:
    """The uniform distribution on the triangle 0 <= l1 <= l2 <= 1."""

    @staticmethod
    def density(l1: Fraction, l2: Fraction) -> Fraction:
        return Fraction(2) if 0 <= l1 <= l2 <= 1 else ZERO

    @staticmethod
    def marginal1_density(l1: Fraction) -> Fraction:
        return 2 * (1 - l1)

    @staticmethod
    def marginal2_density(l2: Fraction) -> Fraction:
        return 2 * l2

    @staticmethod
    def conditional_density(l1: Fraction, l2: Fraction) -> Fraction:
        """Density of the prior against the product of its marginals."""
        if not (0 < l1 <= l2 < 1):
            return ZERO
        return Fraction(1) / (2 * (1 - l1) * l2)

    @staticmethod
    def reconstruction_identity(l1: Fraction, l2: Fraction) -> bool:
        """conditional * marginal1 * marginal2 == joint, pointwise."""
        lhs = (
            TrianglePrior.conditional_density(l1, l2)
            * TrianglePrior.marginal1_density(l1)
            * TrianglePrior.marginal2_density(l2)
        )
        return lhs == TrianglePrior.density(l1, l2) or not (0 < l1 <= l2 < 1)

    @staticmethod
    def total_mass() -> Fraction:
        # integral of the constant 2 over the triangle, exactly
        return Fraction(2) * Fraction(1, 2)

    @staticmethod
    def marginal_masses() -> tuple[Fraction, Fraction]:
        # polynomials 2(1-l) and 2l integrated over [0, 1]
        return ONE, ONE


@dataclass(frozen=True)
class PenniesGame:
    m: int = 2
    variant: str = "type-irrelevant"

    def __post_init__(self):
        if self.m < 2:
            raise SchemaError("m", "need at least two actions")
        if self.variant not in VARIANTS:
            raise SchemaError("variant", f"one of {VARIANTS}")

    def payoff(self, row: int, col: int) -> int:
        return cyclic_payoff(self.m, row, col)


@dataclass(frozen=True)
class IntervalUnionStrategy:
    """A pure strategy on [0, 1]: per action, a finite union of intervals."""

    actions: tuple[tuple[tuple[Fraction, Fraction], ...], ...]

    def __post_init__(self):
        cover = []
        for intervals in self.actions:
            cover.extend(intervals)
        merged = normalize_intervals(cover)
        total = intervals_measure(merged)
        raw_total = sum(
            (hi - lo for intervals in self.actions for lo, hi in intervals), ZERO
        )
        if merged != ((ZERO, ONE),) or raw_total != 1:
            raise SchemaError("actions", "interval unions must partition [0, 1]")

    @classmethod
    def from_pieces(cls, pieces: Sequence[tuple[Fraction, int]], m: int):
        """Build from [(upto, action)] step form."""
        buckets: list[list[tuple[Fraction, Fraction]]] = [[] for _ in range(m)]
        lo = ZERO
        for upto, action in pieces:
            buckets[action].append((lo, upto))
            lo = upto
        return cls(tuple(tuple(normalize_intervals(b)) for b in buckets))

    @classmethod
    def from_grid(cls, assignment: Sequence[int], m: int):
        r = len(assignment)
        pieces = [(Fraction(k + 1, r), a) for k, a in enumerate(assignment)]
        merged: list[tuple[Fraction, int]] = []
        for upto, a in pieces:
            if merged and merged[-1][1] == a:
                merged[-1] = (upto, a)
            else:
                merged.append((upto, a))
        return cls.from_pieces(merged, m)

    def weight_rows(self) -> list[tuple[Fraction, tuple[Fraction, ...]]]:
        """One-hot piecewise weights, [(upto, weights)])."""
        m = len(self.actions)
        points = {ONE}
        for intervals in self.actions:
            for lo, hi in intervals:
                points.update((lo, hi))
        points.discard(ZERO)
        rows = []
        prev = ZERO
        for upto in sorted(points):
            a = self.action_at(prev)
            rows.append(
                (upto, tuple(ONE if j == a else ZERO for j in range(m)))
            )
            prev = upto
        return rows

    def action_at(self, t: Fraction) -> int:
        for a, intervals in enumerate(self.actions):
            for lo, hi in intervals:
                if lo <= t < hi:
                    return a
        return len(self.actions) - 1


BehavioralRows = Sequence[tuple[Fraction, tuple[Fraction, ...]]]


def uniform_rows(m: int) -> tuple[tuple[Fraction, tuple[Fraction, ...]], ...]:
    return ((ONE, tuple(Fraction(1, m) for _ in range(m))),)


def _as_rows(strategy, m: int) -> BehavioralRows:
    if isinstance(strategy, IntervalUnionStrategy):
        return strategy.weight_rows()
    return strategy


def _validate_rows(rows: BehavioralRows, m: int) -> None:
    prev = ZERO
    for upto, w in rows:
        if upto <= prev:
            raise SchemaError("strategy", "breakpoints must increase")
        if len(w) != m or any(x < 0 for x in w) or sum(w) != 1:
            raise SchemaError("strategy", "weights must be a distribution")
        prev = upto
    if prev != 1:
        raise SchemaError("strategy", "pieces must end at 1")


def _weights_at(rows: BehavioralRows, t: Fraction):
    for upto, w in rows:
        if t < upto:
            return w
    return rows[-1][1]


def _cumulative_segments(rows: BehavioralRows, m: int):
    """Affine forms of eta_j(l) = integral_0^l weight_j on each segment."""
    segments = []
    acc = [ZERO] * m
    prev = ZERO
    for upto, w in rows:
        forms = tuple((acc[j] - w[j] * prev, w[j]) for j in range(m))
        segments.append((prev, upto, forms))
        for j in range(m):
            acc[j] += w[j] * (upto - prev)
        prev = upto
    return segments, acc


def _above_segments(rows: BehavioralRows, m: int):
    """Affine forms of eta'_j(l) = integral_l^1 weight_j on each segment."""
    segments, totals = _cumulative_segments(rows, m)
    out = []
    for lo, hi, forms in segments:
        out.append(
            (lo, hi, tuple((totals[j] - a, -b) for j, (a, b) in enumerate(forms)))
        )
    return out


def interim_weight(
    intervals: Sequence[tuple[Fraction, Fraction]], point: Fraction, side: int = 2
) -> Fraction:
    """Conditional weight of a set of the opposing player's types.

    Side 2 conditions player 2 at l2 on player-1 sets; side 1 conditions
    player 1 at l1 on player-2 sets.  Exact via the triangular cancellation.
    """
    point = Fraction(point)
    if point <= 0 or point >= 1:
        raise BoundaryPoint(f"conditioning point {point} is on the boundary")
    ivs = normalize_intervals(intervals)
    if side == 2:
        return intervals_measure(intervals_clip(ivs, ZERO, point)) / point
    if side == 1:
        return intervals_measure(intervals_clip(ivs, point, ONE)) / (1 - point)
    raise SchemaError("side", "must be 1 or 2")


def _refined(segments_a, segments_b):
    cuts = sorted({hi for _lo, hi, _f in segments_a} | {hi for _lo, hi, _f in segments_b})
    prev = ZERO
    for hi in cuts:
        fa = next(f for lo2, hi2, f in segments_a if lo2 <= prev < hi2)
        fb = next(f for lo2, hi2, f in segments_b if lo2 <= prev < hi2)
        yield prev, hi, fa, fb
        prev = hi


def _gain_side2(game: PenniesGame, rows1: BehavioralRows, rows2: BehavioralRows):
    """(best-response value, played value) for player 2, exact.

    V_2(column c, l2) scaled by the marginal density is
    2 * (eta_{c-1}(l2) - eta_c(l2)) in player-1 cumulative measures.
    """
    m = game.m
    segs1, _ = _cumulative_segments(rows1, m)
    segs2, _ = _cumulative_segments(rows2, m)
    best = ZERO
    played = ZERO
    for lo, hi, forms1, w2forms in _refined(segs1, segs2):
        g_forms = [
            (
                forms1[(c - 1) % m][0] - forms1[c][0],
                forms1[(c - 1) % m][1] - forms1[c][1],
            )
            for c in range(m)
        ]
        best += 2 * integrate_envelope(g_forms, lo, hi)
        w2 = _weights_at(rows2, lo)
        for c in range(m):
            played += 2 * w2[c] * integrate_affine(g_forms[c], lo, hi)
    return best, played


def _gain_side1(game: PenniesGame, rows1: BehavioralRows, rows2: BehavioralRows):
    """(best-response value, played value) for player 1, exact.

    V_1(row r, l1) scaled by the marginal density is
    2 * (eta'_r(l1) - eta'_{r+1}(l1)) in player-2 above-cumulative measures.
    """
    m = game.m
    segs2 = _above_segments(rows2, m)
    segs1 = _above_segments(rows1, m)
    best = ZERO
    played = ZERO
    for lo, hi, forms1, forms2 in _refined(segs1, segs2):
        g_forms = [
            (
                forms2[r][0] - forms2[(r + 1) % m][0],
                forms2[r][1] - forms2[(r + 1) % m][1],
            )
            for r in range(m)
        ]
        best += 2 * integrate_envelope(g_forms, lo, hi)
        w1 = _weights_at(rows1, lo)
        for r in range(m):
            played += 2 * w1[r] * integrate_affine(g_forms[r], lo, hi)
    return best, played


def profile_values(game: PenniesGame, s1, s2) -> tuple[Fraction, Fraction]:
    """Ex-ante payoffs (U1, U2); the game is zero sum."""
    rows1, rows2 = _as_rows(s1, game.m), _as_rows(s2, game.m)
    _validate_rows(rows1, game.m)
    _validate_rows(rows2, game.m)
    _b1, played1 = _gain_side1(game, rows1, rows2)
    _b2, played2 = _gain_side2(game, rows1, rows2)
    assert played1 == -played2
    return played1, played2


def behavioral_profile_gain(game: PenniesGame, s1, s2) -> tuple[Fraction, Fraction]:
    """Exact best-deviation gains of a (possibly behavioral) profile."""
    rows1, rows2 = _as_rows(s1, game.m), _as_rows(s2, game.m)
    _validate_rows(rows1, game.m)
    _validate_rows(rows2, game.m)
    best1, played1 = _gain_side1(game, rows1, rows2)
    best2, played2 = _gain_side2(game, rows1, rows2)
    return best1 - played1, best2 - played2


def pure_profile_gain(
    game: PenniesGame, f1: IntervalUnionStrategy, f2: IntervalUnionStrategy
) -> tuple[Fraction, Fraction]:
    return behavioral_profile_gain(game, f1, f2)


def cyclic_deviation(game: PenniesGame, opponent: IntervalUnionStrategy, side: int = 2):
    """The cyclic better-response against an opponent's interval strategy.

    Where the opponent's set for a_j carries strictly more conditional weight
    than the set for a_{j+1} (smallest such j), player 2 answers a_{j+1} and
    player 1 answers a_j; where no strict comparison holds, the first action.
    This guarantees a pointwise nonnegative payoff for the deviator.
    """
    m = game.m
    rows = _as_rows(opponent, m)
    if side == 2:
        segs, _ = _cumulative_segments(rows, m)
    else:
        segs = _above_segments(rows, m)
    pieces: list[tuple[Fraction, int]] = []
    for lo, hi, forms in segs:
        diffs = [
            (
                forms[j][0] - forms[(j + 1) % m][0],
                forms[j][1] - forms[(j + 1) % m][1],
            )
            for j in range(m)
        ]
        cuts = {lo, hi}
        for a, b in diffs:
            if b != 0:
                t = -a / b
                if lo < t < hi:
                    cuts.add(t)
        points = sorted(cuts)
        for s0, s1 in zip(points, points[1:]):
            mid = (s0 + s1) / 2
            action = 0
            for j in range(m):
                a, b = diffs[j]
                if a + b * mid > 0:
                    action = (j + 1) % m if side == 2 else j
                    break
            if pieces and pieces[-1][1] == action:
                pieces[-1] = (s1, action)
            else:
                pieces.append((s1, action))
    return IntervalUnionStrategy.from_pieces(pieces, m)


def balance_defect(partition, side: int = 2, m: int | None = None) -> Fraction:
    """L1 defect of the equal-conditional-weights identity, exact.

    Zero only when every set carries conditional weight 1/m at almost every
    opposing type; for interval unions with m >= 2 it is strictly positive
    because near the relevant endpoint each set has conditional weight 0 or 1.
    """
    if isinstance(partition, IntervalUnionStrategy):
        rows = partition.weight_rows()
        m = len(partition.actions)
    else:
        rows = partition
        if m is None:
            m = len(rows[0][1])
    _validate_rows(rows, m)
    target = Fraction(1, m)
    if side == 2:
        segs, _ = _cumulative_segments(rows, m)
        baseline = lambda: (ZERO, target)  # l/m
    else:
        segs = _above_segments(rows, m)
        baseline = lambda: (target, -target)  # (1-l)/m
    total = ZERO
    for lo, hi, forms in segs:
        base_a, base_b = baseline()
        abs_forms = []
        for a, b in forms:
            abs_forms.append((a - base_a, b - base_b))
            abs_forms.append((base_a - a, base_b - b))
        total += 2 * integrate_envelope(abs_forms, lo, hi)
    return total


# -- grid search --------------------------------------------------------------


@dataclass(frozen=True)
class SearchReport:
    m: int
    variant: str
    budget: int
    grid: int
    epsilon: Fraction
    strategies: int
    pairs: int
    min_gain: Fraction
    argmin: tuple[tuple[int, ...], tuple[int, ...]]
    uniform_gains: tuple[Fraction, Fraction]
    passed: bool
    exhaustive: bool = True


def grid_strategies(m: int, r: int, budget: int) -> list[tuple[int, ...]]:
    """All r-grid step strategies with at most ``budget`` action changes."""
    out = []
    for nb in range(0, budget + 1):
        for cuts in itertools.combinations(range(1, r), nb):
            bounds = (0,) + cuts + (r,)
            for seq in _changing_sequences(m, nb + 1):
                arr = []
                for (a, b), action in zip(zip(bounds, bounds[1:]), seq):
                    arr.extend([action] * (b - a))
                out.append(tuple(arr))
    return sorted(set(out))


def _changing_sequences(m: int, length: int):
    for seq in itertools.product(range(m), repeat=length):
        if all(seq[i] != seq[i + 1] for i in range(length - 1)):
            yield seq


def _float_gain_matrices(m: int, r: int, strategies: list[tuple[int, ...]]):
    """gain2[i1, i2] and gain1[i1, i2] for all strategy pairs, float lane."""
    S = len(strategies)
    arrs = np.array(strategies, dtype=np.int64)  # (S, r)
    onehot = np.zeros((S, r, m))
    for j in range(m):
        onehot[:, :, j] = arrs == j
    cums = np.zeros((S, r + 1, m))
    cums[:, 1:, :] = np.cumsum(onehot, axis=1) / r

    def g2_forms(c):  # player-2 candidate c: eta_{c-1} - eta_c, from below
        return cums[:, :, (c - 1) % m] - cums[:, :, c]

    def g1_forms(rr):  # player-1 candidate r: eta'_r - eta'_{r+1}, from above
        above = cums[:, -1:, :] - cums
        return above[:, :, rr] - above[:, :, (rr + 1) % m]

    def matrices(forms_fn):
        G = np.stack([forms_fn(c) for c in range(m)], axis=2)  # (S, r+1, m)
        G_lo = G[:, :-1, :]
        G_hi = G[:, 1:, :]
        brv = np.zeros(S)
        for s in range(S):
            total = 0.0
            for cell in range(r):
                total += _env01(G_lo[s, cell], G_hi[s, cell]) / r
            brv[s] = 2.0 * total
        g_avg = (G_lo + G_hi) / 2.0  # (S, r, m)
        return brv, g_avg

    brv2, g2_avg = matrices(g2_forms)
    brv1, g1_avg = matrices(g1_forms)

    cells = np.arange(r)
    gain2 = np.empty((S, S))
    gain1 = np.empty((S, S))
    for i1 in range(S):
        played2 = (2.0 / r) * g2_avg[i1][cells[None, :], arrs].sum(axis=1)
        gain2[i1, :] = brv2[i1] - played2
    for i2 in range(S):
        played1 = (2.0 / r) * g1_avg[i2][cells[None, :], arrs].sum(axis=1)
        gain1[:, i2] = brv1[i2] - played1
    return gain1, gain2


def _env01(lo_vals, hi_vals) -> float:
    """Integral over [0, 1] of the max of affine forms given endpoint values."""
    n = len(lo_vals)
    cuts = {0.0, 1.0}
    for a in range(n):
        for b in range(a + 1, n):
            d0 = lo_vals[a] - lo_vals[b]
            d1 = hi_vals[a] - hi_vals[b]
            if d0 * d1 < 0:
                cuts.add(d0 / (d0 - d1))
    pts = sorted(cuts)
    total = 0.0
    for s0, s1 in zip(pts, pts[1:]):
        smid = (s0 + s1) / 2
        vals = lo_vals + smid * (hi_vals - lo_vals)
        k = int(np.argmax(vals))
        v0 = lo_vals[k] + s0 * (hi_vals[k] - lo_vals[k])
        v1 = lo_vals[k] + s1 * (hi_vals[k] - lo_vals[k])
        total += (s1 - s0) * (v0 + v1) / 2
    return float(total)


def no_pure_equilibrium_search(
    game: PenniesGame,
    budget: int = 2,
    grid: int = 8,
    epsilon: Fraction = Fraction(1, 100),
    max_strategies: int = 600,
    seed: int = 0,
) -> SearchReport:
    """Scan grid profiles and certify the minimum deviation gain.

    The scan is exhaustive while the strategy family fits max_strategies;
    beyond that a seeded sample is drawn (always keeping the constant
    strategies).  A float lane scans every pair; every pair within float
    tolerance of the minimum is re-evaluated in exact arithmetic, so the
    reported minimum gain is an exact rational.  PASS means it exceeds
    epsilon, witnessing that no scanned pure profile is close to equilibrium.
    """
    if budget > 8 or grid > 64:
        raise BudgetExceeded("supported desk scale: budget <= 8, grid <= 64")
    epsilon = Fraction(epsilon)
    strategies = grid_strategies(game.m, grid, budget)
    exhaustive = len(strategies) <= max_strategies
    if not exhaustive:
        rng = random.Random(seed)
        constant = [s for s in strategies if len(set(s)) == 1]
        rest = [s for s in strategies if len(set(s)) > 1]
        sampled = rng.sample(rest, max_strategies - len(constant))
        strategies = sorted(set(constant + sampled))
    gain1, gain2 = _float_gain_matrices(game.m, grid, strategies)
    worst = np.maximum(gain1, gain2)
    float_min = float(worst.min())
    window = 2e-9
    near = np.argwhere(worst <= float_min + window)
    best_exact = None
    best_pair = None
    for i1, i2 in near:
        f1 = IntervalUnionStrategy.from_grid(strategies[i1], game.m)
        f2 = IntervalUnionStrategy.from_grid(strategies[i2], game.m)
        g1, g2 = pure_profile_gain(game, f1, f2)
        exact = max(g1, g2)
        if best_exact is None or exact < best_exact:
            best_exact = exact
            best_pair = (strategies[i1], strategies[i2])
        assert abs(float(exact) - float(worst[i1, i2])) < 1e-9
    uniform = behavioral_profile_gain(game, uniform_rows(game.m), uniform_rows(game.m))
    return SearchReport(
        m=game.m,
        variant=game.variant,
        budget=budget,
        grid=grid,
        epsilon=epsilon,
        strategies=len(strategies),
        pairs=len(strategies) ** 2,
        min_gain=best_exact,
        argmin=best_pair,
        uniform_gains=uniform,
        passed=best_exact > epsilon,
        exhaustive=exhaustive,
    )


def interim_weight_rows(
    f1: IntervalUnionStrategy, samples: int = 99
) -> list[tuple[float, list[float]]]:
    """(l2, conditional weights per action) rows for plotting."""
    m = len(f1.actions)
    out = []
    for k in range(1, samples + 1):
        l2 = Fraction(k, samples + 1)
        weights = [float(interim_weight(f1.actions[j], l2, side=2)) for j in range(m)]
        out.append((float(l2), weights))
    return out
