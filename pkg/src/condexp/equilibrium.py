"""Equilibrium computation for games with derived block information.

Block-constant behavioral strategies form a finite-dimensional product of
simplices, one per (player, information block) agent.  The solver works on
that agent form: an exact rational LP for two-player zero-sum games, damped
best-response iteration with rational snapping otherwise, and an exact
support-polish for two-player general-sum games.  Verification is a separate
code path: it integrates pointwise best-response envelopes over the type
space in exact arithmetic and never reuses the solver's internal numbers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .attainable import AtomObstruction
from .errors import AtomObstructionError
from .games import (
    BayesianGame,
    BehavioralStrategy,
    InfoPartition,
    PureStrategy,
    Strategy,
    as_behavioral,
    coarser_info_check,
    derive_interplayer_info,
    entry_product,
    expected_payoff,
    g_conditional,
    interim_affine,
    _opponent_moments,
    strategy_moments,
)
from .piecewise import (
    argmax_segments,
    common_refinement,
    integrate_envelope,
    proportional_subintervals,
)
from .rational_geometry import feasible_combination, simplex_min

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class SolveOptions:
    epsilon: Fraction = Fraction(1, 10**9)
    max_iters: int = 4000
    damping: float = 0.1
    seed: int = 0
    method: str = "auto"  # auto | lp | br | enum
    snap_denominator: int = 64


@dataclass(frozen=True)
class EquilibriumReport:
    mixtures: tuple[tuple[tuple[Fraction, ...], ...], ...]  # player -> block -> weights
    profile: tuple[BehavioralStrategy, ...]
    eps: tuple[Fraction, ...]
    iterations: int
    converged: bool
    method: str
    value: Fraction | None
    coarser: tuple[bool, ...]


class AgentForm:
    """Exact payoff tensors for (player, block) agents."""

    def __init__(self, game: BayesianGame, info: Sequence[InfoPartition]):
        self.game = game
        self.info = info
        n = len(game.players)
        self.others = [[j for j in range(n) if j != i] for i in range(n)]
        # coeff[i][(b, x_i)][(opp_blocks, opp_actions)] -> Fraction
        self.coeff: list[dict] = [dict() for _ in range(n)]
        for i in range(n):
            others = self.others[i]
            for x in game.action_profiles():
                for key in game.unit_tuples():
                    units = game.tuple_units(key)
                    mass = ONE
                    for u in units:
                        mass *= u.mass
                    if mass == 0:
                        continue
                    e = entry_product(game.payoffs[i][x][key], game.density[key])
                    val = mass * e.average(units)
                    if val == 0:
                        continue
                    b = info[i].block_of_unit[key[i]]
                    opp_blocks = tuple(info[j].block_of_unit[key[j]] for j in others)
                    opp_actions = tuple(x[j] for j in others)
                    slot = self.coeff[i].setdefault((b, x[i]), {})
                    slot[(opp_blocks, opp_actions)] = (
                        slot.get((opp_blocks, opp_actions), ZERO) + val
                    )

    def block_counts(self) -> list[int]:
        return [len(part.blocks) for part in self.info]

    def action_counts(self) -> list[int]:
        return [len(p.actions) for p in self.game.players]

    def agent_action_value(self, i: int, b: int, a: int, mixtures) -> Fraction:
        """Mass-weighted payoff of agent (i, b) playing action a."""
        total = ZERO
        for (opp_blocks, opp_actions), c in self.coeff[i].get((b, a), {}).items():
            w = c
            for j, bj, aj in zip(self.others[i], opp_blocks, opp_actions):
                w *= mixtures[j][bj][aj]
                if w == 0:
                    break
            total += w
        return total

    def agent_action_value_float(self, i: int, b: int, a: int, mixtures) -> float:
        total = 0.0
        for (opp_blocks, opp_actions), c in self.coeff[i].get((b, a), {}).items():
            w = float(c)
            for j, bj, aj in zip(self.others[i], opp_blocks, opp_actions):
                w *= mixtures[j][bj][aj]
            total += w
        return total


def mixtures_to_profile(
    game: BayesianGame, info: Sequence[InfoPartition], mixtures
) -> tuple[BehavioralStrategy, ...]:
    """Expand block mixtures into per-cell behavioral strategies."""
    out = []
    for i, spec in enumerate(game.players):
        part = info[i]
        plan: dict[str, object] = {}
        for ci, cell in enumerate(spec.cells):
            cell_units = [
                (idx, u) for idx, u in enumerate(game.units[i]) if u.cell_index == ci
            ]
            if cell.point:
                idx, _ = cell_units[0]
                plan[cell.id] = tuple(mixtures[i][part.block_of_unit[idx]])
                continue
            pieces = []
            for idx, u in cell_units:
                w = tuple(mixtures[i][part.block_of_unit[idx]])
                if pieces and pieces[-1][1] == w:
                    pieces[-1] = (u.hi, w)
                else:
                    pieces.append((u.hi, w))
            plan[cell.id] = tuple(pieces)
        out.append(BehavioralStrategy(plan))
    return tuple(out)


def verify_equilibrium(game: BayesianGame, profile: Sequence[Strategy]) -> tuple[Fraction, ...]:
    """Exact per-player gain of the best pure deviation over the played profile."""
    n = len(game.players)
    eps = []
    for i in range(n):
        spec = game.players[i]
        fb = as_behavioral(spec, profile[i])
        moments = _opponent_moments(game, i, profile)
        m = len(spec.actions)
        total = ZERO
        for idx, unit in enumerate(game.units[i]):
            cell = spec.cells[unit.cell_index]
            forms = [
                interim_affine(game, i, a, idx, profile, moments) for a in range(m)
            ]
            if unit.point:
                w = fb.weights_at(cell, ZERO)
                best = max(f[0] for f in forms)
                played = sum(w[a] * forms[a][0] for a in range(m))
                total += unit.mass * (best - played)
                continue
            best_int = integrate_envelope(forms, unit.lo, unit.hi)
            played_int = ZERO
            bounds = [unit.lo, unit.hi] if unit.lo > 0 else [unit.hi]
            cuts = common_refinement(fb.breakpoints(cell), bounds)
            prev = ZERO
            for hi in cuts:
                lo = prev
                prev = hi
                if hi <= unit.lo or lo >= unit.hi:
                    continue
                w = fb.weights_at(cell, lo)
                mid = (lo + hi) / 2
                played_int += (hi - lo) * sum(
                    w[a] * (forms[a][0] + forms[a][1] * mid) for a in range(m)
                )
            total += cell.mass * (best_int - played_int)
        eps.append(total)
    return tuple(eps)


def improving_deviation(
    game: BayesianGame, profile: Sequence[Strategy], i: int
) -> tuple[PureStrategy, Fraction]:
    """Pointwise best-response strategy for player i and its exact gain."""
    spec = game.players[i]
    moments = _opponent_moments(game, i, profile)
    m = len(spec.actions)
    plan: dict[str, object] = {}
    for ci, cell in enumerate(spec.cells):
        cell_units = [
            (idx, u) for idx, u in enumerate(game.units[i]) if u.cell_index == ci
        ]
        if cell.point:
            idx, _u = cell_units[0]
            forms = [interim_affine(game, i, a, idx, profile, moments) for a in range(m)]
            values = [f[0] for f in forms]
            plan[cell.id] = max(range(m), key=lambda a: (values[a], -a))
            continue
        pieces: list[tuple[Fraction, int]] = []
        for idx, u in cell_units:
            forms = [interim_affine(game, i, a, idx, profile, moments) for a in range(m)]
            for _lo, hi, winners in argmax_segments(forms, u.lo, u.hi):
                k = winners[0]
                if pieces and pieces[-1][1] == k:
                    pieces[-1] = (hi, k)
                else:
                    pieces.append((hi, k))
        plan[cell.id] = tuple(pieces)
    deviation = PureStrategy(plan)
    swapped = list(profile)
    swapped[i] = deviation
    gain = expected_payoff(game, swapped)[i] - expected_payoff(game, profile)[i]
    return deviation, gain


# -- solvers ------------------------------------------------------------------


def _uniform_mixtures(agent_form: AgentForm):
    out = []
    for i, part in enumerate(agent_form.info):
        m = agent_form.action_counts()[i]
        out.append([[Fraction(1, m) for _ in range(m)] for _ in part.blocks])
    return out


def _solve_lp_zero_sum(agent_form: AgentForm):
    """Exact minimax LP on the stacked block strategies of both players."""
    info = agent_form.info
    m1, m2 = agent_form.action_counts()
    B1, B2 = agent_form.block_counts()
    pairs1 = [(b, a) for b in range(B1) for a in range(m1)]
    pairs2 = [(b, a) for b in range(B2) for a in range(m2)]
    M = {}
    for (b1, a1) in pairs1:
        slot = agent_form.coeff[0].get((b1, a1), {})
        for (b2, a2) in pairs2:
            M[(b1, a1, b2, a2)] = slot.get(((b2,), (a2,)), ZERO)

    def solve_side(rows, cols, payoff):
        # maximize sum_c v_c  s.t.  sum_r payoff[r, c] g_r >= v_c, per-block simplex
        col_blocks = sorted({c[0] for c in cols})
        nv = len(col_blocks)
        ng = len(rows)
        ns = len(cols)
        nvar = ng + 2 * nv + ns
        cost = [ZERO] * ng + [-ONE] * nv + [ONE] * nv + [ZERO] * ns
        A = []
        b = []
        for ci, (cb, ca) in enumerate(cols):
            row = [ZERO] * nvar
            for ri, r in enumerate(rows):
                row[ri] = payoff(r, (cb, ca))
            vi = col_blocks.index(cb)
            row[ng + vi] = -ONE
            row[ng + nv + vi] = ONE
            row[ng + 2 * nv + ci] = -ONE
            A.append(row)
            b.append(ZERO)
        row_blocks = sorted({r[0] for r in rows})
        for rb in row_blocks:
            row = [ZERO] * nvar
            for ri, r in enumerate(rows):
                if r[0] == rb:
                    row[ri] = ONE
            A.append(row)
            b.append(ONE)
        value, x = simplex_min(cost, A, b)
        g = {r: x[ri] for ri, r in enumerate(rows)}
        return -value, g

    value1, g1 = solve_side(pairs1, pairs2, lambda r, c: M[(r[0], r[1], c[0], c[1])])
    value2, g2 = solve_side(pairs2, pairs1, lambda r, c: -M[(c[0], c[1], r[0], r[1])])
    assert value1 == -value2
    mixtures = [
        [[g1[(b, a)] for a in range(m1)] for b in range(B1)],
        [[g2[(b, a)] for a in range(m2)] for b in range(B2)],
    ]
    return mixtures, value1


def _best_response(agent_form: AgentForm, mixtures_float):
    out = []
    for i, part in enumerate(agent_form.info):
        m = agent_form.action_counts()[i]
        rows = []
        for b in range(len(part.blocks)):
            vals = [
                agent_form.agent_action_value_float(i, b, a, mixtures_float)
                for a in range(m)
            ]
            best = max(vals)
            k = vals.index(best)
            rows.append([1.0 if a == k else 0.0 for a in range(m)])
        out.append(rows)
    return out


def _br_regret(agent_form: AgentForm, mixtures_float) -> float:
    worst = 0.0
    for i, part in enumerate(agent_form.info):
        m = agent_form.action_counts()[i]
        for b in range(len(part.blocks)):
            vals = [
                agent_form.agent_action_value_float(i, b, a, mixtures_float)
                for a in range(m)
            ]
            played = sum(mixtures_float[i][b][a] * vals[a] for a in range(m))
            worst = max(worst, max(vals) - played)
    return worst


def _snap_mixtures(mixtures_float, denominator: int):
    out = []
    for rows in mixtures_float:
        block_rows = []
        for row in rows:
            snapped = [max(ZERO, Fraction(w).limit_denominator(denominator)) for w in row]
            total = sum(snapped, ZERO)
            if total == 0:
                snapped = [ONE] + [ZERO] * (len(row) - 1)
                total = ONE
            block_rows.append([w / total for w in snapped])
        out.append(block_rows)
    return out


def _solve_br(agent_form: AgentForm, options: SolveOptions):
    mixtures = [
        [[1.0 / m for _ in range(m)] for _ in part.blocks]
        for part, m in zip(agent_form.info, agent_form.action_counts())
    ]
    eta = options.damping
    iterations = 0
    for iterations in range(1, options.max_iters + 1):
        target = _best_response(agent_form, mixtures)
        new = [
            [
                [(1 - eta) * w + eta * t for w, t in zip(row, trow)]
                for row, trow in zip(rows, trows)
            ]
            for rows, trows in zip(mixtures, target)
        ]
        mixtures = new
        if iterations % 25 == 0 and _br_regret(agent_form, mixtures) < 1e-12:
            break
    snapped = _snap_mixtures(mixtures, options.snap_denominator)
    return snapped, iterations


def _support_polish(agent_form: AgentForm, supports):
    """Exact block mixtures matching given supports, or None (2 players)."""
    m1, m2 = agent_form.action_counts()
    B1, B2 = agent_form.block_counts()
    gvars = []  # (player, block, action)
    for b in range(B1):
        gvars.extend((0, b, a) for a in supports[0][b])
    for b in range(B2):
        gvars.extend((1, b, a) for a in supports[1][b])
    vvars = [(0, b) for b in range(B1)] + [(1, b) for b in range(B2)]
    slacks = []
    rows = []
    rhs = []

    def gv_index(p, b, a):
        return gvars.index((p, b, a))

    nv = len(gvars) + 2 * len(vvars)
    eq_rows = []
    for i, (blocks, actions) in enumerate(((range(B1), range(m1)), (range(B2), range(m2)))):
        other = 1 - i
        for b in blocks:
            for a in actions:
                coeffs = dict()
                slot = agent_form.coeff[i].get((b, a), {})
                for (opp_blocks, opp_actions), c in slot.items():
                    ob, oa = opp_blocks[0], opp_actions[0]
                    if oa in supports[other][ob]:
                        coeffs[(other, ob, oa)] = coeffs.get((other, ob, oa), ZERO) + c
                vi = vvars.index((i, b))
                in_support = a in supports[i][b]
                eq_rows.append((coeffs, vi, in_support))
    for coeffs, vi, in_support in eq_rows:
        row = [ZERO] * nv
        for key, c in coeffs.items():
            row[gv_index(*key)] = c
        row[len(gvars) + vi] = -ONE
        row[len(gvars) + len(vvars) + vi] = ONE
        if not in_support:
            slacks.append(len(rows))
        rows.append(row)
        rhs.append(ZERO)
    for p, B, m in ((0, B1, m1), (1, B2, m2)):
        for b in range(B):
            row = [ZERO] * nv
            for a in supports[p][b]:
                row[gv_index(p, b, a)] = ONE
            rows.append(row)
            rhs.append(ONE)
    # append slack columns for the off-support inequalities
    total_vars = nv + len(slacks)
    full = []
    for ri, row in enumerate(rows):
        extra = [ZERO] * len(slacks)
        if ri in slacks:
            extra[slacks.index(ri)] = ONE
        full.append(row + extra)
    sol = feasible_combination(full, rhs)
    if sol is None:
        return None
    mixtures = [
        [[ZERO] * m1 for _ in range(B1)],
        [[ZERO] * m2 for _ in range(B2)],
    ]
    for vi, (p, b, a) in enumerate(gvars):
        mixtures[p][b][a] = sol[vi]
    return mixtures


def _solve_enum(agent_form: AgentForm, options: SolveOptions):
    """Support search for two-player agent forms, seeded by a float run."""
    guess, iters = _solve_br(agent_form, options)
    m1, m2 = agent_form.action_counts()
    supports_guess = [
        [tuple(a for a in range(m) if row[a] > 0) or tuple(range(m)) for row in rows]
        for rows, m in zip(guess, (m1, m2))
    ]
    tried = 0
    candidates = [supports_guess]
    all_subsets = [
        [
            tuple(sorted(s))
            for size in range(m, 0, -1)
            for s in itertools.combinations(range(m), size)
        ]
        for m in (m1, m2)
    ]
    agents = [(0, b) for b in range(agent_form.block_counts()[0])] + [
        (1, b) for b in range(agent_form.block_counts()[1])
    ]
    if len(agents) <= 4:
        per_agent = [all_subsets[p] for p, _b in agents]
        for combo in itertools.product(*per_agent):
            sup = [[], []]
            for (p, _b), s in zip(agents, combo):
                sup[p].append(s)
            candidates.append(sup)
    for supports in candidates:
        tried += 1
        if tried > 3000:
            break
        mixtures = _support_polish(agent_form, supports)
        if mixtures is not None:
            return mixtures, iters + tried
    return guess, iters + tried


def solve_behavioral(game: BayesianGame, options: SolveOptions | None = None) -> EquilibriumReport:
    """Find a block-constant behavioral profile with small verified gain.

    The exact LP handles two-player zero-sum agent forms; damped best response
    plus rational snapping handles the rest, with an exact support polish for
    two-player general-sum games.  Non-convergence is reported, not raised.
    """
    options = options or SolveOptions()
    info = derive_interplayer_info(game)
    coarser = tuple(c.passes for c in coarser_info_check(game, info))
    agent_form = AgentForm(game, info)
    method = options.method
    if method == "auto":
        if len(game.players) == 2 and game.is_zero_sum():
            method = "lp"
        elif len(game.players) == 2:
            method = "enum"
        else:
            method = "br"
    value = None
    iterations = 0
    if method == "lp":
        mixtures, value = _solve_lp_zero_sum(agent_form)
    elif method == "enum":
        mixtures, iterations = _solve_enum(agent_form, options)
    else:
        mixtures, iterations = _solve_br(agent_form, options)
    profile = mixtures_to_profile(game, info, mixtures)
    eps = verify_equilibrium(game, profile)
    if max(eps) > options.epsilon and method == "br" and len(game.players) == 2:
        mixtures2, extra = _solve_enum(agent_form, options)
        profile2 = mixtures_to_profile(game, info, mixtures2)
        eps2 = verify_equilibrium(game, profile2)
        if max(eps2) < max(eps):
            mixtures, profile, eps = mixtures2, profile2, eps2
            method = "enum"
        iterations += extra
    return EquilibriumReport(
        mixtures=tuple(tuple(tuple(w) for w in rows) for rows in mixtures),
        profile=profile,
        eps=eps,
        iterations=iterations,
        converged=max(eps) <= options.epsilon,
        method=method,
        value=value,
        coarser=coarser,
    )


# -- purification of solved equilibria ---------------------------------------


@dataclass(frozen=True)
class PurifiedEquilibrium:
    profile: tuple[PureStrategy, ...]
    eps: tuple[Fraction, ...]
    mixtures_preserved: bool
    payoffs_preserved: bool


def purify_equilibrium(
    game: BayesianGame, report: EquilibriumReport
) -> PurifiedEquilibrium:
    """Split each block mixture into a pure strategy with the same block
    conditional expectation, preserving everyone's payoffs exactly.

    Sub-intervals follow action order left to right; units whose interim
    payoff is affine in the own coordinate get the centroid-preserving
    symmetric split so the own payoff integral survives unchanged.
    """
    info = derive_interplayer_info(game)
    checks = coarser_info_check(game, info)
    for i, c in enumerate(checks):
        if not c.passes:
            raise AtomObstructionError(
                AtomObstruction(c.witness or f"player {i}", None, "coarser information fails")
            )
    behavioral = report.profile
    pures = []
    for i, spec in enumerate(game.players):
        part = info[i]
        m = len(spec.actions)
        moments = _opponent_moments(game, i, behavioral)
        plan: dict[str, object] = {}
        for ci, cell in enumerate(spec.cells):
            cell_units = [
                (idx, u) for idx, u in enumerate(game.units[i]) if u.cell_index == ci
            ]
            pieces: list[tuple[Fraction, int]] = []
            for idx, u in cell_units:
                weights = report.mixtures[i][part.block_of_unit[idx]]
                forms = [
                    interim_affine(game, i, a, idx, behavioral, moments)
                    for a in range(m)
                ]
                symmetric = any(f[1] != 0 for f in forms)
                for _a, hi, k in proportional_subintervals(u.lo, u.hi, weights, symmetric):
                    if pieces and pieces[-1][1] == k:
                        pieces[-1] = (hi, k)
                    else:
                        pieces.append((hi, k))
            plan[cell.id] = tuple(pieces)
        pures.append(PureStrategy(plan))
    pures = tuple(pures)
    eps = verify_equilibrium(game, pures)
    mixtures_ok = True
    for i, spec in enumerate(game.players):
        part = info[i]
        cond = g_conditional(game, info, i, pures[i])
        moments = strategy_moments(spec, game.units[i], cond)
        for b, block in enumerate(part.blocks):
            mass = part.block_masses[b]
            for a in range(len(spec.actions)):
                got = sum((moments[u][0][a] for u in block), ZERO) / mass
                if got != report.mixtures[i][b][a]:
                    mixtures_ok = False
    payoffs_ok = expected_payoff(game, pures) == expected_payoff(game, behavioral)
    return PurifiedEquilibrium(
        profile=pures,
        eps=eps,
        mixtures_preserved=mixtures_ok,
        payoffs_preserved=payoffs_ok,
    )
