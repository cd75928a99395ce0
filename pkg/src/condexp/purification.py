"""Strong purification of behavioral profiles and its equivalence audits.

Purifying player i replaces the mixture on each refinement piece by a
proportional split into pure actions.  Per piece this preserves the action
distribution, the support, and the played-payoff integral (symmetric splits
cover units whose interim payoff is affine in the own coordinate).  Because
opponents react to a strategy only through its block conditional expectation,
which the split preserves exactly, the purified profile is payoff equivalent
against every deviation, distribution equivalent, and belief consistent, with
all residuals exactly zero in rational arithmetic.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .attainable import AtomObstruction
from .errors import AtomObstructionError
from .games import (
    BayesianGame,
    BehavioralStrategy,
    PureStrategy,
    Strategy,
    as_behavioral,
    coarser_info_check,
    derive_interplayer_info,
    expected_payoff,
    interim_affine,
    player_payoff,
    strategy_moments,
    _opponent_moments,
)
from .piecewise import common_refinement, proportional_subintervals

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class BeliefViolation:
    player: int
    cell_id: str
    lo: Fraction
    hi: Fraction
    action: int


@dataclass(frozen=True)
class EquivalenceReport:
    payoff_residuals: tuple[Fraction, ...]
    distribution_defects: tuple[tuple[Fraction, ...], ...]
    strong_residuals: tuple[tuple[Fraction, ...], ...]  # per player, per deviation
    belief_violation_mass: tuple[Fraction, ...]
    belief_violations: tuple[BeliefViolation, ...]

    @property
    def all_zero(self) -> bool:
        return (
            all(r == 0 for r in self.payoff_residuals)
            and all(d == 0 for row in self.distribution_defects for d in row)
            and all(r == 0 for row in self.strong_residuals for r in row)
            and all(m == 0 for m in self.belief_violation_mass)
        )


@dataclass(frozen=True)
class PurificationCertificate:
    profile: tuple[PureStrategy, ...]
    report: EquivalenceReport
    block_identity: tuple[bool, ...]  # per player: E(g|blocks) == E(f|blocks)


def strong_purify(
    game: BayesianGame,
    profile: Sequence[Strategy],
    deviation_samples: int = 16,
    seed: int = 0,
) -> PurificationCertificate:
    """Purify a behavioral profile and certify the equivalences exactly."""
    info = derive_interplayer_info(game)
    checks = coarser_info_check(game, info)
    for i, c in enumerate(checks):
        if not c.passes:
            raise AtomObstructionError(
                AtomObstruction(c.witness or f"player {i}", None, "coarser information fails")
            )
    behavioral = [as_behavioral(game.players[i], f) for i, f in enumerate(profile)]
    pures = []
    for i, spec in enumerate(game.players):
        fb = behavioral[i]
        m = len(spec.actions)
        moments = _opponent_moments(game, i, behavioral)
        plan: dict[str, object] = {}
        for ci, cell in enumerate(spec.cells):
            cell_units = [
                (idx, u) for idx, u in enumerate(game.units[i]) if u.cell_index == ci
            ]
            pieces: list[tuple[Fraction, int]] = []
            for idx, u in cell_units:
                forms = [
                    interim_affine(game, i, a, idx, behavioral, moments)
                    for a in range(m)
                ]
                symmetric = any(f[1] != 0 for f in forms)
                bounds = [u.lo, u.hi] if u.lo > 0 else [u.hi]
                cuts = common_refinement(fb.breakpoints(cell), bounds)
                prev = ZERO
                for hi in cuts:
                    lo = prev
                    prev = hi
                    if hi <= u.lo or lo >= u.hi:
                        continue
                    weights = fb.weights_at(cell, lo)
                    for _a, b, k in proportional_subintervals(lo, hi, weights, symmetric):
                        if pieces and pieces[-1][1] == k:
                            pieces[-1] = (b, k)
                        else:
                            pieces.append((b, k))
            plan[cell.id] = tuple(pieces)
        pures.append(PureStrategy(plan))
    pures = tuple(pures)
    rng = random.Random(seed)
    deviations = [
        [random_behavioral(game.players[i], rng) for _ in range(deviation_samples)]
        for i in range(len(game.players))
    ]
    report = audit_equivalence(game, behavioral, pures, deviations)
    block_identity = []
    for i, spec in enumerate(game.players):
        part = info[i]
        ok = True
        mom_f = strategy_moments(spec, game.units[i], behavioral[i])
        mom_g = strategy_moments(spec, game.units[i], pures[i])
        for block in part.blocks:
            for a in range(len(spec.actions)):
                got_f = sum((mom_f[u][0][a] for u in block), ZERO)
                got_g = sum((mom_g[u][0][a] for u in block), ZERO)
                if got_f != got_g:
                    ok = False
        block_identity.append(ok)
    return PurificationCertificate(pures, report, tuple(block_identity))


def audit_equivalence(
    game: BayesianGame,
    f: Sequence[Strategy],
    g: Sequence[Strategy],
    deviations: Sequence[Sequence[Strategy]] | None = None,
) -> EquivalenceReport:
    """Residuals for payoff, strong payoff, distribution, and belief clauses."""
    n = len(game.players)
    fb = [as_behavioral(game.players[i], s) for i, s in enumerate(f)]
    gb = [as_behavioral(game.players[i], s) for i, s in enumerate(g)]
    uf = expected_payoff(game, fb)
    ug = expected_payoff(game, gb)
    payoff_residuals = tuple(abs(a - b) for a, b in zip(uf, ug))
    dist_defects = []
    for i, spec in enumerate(game.players):
        mom_f = strategy_moments(spec, game.units[i], fb[i])
        mom_g = strategy_moments(spec, game.units[i], gb[i])
        m = len(spec.actions)
        defect = tuple(
            abs(
                sum((mom_f[u][0][a] for u in range(len(game.units[i]))), ZERO)
                - sum((mom_g[u][0][a] for u in range(len(game.units[i]))), ZERO)
            )
            for a in range(m)
        )
        dist_defects.append(defect)
    strong = []
    for i in range(n):
        row = []
        devs = deviations[i] if deviations else ()
        if devs:
            mom_f = _opponent_moments(game, i, fb)
            mom_g = _opponent_moments(game, i, gb)
            for h in devs:
                u_f = player_payoff(game, i, h, fb, mom_f)
                u_g = player_payoff(game, i, h, gb, mom_g)
                row.append(abs(u_f - u_g))
        strong.append(tuple(row))
    violation_mass = []
    violations: list[BeliefViolation] = []
    for i, spec in enumerate(game.players):
        strategy = g[i]
        total = ZERO
        if isinstance(strategy, PureStrategy):
            for cell in spec.cells:
                if cell.point:
                    a = strategy.action_at(cell, ZERO)
                    if fb[i].weights_at(cell, ZERO)[a] == 0:
                        total += cell.mass
                        violations.append(BeliefViolation(i, cell.id, ZERO, ONE, a))
                    continue
                cuts = common_refinement(
                    fb[i].breakpoints(cell), strategy_breakpoints(strategy, cell)
                )
                prev = ZERO
                for hi in cuts:
                    lo = prev
                    prev = hi
                    a = strategy.action_at(cell, lo)
                    if fb[i].weights_at(cell, lo)[a] == 0:
                        total += cell.mass * (hi - lo)
                        violations.append(BeliefViolation(i, cell.id, lo, hi, a))
        violation_mass.append(total)
    return EquivalenceReport(
        payoff_residuals=payoff_residuals,
        distribution_defects=tuple(dist_defects),
        strong_residuals=tuple(strong),
        belief_violation_mass=tuple(violation_mass),
        belief_violations=tuple(violations),
    )


def strategy_breakpoints(strategy: PureStrategy, cell) -> list[Fraction]:
    if cell.point:
        return [ONE]
    return [upto for upto, _ in strategy.plan[cell.id]]


def random_behavioral(spec, rng: random.Random) -> BehavioralStrategy:
    """A seeded random behavioral strategy on a player's type space."""
    m = len(spec.actions)

    def random_weights():
        raw = [rng.randint(0, 4) for _ in range(m)]
        if sum(raw) == 0:
            raw[rng.randrange(m)] = 1
        total = sum(raw)
        w = [Fraction(x, total) for x in raw]
        w[-1] = 1 - sum(w[:-1])
        return tuple(w)

    plan = {}
    for cell in spec.cells:
        if cell.point:
            plan[cell.id] = random_weights()
            continue
        cuts = sorted(set(Fraction(rng.randint(1, 7), 8) for _ in range(rng.randint(0, 2))))
        uptos = cuts + [ONE]
        plan[cell.id] = tuple((u, random_weights()) for u in uptos)
    return BehavioralStrategy(plan)
