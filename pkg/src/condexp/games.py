"""Finite-action Bayesian games on finitely-presented type spaces.

Each player's type space is a list of cells with rational masses; interval
cells carry an inner coordinate on [0, 1] partitioned into a fixed unit grid,
point cells do not.  The common-prior density and the payoffs are tables over
tuples of units, each entry either a constant or affine in exactly one
player's inner coordinate (with slope folded against the other factor, so
density-weighted payoffs stay affine and every integral below is exact
rational arithmetic).

The inter-player information of player i is derived, never declared: units of
i are grouped by the full profile of opponents' density-weighted payoffs, and
a unit is saturated when some opponent-relevant entry is affine in i's own
coordinate.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import SchemaError, WeightInvalid
from .piecewise import common_refinement, piece_payload

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class TypeCell:
    id: str
    mass: Fraction
    grid: tuple[Fraction, ...]  # () for point cells; else increasing, ends at 1
    point: bool = False

    def __post_init__(self):
        if self.mass <= 0:
            raise SchemaError(f"cells[{self.id}].mass", "must be positive")
        if self.point:
            if self.grid:
                raise SchemaError(f"cells[{self.id}].grid", "point cells have no grid")
            return
        if not self.grid:
            raise SchemaError(f"cells[{self.id}].grid", "interval cells need a grid")
        prev = ZERO
        for g in self.grid:
            if g <= prev:
                raise SchemaError(f"cells[{self.id}].grid", "grid must increase")
            prev = g
        if prev != 1:
            raise SchemaError(f"cells[{self.id}].grid", "grid must end at 1")


@dataclass(frozen=True)
class Unit:
    """One (cell, piece) atom of a player's unit grid."""

    player: int
    cell_index: int
    cell_id: str
    piece_index: int
    lo: Fraction
    hi: Fraction
    mass: Fraction
    point: bool

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2


@dataclass(frozen=True)
class PlayerSpec:
    actions: tuple[str, ...]
    cells: tuple[TypeCell, ...]

    def __post_init__(self):
        if not self.actions:
            raise SchemaError("actions", "need at least one action")
        if len(set(self.actions)) != len(self.actions):
            raise SchemaError("actions", "labels must be unique")
        if not self.cells:
            raise SchemaError("cells", "need at least one cell")
        ids = [c.id for c in self.cells]
        if len(set(ids)) != len(ids):
            raise SchemaError("cells", "cell ids must be unique")
        if sum((c.mass for c in self.cells), ZERO) != 1:
            raise SchemaError("cells", "cell masses must sum to 1")


def player_units(player: int, spec: PlayerSpec) -> tuple[Unit, ...]:
    units = []
    for ci, cell in enumerate(spec.cells):
        if cell.point:
            units.append(Unit(player, ci, cell.id, 0, ZERO, ZERO, cell.mass, True))
            continue
        lo = ZERO
        for pi, hi in enumerate(cell.grid):
            units.append(
                Unit(player, ci, cell.id, pi, lo, hi, cell.mass * (hi - lo), False)
            )
            lo = hi
    return tuple(units)


@dataclass(frozen=True)
class Entry:
    """A table entry: const + slope * (inner coordinate of player ``coord``)."""

    const: Fraction
    slope: Fraction = ZERO
    coord: int | None = None

    def __post_init__(self):
        if self.slope != 0 and self.coord is None:
            raise SchemaError("entry", "affine entries must name a coordinate")
        if self.slope == 0 and self.coord is not None:
            object.__setattr__(self, "coord", None)

    def average(self, units: Sequence[Unit]) -> Fraction:
        if self.slope == 0:
            return self.const
        return self.const + self.slope * units[self.coord].mid


def entry_product(u: Entry, q: Entry) -> Entry:
    if u.slope != 0 and q.slope != 0:
        raise SchemaError("entry", "product of two affine entries is not representable")
    const = u.const * q.const
    if u.slope != 0:
        return Entry(const, u.slope * q.const, u.coord)
    if q.slope != 0:
        return Entry(const, q.slope * u.const, q.coord)
    return Entry(const)


EntryTable = Mapping[tuple[int, ...], Entry]


@dataclass(frozen=True)
class BayesianGame:
    players: tuple[PlayerSpec, ...]
    density: EntryTable
    payoffs: tuple[Mapping[tuple[int, ...], EntryTable], ...]
    units: tuple[tuple[Unit, ...], ...] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if len(self.players) < 2:
            raise SchemaError("players", "need at least two players")
        object.__setattr__(
            self,
            "units",
            tuple(player_units(i, spec) for i, spec in enumerate(self.players)),
        )
        if len(self.payoffs) != len(self.players):
            raise SchemaError("payoffs", "one payoff table per player")
        self._validate_tables()
        self._validate_density()

    # -- table shape ------------------------------------------------------

    def unit_tuples(self):
        return itertools.product(*[range(len(us)) for us in self.units])

    def action_profiles(self):
        return itertools.product(*[range(len(p.actions)) for p in self.players])

    def tuple_units(self, key: tuple[int, ...]) -> tuple[Unit, ...]:
        return tuple(self.units[i][k] for i, k in enumerate(key))

    def _validate_tables(self):
        n = len(self.players)
        for key in self.unit_tuples():
            if key not in self.density:
                raise SchemaError(f"density[{key}]", "missing entry")
            self._validate_entry("density", key, self.density[key])
        for i in range(n):
            for x in self.action_profiles():
                table = self.payoffs[i].get(x)
                if table is None:
                    raise SchemaError(f"payoffs[{i}][{x}]", "missing action profile")
                for key in self.unit_tuples():
                    if key not in table:
                        raise SchemaError(f"payoffs[{i}][{x}][{key}]", "missing entry")
                    e = self._validate_entry(f"payoffs[{i}][{x}]", key, table[key])
                    q = self.density[key]
                    if e.slope != 0 and q.slope != 0:
                        raise SchemaError(
                            f"payoffs[{i}][{x}][{key}]",
                            "payoff and density are both affine on this tuple",
                        )
        for key in self.unit_tuples():
            coords = set()
            if self.density[key].slope != 0:
                coords.add(self.density[key].coord)
            for i in range(n):
                for x in self.action_profiles():
                    e = self.payoffs[i][x][key]
                    if e.slope != 0:
                        coords.add(e.coord)
            if len(coords) > 1:
                raise SchemaError(
                    f"tuple {key}", "at most one affine coordinate per unit tuple"
                )

    def _validate_entry(self, path, key, e: Entry) -> Entry:
        if e.slope != 0:
            if e.coord is None or not 0 <= e.coord < len(self.players):
                raise SchemaError(f"{path}[{key}]", "bad affine coordinate")
            if self.units[e.coord][key[e.coord]].point:
                raise SchemaError(
                    f"{path}[{key}]", "affine coordinate points at a point cell"
                )
        return e

    def _validate_density(self):
        total = ZERO
        for key in self.unit_tuples():
            units = self.tuple_units(key)
            e = self.density[key]
            mass = ONE
            for u in units:
                mass *= u.mass
            if e.slope != 0:
                u = units[e.coord]
                if e.const + e.slope * u.lo < 0 or e.const + e.slope * u.hi < 0:
                    raise SchemaError(f"density[{key}]", "density must be nonnegative")
            elif e.const < 0:
                raise SchemaError(f"density[{key}]", "density must be nonnegative")
            total += mass * e.average(units)
        if total != 1:
            raise SchemaError("density", f"must integrate to 1, got {total}")
        for i in range(len(self.players)):
            for own_idx in range(len(self.units[i])):
                a, b = self._marginal_affine(i, own_idx)
                if b != 0 or a != 1:
                    raise SchemaError(
                        f"density marginal[player {i}, unit {own_idx}]",
                        f"must be identically 1, got {a} + {b}*t",
                    )

    def _marginal_affine(self, i: int, own_idx: int) -> tuple[Fraction, Fraction]:
        a_total, b_total = ZERO, ZERO
        others = [j for j in range(len(self.players)) if j != i]
        for combo in itertools.product(*[range(len(self.units[j])) for j in others]):
            key = [0] * len(self.players)
            key[i] = own_idx
            for j, k in zip(others, combo):
                key[j] = k
            key = tuple(key)
            units = self.tuple_units(key)
            mass = ONE
            for j in others:
                mass *= units[j].mass
            e = self.density[key]
            if e.slope != 0 and e.coord == i:
                a_total += e.const * mass
                b_total += e.slope * mass
            else:
                a_total += e.average(units) * mass
        return a_total, b_total

    def is_zero_sum(self) -> bool:
        if len(self.players) != 2:
            return False
        for x in self.action_profiles():
            for key in self.unit_tuples():
                e1 = self.payoffs[0][x][key]
                e2 = self.payoffs[1][x][key]
                if e2.const != -e1.const or e2.slope != -e1.slope:
                    return False
                if e1.slope != 0 and e2.coord != e1.coord:
                    return False
        return True


# -- strategies -------------------------------------------------------------


@dataclass(frozen=True)
class BehavioralStrategy:
    """Piecewise probability vectors over actions, per type cell."""

    plan: Mapping[str, object]  # tuple[(upto, weights)] | weights (point cells)

    def validate(self, spec: PlayerSpec) -> None:
        m = len(spec.actions)
        for cell in spec.cells:
            if cell.id not in self.plan:
                raise SchemaError(f"strategy[{cell.id}]", "missing cell entry")
            entry = self.plan[cell.id]
            rows = [entry] if cell.point else [w for _, w in entry]
            if not cell.point:
                prev = ZERO
                for upto, _ in entry:
                    if upto <= prev:
                        raise SchemaError(f"strategy[{cell.id}]", "breakpoints must increase")
                    prev = upto
                if prev != 1:
                    raise SchemaError(f"strategy[{cell.id}]", "pieces must end at 1")
            for w in rows:
                if len(w) != m:
                    raise WeightInvalid(f"cell {cell.id}: expected {m} weights")
                if any(x < 0 for x in w) or sum(w) != 1:
                    raise WeightInvalid(f"cell {cell.id}: weights must be >= 0, sum 1")

    def weights_at(self, cell: TypeCell, t: Fraction) -> tuple[Fraction, ...]:
        entry = self.plan[cell.id]
        if cell.point:
            return tuple(entry)
        return tuple(piece_payload(entry, t))

    def breakpoints(self, cell: TypeCell) -> list[Fraction]:
        if cell.point:
            return [ONE]
        return [upto for upto, _ in self.plan[cell.id]]


@dataclass(frozen=True)
class PureStrategy:
    """Piecewise action indices, per type cell."""

    plan: Mapping[str, object]  # tuple[(upto, action_idx)] | action_idx

    def validate(self, spec: PlayerSpec) -> None:
        m = len(spec.actions)
        for cell in spec.cells:
            if cell.id not in self.plan:
                raise SchemaError(f"strategy[{cell.id}]", "missing cell entry")
            entry = self.plan[cell.id]
            if cell.point:
                if not 0 <= entry < m:
                    raise SchemaError(f"strategy[{cell.id}]", "action out of range")
                continue
            prev = ZERO
            for upto, k in entry:
                if upto <= prev:
                    raise SchemaError(f"strategy[{cell.id}]", "breakpoints must increase")
                if not 0 <= k < m:
                    raise SchemaError(f"strategy[{cell.id}]", "action out of range")
                prev = upto
            if prev != 1:
                raise SchemaError(f"strategy[{cell.id}]", "pieces must end at 1")

    def to_behavioral(self, spec: PlayerSpec) -> BehavioralStrategy:
        m = len(spec.actions)

        def unit_vec(k):
            return tuple(ONE if j == k else ZERO for j in range(m))

        plan = {}
        for cell in spec.cells:
            entry = self.plan[cell.id]
            if cell.point:
                plan[cell.id] = unit_vec(entry)
            else:
                plan[cell.id] = tuple((upto, unit_vec(k)) for upto, k in entry)
        return BehavioralStrategy(plan)

    def action_at(self, cell: TypeCell, t: Fraction) -> int:
        entry = self.plan[cell.id]
        if cell.point:
            return entry
        return piece_payload(entry, t)


Strategy = BehavioralStrategy | PureStrategy


def as_behavioral(spec: PlayerSpec, f: Strategy) -> BehavioralStrategy:
    if isinstance(f, PureStrategy):
        f.validate(spec)
        return f.to_behavioral(spec)
    f.validate(spec)
    return f


def uniform_strategy(spec: PlayerSpec) -> BehavioralStrategy:
    m = len(spec.actions)
    w = tuple(Fraction(1, m) for _ in range(m))
    plan = {}
    for cell in spec.cells:
        plan[cell.id] = w if cell.point else ((ONE, w),)
    return BehavioralStrategy(plan)


def strategy_moments(spec: PlayerSpec, units: Sequence[Unit], f: Strategy):
    """Per unit and action: (W0, W1) = integrals of f and t*f over the unit."""
    fb = as_behavioral(spec, f)
    m = len(spec.actions)
    out = []
    for u in units:
        cell = spec.cells[u.cell_index]
        if u.point:
            w = fb.weights_at(cell, ZERO)
            out.append(([w[a] * u.mass for a in range(m)], [ZERO] * m))
            continue
        w0 = [ZERO] * m
        w1 = [ZERO] * m
        cuts = common_refinement(fb.breakpoints(cell), [u.lo, u.hi] if u.lo > 0 else [u.hi])
        prev = ZERO
        for hi in cuts:
            lo = prev
            prev = hi
            if hi <= u.lo or lo >= u.hi:
                continue
            w = fb.weights_at(cell, lo)
            for a in range(m):
                w0[a] += cell.mass * (hi - lo) * w[a]
                w1[a] += cell.mass * (hi * hi - lo * lo) / 2 * w[a]
        out.append((w0, w1))
    return out


# -- interim and expected payoffs --------------------------------------------


def _opponent_moments(game: BayesianGame, i: int, profile: Sequence[Strategy]):
    moments = {}
    for j in range(len(game.players)):
        if j != i:
            moments[j] = strategy_moments(game.players[j], game.units[j], profile[j])
    return moments


def interim_affine(
    game: BayesianGame,
    i: int,
    action: int,
    own_unit: int,
    profile: Sequence[Strategy],
    moments=None,
    payoff_player: int | None = None,
):
    """Coefficients (A, B) of the interim payoff A + B*t on one own unit.

    ``payoff_player`` evaluates another player's density-weighted payoff along
    player's i type axis (used by information audits); defaults to i itself.
    """
    n = len(game.players)
    target = i if payoff_player is None else payoff_player
    others = [j for j in range(n) if j != i]
    if moments is None:
        moments = _opponent_moments(game, i, profile)
    A = B = ZERO
    action_ranges = [range(len(game.players[j].actions)) for j in others]
    unit_ranges = [range(len(game.units[j])) for j in others]
    for x_rest in itertools.product(*action_ranges):
        x = [0] * n
        x[i] = action
        for j, a in zip(others, x_rest):
            x[j] = a
        x = tuple(x)
        for mu in itertools.product(*unit_ranges):
            key = [0] * n
            key[i] = own_unit
            for j, k in zip(others, mu):
                key[j] = k
            key = tuple(key)
            e = entry_product(self_payoff(game, target, x, key), game.density[key])
            P0 = ONE
            for j, k, a in zip(others, mu, x_rest):
                P0 *= moments[j][k][0][a]
                if P0 == 0:
                    break
            if P0 == 0:
                continue
            if e.slope == 0:
                A += e.const * P0
            elif e.coord == i:
                A += e.const * P0
                B += e.slope * P0
            else:
                j0 = e.coord
                partial = ONE
                w1 = ZERO
                for j, k, a in zip(others, mu, x_rest):
                    if j == j0:
                        w1 = moments[j][k][1][a]
                    else:
                        partial *= moments[j][k][0][a]
                A += e.const * P0 + e.slope * w1 * partial
    return A, B


def self_payoff(game: BayesianGame, i: int, x: tuple[int, ...], key: tuple[int, ...]) -> Entry:
    return game.payoffs[i][x][key]


def interim_payoff(
    game: BayesianGame,
    i: int,
    action: int,
    own_unit: int,
    profile: Sequence[Strategy],
    sub: tuple[Fraction, Fraction] | None = None,
) -> Fraction:
    """Average interim payoff of one action over an own unit (or sub-piece)."""
    unit = game.units[i][own_unit]
    A, B = interim_affine(game, i, action, own_unit, profile)
    if unit.point or B == 0:
        return A
    lo, hi = sub if sub is not None else (unit.lo, unit.hi)
    return A + B * (lo + hi) / 2


def player_payoff(
    game: BayesianGame,
    i: int,
    own: Strategy,
    profile: Sequence[Strategy],
    moments=None,
) -> Fraction:
    """Ex-ante payoff of player i playing ``own`` against profile's others.

    Pass precomputed opponent moments to amortize repeated evaluations
    against the same opposing strategies.
    """
    spec = game.players[i]
    fb = as_behavioral(spec, own)
    if moments is None:
        moments = _opponent_moments(game, i, profile)
    total = ZERO
    for idx, unit in enumerate(game.units[i]):
        cell = spec.cells[unit.cell_index]
        forms = [
            interim_affine(game, i, a, idx, profile, moments)
            for a in range(len(spec.actions))
        ]
        if unit.point:
            w = fb.weights_at(cell, ZERO)
            total += unit.mass * sum(w[a] * forms[a][0] for a in range(len(forms)))
            continue
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
            total += cell.mass * (hi - lo) * sum(
                w[a] * (forms[a][0] + forms[a][1] * mid) for a in range(len(forms))
            )
    return total


def expected_payoff(game: BayesianGame, profile: Sequence[Strategy]) -> tuple[Fraction, ...]:
    """Ex-ante payoffs, exact."""
    return tuple(
        player_payoff(game, i, profile[i], profile)
        for i in range(len(game.players))
    )


# -- derived inter-player information ----------------------------------------


@dataclass(frozen=True)
class InfoPartition:
    player: int
    blocks: tuple[tuple[int, ...], ...]
    kinds: tuple[str, ...]  # per unit: "rich" | "saturated"
    block_of_unit: tuple[int, ...]
    block_masses: tuple[Fraction, ...]


@dataclass(frozen=True)
class CoarserCheck:
    passes: bool
    witness: str | None


def derive_interplayer_info(game: BayesianGame) -> tuple[InfoPartition, ...]:
    """Group each player's units by the opponents' payoff signature.

    Units whose opponent-relevant entries are affine in the player's own
    coordinate are saturated and sit in singleton blocks; the rest share a
    block exactly when every opponent entry agrees on them as tagged values.
    """
    n = len(game.players)
    partitions = []
    for i in range(n):
        others = [j for j in range(n) if j != i]
        action_ranges = [range(len(p.actions)) for p in game.players]
        unit_ranges = [range(len(game.units[j])) for j in others]
        signatures = []
        saturated = []
        for own_idx in range(len(game.units[i])):
            sig = []
            is_sat = False
            for j in others:
                for x in itertools.product(*action_ranges):
                    for mu in itertools.product(*unit_ranges):
                        key = [0] * n
                        key[i] = own_idx
                        for jj, k in zip(others, mu):
                            key[jj] = k
                        key = tuple(key)
                        e = entry_product(game.payoffs[j][x][key], game.density[key])
                        if e.slope != 0 and e.coord == i:
                            is_sat = True
                        sig.append((j, x, mu, e.const, e.slope, e.coord))
            signatures.append(tuple(sig))
            saturated.append(is_sat)
        blocks: list[list[int]] = []
        block_of: dict[int, int] = {}
        sig_index: dict[tuple, int] = {}
        for own_idx in range(len(game.units[i])):
            if saturated[own_idx]:
                block_of[own_idx] = len(blocks)
                blocks.append([own_idx])
                continue
            sig = signatures[own_idx]
            if sig in sig_index:
                b = sig_index[sig]
                blocks[b].append(own_idx)
                block_of[own_idx] = b
            else:
                sig_index[sig] = len(blocks)
                block_of[own_idx] = len(blocks)
                blocks.append([own_idx])
        masses = tuple(
            sum((game.units[i][u].mass for u in block), ZERO) for block in blocks
        )
        partitions.append(
            InfoPartition(
                player=i,
                blocks=tuple(tuple(b) for b in blocks),
                kinds=tuple("saturated" if s else "rich" for s in saturated),
                block_of_unit=tuple(block_of[u] for u in range(len(game.units[i]))),
                block_masses=masses,
            )
        )
    return tuple(partitions)


def coarser_info_check(
    game: BayesianGame, info: tuple[InfoPartition, ...] | None = None
) -> tuple[CoarserCheck, ...]:
    """Per player: no saturated unit and no point cell of positive mass."""
    if info is None:
        info = derive_interplayer_info(game)
    out = []
    for i, part in enumerate(info):
        witness = None
        for idx, unit in enumerate(game.units[i]):
            if part.kinds[idx] == "saturated":
                witness = f"unit {unit.cell_id}[{unit.piece_index}] is saturated"
                break
            if unit.point:
                witness = f"cell {unit.cell_id} is a point mass"
                break
        out.append(CoarserCheck(witness is None, witness))
    return tuple(out)


def g_conditional(
    game: BayesianGame, info: tuple[InfoPartition, ...], i: int, f: Strategy
) -> BehavioralStrategy:
    """Condition a strategy on the player's derived information blocks."""
    spec = game.players[i]
    fb = as_behavioral(spec, f)
    part = info[i]
    m = len(spec.actions)
    moments = strategy_moments(spec, game.units[i], fb)
    block_avg = []
    for b, block in enumerate(part.blocks):
        totals = [ZERO] * m
        for u in block:
            for a in range(m):
                totals[a] += moments[u][0][a]
        mass = part.block_masses[b]
        block_avg.append(tuple(t / mass for t in totals))
    plan: dict[str, object] = {}
    for ci, cell in enumerate(spec.cells):
        cell_units = [
            (idx, u) for idx, u in enumerate(game.units[i]) if u.cell_index == ci
        ]
        if cell.point:
            (idx, _u) = cell_units[0]
            plan[cell.id] = block_avg[part.block_of_unit[idx]]
            continue
        pieces: list[tuple[Fraction, tuple[Fraction, ...]]] = []
        for idx, u in cell_units:
            if part.kinds[idx] == "saturated":
                bounds = [u.lo, u.hi] if u.lo > 0 else [u.hi]
                cuts = common_refinement(fb.breakpoints(cell), bounds)
                prev = ZERO
                for hi in cuts:
                    lo = prev
                    prev = hi
                    if hi <= u.lo or lo >= u.hi:
                        continue
                    pieces.append((hi, fb.weights_at(cell, lo)))
            else:
                pieces.append((u.hi, block_avg[part.block_of_unit[idx]]))
        merged: list[tuple[Fraction, tuple[Fraction, ...]]] = []
        for upto, w in pieces:
            if merged and merged[-1][1] == w:
                merged[-1] = (upto, w)
            else:
                merged.append((upto, w))
        plan[cell.id] = tuple(merged)
    return BehavioralStrategy(plan)


def substitute_conditioned(
    game: BayesianGame,
    info: tuple[InfoPartition, ...],
    profile: Sequence[Strategy],
    keep: int,
) -> list[Strategy]:
    """Replace every opponent of ``keep`` by its conditioned strategy."""
    out = list(profile)
    for j in range(len(game.players)):
        if j != keep:
            out[j] = g_conditional(game, info, j, profile[j])
    return out
