"""Ready-made game constructions used by the CLI, tests, and demos."""

from __future__ import annotations

from fractions import Fraction

from .games import BayesianGame, Entry, PlayerSpec, TypeCell

ONE = Fraction(1)


def cyclic_payoff(m: int, row: int, col: int) -> int:
    """Row player's cyclic matching-pennies payoff: +1 on the diagonal,
    -1 one step to the right (wrapping), 0 elsewhere."""
    if col == row:
        return 1
    if col == (row + 1) % m:
        return -1
    return 0


def matching_pennies_game(m: int = 2, dummy_players: int = 0) -> BayesianGame:
    """Type-irrelevant m-action matching pennies on independent uniform types.

    Optional dummy players have a single action and never affect payoffs.
    """
    actions = tuple(f"a{j + 1}" for j in range(m))
    specs = [
        PlayerSpec(actions, (TypeCell("t1", ONE, (ONE,)),)),
        PlayerSpec(actions, (TypeCell("t2", ONE, (ONE,)),)),
    ]
    for d in range(dummy_players):
        specs.append(PlayerSpec(("a",), (TypeCell(f"d{d}", ONE, (ONE,)),)))
    n = len(specs)
    key = tuple([0] * n)
    density = {key: Entry(ONE)}
    payoffs = []
    for i in range(n):
        tables = {}
        for x in _profiles(specs):
            if i == 0:
                v = cyclic_payoff(m, x[0], x[1])
            elif i == 1:
                v = -cyclic_payoff(m, x[0], x[1])
            else:
                v = 0
            tables[x] = {key: Entry(Fraction(v))}
        payoffs.append(tables)
    return BayesianGame(tuple(specs), density, tuple(payoffs))


def _profiles(specs):
    import itertools

    return itertools.product(*[range(len(s.actions)) for s in specs])
