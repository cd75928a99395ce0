"""Shared fixture builders for the test suite."""

from fractions import Fraction

from condexp.correspondences import FiniteIndexedCorrespondence
from condexp.measure import Cell, CellKind, MeasureSpaceModel, StepFunction

F = Fraction


def rich_cell(cid="c", mass=F(1), block=None):
    return Cell(cid, F(mass), CellKind.RICH, block or cid)

def saturated_cell(cid="D", mass=F(1)):
    return Cell(cid, F(mass), CellKind.SATURATED, cid)

def point_cell(cid="p", mass=F(1), block=None):
    return Cell(cid, F(mass), CellKind.POINT_MASS, block or cid)

def space(*cells):
    return MeasureSpaceModel(tuple(cells))

def unit_rich_space(cid="c"):
    return space(rich_cell(cid))


def step(space_, per_cell, dim=1):
    """per_cell: cell_id -> scalar | vector | [(upto, scalar|vector), ...]."""
    values = {}
    for c in space_.cells:
        entry = per_cell[c.id]
        if c.has_inner:
            if not isinstance(entry, list):
                entry = [(F(1), entry)]
            values[c.id] = tuple((F(u), _vec(v, dim)) for u, v in entry)
        else:
            values[c.id] = _vec(entry, dim)
    return StepFunction(dim, values)


def _vec(v, dim):
    if isinstance(v, (int, Fraction, str)):
        v = (v,)
    out = tuple(F(x) for x in v)
    assert len(out) == dim
    return out


def constant_branches(space_, consts, dim=1):
    return FiniteIndexedCorrespondence(
        space_,
        tuple(step(space_, {c.id: k for c in space_.cells}, dim) for k in consts),
    )


def binary_F(space_):
    """The {0, 1} correspondence on the whole space."""
    return constant_branches(space_, [0, 1])
