"""Attainable-average sets of correspondences under block conditioning.

For each coarse block the set of achievable block averages of selections is a
finite union of polytopes: a Minkowski sum of scaled hulls (one per constancy
piece of a rich cell) translated by the finitely many point-cell choices, all
divided by the block mass.  Saturated cells carry no region; there the
attainable functions are exactly the pointwise splices of the branches.

The operations here make the convexity / compactness / continuity dichotomy
constructive: proportional splitting realizes any average blend on atom-free
spaces, while saturated and point cells yield certified obstructions, escape
sequences, and positive defect certificates.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .correspondences import (
    FiniteIndexedCorrespondence,
    MixedSelection,
    Selection,
    mixed_value,
    selection_value,
)
from .errors import (
    AtomObstructionError,
    NotGMeasurable,
    NotSaturated,
    SaturatedBlock,
    UnsupportedDimension,
)
from .measure import (
    Cell,
    CellKind,
    MeasureSpaceModel,
    StepFunction,
    constant_function,
    functions_equal,
    indicator_of_cells,
    linear_combination,
    scalar_product,
)
from .piecewise import proportional_subintervals
from .rational_geometry import (
    dedupe_points,
    extreme_points,
    feasible_combination,
    nearest_point_in_hull,
    support_value,
)
from .rationals import Vec, vec_add, vec_norm2, vec_scale, vec_sub, zero_vec

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class AtomObstruction:
    """Certificate that a blend/mixture cannot be realized by any selection."""

    cell_id: str
    alpha: Fraction | None
    reason: str
    distance: object | None = None  # Fraction when exact, float otherwise

    def __str__(self) -> str:
        extra = f", defect {self.distance}" if self.distance is not None else ""
        return f"obstruction at cell {self.cell_id}: {self.reason}{extra}"


@dataclass(frozen=True)
class CondExpBlockSet:
    """Attainable block averages, kept in Minkowski-sum form.

    ``summands`` holds (coefficient, points) pairs, one per rich constancy
    piece, meaning coefficient * conv(points).  ``point_sets`` holds the
    mass-scaled finite value sets of the block's point cells.  Averages are
    the sums divided by the block mass.
    """

    block: str
    dim: int
    block_mass: Fraction
    summands: tuple[tuple[Fraction, tuple[Vec, ...]], ...]
    point_sets: tuple[tuple[Vec, ...], ...]

    def offsets(self) -> list[Vec]:
        """All point-cell contribution totals, deduped and sorted."""
        acc: list[Vec] = [zero_vec(self.dim)]
        for points in self.point_sets:
            acc = dedupe_points([vec_add(a, p) for a in acc for p in points])
        return acc

    def contains(self, value: Vec, tolerance=Fraction(0)) -> bool:
        """Exact membership of a candidate block average; tolerance in L2."""
        target = vec_scale(value, self.block_mass)
        for offset in self.offsets():
            residual = vec_sub(target, offset)
            if self._rich_feasible(residual):
                return True
        if tolerance and tolerance > 0:
            d2, _ = self.distance(value)
            return d2 <= tolerance * tolerance
        return False

    def _rich_feasible(self, residual: Vec) -> bool:
        if not self.summands:
            return all(v == 0 for v in residual)
        cols: list[list[Fraction]] = []
        groups: list[tuple[int, int]] = []
        start = 0
        for coeff, points in self.summands:
            for p in points:
                cols.append([coeff * x for x in p])
            groups.append((start, start + len(points)))
            start += len(points)
        nvars = len(cols)
        A = [[cols[j][d] for j in range(nvars)] for d in range(self.dim)]
        for lo, hi in groups:
            A.append([Fraction(1) if lo <= j < hi else Fraction(0) for j in range(nvars)])
        b = list(residual) + [Fraction(1)] * len(groups)
        return feasible_combination(A, b) is not None

    def rich_vertices(self) -> list[Vec]:
        """Vertices of the rich Minkowski sum (before offsets), dim <= 3."""
        if self.dim > 3:
            raise UnsupportedDimension("vertex enumeration needs dimension <= 3")
        acc: list[Vec] = [zero_vec(self.dim)]
        for coeff, points in self.summands:
            scaled = [vec_scale(p, coeff) for p in points]
            acc = extreme_points([vec_add(a, s) for a in acc for s in scaled])
        return acc

    def polytopes(self) -> list[tuple[Vec, ...]]:
        """The union as explicit vertex lists (in average scale), dim <= 3."""
        rich = self.rich_vertices()
        inv = Fraction(1) / self.block_mass
        polys = set()
        for offset in self.offsets():
            verts = extreme_points([vec_scale(vec_add(v, offset), inv) for v in rich])
            polys.add(tuple(verts))
        return sorted(polys)

    def distance(self, value: Vec) -> tuple[Fraction, Vec]:
        """Min squared Euclidean distance to the union plus a nearest point."""
        best: tuple[Fraction, Vec] | None = None
        for poly in self.polytopes():
            d2, point = nearest_point_in_hull(value, poly)
            if best is None or d2 < best[0] or (d2 == best[0] and point < best[1]):
                best = (d2, point)
        assert best is not None
        return best

    def support(self, direction: Vec) -> Fraction:
        """Support function of the union in a given direction, any dimension."""
        rich = sum(
            (coeff * support_value(points, direction) for coeff, points in self.summands),
            Fraction(0),
        )
        best = max(
            sum(x * d for x, d in zip(offset, direction)) for offset in self.offsets()
        )
        return (rich + best) / self.block_mass


@dataclass(frozen=True)
class CondExpSet:
    """Whole-space description: a region per rich/point block plus the
    saturated cells, whose attainable part is function-valued (all splices)."""

    F: FiniteIndexedCorrespondence
    regions: dict[str, CondExpBlockSet]
    saturated_cells: tuple[str, ...]


def block_set(F: FiniteIndexedCorrespondence, block_label: str) -> CondExpBlockSet:
    space = F.space
    cells = space.blocks.get(block_label)
    if cells is None:
        raise KeyError(block_label)
    if any(c.kind is CellKind.SATURATED for c in cells):
        raise SaturatedBlock(f"block {block_label} contains a saturated cell")
    summands: list[tuple[Fraction, tuple[Vec, ...]]] = []
    point_sets: list[tuple[Vec, ...]] = []
    for c in cells:
        if c.kind is CellKind.RICH:
            for lo, hi in F.refinement_on(c):
                points = dedupe_points(F.branch_values(c, lo))
                summands.append(((hi - lo) * c.mass, tuple(extreme_points(points))))
        else:
            values = dedupe_points(
                [vec_scale(v, c.mass) for v in F.branch_values(c, Fraction(0))]
            )
            point_sets.append(tuple(values))
    return CondExpBlockSet(
        block=block_label,
        dim=F.dim,
        block_mass=space.block_mass(block_label),
        summands=tuple(summands),
        point_sets=tuple(point_sets),
    )


def cond_exp_set(F: FiniteIndexedCorrespondence) -> CondExpSet:
    regions = {}
    saturated = []
    for label, cells in F.space.blocks.items():
        if len(cells) == 1 and cells[0].kind is CellKind.SATURATED:
            saturated.append(cells[0].id)
        else:
            regions[label] = block_set(F, label)
    return CondExpSet(F, regions, tuple(saturated))


@dataclass(frozen=True)
class BlockCertificate:
    block: str
    kind: str  # "region" or "saturated"
    distance: object  # mass-weighted distance; Fraction when exact
    direction: Vec | None = None


@dataclass(frozen=True)
class MembershipResult:
    member: bool
    certificate: BlockCertificate | None
    failures: tuple[BlockCertificate, ...] = ()


def _block_value(space: MeasureSpaceModel, h: StepFunction, cells: Sequence[Cell]) -> Vec:
    """The constant value of h on a coarse block; NotGMeasurable otherwise."""
    value: Vec | None = None
    for c in cells:
        for _lo, _hi, v in h.pieces_on(c):
            if value is None:
                value = v
            elif v != value:
                raise NotGMeasurable(f"h is not constant on block {c.g_block}")
    assert value is not None
    return value


def membership(
    F: FiniteIndexedCorrespondence, h: StepFunction, tolerance=Fraction(0)
) -> MembershipResult:
    """Is h a conditional expectation of some selection of F?"""
    space = F.space
    h.validate(space)
    if h.dim != F.dim:
        raise NotGMeasurable("h has the wrong dimension")
    failures: list[BlockCertificate] = []
    for label, cells in space.blocks.items():
        if len(cells) == 1 and cells[0].kind is CellKind.SATURATED:
            defect = _splice_defect(F, cells[0], h)
            if defect != 0:
                failures.append(BlockCertificate(label, "saturated", defect))
            continue
        value = _block_value(space, h, cells)
        region = block_set(F, label)
        if region.contains(value, tolerance):
            continue
        if F.dim <= 3:
            d2, nearest = region.distance(value)
            dist = _sqrt_exact(d2)
            cert = BlockCertificate(
                label,
                "region",
                dist * region.block_mass if isinstance(dist, Fraction) else dist * float(region.block_mass),
                vec_sub(value, nearest),
            )
        else:
            cert = BlockCertificate(label, "region", None, None)
        failures.append(cert)
    first = failures[0] if failures else None
    return MembershipResult(not failures, first, tuple(failures))


def _sqrt_exact(d2: Fraction):
    """Exact rational square root when it exists, float otherwise."""
    num, den = d2.numerator, d2.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn == num and rd * rd == den:
        return Fraction(rn, rd)
    return math.sqrt(num / den)


def _splice_defect(F: FiniteIndexedCorrespondence, cell: Cell, h: StepFunction):
    """Mass-weighted L1 distance from h to the splice values on one cell."""
    total_exact = Fraction(0)
    total_float = 0.0
    exact = True
    for lo, hi in F.refinement_on(cell, h.breakpoints_on(cell)):
        hv = h.value_at(cell, lo)
        gaps = [vec_norm2(vec_sub(hv, g)) for g in F.branch_values(cell, lo)]
        best = min(gaps)
        if best == 0:
            continue
        root = _sqrt_exact(best)
        if isinstance(root, Fraction):
            total_exact += (hi - lo) * cell.mass * root
        else:
            exact = False
            total_float += float((hi - lo) * cell.mass) * root
    if exact:
        return total_exact
    return float(total_exact) + total_float


def convexify_witness(
    F: FiniteIndexedCorrespondence, s1: Selection, s2: Selection, alpha: Fraction
):
    """A selection whose conditional expectation blends those of s1 and s2.

    On atom-free spaces the proportional split always succeeds and the blend
    identity holds exactly.  With saturated or point cells present, the blend
    is realized per block when achievable; otherwise an AtomObstruction names
    the obstructing cell, the failing alpha, and the defect.
    """
    alpha = Fraction(alpha)
    if not 0 <= alpha <= 1:
        raise ValueError("alpha must lie in [0, 1]")
    s1.validate(F)
    s2.validate(F)
    space = F.space
    has_atom, _ = space.has_g_atom()
    if not has_atom:
        return _proportional_blend(F, s1, s2, alpha, space.cells)

    v1 = selection_value(F, s1)
    v2 = selection_value(F, s2)
    blend = linear_combination(space, [(alpha, v1), (Fraction(1) - alpha, v2)])
    target_fn = space.conditional_expectation(blend)

    assignments: dict[str, object] = {}
    for label, cells in space.blocks.items():
        if len(cells) == 1 and cells[0].kind is CellKind.SATURATED:
            result = _saturated_blend(F, cells[0], blend, alpha)
            if isinstance(result, AtomObstruction):
                return result
            assignments[cells[0].id] = result
        elif all(c.kind is CellKind.RICH for c in cells):
            part = _proportional_blend(F, s1, s2, alpha, cells)
            assignments.update(part.assignments)
        else:
            value = _block_value(space, target_fn, cells)
            result = _mixed_block_blend(F, label, cells, value, alpha)
            if isinstance(result, AtomObstruction):
                return result
            assignments.update(result)
    witness = Selection(assignments)
    achieved = space.conditional_expectation(selection_value(F, witness))
    assert functions_equal(space, achieved, target_fn)
    return witness


def _proportional_blend(F, s1, s2, alpha, cells) -> Selection:
    assignments: dict[str, object] = {}
    for c in cells:
        if not c.has_inner:
            raise AssertionError("proportional split needs an inner coordinate")
        pieces: list[tuple[Fraction, int]] = []
        for lo, hi in F.refinement_on(c, s1.breakpoints_on(c), s2.breakpoints_on(c)):
            k1 = s1.branch_at(c, lo)
            k2 = s2.branch_at(c, lo)
            if k1 == k2 or alpha == 1:
                pieces.append((hi, k1))
            elif alpha == 0:
                pieces.append((hi, k2))
            else:
                cut = lo + alpha * (hi - lo)
                pieces.append((cut, k1))
                pieces.append((hi, k2))
        assignments[c.id] = tuple(_merge_pieces(pieces))
    return Selection(assignments)


def _merge_pieces(pieces):
    merged = []
    for upto, payload in pieces:
        if merged and merged[-1][1] == payload:
            merged[-1] = (upto, payload)
        else:
            merged.append((upto, payload))
    return merged


def _saturated_blend(F, cell, blend_fn, alpha):
    pieces: list[tuple[Fraction, int]] = []
    for lo, hi in F.refinement_on(cell, blend_fn.breakpoints_on(cell)):
        want = blend_fn.value_at(cell, lo)
        values = F.branch_values(cell, lo)
        match = next((k for k, v in enumerate(values) if v == want), None)
        if match is None:
            return AtomObstruction(
                cell.id,
                alpha,
                "saturated cell: blend is not a pointwise splice",
                _splice_defect(F, cell, blend_fn),
            )
        pieces.append((hi, match))
    return tuple(_merge_pieces(pieces))


def _branch_mixture(F, rich_pieces, residual: Vec):
    """Per-piece convex branch weights whose weighted sum hits ``residual``.

    ``rich_pieces`` is a list of (cell, lo, hi); one weight vector over the
    branches comes back per piece, or None when infeasible.
    """
    K = F.branch_count
    cols: list[list[Fraction]] = []
    for cell, lo, hi in rich_pieces:
        coeff = (hi - lo) * cell.mass
        for g in F.branches:
            cols.append([coeff * x for x in g.value_at(cell, lo)])
    nvars = len(cols)
    A = [[cols[j][d] for j in range(nvars)] for d in range(F.dim)]
    for p in range(len(rich_pieces)):
        A.append(
            [Fraction(1) if p * K <= j < (p + 1) * K else Fraction(0) for j in range(nvars)]
        )
    b = list(residual) + [Fraction(1)] * len(rich_pieces)
    w = feasible_combination(A, b)
    if w is None:
        return None
    return [tuple(w[p * K : (p + 1) * K]) for p in range(len(rich_pieces))]


def _mixed_block_blend(F, label, cells, value, alpha):
    region = block_set(F, label)
    target = vec_scale(value, region.block_mass)
    point_cells = [c for c in cells if c.kind is CellKind.POINT_MASS]
    rich_cells = [c for c in cells if c.kind is CellKind.RICH]
    rich_pieces = [(c, lo, hi) for c in rich_cells for lo, hi in F.refinement_on(c)]
    choice_sets = [range(F.branch_count) for _ in point_cells]
    for choice in itertools.product(*choice_sets):
        offset = zero_vec(F.dim)
        for c, k in zip(point_cells, choice):
            offset = vec_add(offset, vec_scale(F.branches[k].value_at(c, Fraction(0)), c.mass))
        residual = vec_sub(target, offset)
        if rich_pieces:
            mixture = _branch_mixture(F, rich_pieces, residual)
            if mixture is None:
                continue
        elif any(x != 0 for x in residual):
            continue
        else:
            mixture = []
        assignments: dict[str, object] = {}
        for c, k in zip(point_cells, choice):
            assignments[c.id] = k
        idx = 0
        for c in rich_cells:
            pieces: list[tuple[Fraction, int]] = []
            for lo, hi in F.refinement_on(c):
                weights = mixture[idx]
                idx += 1
                for _a, b, k in proportional_subintervals(lo, hi, weights):
                    pieces.append((b, k))
            assignments[c.id] = tuple(_merge_pieces(pieces))
        return assignments
    atom = point_cells[0]
    dist = None
    if F.dim <= 3:
        d2, _nearest = region.distance(value)
        root = _sqrt_exact(d2)
        dist = (
            root * region.block_mass
            if isinstance(root, Fraction)
            else root * float(region.block_mass)
        )
    return AtomObstruction(
        atom.id, alpha, "no point-cell choice makes the blend attainable", dist
    )


def derandomize_selection(F: FiniteIndexedCorrespondence, m: MixedSelection) -> Selection:
    """Purify a mixed selection by proportional splitting, exactly.

    On rich cells each constancy piece is cut into sub-intervals with lengths
    proportional to the weights (branch order, left to right), preserving the
    piece integral.  Saturated and point cells admit only one-hot weights;
    anything else raises with an obstruction certificate.
    """
    m.validate(F)
    assignments: dict[str, object] = {}
    for c in F.space.cells:
        if not c.has_inner:
            w = m.weights_at(c, Fraction(0))
            hot = [k for k, x in enumerate(w) if x > 0]
            if len(hot) != 1:
                raise AtomObstructionError(
                    AtomObstruction(c.id, None, "point cell carries a non-degenerate mixture")
                )
            assignments[c.id] = hot[0]
            continue
        pieces: list[tuple[Fraction, int]] = []
        for lo, hi in F.refinement_on(c, m.breakpoints_on(c)):
            w = m.weights_at(c, lo)
            if c.kind is CellKind.SATURATED:
                hot = [k for k, x in enumerate(w) if x > 0]
                if len(hot) != 1:
                    raise AtomObstructionError(
                        AtomObstruction(
                            c.id, None, "saturated cell carries a non-degenerate mixture"
                        )
                    )
                pieces.append((hi, hot[0]))
                continue
            for _a, b, k in proportional_subintervals(lo, hi, w):
                pieces.append((b, k))
        assignments[c.id] = tuple(_merge_pieces(pieces))
    s = Selection(assignments)
    expected = F.space.conditional_expectation(mixed_value(F, m))
    achieved = F.space.conditional_expectation(selection_value(F, s))
    assert functions_equal(F.space, achieved, expected)
    return s


def indicator_correspondence(space: MeasureSpaceModel, cell_id: str) -> FiniteIndexedCorrespondence:
    """Binary correspondence: {0, 1} on the named cell, {0} elsewhere."""
    zero = constant_function(space, (Fraction(0),))
    return FiniteIndexedCorrespondence(
        space, (zero, indicator_of_cells(space, [cell_id]))
    )


def dyadic_selection(space: MeasureSpaceModel, cell_id: str, m: int) -> Selection:
    """Alternating level-m dyadic selection of the binary correspondence
    (branch 1 on even sub-intervals of the cell, branch 0 elsewhere)."""
    cell = space.cell(cell_id)
    if not cell.has_inner:
        raise NotSaturated("dyadic selections need an inner coordinate")
    denom = 2**m
    pieces = tuple(
        (Fraction(i + 1, denom), 1 if i % 2 == 0 else 0) for i in range(denom)
    )
    assignments: dict[str, object] = {}
    for c in space.cells:
        if c.id == cell_id:
            assignments[c.id] = pieces
        elif c.has_inner:
            assignments[c.id] = ((Fraction(1), 0),)
        else:
            assignments[c.id] = 0
    return Selection(assignments)


def _dyadic_level(h: StepFunction, cell: Cell) -> int | None:
    level = 0
    for upto in h.breakpoints_on(cell):
        den = Fraction(upto).denominator
        if den & (den - 1):
            return None
        level = max(level, den.bit_length() - 1)
    return level


@dataclass(frozen=True)
class RademacherTestEntry:
    level: int | None
    lhs: Fraction
    rhs: Fraction

    @property
    def holds(self) -> bool:
        return self.lhs == self.rhs


@dataclass(frozen=True)
class RademacherReport:
    cell: str
    m: int
    integral: Fraction
    expected_integral: Fraction
    tests: tuple[RademacherTestEntry, ...] = field(default_factory=tuple)


def rademacher_escape(
    space: MeasureSpaceModel,
    cell_id: str,
    m: int,
    tests: Sequence[StepFunction] = (),
) -> tuple[Selection, RademacherReport]:
    """Level-m alternating escape selection on a saturated cell.

    Against any test function constant on coarser dyadic pieces of the cell,
    the selection integrates to exactly half of the cell-restricted integral,
    which is the finite-model form of the weak-limit computation.
    """
    cell = space.cell(cell_id)
    if cell.kind is not CellKind.SATURATED:
        raise NotSaturated(f"cell {cell_id} is not saturated")
    F = indicator_correspondence(space, cell_id)
    phi = dyadic_selection(space, cell_id, m)
    val = selection_value(F, phi)
    integral = space.integrate(val)[0]
    ind = indicator_of_cells(space, [cell_id])
    entries = []
    for psi in tests:
        lhs = space.integrate(scalar_product(space, psi, val))[0]
        rhs = HALF * space.integrate(scalar_product(space, psi, ind))[0]
        entries.append(RademacherTestEntry(_dyadic_level(psi, cell), lhs, rhs))
    report = RademacherReport(
        cell=cell_id,
        m=m,
        integral=integral,
        expected_integral=HALF * cell.mass,
        tests=tuple(entries),
    )
    return phi, report


def limit_escape_certificate(space: MeasureSpaceModel, cell_id: str) -> Fraction:
    """L1 distance from half-the-indicator to the splice values: mass/2 > 0."""
    cell = space.cell(cell_id)
    if cell.kind is not CellKind.SATURATED:
        raise NotSaturated(f"cell {cell_id} is not saturated")
    F = indicator_correspondence(space, cell_id)
    half = linear_combination(space, [(HALF, indicator_of_cells(space, [cell_id]))])
    total = Fraction(0)
    for c in space.cells:
        defect = _splice_defect(F, c, half)
        assert isinstance(defect, Fraction)
        total += defect
    return total


@dataclass(frozen=True)
class UhcAuditReport:
    cell: str
    cell_kind: str
    depth: int
    limit_in_H0: bool
    defect: Fraction
    averages_constant: bool
    identities_ok: bool


def uhc_audit(space: MeasureSpaceModel, cell_id: str, depth: int = 8) -> UhcAuditReport:
    """Audit whether the escape-sequence limit stays attainable.

    The family indexed by 1/m consists of the alternating selections; their
    conditional expectations settle on half the conditioned indicator.  The
    limit is attainable exactly when the designated cell is rich, and the
    defect on a saturated cell equals half its mass.
    """
    cell = space.cell(cell_id)
    if not cell.has_inner:
        raise NotSaturated("audit requires a cell with an inner coordinate")
    F0 = indicator_correspondence(space, cell_id)
    ind = indicator_of_cells(space, [cell_id])
    limit = linear_combination(space, [(HALF, ind)])
    limit_g = space.conditional_expectation(limit)

    averages_constant = True
    identities_ok = True
    for m in range(1, depth + 1):
        phi = dyadic_selection(space, cell_id, m)
        val = selection_value(F0, phi)
        e_m = space.conditional_expectation(val)
        if cell.kind is CellKind.RICH:
            if not functions_equal(space, e_m, limit_g):
                averages_constant = False
        else:
            tests = _canonical_dyadic_tests(space, cell_id, min(3, m - 1))
            for psi in tests:
                lhs = space.integrate(scalar_product(space, psi, val))[0]
                rhs = HALF * space.integrate(scalar_product(space, psi, ind))[0]
                if lhs != rhs:
                    identities_ok = False

    result = membership(F0, limit_g)
    if result.member:
        defect = Fraction(0)
    else:
        defect = limit_escape_certificate(space, cell_id)
    return UhcAuditReport(
        cell=cell_id,
        cell_kind=cell.kind.value,
        depth=depth,
        limit_in_H0=result.member,
        defect=defect,
        averages_constant=averages_constant,
        identities_ok=identities_ok,
    )


def _canonical_dyadic_tests(
    space: MeasureSpaceModel, cell_id: str, max_level: int
) -> list[StepFunction]:
    tests = []
    for level in range(0, max_level + 1):
        denom = 2**level
        for i in range(denom):
            lo, hi = Fraction(i, denom), Fraction(i + 1, denom)
            tests.append(dyadic_indicator(space, cell_id, lo, hi))
    return tests


def dyadic_indicator(
    space: MeasureSpaceModel, cell_id: str, lo: Fraction, hi: Fraction
) -> StepFunction:
    """Scalar indicator of a sub-interval of one cell's inner coordinate."""
    values: dict[str, object] = {}
    for c in space.cells:
        if c.id == cell_id:
            pieces = []
            if lo > 0:
                pieces.append((lo, (Fraction(0),)))
            pieces.append((hi, (Fraction(1),)))
            if hi < 1:
                pieces.append((Fraction(1), (Fraction(0),)))
            values[c.id] = tuple(pieces)
        elif c.has_inner:
            values[c.id] = ((Fraction(1), (Fraction(0),)),)
        else:
            values[c.id] = (Fraction(0),)
    return StepFunction(1, values)
