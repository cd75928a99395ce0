"""One-dimensional piecewise utilities over exact rationals.

Everything here works on partitions of [0, 1] (or a sub-interval) given by
strictly increasing breakpoints, on affine forms ``A + B*t``, and on finite
interval unions. These are the workhorses behind step-function refinement,
proportional splits, and exact envelope integration.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

AffineForm = tuple[Fraction, Fraction]  # (A, B) meaning A + B*t


def common_refinement(*upto_lists: Iterable[Fraction]) -> list[Fraction]:
    """Merge several increasing breakpoint lists into one sorted list."""
    points: set[Fraction] = set()
    for uptos in upto_lists:
        points.update(uptos)
    return sorted(points)


def piece_bounds(uptos: Sequence[Fraction], start: Fraction = Fraction(0)) -> list[tuple[Fraction, Fraction]]:
    bounds = []
    lo = start
    for hi in uptos:
        if hi <= lo:
            raise ValueError("breakpoints must be strictly increasing")
        bounds.append((lo, hi))
        lo = hi
    return bounds


def piece_payload(pieces: Sequence[tuple[Fraction, object]], lo: Fraction):
    """Payload of the piece covering point ``lo`` in a [(upto, payload)] list."""
    for upto, payload in pieces:
        if lo < upto:
            return payload
    return pieces[-1][1]


def merged_pieces(*piece_lists: Sequence[tuple[Fraction, object]]):
    """Walk several [(upto, payload)] partitions of [0, 1] in lockstep.

    Yields (lo, hi, payloads) on the common refinement in one linear pass,
    avoiding the quadratic cost of repeated point lookups.
    """
    idx = [0] * len(piece_lists)
    lo = Fraction(0)
    while True:
        hi = min(pl[i][0] for pl, i in zip(piece_lists, idx))
        yield lo, hi, tuple(pl[i][1] for pl, i in zip(piece_lists, idx))
        if hi >= 1:
            return
        for j, pl in enumerate(piece_lists):
            if pl[idx[j]][0] == hi:
                idx[j] += 1
        lo = hi


def integrate_affine(form: AffineForm, lo: Fraction, hi: Fraction) -> Fraction:
    a, b = form
    return a * (hi - lo) + b * (hi * hi - lo * lo) / 2


def affine_at(form: AffineForm, t: Fraction) -> Fraction:
    return form[0] + form[1] * t


def argmax_segments(
    forms: Sequence[AffineForm], lo: Fraction, hi: Fraction
) -> list[tuple[Fraction, Fraction, tuple[int, ...]]]:
    """Partition [lo, hi) so the argmax set of the forms is constant per part.

    Crossing points of distinct forms become breakpoints, so within each open
    part any tie at the midpoint means the tied forms coincide on the part.
    """
    if hi <= lo:
        return []
    cuts = {lo, hi}
    n = len(forms)
    for i in range(n):
        a1, b1 = forms[i]
        for j in range(i + 1, n):
            a2, b2 = forms[j]
            if b1 == b2:
                continue
            t = (a2 - a1) / (b1 - b2)
            if lo < t < hi:
                cuts.add(t)
    points = sorted(cuts)
    segments = []
    for slo, shi in zip(points, points[1:]):
        mid = (slo + shi) / 2
        values = [affine_at(f, mid) for f in forms]
        best = max(values)
        winners = tuple(k for k, v in enumerate(values) if v == best)
        segments.append((slo, shi, winners))
    return segments


def integrate_envelope(forms: Sequence[AffineForm], lo: Fraction, hi: Fraction) -> Fraction:
    """Exact integral of max of affine forms over [lo, hi)."""
    total = Fraction(0)
    for slo, shi, winners in argmax_segments(forms, lo, hi):
        total += integrate_affine(forms[winners[0]], slo, shi)
    return total


def proportional_subintervals(
    lo: Fraction,
    hi: Fraction,
    weights: Sequence[Fraction],
    symmetric: bool = False,
) -> list[tuple[Fraction, Fraction, int]]:
    """Split [lo, hi) into index-labelled sub-intervals with given lengths.

    Plain mode lays the sub-intervals left to right in index order.  Symmetric
    mode gives index k a mirrored pair of intervals about the midpoint, so the
    piece assigned to each index keeps the centroid of the whole interval;
    that preserves the integral of every affine function, not just constants.
    Zero weights get no interval.
    """
    total = sum(weights, Fraction(0))
    if total != 1 or any(w < 0 for w in weights):
        raise ValueError("weights must be nonnegative and sum to 1")
    length = hi - lo
    out: list[tuple[Fraction, Fraction, int]] = []
    if not symmetric:
        cursor = lo
        for k, w in enumerate(weights):
            if w == 0:
                continue
            nxt = cursor + w * length
            out.append((cursor, nxt, k))
            cursor = nxt
        return out
    acc = Fraction(0)
    for k, w in enumerate(weights):
        if w == 0:
            continue
        c0 = acc / 2
        c1 = (acc + w) / 2
        out.append((lo + c0 * length, lo + c1 * length, k))
        out.append((hi - c1 * length, hi - c0 * length, k))
        acc += w
    out.sort(key=lambda seg: seg[0])
    merged: list[tuple[Fraction, Fraction, int]] = []
    for seg in out:
        if merged and merged[-1][1] == seg[0] and merged[-1][2] == seg[2]:
            merged[-1] = (merged[-1][0], seg[1], seg[2])
        else:
            merged.append(seg)
    return merged


def normalize_intervals(intervals: Iterable[tuple[Fraction, Fraction]]) -> tuple[tuple[Fraction, Fraction], ...]:
    """Sort, drop empty, and merge adjacent/overlapping intervals."""
    ivs = sorted((lo, hi) for lo, hi in intervals if hi > lo)
    merged: list[tuple[Fraction, Fraction]] = []
    for lo, hi in ivs:
        if merged and lo <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(hi, merged[-1][1]))
        else:
            merged.append((lo, hi))
    return tuple(merged)


def intervals_measure(intervals: Iterable[tuple[Fraction, Fraction]]) -> Fraction:
    return sum((hi - lo for lo, hi in intervals), Fraction(0))


def intervals_clip(
    intervals: Iterable[tuple[Fraction, Fraction]], lo: Fraction, hi: Fraction
) -> tuple[tuple[Fraction, Fraction], ...]:
    out = []
    for a, b in intervals:
        a2, b2 = max(a, lo), min(b, hi)
        if b2 > a2:
            out.append((a2, b2))
    return tuple(out)
