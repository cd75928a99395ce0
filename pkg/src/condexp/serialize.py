"""Structured-text (JSON) loading and dumping for every domain object.

Rationals travel as strings ("3/4", "2"); loaders raise SchemaError with a
JSON-style path to the offending element, and dumpers emit plain dict/list
trees that serialize byte-identically under sorted-keys JSON.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any

from .attainable import (
    AtomObstruction,
    BlockCertificate,
    CondExpBlockSet,
    MembershipResult,
    RademacherReport,
    UhcAuditReport,
)
from .correspondences import FiniteIndexedCorrespondence, MixedSelection, Selection
from .errors import SchemaError
from .games import (
    BayesianGame,
    BehavioralStrategy,
    Entry,
    PlayerSpec,
    PureStrategy,
    TypeCell,
)
from .measure import Cell, CellKind, MeasureSpaceModel, StepFunction


def _frac(value: Any, path: str) -> Fraction:
    try:
        if isinstance(value, bool):
            raise ValueError
        if isinstance(value, (int, str)):
            return Fraction(value)
    except (ValueError, ZeroDivisionError):
        pass
    raise SchemaError(path, f"expected a rational like '3/4', got {value!r}")


def frac_str(x: Fraction) -> str:
    return str(Fraction(x))


def _expect(obj: Any, kind: type, path: str):
    if not isinstance(obj, kind):
        raise SchemaError(path, f"expected {kind.__name__}, got {type(obj).__name__}")
    return obj


# -- measure space -------------------------------------------------------------


def load_space(doc: Any, path: str = "space") -> MeasureSpaceModel:
    _expect(doc, dict, path)
    cells_doc = _expect(doc.get("cells"), list, f"{path}.cells")
    cells = []
    for i, cd in enumerate(cells_doc):
        p = f"{path}.cells[{i}]"
        _expect(cd, dict, p)
        kind_raw = cd.get("kind", "rich")
        try:
            kind = CellKind(kind_raw)
        except ValueError:
            raise SchemaError(f"{p}.kind", f"unknown kind {kind_raw!r}")
        cells.append(
            Cell(
                id=str(cd.get("id", f"c{i}")),
                mass=_frac(cd.get("mass"), f"{p}.mass"),
                kind=kind,
                g_block=str(cd.get("g_block", cd.get("id", f"c{i}"))),
            )
        )
    return MeasureSpaceModel(tuple(cells))


def dump_space(space: MeasureSpaceModel) -> dict:
    return {
        "cells": [
            {
                "id": c.id,
                "mass": frac_str(c.mass),
                "kind": c.kind.value,
                "g_block": c.g_block,
            }
            for c in space.cells
        ]
    }


def load_step_function(doc: Any, space: MeasureSpaceModel, path: str = "f") -> StepFunction:
    _expect(doc, dict, path)
    dim = doc.get("dim")
    if not isinstance(dim, int) or dim < 1:
        raise SchemaError(f"{path}.dim", "expected a positive integer")
    values_doc = _expect(doc.get("values"), dict, f"{path}.values")
    values: dict[str, object] = {}
    for c in space.cells:
        p = f"{path}.values[{c.id}]"
        if c.id not in values_doc:
            raise SchemaError(p, "missing cell entry")
        entry = values_doc[c.id]
        if c.has_inner:
            _expect(entry, list, p)
            pieces = []
            for k, pd in enumerate(entry):
                _expect(pd, dict, f"{p}[{k}]")
                upto = _frac(pd.get("upto"), f"{p}[{k}].upto")
                vec = _expect(pd.get("v"), list, f"{p}[{k}].v")
                pieces.append((upto, tuple(_frac(x, f"{p}[{k}].v") for x in vec)))
            values[c.id] = tuple(pieces)
        else:
            _expect(entry, list, p)
            values[c.id] = tuple(_frac(x, p) for x in entry)
    f = StepFunction(dim, values)
    f.validate(space)
    return f


def dump_step_function(f: StepFunction, space: MeasureSpaceModel) -> dict:
    values: dict[str, object] = {}
    for c in space.cells:
        entry = f.values[c.id]
        if c.has_inner:
            values[c.id] = [
                {"upto": frac_str(upto), "v": [frac_str(x) for x in vec]}
                for upto, vec in entry
            ]
        else:
            values[c.id] = [frac_str(x) for x in entry]
    return {"dim": f.dim, "values": values}


def load_correspondence(doc: Any, path: str = "correspondence") -> FiniteIndexedCorrespondence:
    _expect(doc, dict, path)
    space = load_space(doc.get("space"), f"{path}.space")
    branches_doc = _expect(doc.get("branches"), list, f"{path}.branches")
    branches = tuple(
        load_step_function(bd, space, f"{path}.branches[{k}]")
        for k, bd in enumerate(branches_doc)
    )
    return FiniteIndexedCorrespondence(space, branches)


def dump_correspondence(F: FiniteIndexedCorrespondence) -> dict:
    return {
        "space": dump_space(F.space),
        "branches": [dump_step_function(g, F.space) for g in F.branches],
    }


def load_selection(doc: Any, space: MeasureSpaceModel, path: str = "selection") -> Selection:
    _expect(doc, dict, path)
    assignments: dict[str, object] = {}
    for c in space.cells:
        p = f"{path}[{c.id}]"
        if c.id not in doc:
            raise SchemaError(p, "missing cell entry")
        entry = doc[c.id]
        if c.has_inner:
            _expect(entry, list, p)
            pieces = []
            for k, pd in enumerate(entry):
                _expect(pd, dict, f"{p}[{k}]")
                upto = _frac(pd.get("upto"), f"{p}[{k}].upto")
                branch = pd.get("branch")
                if not isinstance(branch, int):
                    raise SchemaError(f"{p}[{k}].branch", "expected an integer")
                pieces.append((upto, branch))
            assignments[c.id] = tuple(pieces)
        else:
            if not isinstance(entry, int):
                raise SchemaError(p, "expected an integer branch")
            assignments[c.id] = entry
    return Selection(assignments)


def dump_selection(s: Selection, space: MeasureSpaceModel) -> dict:
    out: dict[str, object] = {}
    for c in space.cells:
        entry = s.assignments[c.id]
        if c.has_inner:
            out[c.id] = [
                {"upto": frac_str(upto), "branch": k} for upto, k in entry
            ]
        else:
            out[c.id] = entry
    return out


def load_mixed_selection(doc: Any, space: MeasureSpaceModel, path: str = "mixed") -> MixedSelection:
    _expect(doc, dict, path)
    weights: dict[str, object] = {}
    for c in space.cells:
        p = f"{path}[{c.id}]"
        if c.id not in doc:
            raise SchemaError(p, "missing cell entry")
        entry = doc[c.id]
        _expect(entry, list, p)
        if c.has_inner:
            pieces = []
            for k, pd in enumerate(entry):
                _expect(pd, dict, f"{p}[{k}]")
                upto = _frac(pd.get("upto"), f"{p}[{k}].upto")
                row = _expect(pd.get("w"), list, f"{p}[{k}].w")
                pieces.append((upto, tuple(_frac(x, f"{p}[{k}].w") for x in row)))
            weights[c.id] = tuple(pieces)
        else:
            weights[c.id] = tuple(_frac(x, p) for x in entry)
    return MixedSelection(weights)


# -- games ---------------------------------------------------------------------


def load_game(doc: Any, path: str = "game") -> BayesianGame:
    _expect(doc, dict, path)
    players_doc = _expect(doc.get("players"), list, f"{path}.players")
    specs = []
    for i, pd in enumerate(players_doc):
        p = f"{path}.players[{i}]"
        _expect(pd, dict, p)
        actions = _expect(pd.get("actions"), list, f"{p}.actions")
        cells_doc = _expect(pd.get("cells"), list, f"{p}.cells")
        cells = []
        for k, cd in enumerate(cells_doc):
            cp = f"{p}.cells[{k}]"
            _expect(cd, dict, cp)
            point = bool(cd.get("point", False))
            grid = ()
            if not point:
                grid_doc = _expect(cd.get("grid"), list, f"{cp}.grid")
                grid = tuple(_frac(x, f"{cp}.grid") for x in grid_doc)
            cells.append(
                TypeCell(str(cd.get("id", f"t{i}")), _frac(cd.get("mass"), f"{cp}.mass"), grid, point)
            )
        specs.append(PlayerSpec(tuple(str(a) for a in actions), tuple(cells)))

    def load_entry(ed, p) -> tuple[tuple[int, ...], Entry]:
        _expect(ed, dict, p)
        units = _expect(ed.get("units"), list, f"{p}.units")
        key = tuple(int(u) for u in units)
        const = _frac(ed.get("const", "0"), f"{p}.const")
        slope = _frac(ed.get("slope", "0"), f"{p}.slope") if "slope" in ed else Fraction(0)
        coord = ed.get("coord")
        if slope != 0 and not isinstance(coord, int):
            raise SchemaError(f"{p}.coord", "affine entries need an integer coord")
        return key, (Entry(const, slope, coord) if slope != 0 else Entry(const))

    density_doc = _expect(doc.get("density"), list, f"{path}.density")
    density = {}
    for k, ed in enumerate(density_doc):
        key, entry = load_entry(ed, f"{path}.density[{k}]")
        density[key] = entry
    payoffs_doc = _expect(doc.get("payoffs"), list, f"{path}.payoffs")
    payoffs = []
    for i, tables_doc in enumerate(payoffs_doc):
        p = f"{path}.payoffs[{i}]"
        _expect(tables_doc, list, p)
        tables = {}
        for k, td in enumerate(tables_doc):
            tp = f"{p}[{k}]"
            _expect(td, dict, tp)
            profile = tuple(int(a) for a in _expect(td.get("profile"), list, f"{tp}.profile"))
            entries = {}
            for j, ed in enumerate(_expect(td.get("entries"), list, f"{tp}.entries")):
                key, entry = load_entry(ed, f"{tp}.entries[{j}]")
                entries[key] = entry
            tables[profile] = entries
        payoffs.append(tables)
    return BayesianGame(tuple(specs), density, tuple(payoffs))


def dump_game(game: BayesianGame) -> dict:
    def dump_entry(key, e: Entry) -> dict:
        out = {"units": list(key), "const": frac_str(e.const)}
        if e.slope != 0:
            out["slope"] = frac_str(e.slope)
            out["coord"] = e.coord
        return out

    players = []
    for spec in game.players:
        cells = []
        for c in spec.cells:
            cd = {"id": c.id, "mass": frac_str(c.mass)}
            if c.point:
                cd["point"] = True
            else:
                cd["grid"] = [frac_str(g) for g in c.grid]
            cells.append(cd)
        players.append({"actions": list(spec.actions), "cells": cells})
    density = [dump_entry(k, e) for k, e in sorted(game.density.items())]
    payoffs = []
    for i in range(len(game.players)):
        tables = []
        for x in sorted(game.payoffs[i]):
            tables.append(
                {
                    "profile": list(x),
                    "entries": [
                        dump_entry(k, e) for k, e in sorted(game.payoffs[i][x].items())
                    ],
                }
            )
        payoffs.append(tables)
    return {"players": players, "density": density, "payoffs": payoffs}


def load_strategy(doc: Any, spec: PlayerSpec, path: str = "strategy"):
    _expect(doc, dict, path)
    kind = doc.get("type", "behavioral")
    plan_doc = _expect(doc.get("plan"), dict, f"{path}.plan")
    plan: dict[str, object] = {}
    for cell in spec.cells:
        p = f"{path}.plan[{cell.id}]"
        if cell.id not in plan_doc:
            raise SchemaError(p, "missing cell entry")
        entry = plan_doc[cell.id]
        if kind == "pure":
            if cell.point:
                if not isinstance(entry, int):
                    raise SchemaError(p, "expected an action index")
                plan[cell.id] = entry
            else:
                _expect(entry, list, p)
                plan[cell.id] = tuple(
                    (_frac(pd.get("upto"), f"{p}.upto"), int(pd.get("action")))
                    for pd in entry
                )
        else:
            _expect(entry, list, p)
            if cell.point:
                plan[cell.id] = tuple(_frac(x, p) for x in entry)
            else:
                plan[cell.id] = tuple(
                    (
                        _frac(pd.get("upto"), f"{p}.upto"),
                        tuple(_frac(x, f"{p}.w") for x in pd.get("w", [])),
                    )
                    for pd in entry
                )
    strategy = PureStrategy(plan) if kind == "pure" else BehavioralStrategy(plan)
    strategy.validate(spec)
    return strategy


def dump_strategy(strategy, spec: PlayerSpec) -> dict:
    if isinstance(strategy, PureStrategy):
        plan: dict[str, object] = {}
        for cell in spec.cells:
            entry = strategy.plan[cell.id]
            if cell.point:
                plan[cell.id] = entry
            else:
                plan[cell.id] = [
                    {"upto": frac_str(upto), "action": k} for upto, k in entry
                ]
        return {"type": "pure", "plan": plan}
    plan = {}
    for cell in spec.cells:
        entry = strategy.plan[cell.id]
        if cell.point:
            plan[cell.id] = [frac_str(x) for x in entry]
        else:
            plan[cell.id] = [
                {"upto": frac_str(upto), "w": [frac_str(x) for x in w]}
                for upto, w in entry
            ]
    return {"type": "behavioral", "plan": plan}


# -- report dumpers ------------------------------------------------------------


def dump_block_set(bs: CondExpBlockSet) -> dict:
    out = {
        "block": bs.block,
        "block_mass": frac_str(bs.block_mass),
        "dim": bs.dim,
    }
    if bs.dim <= 3:
        out["polytopes"] = [
            [[frac_str(x) for x in v] for v in poly] for poly in bs.polytopes()
        ]
    else:
        out["polytopes"] = None
    return out


def dump_certificate(cert: BlockCertificate) -> dict:
    distance = cert.distance
    return {
        "block": cert.block,
        "kind": cert.kind,
        "distance": frac_str(distance) if isinstance(distance, Fraction) else distance,
        "direction": [frac_str(x) for x in cert.direction] if cert.direction else None,
    }


def dump_membership(result: MembershipResult) -> dict:
    return {
        "member": result.member,
        "certificate": dump_certificate(result.certificate) if result.certificate else None,
        "failures": [dump_certificate(c) for c in result.failures],
    }


def dump_obstruction(ob: AtomObstruction) -> dict:
    return {
        "cell": ob.cell_id,
        "alpha": frac_str(ob.alpha) if ob.alpha is not None else None,
        "reason": ob.reason,
        "distance": frac_str(ob.distance)
        if isinstance(ob.distance, Fraction)
        else ob.distance,
    }


def dump_rademacher(report: RademacherReport) -> dict:
    return {
        "cell": report.cell,
        "m": report.m,
        "integral": frac_str(report.integral),
        "expected_integral": frac_str(report.expected_integral),
        "tests": [
            {
                "level": t.level,
                "lhs": frac_str(t.lhs),
                "rhs": frac_str(t.rhs),
                "holds": t.holds,
            }
            for t in report.tests
        ],
    }


def dump_uhc(report: UhcAuditReport) -> dict:
    return {
        "cell": report.cell,
        "cell_kind": report.cell_kind,
        "depth": report.depth,
        "limit_in_H0": report.limit_in_H0,
        "defect": frac_str(report.defect),
        "averages_constant": report.averages_constant,
        "identities_ok": report.identities_ok,
    }
