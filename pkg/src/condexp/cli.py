"""Command-line front end.

Every subcommand loads a JSON fixture, runs one operation, and writes a JSON
report (stdout or --out).  Exit codes: 0 success / PASS, 1 input error,
2 certified negative (obstruction, failed membership, failed coarseness,
non-convergence, or a failed search).  All randomness is seeded and reports
serialize with sorted keys, so identical invocations are byte-identical.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import attainable, equilibrium, pennies, purification, serialize
from .errors import AtomObstructionError, CondexpError, SchemaError
from .games import coarser_info_check, derive_interplayer_info

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_NEGATIVE = 2


def _read(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise SchemaError(path, "file not found")
    except json.JSONDecodeError as exc:
        raise SchemaError(path, f"invalid JSON: {exc}")


def _emit(report: dict, out: str | None) -> None:
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _frac_arg(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}")


def cmd_g_atom(args) -> int:
    doc = _read(args.fixture)
    space = serialize.load_space(doc.get("space", doc))
    has_atom, witness = space.has_g_atom()
    _emit({"has_g_atom": has_atom, "witness": witness}, args.out)
    return EXIT_OK


def cmd_condexp_set(args) -> int:
    doc = _read(args.fixture)
    F = serialize.load_correspondence(doc.get("correspondence", doc))
    ces = attainable.cond_exp_set(F)
    report = {
        "blocks": {
            label: serialize.dump_block_set(bs) for label, bs in ces.regions.items()
        },
        "saturated_cells": list(ces.saturated_cells),
    }
    code = EXIT_OK
    if "h" in doc:
        h = serialize.load_step_function(doc["h"], F.space, "h")
        tolerance = Fraction(0)
        if args.mode == "float":
            tolerance = Fraction(1, 10**9)
        result = attainable.membership(F, h, tolerance)
        report["membership"] = serialize.dump_membership(result)
        if not result.member:
            code = EXIT_NEGATIVE
    _emit(report, args.out)
    return code


def cmd_convexify(args) -> int:
    doc = _read(args.fixture)
    F = serialize.load_correspondence(doc.get("correspondence", doc))
    s1 = serialize.load_selection(doc.get("s1"), F.space, "s1")
    s2 = serialize.load_selection(doc.get("s2"), F.space, "s2")
    out = attainable.convexify_witness(F, s1, s2, args.alpha)
    if isinstance(out, attainable.AtomObstruction):
        _emit({"obstruction": serialize.dump_obstruction(out)}, args.out)
        return EXIT_NEGATIVE
    from .correspondences import selection_value
    from .measure import functions_equal, linear_combination

    space = F.space
    achieved = space.conditional_expectation(selection_value(F, out))
    target = linear_combination(
        space,
        [
            (args.alpha, space.conditional_expectation(selection_value(F, s1))),
            (1 - args.alpha, space.conditional_expectation(selection_value(F, s2))),
        ],
    )
    _emit(
        {
            "selection": serialize.dump_selection(out, space),
            "alpha": serialize.frac_str(args.alpha),
            "identity_verified": functions_equal(space, achieved, target),
        },
        args.out,
    )
    return EXIT_OK


def cmd_rademacher(args) -> int:
    doc = _read(args.fixture)
    space = serialize.load_space(doc.get("space", doc))
    cell = args.cell or doc.get("cell")
    if cell is None:
        raise SchemaError("cell", "no cell named (use --cell or fixture key)")
    tests = [
        serialize.load_step_function(td, space, f"tests[{k}]")
        for k, td in enumerate(doc.get("tests", []))
    ]
    _phi, report = attainable.rademacher_escape(space, cell, args.m, tests)
    payload = serialize.dump_rademacher(report)
    payload["limit_escape_certificate"] = serialize.frac_str(
        attainable.limit_escape_certificate(space, cell)
    )
    _emit(payload, args.out)
    return EXIT_OK


def cmd_uhc_audit(args) -> int:
    doc = _read(args.fixture)
    space = serialize.load_space(doc.get("space", doc))
    cell = args.cell or doc.get("cell")
    if cell is None:
        raise SchemaError("cell", "no cell named (use --cell or fixture key)")
    report = attainable.uhc_audit(space, cell, args.depth)
    _emit(serialize.dump_uhc(report), args.out)
    return EXIT_OK


def cmd_derive_info(args) -> int:
    doc = _read(args.fixture)
    game = serialize.load_game(doc.get("game", doc))
    info = derive_interplayer_info(game)
    report = {
        "players": [
            {
                "blocks": [list(b) for b in part.blocks],
                "kinds": list(part.kinds),
                "block_masses": [serialize.frac_str(x) for x in part.block_masses],
            }
            for part in info
        ]
    }
    _emit(report, args.out)
    return EXIT_OK


def cmd_coarser_check(args) -> int:
    doc = _read(args.fixture)
    game = serialize.load_game(doc.get("game", doc))
    checks = coarser_info_check(game)
    report = {
        "players": [{"passes": c.passes, "witness": c.witness} for c in checks],
        "all_pass": all(c.passes for c in checks),
    }
    _emit(report, args.out)
    return EXIT_OK if report["all_pass"] else EXIT_NEGATIVE


def _solve_options(args) -> equilibrium.SolveOptions:
    method = args.method
    if method == "auto" and args.mode == "float":
        method = "br"
    return equilibrium.SolveOptions(
        epsilon=args.epsilon,
        max_iters=args.max_iters,
        damping=args.damping,
        seed=args.seed,
        method=method,
    )


def _dump_equilibrium(game, report: equilibrium.EquilibriumReport) -> dict:
    return {
        "mixtures": [
            [[serialize.frac_str(w) for w in row] for row in rows]
            for rows in report.mixtures
        ],
        "profile": [
            serialize.dump_strategy(s, spec)
            for s, spec in zip(report.profile, game.players)
        ],
        "eps": [serialize.frac_str(e) for e in report.eps],
        "iterations": report.iterations,
        "converged": report.converged,
        "method": report.method,
        "value": serialize.frac_str(report.value) if report.value is not None else None,
        "coarser": list(report.coarser),
    }


def cmd_solve(args) -> int:
    doc = _read(args.fixture)
    game = serialize.load_game(doc.get("game", doc))
    report = equilibrium.solve_behavioral(game, _solve_options(args))
    payload = _dump_equilibrium(game, report)
    code = EXIT_OK if report.converged else EXIT_NEGATIVE
    if args.purify and report.converged:
        try:
            purified = equilibrium.purify_equilibrium(game, report)
            payload["purified"] = {
                "profile": [
                    serialize.dump_strategy(s, spec)
                    for s, spec in zip(purified.profile, game.players)
                ],
                "eps": [serialize.frac_str(e) for e in purified.eps],
                "mixtures_preserved": purified.mixtures_preserved,
                "payoffs_preserved": purified.payoffs_preserved,
            }
        except AtomObstructionError as exc:
            payload["purified"] = {
                "obstruction": serialize.dump_obstruction(exc.obstruction)
            }
            code = EXIT_NEGATIVE
    _emit(payload, args.out)
    return code


def cmd_purify(args) -> int:
    doc = _read(args.fixture)
    game = serialize.load_game(doc.get("game", doc))
    profile = [
        serialize.load_strategy(sd, spec, f"profile[{i}]")
        for i, (sd, spec) in enumerate(zip(doc.get("profile", []), game.players))
    ]
    if len(profile) != len(game.players):
        raise SchemaError("profile", "one strategy per player required")
    try:
        cert = purification.strong_purify(
            game, profile, deviation_samples=args.samples, seed=args.seed
        )
    except AtomObstructionError as exc:
        _emit({"obstruction": serialize.dump_obstruction(exc.obstruction)}, args.out)
        return EXIT_NEGATIVE
    payload = {
        "profile": [
            serialize.dump_strategy(s, spec)
            for s, spec in zip(cert.profile, game.players)
        ],
        "report": _dump_equivalence(cert.report),
        "block_identity": list(cert.block_identity),
        "all_zero": cert.report.all_zero,
    }
    _emit(payload, args.out)
    return EXIT_OK if cert.report.all_zero else EXIT_NEGATIVE


def _dump_equivalence(report) -> dict:
    return {
        "payoff_residuals": [serialize.frac_str(x) for x in report.payoff_residuals],
        "distribution_defects": [
            [serialize.frac_str(x) for x in row] for row in report.distribution_defects
        ],
        "strong_residuals": [
            [serialize.frac_str(x) for x in row] for row in report.strong_residuals
        ],
        "belief_violation_mass": [
            serialize.frac_str(x) for x in report.belief_violation_mass
        ],
        "belief_violations": [
            {
                "player": v.player,
                "cell": v.cell_id,
                "lo": serialize.frac_str(v.lo),
                "hi": serialize.frac_str(v.hi),
                "action": v.action,
            }
            for v in report.belief_violations
        ],
    }


def cmd_audit_equivalence(args) -> int:
    doc = _read(args.fixture)
    game = serialize.load_game(doc.get("game", doc))
    f = [
        serialize.load_strategy(sd, spec, f"f[{i}]")
        for i, (sd, spec) in enumerate(zip(doc.get("f", []), game.players))
    ]
    g = [
        serialize.load_strategy(sd, spec, f"g[{i}]")
        for i, (sd, spec) in enumerate(zip(doc.get("g", []), game.players))
    ]
    deviations = None
    if "deviations" in doc:
        deviations = [
            [
                serialize.load_strategy(dd, game.players[i], f"deviations[{i}][{k}]")
                for k, dd in enumerate(row)
            ]
            for i, row in enumerate(doc["deviations"])
        ]
    report = purification.audit_equivalence(game, f, g, deviations)
    payload = _dump_equivalence(report)
    payload["all_zero"] = report.all_zero
    _emit(payload, args.out)
    return EXIT_OK if report.all_zero else EXIT_NEGATIVE


def cmd_pennies(args) -> int:
    game = pennies.PenniesGame(args.m, args.variant)
    report = pennies.no_pure_equilibrium_search(
        game, budget=args.budget, grid=args.grid, epsilon=args.epsilon
    )
    payload = {
        "m": report.m,
        "variant": report.variant,
        "budget": report.budget,
        "grid": report.grid,
        "epsilon": serialize.frac_str(report.epsilon),
        "strategies": report.strategies,
        "pairs": report.pairs,
        "exhaustive": report.exhaustive,
        "min_gain": serialize.frac_str(report.min_gain),
        "min_gain_float": format(float(report.min_gain), ".12g"),
        "argmin": [list(report.argmin[0]), list(report.argmin[1])],
        "uniform_gains": [serialize.frac_str(x) for x in report.uniform_gains],
        "passed": report.passed,
    }
    if args.csv:
        f1 = pennies.IntervalUnionStrategy.from_grid(report.argmin[0], report.m)
        rows = pennies.interim_weight_rows(f1, samples=args.samples)
        with open(args.csv, "w") as fh:
            header = ",".join(["l2"] + [f"w{j + 1}" for j in range(report.m)])
            fh.write(header + "\n")
            for l2, weights in rows:
                fh.write(
                    ",".join([format(l2, ".12g")] + [format(w, ".12g") for w in weights])
                    + "\n"
                )
    _emit(payload, args.out)
    return EXIT_OK if report.passed else EXIT_NEGATIVE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="condexp",
        description="Conditional-expectation sets of correspondences and "
        "finite-action Bayesian games, with exact certificates.",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument(
        "--mode",
        choices=["rational", "float"],
        default="rational",
        help="numeric mode: exact membership / LP (rational) or tolerant (float)",
    )
    common.add_argument("--seed", type=int, default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_parser(name, **kwargs):
        return sub.add_parser(name, parents=[common], **kwargs)

    p = add_parser("g-atom", help="detect saturated or point cells")
    p.add_argument("fixture")
    p.set_defaults(func=cmd_g_atom)

    p = add_parser("condexp-set", help="block regions and optional membership")
    p.add_argument("fixture")
    p.set_defaults(func=cmd_condexp_set)

    p = add_parser("convexify", help="blend two selections' conditional expectations")
    p.add_argument("fixture")
    p.add_argument("--alpha", type=_frac_arg, required=True)
    p.set_defaults(func=cmd_convexify)

    p = add_parser("rademacher", help="alternating escape selection report")
    p.add_argument("fixture")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--cell")
    p.set_defaults(func=cmd_rademacher)

    p = add_parser("uhc-audit", help="limit attainability audit")
    p.add_argument("fixture")
    p.add_argument("--cell")
    p.add_argument("--depth", type=int, default=8)
    p.set_defaults(func=cmd_uhc_audit)

    p = add_parser("derive-info", help="derived inter-player information")
    p.add_argument("fixture")
    p.set_defaults(func=cmd_derive_info)

    p = add_parser("coarser-check", help="coarser inter-player information check")
    p.add_argument("fixture")
    p.set_defaults(func=cmd_coarser_check)

    p = add_parser("solve", help="block-constant equilibrium search")
    p.add_argument("fixture")
    p.add_argument("--method", choices=["auto", "lp", "br", "enum"], default="auto")
    p.add_argument("--epsilon", type=_frac_arg, default=Fraction(1, 10**9))
    p.add_argument("--max-iters", type=int, default=4000)
    p.add_argument("--damping", type=float, default=0.1)
    p.add_argument("--purify", action="store_true")
    p.set_defaults(func=cmd_solve)

    p = add_parser("purify", help="strong purification of a behavioral profile")
    p.add_argument("fixture")
    p.add_argument("--samples", type=int, default=16)
    p.set_defaults(func=cmd_purify)

    p = add_parser("audit-equivalence", help="equivalence residuals of two profiles")
    p.add_argument("fixture")
    p.set_defaults(func=cmd_audit_equivalence)

    p = add_parser("pennies", help="triangular-prior matching-pennies lab")
    p.add_argument("--m", type=int, default=2)
    p.add_argument(
        "--variant",
        choices=list(pennies.VARIANTS),
        default="type-irrelevant",
    )
    p.add_argument("--budget", type=int, default=2)
    p.add_argument("--grid", type=int, default=8)
    p.add_argument("--epsilon", type=_frac_arg, default=Fraction(1, 100))
    p.add_argument("--csv", help="write (l2, interim weights) rows here")
    p.add_argument("--samples", type=int, default=99)
    p.set_defaults(func=cmd_pennies)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SchemaError as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return EXIT_INPUT
    except AtomObstructionError as exc:
        sys.stderr.write(f"obstruction: {exc}\n")
        return EXIT_NEGATIVE
    except CondexpError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
