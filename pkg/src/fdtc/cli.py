"""Command-line entry point.

Exit codes: 0 success, 1 parse error, 2 validation failure (or identity
mismatch), 3 chain search failure.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .chains import (
    ChainAmbiguous,
    ChainNotFound,
    SearchCaps,
    chain_H,
    hj_expand,
    hj_valency,
    synthesize_chain,
)
from .core import InvalidData, Valency, format_rational, parse_rational
from .enumeration import (
    ADMISSIBLE,
    ENVELOPE,
    EnumSpec,
    abs_fdtc,
    enumerate_chains,
    extremal_rows,
    random_monodromy,
    write_csv,
)
from .fiber import FiberFormatError, FiberReport, delta_invariants, family_delta, load_fiber, validate_fiber
from .monodromy import (
    MonodromyFormatError,
    assemble_fiber,
    check_bounds,
    cut_curve_types,
    delta_from_map,
    fdtc_all,
    load_monodromy,
    lower_bound,
    validate_monodromy,
    verify_main_identity,
)

EXIT_OK, EXIT_PARSE, EXIT_INVALID, EXIT_SEARCH = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would exit with 2, which means "invalid" here
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_PARSE)


def _valency_arg(text: str) -> Valency:
    try:
        return Valency.of(tuple(int(x) for x in text.split(",")))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad valency {text!r}: {exc}") from None


def _ints_arg(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.replace(",", " ").split())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from None


def _rational_arg(text: str):
    try:
        return parse_rational(text)
    except InvalidData as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _print_json(obj) -> None:
    print(json.dumps(obj, indent=2, sort_keys=False))


def _render_fiber_report(r: FiberReport) -> None:
    print("principal components: " + ", ".join(r.principal_ids))
    for c in r.chains:
        line = f"chain {c.start} -> {c.end}: {' '.join(map(str, c.seq))}  H={format_rational(c.H)}"
        if c.report:
            rep = c.report
            line += (
                f"  valencies {rep.valency_start} {rep.valency_end}  m={rep.m_gamma}"
                f"  s={format_rational(rep.s)}  c={format_rational(rep.c)}"
            )
        else:
            line += "  (not a negative-twist chain)"
        if c.amphidrome:
            line += "  amphidrome"
        line += f"  type {'?' if c.type is None else c.type}"
        print(line)
    for t in r.tails:
        val = str(t.valency) if t.valency else "invalid"
        print(f"tail at {t.anchor}: {' '.join(map(str, t.seq))}  valency {val}")
    for i, q in sorted(r.delta_by_type.items()):
        print(f"delta_{i} = {format_rational(q)}")
    if r.delta_untyped:
        print(f"delta_untyped = {format_rational(r.delta_untyped)}")
    print(f"delta = {format_rational(r.delta_total)}")


def cmd_analyze(args) -> int:
    g = load_fiber(args.fiber)
    report = validate_fiber(g)
    if not report.ok:
        for p in report.problems:
            print(f"invalid: {p}", file=sys.stderr)
        return EXIT_INVALID
    r = delta_invariants(g)
    if args.json:
        _print_json(r.to_json())
    else:
        _render_fiber_report(r)
    return EXIT_OK


def cmd_monodromy(args) -> int:
    d = load_monodromy(args.monodromy)
    report = validate_monodromy(d)
    if not report.ok:
        for p in report.problems:
            print(f"invalid: {p}", file=sys.stderr)
        return EXIT_INVALID
    coeffs = fdtc_all(d)
    types = cut_curve_types(d)
    split = delta_from_map(d)
    out: dict = {
        "genus": d.genus,
        "fdtc": {a: format_rational(c) for a, c in coeffs.items()},
        "types": types,
        "delta": split.to_json(),
        "bounds_ok": check_bounds(d).ok,
    }
    status = EXIT_OK
    if args.assemble:
        fiber = assemble_fiber(d)
        with open(args.assemble, "w") as fh:
            json.dump(fiber.to_json(), fh, indent=2)
            fh.write("\n")
    if args.verify:
        ident = verify_main_identity(d)
        out["verify"] = ident.to_json()
        if not ident.equal:
            status = EXIT_INVALID
    if args.json:
        _print_json(out)
        return status
    for a in d.annuli:
        t = types[a.id]
        print(f"orbit {a.id}: m={a.orbit_len} s={format_rational(a.screw)} c={format_rational(coeffs[a.id])} type {'?' if t is None else t}")
    for i, q in sorted(split.by_type.items()):
        print(f"delta_{i} = {format_rational(q)}")
    if split.untyped:
        print(f"delta_untyped = {format_rational(split.untyped)}")
    print(f"delta = {format_rational(split.total)}")
    if args.assemble:
        print(f"fiber written to {args.assemble}")
    if args.verify:
        lhs, rhs = ident.fiber_side.total, ident.map_side.total
        verdict = "OK" if ident.equal else "MISMATCH"
        sign = "=" if lhs == rhs else "!="
        print(f"lhs {format_rational(lhs)} {sign} rhs {format_rational(rhs)} {verdict}")
    return status


def cmd_verify(args) -> int:
    failures = 0
    checked = 0
    for g in args.genus:
        for seed in range(args.seed, args.seed + args.count):
            d = random_monodromy(g, seed)
            ident = verify_main_identity(d)
            zero_delta = ident.map_side.total == 0
            zero_fdtc = all(c == 0 for c in fdtc_all(d).values())
            checked += 1
            if not ident.equal or zero_delta != zero_fdtc:
                failures += 1
                print(f"genus {g} seed {seed}: MISMATCH {json.dumps(ident.to_json())}")
    print(f"{checked} data checked, {failures} mismatches")
    return EXIT_OK if failures == 0 else EXIT_INVALID


def cmd_synth(args) -> int:
    caps = SearchCaps(max_len=args.max_len, max_entry=args.max_entry)
    chain = synthesize_chain(args.v1, args.v2, args.screw, args.amphidrome, caps)
    print(" ".join(map(str, chain.entries)))
    return EXIT_OK


def cmd_hj(args) -> int:
    if args.valency is not None:
        print(" ".join(map(str, hj_expand(args.valency).entries)))
    else:
        print(hj_valency(args.tail))
    return EXIT_OK


def cmd_bounds(args) -> int:
    g = args.genus
    print(f"overall {format_rational(lower_bound(g))}")
    for i in range(g // 2 + 1):
        print(f"type{i} {format_rational(lower_bound(g, i))}")
    return EXIT_OK


def cmd_enumerate(args) -> int:
    spec = EnumSpec(args.max_entry, args.max_len, args.genus, args.m_cap, args.amphidrome)
    if args.genus is not None:
        rows = extremal_rows(spec, args.type, args.mode, args.top)
    else:
        rows = (
            {
                "chain": " ".join(map(str, ch.entries)) + (" amph" if ch.amphidrome else ""),
                "d": ch.d,
                "H": format_rational(chain_H(ch.seq)),
                "m": ch.m_gamma,
                "c": format_rational(-abs_fdtc(ch)),
                "bound": "",
                "margin": "",
            }
            for ch in enumerate_chains(spec)
        )
    if args.out:
        with open(args.out, "w", newline="") as fh:
            n = write_csv(rows, fh)
        print(f"{n} rows written to {args.out}")
    else:
        write_csv(rows, sys.stdout)
    return EXIT_OK


def cmd_family(args) -> int:
    reports = []
    for path in args.fibers:
        g = load_fiber(path)
        check = validate_fiber(g)
        if not check.ok:
            for p in check.problems:
                print(f"invalid: {path}: {p}", file=sys.stderr)
            return EXIT_INVALID
        reports.append(delta_invariants(g))
    fam = family_delta(reports)
    if args.json:
        _print_json(
            {
                "genus": fam.genus,
                "delta_by_type": {str(i): format_rational(q) for i, q in sorted(fam.by_type.items())},
                "delta_untyped": format_rational(fam.untyped),
                "delta": format_rational(fam.total),
            }
        )
        return EXIT_OK
    for i, q in sorted(fam.by_type.items()):
        print(f"delta_{i} = {format_rational(q)}")
    if fam.untyped:
        print(f"delta_untyped = {format_rational(fam.untyped)}")
    print(f"delta = {format_rational(fam.total)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fdtc", description="Twist coefficients and modular invariants of degenerating curves.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", help="analyze a fiber dual graph")
    p.add_argument("fiber")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("monodromy", help="twist coefficients and delta of a monodromy datum")
    p.add_argument("monodromy")
    p.add_argument("--assemble", metavar="PATH", help="write the assembled fiber to PATH")
    p.add_argument("--verify", action="store_true", help="compare against the assembled fiber")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_monodromy)

    p = sub.add_parser("verify", help="check the delta identity on random data")
    p.add_argument("--genus", type=int, nargs="+", default=[2, 3, 4, 5])
    p.add_argument("--count", type=int, default=250, help="data per genus")
    p.add_argument("--seed", type=int, default=0, help="first seed")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("synth-chain", help="chain from boundary valencies and screw number")
    p.add_argument("--v1", type=_valency_arg, required=True)
    p.add_argument("--v2", type=_valency_arg, required=True)
    p.add_argument("--screw", type=_rational_arg, required=True)
    p.add_argument("--amphidrome", action="store_true")
    p.add_argument("--max-len", type=int, default=64)
    p.add_argument("--max-entry", type=int, default=10**6)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("hj", help="H-J tail of a valency, or the valency of a tail")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--valency", type=_valency_arg)
    g.add_argument("--tail", type=_ints_arg)
    p.set_defaults(func=cmd_hj)

    p = sub.add_parser("bounds", help="lower bounds on |c| at a genus")
    p.add_argument("--genus", type=int, required=True)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("enumerate", help="CSV of enumerated chains (extremal table with --genus)")
    p.add_argument("--max-entry", type=int, default=60)
    p.add_argument("--max-len", type=int, default=8)
    p.add_argument("--genus", type=int)
    p.add_argument("--type", type=int, help="restrict to one curve type")
    p.add_argument("--mode", choices=[ADMISSIBLE, ENVELOPE], default=ADMISSIBLE)
    p.add_argument("--m-cap", type=int)
    kind = p.add_mutually_exclusive_group()
    kind.add_argument("--amphidrome", action="store_const", const=True, default=None)
    kind.add_argument("--non-amphidrome", dest="amphidrome", action="store_const", const=False)
    p.add_argument("--top", type=int, default=20, help="rows of the extremal table (0 for all)")
    p.add_argument("--out", help="CSV path (default stdout)")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("family", help="sum delta over the singular fibers of a family")
    p.add_argument("fibers", nargs="+")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_family)
    return parser


def _glue_negative_values(argv: list[str]) -> list[str]:
    # "--screw -1/12" would otherwise read -1/12 as an option
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        if tok == "--screw":
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(_glue_negative_values(argv))
    except SystemExit as exc:  # usage errors and --help
        return exc.code if isinstance(exc.code, int) else EXIT_PARSE
    if getattr(args, "top", None) == 0:
        args.top = None
    try:
        return args.func(args)
    except (FiberFormatError, MonodromyFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ChainNotFound, ChainAmbiguous) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SEARCH
    except InvalidData as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
