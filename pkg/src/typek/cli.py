"""Command-line entry point.  Exit codes: 0 pass, 1 fail, 2 usage or parse error."""

from __future__ import annotations

import argparse
import json
import sys

from . import invariants, modelcheck, quadforms, report, torus
from .expr import ParseError, parse
from .lattice import LatticeError

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _emit(payload: dict) -> None:
    sys.stdout.write(report.dumps(payload))


def _exit_for(status: str) -> int:
    return EXIT_PASS if status in ("PASS", "EVIDENCE") else EXIT_FAIL


def cmd_lattice_info(args) -> int:
    expr = parse(args.expr)
    l = expr.lattice()
    out = {
        "expression": expr.text(),
        "rank": l.rank,
        "det": l.det,
        "signature": list(l.signature),
        "even": l.is_even,
    }
    if not l.is_degenerate:
        form = quadforms.discriminant_form(l)
        out["discriminant_group"] = list(form.invariant_factors())
        out["discriminant_form"] = str(form)
        if l.is_even:
            out["milgram_signature"] = quadforms.milgram_signature(form)
    _emit(out)
    return EXIT_PASS


def cmd_form_info(args) -> int:
    form = quadforms.block(args.symbol)
    _emit({
        "form": str(form),
        "order": form.size,
        "invariant_factors": list(form.invariant_factors()),
        "nondegenerate": form.is_nondegenerate(),
        "milgram_signature": quadforms.milgram_signature(form),
    })
    return EXIT_PASS


def cmd_keylemma(args) -> int:
    sec = report.keylemma_section(args.catalog, args.case)
    _emit(sec)
    return _exit_for(sec["status"])


def cmd_invariants(args) -> int:
    rows = list(invariants.iter_rows(args.model))
    if args.row:
        rows = [r for r in rows if r["name"] == args.row]
        if not rows:
            raise KeyError(f"no row {args.row!r} in model {args.model}")
    results = [invariants.compute_row(r, args.model) for r in rows]
    status = "PASS" if all(r["match"] for r in results) else "FAIL"
    _emit({"status": status, "details": results})
    return _exit_for(status)


def cmd_sample(args) -> int:
    rep = modelcheck.family_evidence(args.case, args.model, args.q, args.trials, args.seed)
    _emit(rep.as_dict())
    return _exit_for(rep.status)


def cmd_typea(args) -> int:
    res = torus.verify_type_a()
    _emit(res)
    return _exit_for(res["status"])


def cmd_topology(args) -> int:
    h1 = torus.h1_report(args.group)
    h11, h21, rho = torus.hodge_and_picard(args.group)
    status = "PASS" if h1["split_matches_table"] else "FAIL"
    _emit({"status": status, "h1": h1, "h11": h11, "h21": h21, "rho": rho})
    return _exit_for(status)


def cmd_verify_all(args) -> int:
    rep = report.run_all(seed=args.seed, case=args.case, catalog_path=args.catalog, trials=args.trials)
    text = report.dumps(rep)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return _exit_for(rep["summary"]["overall"])


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="typek", description="Lattice and torus checks for Calabi-Yau threefold quotients.")
    sub = p.add_subparsers(dest="command", required=True)

    lat = sub.add_parser("lattice", help="lattice expression tools")
    lat_sub = lat.add_subparsers(dest="action", required=True)
    info = lat_sub.add_parser("info")
    info.add_argument("expr")
    info.set_defaults(func=cmd_lattice_info)

    form = sub.add_parser("form", help="finite quadratic form tools")
    form_sub = form.add_subparsers(dest="action", required=True)
    finfo = form_sub.add_parser("info")
    finfo.add_argument("symbol")
    finfo.set_defaults(func=cmd_form_info)

    kl = sub.add_parser("keylemma")
    kl.add_argument("--case")
    kl.add_argument("--catalog")
    kl.set_defaults(func=cmd_keylemma)

    inv = sub.add_parser("invariants")
    inv.add_argument("--model", choices=["44", "222"], required=True)
    inv.add_argument("--row")
    inv.set_defaults(func=cmd_invariants)

    smp = sub.add_parser("sample")
    smp.add_argument("--case", required=True)
    smp.add_argument("--model", choices=["44", "222"], default="44")
    smp.add_argument("--q", type=int)
    smp.add_argument("--trials", type=int, default=20)
    smp.add_argument("--seed", type=int, default=0)
    smp.set_defaults(func=cmd_sample)

    ta = sub.add_parser("typea")
    ta_sub = ta.add_subparsers(dest="action", required=True)
    ta_sub.add_parser("verify").set_defaults(func=cmd_typea)

    topo = sub.add_parser("topology")
    topo.add_argument("--group", required=True, choices=sorted(torus.GROUP_TO_CASE))
    topo.set_defaults(func=cmd_topology)

    va = sub.add_parser("verify-all")
    va.add_argument("--out")
    va.add_argument("--seed", type=int, default=0)
    va.add_argument("--case")
    va.add_argument("--catalog")
    va.add_argument("--trials", type=int, default=20)
    va.set_defaults(func=cmd_verify_all)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, LatticeError, quadforms.FormError, KeyError, ValueError, json.JSONDecodeError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
