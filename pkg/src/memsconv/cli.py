"""memsconv command line: classify, lp, sweep, subspace, validate."""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

import numpy as np

from memsconv import nelp, regions, subspaces, sweep
from memsconv.qcore import as_spectrum


def parse_spectrum(text: str):
    parts = [p for p in text.replace(" ", "").split(",") if p]
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("spectrum needs 4 comma-separated values")
    try:
        return as_spectrum([float(Fraction(p)) for p in parts])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def parse_perm(text: str) -> tuple[int, ...]:
    perm = tuple(int(p) for p in text.split(","))
    if sorted(perm) != [1, 2, 3, 4]:
        raise argparse.ArgumentTypeError("permutation must list 1..4 once each")
    return perm


def _complex(token: str) -> complex:
    re, _, im = token.partition(",")
    return complex(float(re), float(im) if im else 0.0)


def _tokens(path: str) -> list[list[complex]]:
    with open(path) as fh:
        return [[_complex(t) for t in line.split()] for line in fh
                if line.strip() and not line.lstrip().startswith("#")]


def read_matrix(path: str) -> np.ndarray:
    """16 whitespace-separated 're,im' entries, row-major, line breaks free."""
    vals = [z for row in _tokens(path) for z in row]
    if len(vals) != 16:
        raise ValueError(f"{path}: expected 16 entries, found {len(vals)}")
    return np.array(vals).reshape(4, 4)


def read_basis(path: str) -> list[np.ndarray]:
    """One ket per line: 4 whitespace-separated 're,im' amplitudes."""
    rows = _tokens(path)
    for k, row in enumerate(rows, 1):
        if len(row) != 4:
            raise ValueError(f"{path}: line {k} has {len(row)} amplitudes, expected 4")
    return [np.array(r) for r in rows]


def _cmd_classify(args) -> int:
    s = args.spectrum
    if args.target_perm:
        v = nelp.feasible_for_permutation(s, args.target_perm, args.a_grid)
    else:
        v = nelp.feasible_for_spectrum(s, args.a_grid)
    c = regions.classify(s, v)
    rec = sweep.SweepRecord(*s.values, cls=c.tag.value, detail=c.detail, lp_status=v.status,
                            marginal=bool(v.marginal), cuts=len(v.cuts))
    sys.stdout.write(sweep.records_to_csv([rec]))
    if args.certificate:
        if v.feasible:
            print("# feasible: no certificate")
        else:
            print(f"# certificate verified: {nelp.verify_farkas(nelp.problem_for(v), v.certificate)}")
            sys.stdout.write(nelp.verdict_to_record(v))
    return 0


def _cmd_lp(args) -> int:
    if args.target_file:
        v = nelp.feasible_for_target(args.spectrum, read_matrix(args.target_file), args.a_grid)
    else:
        v = nelp.feasible_for_spectrum(args.spectrum, args.a_grid)
    sys.stdout.write(nelp.verdict_to_record(v))
    return 0


def _cmd_sweep(args) -> int:
    palette = {}
    for item in args.palette or []:
        name, _, colour = item.partition("=")
        palette[name] = colour
    cfg = sweep.SweepConfig(lambda4=args.lambda4, step=args.step, a_grid_size=args.a_grid,
                            workers=args.workers, csv_path=args.csv, svg_path=args.svg,
                            palette=palette)
    records = sweep.sweep(cfg)
    report = sweep.cross_validate(records)
    print(f"{len(records)} points written to {args.csv}")
    print(report.text())
    return 0 if report.ok else 1


def _cmd_subspace(args) -> int:
    v = subspaces.Subspace.span(*read_basis(args.basis))
    if args.kind == "count":
        if v.dim != 2:
            raise ValueError("count needs a 2-dimensional basis")
        print(subspaces.separable_ray_count(v).value)
    else:
        if v.dim != 3:
            raise ValueError("complement needs a 3-dimensional basis")
        print(subspaces.complement_class(v).value)
    return 0


def _cmd_validate(args) -> int:
    report = sweep.cross_validate(sweep.read_csv(args.csv))
    print(report.text())
    return 0 if report.ok else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="memsconv", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="region class and LP status of one spectrum")
    p.add_argument("--spectrum", type=parse_spectrum, required=True, help="l1,l2,l3,l4 (fractions ok)")
    p.add_argument("--target-perm", type=parse_perm, help="Bell weight assignment, e.g. 2,1,3,4")
    p.add_argument("--certificate", action="store_true", help="print Farkas multipliers when infeasible")
    p.add_argument("--a-grid", type=int, default=nelp.DEFAULT_GRID_SIZE)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("lp", help="raw LP verdict record")
    p.add_argument("--spectrum", type=parse_spectrum, required=True)
    p.add_argument("--a-grid", type=int, default=nelp.DEFAULT_GRID_SIZE)
    p.add_argument("--target-file", help="4x4 target density matrix, 16 're,im' entries")
    p.set_defaults(func=_cmd_lp)

    p = sub.add_parser("sweep", help="classify a (lambda1, lambda2) grid at fixed lambda4")
    p.add_argument("--lambda4", type=float, required=True)
    p.add_argument("--step", type=float, default=0.005, help=f"grid pitch (fast preset: {sweep.FAST_STEP})")
    p.add_argument("--a-grid", type=int, default=nelp.DEFAULT_GRID_SIZE)
    p.add_argument("--csv", required=True)
    p.add_argument("--svg")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--palette", action="append", metavar="CLASS=COLOUR")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("subspace", help="separable-ray count or complement class")
    p.add_argument("kind", choices=["count", "complement"])
    p.add_argument("--basis", required=True, help="one ket per line, 4 're,im' amplitudes")
    p.set_defaults(func=_cmd_subspace)

    p = sub.add_parser("validate", help="cross-validate a sweep CSV")
    p.add_argument("--csv", required=True)
    p.set_defaults(func=_cmd_validate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"memsconv: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
