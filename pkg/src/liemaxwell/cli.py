"""Command-line surface: catalog inspection, verification, searches, classification table.

Text tables are for humans; JSON (--json) is the contract surface.  Exit
codes: 0 success/agreement, 1 verification failure, 2 input error,
3 inconclusive.  Every JSON report embeds the invocation config and the
catalog checksum so runs are reproducible from the report alone.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .families import family_by_id
from .kahler import hermitian_diagnostics
from .lie_algebra import (CatalogError, catalog, catalog_checksum, entry_by_name, instantiate,
                          metric_from_params)
from .maxwell import EINSTEIN_NULL_STRESS, NON_EINSTEIN_EM, em_residual
from .metric_geometry import curvature_summary, validate_metric
from .solver import Candidate, CandidateError, classify_algebra, multistart_search

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2
EXIT_INCONCLUSIVE = 3


@dataclass
class RunConfig:
    command: str
    entries: list[str] | None = None
    tol: float | None = None
    seed: int = 0
    seeds: int = 0
    orientation: int = 1
    mode: str = "unit_F"
    output_format: str = "text"

    def __post_init__(self):
        if self.tol is not None and self.tol <= 0:
            raise ValueError("tolerance must be positive")
        if self.seed < 0 or self.seeds < 0:
            raise ValueError("seed and seeds must be nonnegative")

    def to_dict(self) -> dict:
        return asdict(self)


def _emit(payload: dict, config: RunConfig, args, text: str) -> None:
    if args.json or args.out:
        payload = dict(payload)
        payload["config"] = config.to_dict()
        payload.setdefault("catalog_sha256", catalog_checksum())
        blob = json.dumps(payload, indent=2, sort_keys=True)
        if args.out:
            Path(args.out).write_text(blob + "\n")
        if args.json:
            print(blob)
        elif not args.out:
            print(text)
    else:
        print(text)


def _json_arg(raw: str | None) -> dict:
    if not raw:
        return {}
    value = json.loads(raw)
    if not isinstance(value, dict):
        raise ValueError("expected a JSON object")
    return value


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_list(args) -> int:
    config = RunConfig(command="list", output_format="json" if args.json else "text")
    entries = catalog()
    if args.verdict:
        entries = [e for e in entries if e.verdict == args.verdict]
    rows = [{"name": e.name, "verdict": e.verdict,
             "algebra_params": [p.name for p in e.params],
             "metric_params": list(e.metric_param_names)} for e in entries]
    width = max((len(r["name"]) for r in rows), default=4)
    lines = [f"{'entry':<{width}}  {'verdict':<18} params"]
    for r in rows:
        pstr = ",".join(r["algebra_params"]) or "-"
        lines.append(f"{r['name']:<{width}}  {r['verdict']:<18} {pstr}")
    lines.append(f"{len(rows)} entries")
    _emit({"entries": rows, "count": len(rows)}, config, args, "\n".join(lines))
    return EXIT_OK


def cmd_show(args) -> int:
    try:
        entry = entry_by_name(args.entry)
    except KeyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    config = RunConfig(command="show", entries=[entry.name])
    payload = {
        "name": entry.name,
        "verdict": entry.verdict,
        "brackets": [{"i": i, "j": j, "coeffs": list(map(list, coeffs))}
                     for i, j, coeffs in entry.brackets],
        "params": [{"name": p.name, "range": [p.lo, p.hi], "exclude": list(p.exclude)}
                   for p in entry.params],
        "metric_shape": [list(row) for row in entry.metric_shape],
        "metric_constraints": list(entry.metric_constraints),
        "variants": [{"name": v.name, "params": v.params, "admissible": v.admissible}
                     for v in entry.variants],
        "notes": entry.notes,
    }
    text = [f"{entry.name}  [{entry.verdict}]"]
    for i, j, coeffs in entry.brackets:
        terms = " + ".join(f"({expr}) e{k}" for k, expr in coeffs)
        text.append(f"  [e{i}, e{j}] = {terms}")
    text.append("  metric shape: " + "; ".join(" ".join(str(c) for c in row)
                                               for row in entry.metric_shape))
    text.append("  constraints > 0: " + "; ".join(entry.metric_constraints))
    if entry.notes:
        text.append("  note: " + entry.notes)
    _emit(payload, config, args, "\n".join(text))
    return EXIT_OK


def cmd_curvature(args) -> int:
    try:
        entry = entry_by_name(args.entry)
        algebra_params = _json_arg(args.algebra_params)
        metric_params = _json_arg(args.metric_params)
        L = instantiate(entry, algebra_params)
        g = metric_from_params(entry, metric_params)
    except (KeyError, ValueError, CatalogError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    check = validate_metric(entry, g)
    if not check.ok:
        print("error: inadmissible metric: " + "; ".join(check.failures), file=sys.stderr)
        return EXIT_INPUT
    config = RunConfig(command="curvature", entries=[entry.name])
    _, _, ric, s, ric0 = curvature_summary(L, g)
    einstein = bool(np.abs(ric0).max() <= (args.tol or 1e-9))
    payload = {
        "entry": entry.name,
        "metric": [[float(x) for x in row] for row in g],
        "ricci": [[float(x) for x in row] for row in ric],
        "scalar_curvature": float(s),
        "traceless_ricci": [[float(x) for x in row] for row in ric0],
        "einstein": einstein,
    }
    text = [f"{entry.name}: scalar curvature {float(s):.12g}, einstein={einstein}",
            "Ric0 = " + np.array2string(np.asarray(ric0, dtype=float), precision=10)]
    _emit(payload, config, args, "\n".join(text))
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        cand = Candidate.from_json(args.candidate)
        entry = entry_by_name(cand.entry_name)
        L = instantiate(entry, cand.algebra_params)
        g = metric_from_params(entry, cand.metric_params)
        check = validate_metric(entry, g)
        if not check.ok:
            raise CandidateError("inadmissible metric: " + "; ".join(check.failures))
    except (CandidateError, CatalogError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    tol = args.tol or 1e-9
    config = RunConfig(command="verify", entries=[entry.name], tol=tol,
                       orientation=cand.orientation)
    report = em_residual(L, g, cand.f_coeffs, cand.orientation, tol=tol)
    if entry.family:
        fam = family_by_id(entry.family["id"])
        omega = fam.omega_from_metric(cand.metric_params, cand.orientation)
        report.hermitian = hermitian_diagnostics(L, g, omega)
    text = (f"{entry.name}: {report.classification}  "
            f"r_em={report.r_em:.3e} r_dF={report.r_dF:.3e} r_d*F={report.r_dstarF:.3e}  "
            f"s={report.scalar_curvature:.6g}")
    _emit(report.to_dict(), config, args, text)
    accepted = {"any": (NON_EINSTEIN_EM, EINSTEIN_NULL_STRESS),
                NON_EINSTEIN_EM: (NON_EINSTEIN_EM,),
                EINSTEIN_NULL_STRESS: (EINSTEIN_NULL_STRESS,)}[args.require]
    return EXIT_OK if report.classification in accepted else EXIT_FAIL


def cmd_family(args) -> int:
    from .solver import verify_solution_family
    try:
        report = verify_solution_family(args.family, orientation=args.orientation,
                                     tol=args.tol or 1e-10)
    except KeyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    config = RunConfig(command="family", entries=[report.family_id],
                       orientation=args.orientation, tol=args.tol)
    text = (f"family {report.family_id} (orientation {report.orientation:+d}): "
            f"{'PASS' if report.all_pass else 'FAIL'} over {report.n_points} points; "
            f"max residual {report.max_residual:.3e}, kappa err {report.max_kappa_error:.3e}, "
            f"rho0 err {report.max_rho0_error:.3e}")
    _emit(report.to_dict(), config, args, text)
    return EXIT_OK if report.all_pass else EXIT_FAIL


def cmd_search(args) -> int:
    try:
        entry = entry_by_name(args.entry)
    except KeyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    config = RunConfig(command="search", entries=[entry.name], seed=args.seed,
                       seeds=args.seeds, orientation=args.orientation, mode=args.mode,
                       tol=args.tol)
    outcome = multistart_search(entry, n_seeds=args.seeds, seed=args.seed, mode=args.mode,
                                orientation=args.orientation, n_jobs=args.jobs,
                                tol=args.tol or 1e-9)
    classes: dict[str, int] = {}
    for _, rep in outcome.solutions:
        classes[rep.classification] = classes.get(rep.classification, 0) + 1
    miss = outcome.best_nonsolution_residual
    text = (f"{entry.name}: {len(outcome.solutions)} solutions {classes or ''} "
            f"(best non-solution residual "
            f"{'n/a' if not np.isfinite(miss) else format(miss, '.3e')})")
    _emit(outcome.to_dict(include_timing=args.timing), config, args, text)
    return EXIT_OK


def cmd_classify(args) -> int:
    entries = catalog()
    if args.entries:
        wanted = [entry_by_name(n).name for n in args.entries]
        entries = [e for e in entries if e.name in wanted]
    config = RunConfig(command="classify", entries=[e.name for e in entries],
                       seed=args.seed, seeds=args.seeds)
    rows = []
    for entry in entries:
        res = classify_algebra(entry, budget=(args.seeds, 45), seed=args.seed,
                               n_jobs=args.jobs)
        rows.append(res)
    width = max(len(r.entry_name) for r in rows)
    lines = [f"{'entry':<{width}}  {'computed':<22} {'expected':<18} agree"]
    for r in rows:
        flag = "yes" if r.agree else ("inconclusive" if r.inconclusive else "NO")
        lines.append(f"{r.entry_name:<{width}}  {r.computed:<22} {r.expected:<18} {flag}")
    n_agree = sum(1 for r in rows if r.agree)
    lines.append(f"{n_agree}/{len(rows)} rows agree")
    payload = {"rows": [r.to_dict() for r in rows],
               "agree": n_agree, "total": len(rows)}
    _emit(payload, config, args, "\n".join(lines))
    if any(r.inconclusive for r in rows):
        return EXIT_INCONCLUSIVE
    return EXIT_OK if n_agree == len(rows) else EXIT_FAIL


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="liemaxwell",
        description="Einstein-Maxwell solutions on 4-dimensional Lie algebras.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, tol_default=None):
        p.add_argument("--json", action="store_true", help="emit JSON on stdout")
        p.add_argument("--out", metavar="PATH", help="write the JSON report to a file")
        p.add_argument("--tol", type=float, default=tol_default, help="tolerance override")

    p = sub.add_parser("list", help="catalog entries and verdicts")
    p.add_argument("--verdict", choices=["HasNonEinsteinEM", "EinsteinOnly", "NoSolution", "Flat"])
    common(p)
    p.set_defaults(fn=cmd_list)

    p = sub.add_parser("show", help="one entry in full")
    p.add_argument("entry")
    common(p)
    p.set_defaults(fn=cmd_show)

    p = sub.add_parser("curvature", help="curvature report for a metric")
    p.add_argument("entry")
    p.add_argument("--metric-params", required=True, metavar="JSON")
    p.add_argument("--algebra-params", metavar="JSON")
    common(p)
    p.set_defaults(fn=cmd_curvature)

    p = sub.add_parser("verify", help="verify a candidate file")
    p.add_argument("candidate", help="candidate JSON path")
    p.add_argument("--require", default="any",
                   choices=["any", NON_EINSTEIN_EM, EINSTEIN_NULL_STRESS])
    common(p)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("family", help="verify one of the four solution families")
    p.add_argument("family", help="2A2, A2+2A1, A46a0 or A49half")
    p.add_argument("--orientation", type=int, choices=[1, -1], default=1)
    common(p)
    p.set_defaults(fn=cmd_family)

    p = sub.add_parser("search", help="multistart search on one entry")
    p.add_argument("entry")
    p.add_argument("--seeds", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=["unit_F", "free_F"], default="unit_F")
    p.add_argument("--orientation", type=int, choices=[1, -1], default=1)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--timing", action="store_true", help="include wall time in the report")
    common(p)
    p.set_defaults(fn=cmd_search)

    p = sub.add_parser("classify", aliases=["theorem1"],
                       help="computed vs expected verdicts across the catalog")
    p.add_argument("--seeds", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--entries", nargs="+", metavar="ENTRY",
                   help="restrict to these entries (names or aliases like A44)")
    p.add_argument("--jobs", type=int, default=1)
    common(p)
    p.set_defaults(fn=cmd_classify)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, CatalogError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
