"""Command-line front end.

Subcommands: conditions, classify, derive-odes, kernel, verify-quartic,
simulate, degree-test.  Every command produces a Report that serialises to
JSON ({"command", "inputs", "result", "status"}); identical flags and seed
give byte-identical output.  Exit codes: 0 success, 1 negative
verification/classification result, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction
from typing import Optional, Sequence

from .certify import verify_quartic_theorem
from .dynamics import (NumericPotential, integrate_hamilton,
                       nve_coefficient_samples, polynomial_degree_test)
from .jets import generate_conditions, nve_jet, pullback_condition
from .mpoly import MPoly
from .odes import (BRANCHES, BRANCH_ANCHORS, ansatz_denominator, branch_system,
                   center_and_reduce, generic_quartic_system, rational_kernel,
                   specialize_quartic)
from .potential import InvariantPlaneError, ParseError, format_canonical, parse_potential

REPORT_SCHEMAS = {
    "conditions": {
        "result": {"degree": "int",
                   "conditions": [{"n": "int", "k": "int", "jet_poly": "canonical text"}]},
    },
    "classify": {
        "result": {"member": "bool", "phi": "text", "alpha": "text",
                   "alpha_degree": "int", "pullback_vanishes": "bool",
                   "nonintegrability_note": "cited text"},
    },
    "derive-odes": {
        "result": {"<name>": {"text": "equation text", "coefficients|poly": "canonical"}},
    },
    "kernel": {
        "result": {"case": "generic|b0|c0", "dimension": "int",
                   "denominator": "text", "extra_pole_order": "int",
                   "numerators": ["text"], "wronskian": "text"},
    },
    "verify-quartic": {
        "result": {"branches": [{"name": "str", "q_degree": "int",
                                 "num_equations": "int",
                                 "trials": [{"params": "map", "verdict": "str"}],
                                 "verdict": "str"}],
                   "conclusion": "str", "theorem_form": "str",
                   "nonintegrability_note": "str"},
    },
    "simulate": {
        "result": {"csv": "path", "samples": "int", "energy_drift": "float",
                   "plane_deviation": "float", "diverged": "bool",
                   "degree_test": {"degree": "int", "pass": "bool", "residual": "float"}},
    },
    "degree-test": {
        "result": {"degree": "int", "pass": "bool", "residual": "float",
                   "metric": "float"},
    },
}


def _report(command: str, inputs: dict, result, status: str = "ok", stage: str = "") -> dict:
    rep = {"command": command, "inputs": inputs, "result": result, "status": status}
    if stage:
        rep["stage"] = stage
    return rep


def _emit(report: dict, as_json: bool, text_lines: Optional[Sequence[str]] = None) -> None:
    if as_json:
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        for line in text_lines or []:
            print(line)


def _cmd_conditions(args) -> int:
    if args.degree < 0:
        print("error: --degree must be non-negative", file=sys.stderr)
        return 2
    cond = generate_conditions(args.degree)
    payload = {"degree": cond.degree,
               "conditions": [{"n": n, "k": k, "jet_poly": p.to_text()}
                              for (n, k, p) in cond.conditions]}
    report = _report("conditions", {"degree": args.degree, "format": args.format}, payload)
    lines = [f"conditions for NVE coefficient degree <= {args.degree}:"]
    lines += [f"  E({n},{k}) = {p.to_text()} = 0" for (n, k, p) in cond.conditions]
    _emit(report, args.format == "json", lines)
    return 0


def _cmd_classify(args) -> int:
    try:
        pot = parse_potential(args.potential)
    except (ParseError, InvariantPlaneError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    pb = pullback_condition(MPoly.var(nve_jet(5)), pot.alpha, pot.phi)
    vanishes = pb.is_zero
    adeg = pot.alpha.degree("x1")
    member = vanishes and adeg == 4
    from .certify import NONINTEGRABILITY_NOTE
    payload = {"member": member,
               "phi": format_canonical(pot.phi),
               "alpha": format_canonical(pot.alpha),
               "alpha_degree": adeg,
               "pullback_vanishes": vanishes,
               "nonintegrability_note": NONINTEGRABILITY_NOTE if member else ""}
    report = _report("classify", {"potential": args.potential}, payload)
    lines = [f"member of the quartic-NVE family: {member}",
             f"  phi = {payload['phi']}",
             f"  alpha = {payload['alpha']} (degree {adeg})",
             f"  fifth-derivative pullback vanishes: {vanishes}"]
    if member:
        lines.append(f"  note: {payload['nonintegrability_note']}")
    _emit(report, args.json, lines)
    return 0 if member else 1


def _cmd_derive_odes(args) -> int:
    wanted = [w.strip() for w in args.emit.split(",") if w.strip()]
    valid = {"L", "NL", "L2", "NL2"}
    bad = [w for w in wanted if w not in valid]
    if bad:
        print(f"error: unknown equations {bad}; choose from {sorted(valid)}", file=sys.stderr)
        return 2
    cond = generate_conditions(4)
    linear, nonlinear = specialize_quartic(cond)
    l2, nl2, mu = center_and_reduce(linear, nonlinear)
    out = {}
    if "L" in wanted:
        out["L"] = {"unknown": "phi(x1)", "order": linear.order,
                    "coefficients": [c.to_text() for c in linear.coeffs],
                    "text": linear.to_text().replace("u", "phi")}
    if "NL" in wanted:
        out["NL"] = {"unknown": "y = phi'(x1)", "poly": nonlinear.poly.to_text(),
                     "text": nonlinear.to_text()}
    if "L2" in wanted:
        out["L2"] = {"unknown": "y(x)", "order": l2.order,
                     "coefficients": [c.to_text() for c in l2.coeffs],
                     "text": l2.to_text().replace("u", "y"),
                     "centering_shift": mu.to_text()}
    if "NL2" in wanted:
        out["NL2"] = {"unknown": "y(x)", "poly": nl2.poly.to_text(),
                      "text": nl2.to_text()}
    report = _report("derive-odes", {"emit": args.emit}, out)
    lines = []
    for name in ("L", "NL", "L2", "NL2"):
        if name in out:
            lines.append(f"{name}: {out[name]['text']}")
    _emit(report, args.json, lines)
    return 0


_CASE_TO_BRANCH = {"generic": "generic", "b0": "b_zero", "c0": "c_zero"}


def _cmd_kernel(args) -> int:
    branch = next(b for b in BRANCHES if b.name == _CASE_TO_BRANCH[args.case])
    lb, _ = branch_system(branch, generic_quartic_system())
    denom, pole = ansatz_denominator(lb)
    basis = rational_kernel(lb, denom, 3, pole, args.degree_bound,
                            anchor=BRANCH_ANCHORS[branch.name])
    payload = {"case": args.case,
               "dimension": basis.dimension,
               "denominator": basis.denominator.to_text(),
               "denominator_exponent": basis.denominator_exponent,
               "extra_pole_order": basis.extra_pole_order,
               "numerators": [n.to_text() for n in basis.numerators],
               "wronskian": basis.wronskian.to_text()}
    report = _report("kernel", {"case": args.case, "degree_bound": args.degree_bound}, payload)
    lines = [f"case {args.case}: kernel dimension {basis.dimension}",
             f"  common denominator: "
             + (f"x^{basis.extra_pole_order} * " if basis.extra_pole_order else "")
             + f"({basis.denominator.to_text()})^{basis.denominator_exponent}"]
    lines += [f"  numerator: {n.to_text()}" for n in basis.numerators]
    lines.append(f"  wronskian: {basis.wronskian.to_text()}")
    _emit(report, args.json, lines)
    return 0


def _cmd_verify(args) -> int:
    cert = verify_quartic_theorem(trials=args.trials, seed=args.seed,
                                  degree_bound=args.degree_bound)
    payload = cert.to_json_dict()
    report = _report("verify-quartic",
                     {"trials": args.trials, "seed": args.seed,
                      "degree_bound": args.degree_bound},
                     payload,
                     status="ok" if cert.status == "ok" else "fail",
                     stage=cert.failing_stage)
    out_path = args.out or (args.json if args.json else "")
    if out_path:
        with open(out_path, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
    lines = [f"status: {cert.status}" + (f" ({cert.failing_stage})" if cert.failing_stage else "")]
    for b in cert.branches:
        lines.append(f"  branch {b.branch.name}: deg_x Q = {b.q_degree}, "
                     f"{b.num_equations} conics, verdict {b.verdict}"
                     + (f" [{b.witness_summary}]" if b.witness_summary else ""))
    lines.append(f"conclusion: {cert.conclusion}")
    _emit(report, args.json is not None, lines)
    return 0 if cert.matches_theorem else 1


def _parse_floats(text: str, n: int, what: str):
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != n:
        raise ValueError(f"{what} needs {n} comma-separated numbers")
    return [float(p) for p in parts]


def _cmd_simulate(args) -> int:
    try:
        pot = parse_potential(args.potential)
        init = _parse_floats(args.init, 4, "--init")
    except (ParseError, InvariantPlaneError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    npot = NumericPotential.from_potential(pot)
    traj = integrate_hamilton(npot, init, args.dt, args.T)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["t", "x1", "y1", "x2", "y2", "H"])
            for t, s, h in zip(traj.times, traj.states, traj.energies):
                writer.writerow([repr(float(t))] + [repr(float(v)) for v in s]
                                + [repr(float(h))])
    payload = {"csv": args.out or "",
               "samples": int(traj.states.shape[0]),
               "energy_drift": traj.energy_drift(),
               "plane_deviation": traj.max_plane_deviation(),
               "diverged": traj.diverged}
    status = "ok"
    exit_code = 0
    if args.degree_test is not None:
        on_plane = init[2] == 0 and init[3] == 0
        if not on_plane:
            print("error: --degree-test needs initial data on the invariant plane",
                  file=sys.stderr)
            return 2
        samples = nve_coefficient_samples(traj, npot)
        ok, residual = polynomial_degree_test(samples, args.degree_test)
        payload["degree_test"] = {"degree": args.degree_test, "pass": ok,
                                   "residual": residual}
        exit_code = 0 if ok else 1
    if traj.diverged:
        status = "fail"
        exit_code = 1
    report = _report("simulate",
                     {"potential": args.potential, "init": args.init,
                      "dt": args.dt, "T": args.T, "out": args.out or ""},
                     payload, status=status,
                     stage="divergence" if traj.diverged else "")
    lines = [f"samples: {payload['samples']}  energy drift: {payload['energy_drift']:.3e}"
             f"  plane deviation: {payload['plane_deviation']:.3e}"]
    if traj.diverged:
        lines.append("trajectory diverged and was truncated")
    if "degree_test" in payload:
        dt_res = payload["degree_test"]
        lines.append(f"degree <= {dt_res['degree']} test: "
                     f"{'pass' if dt_res['pass'] else 'fail'} "
                     f"(fit residual {dt_res['residual']:.3e})")
    _emit(report, args.json, lines)
    return exit_code


def _cmd_degree_test(args) -> int:
    try:
        pot = parse_potential(args.potential)
        x1, y1 = _parse_floats(args.init, 2, "--init")
    except (ParseError, InvariantPlaneError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    npot = NumericPotential.from_potential(pot)
    traj = integrate_hamilton(npot, (x1, y1, 0.0, 0.0), args.dt, args.T)
    samples = nve_coefficient_samples(traj, npot)
    ok, residual = polynomial_degree_test(samples, args.degree)
    payload = {"degree": args.degree, "pass": ok, "residual": residual}
    report = _report("degree-test",
                     {"potential": args.potential, "init": args.init,
                      "degree": args.degree, "dt": args.dt, "T": args.T},
                     payload)
    _emit(report, args.json,
          [f"NVE coefficient polynomial of degree <= {args.degree}: "
           f"{'pass' if ok else 'fail'} (fit residual {residual:.3e})"])
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="quartic-nve",
        description="Classify and certify invariant-plane Hamiltonians with "
                    "quartic polynomial normal variational equations.")
    ap.add_argument("--help-schema", action="store_true",
                    help="print the JSON report schemas and exit")
    sub = ap.add_subparsers(dest="command")

    p = sub.add_parser("conditions", help="emit the degree-d jet conditions")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.set_defaults(func=_cmd_conditions)

    p = sub.add_parser("classify", help="test a potential for family membership")
    p.add_argument("--potential", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("derive-odes", help="print the specialised equations")
    p.add_argument("--emit", default="L,NL,L2,NL2")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_derive_odes)

    p = sub.add_parser("kernel", help="rational solution basis per branch")
    p.add_argument("--case", choices=("generic", "b0", "c0"), required=True)
    p.add_argument("--degree-bound", type=int, default=8)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_kernel)

    p = sub.add_parser("verify-quartic", help="run the full certification pipeline")
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--degree-bound", type=int, default=8)
    p.add_argument("--json", nargs="?", const="", default=None, metavar="PATH",
                   help="print the report as JSON; with a PATH, also write "
                        "the certificate there")
    p.add_argument("--out", dest="out", default="",
                   help="write the certificate JSON to this path")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("simulate", help="integrate Hamilton's equations")
    p.add_argument("--potential", required=True)
    p.add_argument("--init", required=True, help="x1,y1,x2,y2")
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--T", type=float, default=10.0)
    p.add_argument("--out", default="", help="trajectory CSV path")
    p.add_argument("--degree-test", type=int, default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("degree-test", help="polynomial degree test of the NVE coefficient")
    p.add_argument("--potential", required=True)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--init", required=True, help="x1,y1 (plane coordinates)")
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--T", type=float, default=10.0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_degree_test)

    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    if args.help_schema:
        print(json.dumps(REPORT_SCHEMAS, indent=2, sort_keys=True))
        return 0
    if not getattr(args, "command", None):
        ap.print_help()
        return 2
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
