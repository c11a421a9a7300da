"""car-lab command line: verification suites, one-shot checks, sweeps.

One-shot commands print a single JSON object {check, value, expected,
tolerance, pass, window} and exit 0 iff the check passes; ``suite`` prints
JSON-lines records.  Reports are deterministic for a fixed config and seed.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import (commutant_lab, crossed_product, fock_engine, fredholm_index,
               report, suites, weyl_ccr)
from .config import LabConfig, load_config
from .errors import CarLabError
from .mode_space import LoopFunction, ModeWindow, schwinger_form


def _emit(payload: dict) -> int:
    print(json.dumps(suites._jsonify(payload), sort_keys=True))
    return 0 if payload.get("pass", False) else 1


def _one_shot(check, value, expected, tolerance, window, extra=None) -> int:
    payload = {
        "check": check,
        "value": value,
        "expected": expected,
        "tolerance": tolerance,
        "pass": suites._matches(value, expected, tolerance),
        "window": window,
    }
    if extra:
        payload.update(extra)
    return _emit(payload)


def cmd_suite(args, cfg: LabConfig) -> int:
    records = suites.run_suite(args.name, cfg)
    text = report.records_to_jsonl(records, timings=args.timings)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.report_dir:
        paths = report.emit_report_dir(records, args.report_dir, timings=args.timings)
        print(f"# report written: {paths['jsonl']}, {paths['csv']}, {paths['figure']}",
              file=sys.stderr)
    return 0 if all(r.passed for r in records) else 1


def cmd_index(args, cfg: LabConfig) -> int:
    loop = LoopFunction.load(args.loop)
    rep = fredholm_index.charge_index(loop, base_n_max=args.window)
    expected = loop.winding
    return _one_shot("index.charge", rep.q, expected, 0, rep.window,
                     extra={"kernel_dim": rep.kernel_dim, "cokernel_dim": rep.cokernel_dim,
                            "stable": rep.stable})


def cmd_implementable(args, cfg: LabConfig) -> int:
    from .selfdual_car import implementability_check
    loop = LoopFunction.load(args.unitary)
    window = ModeWindow(args.window) if args.window else None
    out = implementability_check(loop, window)
    return _one_shot("implementability.index_sum", out["index_sum"], 0, 0, out["window"],
                     extra={"hs_norm_upper": out["hs_norm_upper"],
                            "hs_norm_lower": out["hs_norm_lower"],
                            "hs_converged": out["hs_converged"],
                            "index_nonneg": out["index_nonneg"].q,
                            "index_neg": out["index_neg"].q})


def cmd_schwinger(args, cfg: LabConfig) -> int:
    a = weyl_ccr.GeneratorElement.load(args.a)
    b = weyl_ccr.GeneratorElement.load(args.b)
    space = fock_engine.fock_space(args.fock_window or cfg.fock_n_max)
    a_op = a.as_operator(space.window)
    b_op = b.as_operator(space.window)
    value = fock_engine.schwinger_commutator(space, a_op, b_op)
    expected = 1j * schwinger_form(*suites._gen_ops(a, b))
    return _one_shot("schwinger.commutator", value, expected, cfg.tol_quadrature,
                     space.n_max)


def cmd_vev(args, cfg: LabConfig) -> int:
    a = weyl_ccr.GeneratorElement.load(args.a)
    space = fock_engine.fock_space(args.fock_window or cfg.fock_n_max)
    c = args.amplitude
    value = fock_engine.vacuum_weyl_expectation(space, a.as_operator(space.window), c).real
    norm = weyl_ccr.pairing_norm(a)
    expected = float(np.exp(-0.5 * c * c * norm))
    quarter = float(np.exp(-0.25 * c * c * norm))
    return _one_shot("weyl.vacuum_expectation", value, expected, 5e-3 * max(1.0, expected),
                     space.n_max,
                     extra={"quarter_convention_value": quarter, "amplitude": c,
                            "pairing_norm": norm})


def cmd_covariance(args, cfg: LabConfig) -> int:
    loop = LoopFunction.load(args.loop)
    if args.power != 1:
        base = loop
        loop = LoopFunction.identity_loop()
        for _ in range(args.power):
            loop = loop * base
    space = fock_engine.fock_space(args.fock_window or min(cfg.fock_n_max, 6))
    if loop.phase.is_zero():
        shift = fock_engine.shift_implementer(space)
        phi = fock_engine.gauge_implementer(space, 1.0)
        w = loop.winding
        step = shift if w >= 0 else shift.adjoint()
        for _ in range(abs(w)):
            phi = step @ phi
        q = fock_engine.gauge_covariance(space, phi)
    else:
        solver_space = fock_engine.fock_space(min(space.n_max, 5))
        phi, solver_report = fock_engine.solve_implementer(solver_space, loop)
        q = fock_engine.gauge_covariance(solver_space, phi)
        space = solver_space
    return _one_shot("fock.gauge_covariance", q, loop.winding, 0, space.n_max)


def cmd_commutant(args, cfg: LabConfig) -> int:
    if args.model != "clockshift":
        raise CarLabError(f"unknown model {args.model!r}")
    model = commutant_lab.ClockShiftModel(args.M, args.K)
    out = commutant_lab.verify_center_identity(
        model.fixed_point_generators(), model.full_algebra_generators(), model.dim)
    return _one_shot("commutant.center_identity", bool(out["equal"]), True, 0, model.dim,
                     extra={"z_dim": out["z_dim"],
                            "relative_commutant_dim": out["relative_commutant_dim"],
                            "a_dim": out["a_dim"], "f_dim": out["f_dim"],
                            "covariance_defect": model.covariance_defect()})


def cmd_stabilizer(args, cfg: LabConfig) -> int:
    with open(args.f, "r", encoding="utf-8") as fh:
        f = crossed_product.CircleFn.from_json_dict(json.load(fh))
    x = crossed_product.GradedElement.load(args.element)
    if args.theta is not None:
        x = crossed_product.GradedElement(x.terms, args.theta)
    result = crossed_product.stabilizer_action(f, x)
    props = crossed_product.check_stabilizer_properties(f, x, 1j)
    return _one_shot("stabilizer.properties", props.all_pass, True, 0, 0,
                     extra={"transformed": result.to_json_dict(),
                            "fixes_degree_zero": props.fixes_degree_zero,
                            "commutes_with_gauge": props.commutes_with_gauge,
                            "multiplicative": props.multiplicative,
                            "degree_one_central": props.degree_one_central})


def cmd_weyl(args, cfg: LabConfig) -> int:
    if args.weyl_command != "reduce":
        raise CarLabError(f"unknown weyl subcommand {args.weyl_command!r}")
    word = weyl_ccr.WeylWord.load(args.word)
    total, phase = weyl_ccr.reduce(word)
    return _one_shot("weyl.reduce", abs(abs(phase) - 1.0), 0.0, cfg.tol_algebraic, 0,
                     extra={"sum_coeffs": total.series.to_pairs(),
                            "phase": phase})


def cmd_requirements(args, cfg: LabConfig) -> int:
    with open(args.gens, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    gens = [weyl_ccr.GeneratorElement.from_json_dict(d) for d in raw["generators"]]
    v1 = LoopFunction.load(args.v1)
    rep = weyl_ccr.requirements_checklist(gens, v1)
    return _one_shot("weyl.requirements", rep.all_pass, True, 0,
                     rep.details.get("window", 0),
                     extra={"offdiag_hilbert_schmidt": rep.offdiag_hilbert_schmidt,
                            "generators_commute": rep.generators_commute,
                            "pairing_positive_definite": rep.pairing_positive_definite,
                            "shift_stable": rep.shift_stable})


def cmd_sweep(args, cfg: LabConfig) -> int:
    windows = [int(w) for w in args.windows.split(",")]
    rows = suites.convergence_sweep(args.check, windows, cfg)
    if args.csv:
        report.write_sweep_csv(rows, args.csv)
    if args.plot:
        report.render_sweep_figure(rows, args.plot, check_id=args.check)
    for row in rows:
        print(json.dumps(suites._jsonify(row), sort_keys=True))
    return 0 if rows[-1].get("monotone_decreasing", True) else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="car-lab",
        description="finite-mode verification lab for circle-action operator algebra")
    parser.add_argument("--config", help="JSON/TOML config path (or CAR_LAB_CONFIG env)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("suite", help="run a verification suite, emit JSON-lines")
    p.add_argument("name", choices=sorted(suites.SUITES) + ["all"])
    p.add_argument("--out", help="write records to this file instead of stdout")
    p.add_argument("--report-dir", help="also emit records.jsonl/summary.csv/records.png here")
    p.add_argument("--timings", action="store_true", help="include measured runtimes")
    p.set_defaults(fn=cmd_suite)

    p = sub.add_parser("index", help="charge index of a loop (JSON file)")
    p.add_argument("--loop", required=True)
    p.add_argument("--window", type=int, default=None)
    p.set_defaults(fn=cmd_index)

    p = sub.add_parser("implementable", help="implementability report for a loop unitary")
    p.add_argument("--unitary", required=True)
    p.add_argument("--window", type=int, default=None)
    p.set_defaults(fn=cmd_implementable)

    p = sub.add_parser("schwinger", help="operator commutator scalar of two generators")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--fock-window", type=int, default=None)
    p.set_defaults(fn=cmd_schwinger)

    p = sub.add_parser("vev", help="vacuum expectation of a Weyl exponential")
    p.add_argument("--a", required=True)
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--fock-window", type=int, default=None)
    p.set_defaults(fn=cmd_vev)

    p = sub.add_parser("covariance", help="gauge covariance exponent of a loop implementer")
    p.add_argument("--loop", required=True)
    p.add_argument("--power", type=int, default=1)
    p.add_argument("--fock-window", type=int, default=None)
    p.set_defaults(fn=cmd_covariance)

    p = sub.add_parser("commutant", help="center identity on a finite model")
    p.add_argument("--model", default="clockshift")
    p.add_argument("--M", type=int, default=5)
    p.add_argument("--K", type=int, default=1)
    p.set_defaults(fn=cmd_commutant)

    p = sub.add_parser("stabilizer", help="apply a stabilizer element to a graded element")
    p.add_argument("--f", required=True)
    p.add_argument("--element", required=True)
    p.add_argument("--theta", type=float, default=None)
    p.set_defaults(fn=cmd_stabilizer)

    p = sub.add_parser("weyl", help="symbolic Weyl algebra operations")
    p.add_argument("weyl_command", choices=["reduce"])
    p.add_argument("--word", required=True)
    p.set_defaults(fn=cmd_weyl)

    p = sub.add_parser("requirements", help="four-requirement checklist for generator data")
    p.add_argument("--gens", required=True)
    p.add_argument("--v1", required=True)
    p.set_defaults(fn=cmd_requirements)

    p = sub.add_parser("sweep", help="window-convergence sweep, CSV and figure output")
    p.add_argument("--check", required=True, choices=["vev", "pairing", "hs_shift"])
    p.add_argument("--windows", required=True, help="comma-separated n_max values")
    p.add_argument("--csv", help="write the sweep table here")
    p.add_argument("--plot", help="render the sweep figure here (PNG)")
    p.set_defaults(fn=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        return args.fn(args, cfg)
    except CarLabError as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}),
              file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
