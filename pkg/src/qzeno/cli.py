"""Command-line front end.

Verbs: ``sweep`` (loss-current grid -> CSV, optional figure), ``bridge``
(solver cross-validation -> JSON), ``validate`` (named check suites ->
JSON), ``peak`` (locate the loss-current maximum), ``plot`` (render a
figure from an existing CSV).

Exit codes: 0 success, 2 configuration error, 3 solver accuracy error,
4 validation failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from .bridge import (ADIABATIC_TOL, BridgeInstance, ConvergenceError,
                     adiabatic_ladder, compare)
from .config import ConfigError, SweepConfig, load_config, serialize_config
from .keldysh import AccuracyError
from .lindblad import DivergenceError
from .sweep import NoPeakError, find_zeno_peak, read_csv, run_sweep, write_csv
from .validate import SUITE_NAMES, run_suite

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ACCURACY = 3
EXIT_VALIDATION = 4


def _build_parser():
    ap = argparse.ArgumentParser(
        prog="qzeno",
        description="Loss-current sweeps and cross-validated steady-state "
                    "solvers for a driven dissipative three-level junction.")
    sub = ap.add_subparsers(dest="command", required=True)

    sw = sub.add_parser("sweep", help="evaluate the (gamma, e_nh, delta_mu) "
                                      "grid and write a CSV table")
    sw.add_argument("--config", metavar="PATH",
                    help="config file; defaults apply when omitted")
    sw.add_argument("--out", metavar="PATH",
                    help="CSV output path (overrides the config)")
    sw.add_argument("--figure", metavar="PATH",
                    help="also render the curves to this image file")
    sw.add_argument("--threads", type=int, default=1, metavar="N",
                    help="worker threads; 0 = all cores (default 1)")
    sw.add_argument("--tolerance", type=float, metavar="X",
                    help="override the solver tolerance")
    sw.add_argument("--print-config", action="store_true",
                    help="echo the resolved configuration and exit")

    br = sub.add_parser("bridge", help="cross-validate the master-equation "
                                       "and Green-function solvers")
    br.add_argument("--out", metavar="PATH", help="JSON report path")
    br.add_argument("--tolerance", type=float, metavar="X",
                    help="override the adiabatic agreement tolerance")
    br.add_argument("--photon-cutoff", type=int, default=8, metavar="N")

    va = sub.add_parser("validate", help="run a named check suite")
    va.add_argument("suite", choices=list(SUITE_NAMES))
    va.add_argument("--out", metavar="PATH", help="JSON report path")

    pk = sub.add_parser("peak", help="locate the loss-current maximum of "
                                     "one (e_nh, delta_mu) curve")
    pk.add_argument("--config", metavar="PATH")
    pk.add_argument("--e-nh", type=float, default=1.0)
    pk.add_argument("--delta-mu", type=float, default=0.0)
    pk.add_argument("--threads", type=int, default=1, metavar="N")
    pk.add_argument("--tolerance", type=float, metavar="X")
    pk.add_argument("--out", metavar="PATH", help="JSON output path")

    pl = sub.add_parser("plot", help="render a figure from a sweep CSV")
    pl.add_argument("--csv", required=True, metavar="PATH")
    pl.add_argument("--out", required=True, metavar="PATH")
    pl.add_argument("--logy", action="store_true")
    return ap


def _resolve_config(args) -> SweepConfig:
    cfg = load_config(args.config) if args.config else SweepConfig()
    updates = {}
    if getattr(args, "tolerance", None) is not None:
        updates["tolerance"] = args.tolerance
    if getattr(args, "out", None):
        updates["output"] = args.out
    if updates:
        cfg = SweepConfig(**{**cfg.__dict__, **updates})
    return cfg


def _cmd_sweep(args):
    cfg = _resolve_config(args)
    if args.print_config:
        sys.stdout.write(serialize_config(cfg))
        return EXIT_OK
    result = run_sweep(cfg, threads=args.threads)
    write_csv(result, cfg.output)
    print(f"wrote {len(result.records)} records to {cfg.output}")
    if args.figure:
        from .plotting import render_sweep_figure
        render_sweep_figure(result.records, args.figure)
        print(f"wrote figure to {args.figure}")
    return EXIT_OK


def _cmd_bridge(args):
    reports = []
    instances = [
        BridgeInstance(regime="exact-quadratic", t_eg=0.8, t_e5=1.0,
                       Gamma_5=1.0, Gamma_e5=0.0, nbar_L=1.0, nbar_R=1.0),
        BridgeInstance(regime="exact-quadratic", t_eg=0.5, t_e5=1.0,
                       Gamma_5=1.0, Gamma_e5=1.0, nbar_L=0.9, nbar_R=0.2),
        BridgeInstance(regime="exact-quadratic", t_eg=1.2, t_e5=0.7,
                       Gamma_5=0.8, Gamma_e5=2.4, nbar_L=0.5, nbar_R=0.5),
    ] + adiabatic_ladder(n_ph=args.photon_cutoff)
    ok = True
    for inst in instances:
        tol = args.tolerance if (args.tolerance and inst.regime == "adiabatic") else None
        rep = compare(inst, tol=tol)
        reports.append(rep.as_dict())
        ok = ok and rep.within_tolerance
        print(f"{inst.regime:16s} e_nh={inst.e_nh:6.2f}  "
              f"I_lindblad={rep.I_loss_lindblad:.8f}  "
              f"I_keldysh={rep.I_loss_keldysh:.8f}  "
              f"deviation={rep.relative_deviation:.3e}  "
              f"{'ok' if rep.within_tolerance else 'FAIL'}")
    devs = [r["relative_deviation"] for r in reports
            if r["regime"] == "adiabatic"]
    monotone = all(b < a for a, b in zip(devs, devs[1:]))
    print(f"adiabatic ladder strictly decreasing: {monotone}")
    payload = {"reports": reports, "adiabatic_monotone": monotone,
               "passed": ok and monotone,
               "adiabatic_tolerance": args.tolerance or ADIABATIC_TOL}
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
        print(f"wrote report to {args.out}")
    return EXIT_OK if payload["passed"] else EXIT_VALIDATION


def _cmd_validate(args):
    report = run_suite(args.suite)
    for c in report["checks"]:
        status = "pass" if c["passed"] else "FAIL"
        print(f"[{status}] {c['suite']:8s} {c['name']:32s} "
              f"measured={c['measured']:.3e} tol={c['tolerance']:.1e}")
    print(f"{report['n_passed']}/{report['n_total']} checks passed")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(report, fh, indent=2)
        print(f"wrote report to {args.out}")
    return EXIT_OK if report["passed"] else EXIT_VALIDATION


def _cmd_peak(args):
    cfg = _resolve_config(args)
    result = run_sweep(cfg, threads=args.threads)
    gamma_star, current_star = find_zeno_peak(result, args.e_nh, args.delta_mu)
    print(f"peak of I_loss(gamma) at e_nh={args.e_nh:g}, "
          f"delta_mu={args.delta_mu:g}: gamma* = {gamma_star:.6g}, "
          f"I* = {current_star:.8g}")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump({"e_nh": args.e_nh, "delta_mu": args.delta_mu,
                       "gamma_star": gamma_star, "I_star": current_star},
                      fh, indent=2)
    return EXIT_OK


def _cmd_plot(args):
    from .plotting import render_sweep_figure
    records = read_csv(args.csv)
    render_sweep_figure(records, args.out, logy=args.logy)
    print(f"wrote figure to {args.out}")
    return EXIT_OK


def main(argv=None) -> int:
    ap = _build_parser()
    args = ap.parse_args(argv)
    handlers = {"sweep": _cmd_sweep, "bridge": _cmd_bridge,
                "validate": _cmd_validate, "peak": _cmd_peak,
                "plot": _cmd_plot}
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (AccuracyError, ConvergenceError, DivergenceError) as exc:
        print(f"solver accuracy error: {exc}", file=sys.stderr)
        return EXIT_ACCURACY
    except NoPeakError as exc:
        print(f"no peak: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
