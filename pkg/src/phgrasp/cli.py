"""Command-line front-end: run, compare, sweep and verify.

Exit codes: 0 ok, 2 configuration error, 3 numerical failure, 4 acceptance
failure (``verify`` only).
"""

from __future__ import annotations

import argparse
import itertools
import json
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .exceptions import ConfigError, ContractViolation, DivergenceError, SingularMassError
from .plotting import run_plots
from .scenario import load_scenario, parse_scalar, resolve_scenarios
from .sim import run

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_ACCEPTANCE = 0, 2, 3, 4
METRIC_KEYS = ("contact_time", "impact_force", "settling_time", "steady_state_error")
DEFAULT_ZOH = 0.01

log = logging.getLogger("phgrasp")


class NumericalFailure(RuntimeError):
    """A run finished but a hard monitor failed."""


def _fmt(v):
    if v is None:
        return "-"
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def format_table(rows, columns):
    """Plain fixed-width text table."""
    cells = [[_fmt(r.get(c)) for c in columns] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) if cells else len(c)
              for i, c in enumerate(columns)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(columns, widths)),
             "  ".join("-" * w for w in widths)]
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)) for row in cells]
    return "\n".join(lines)


def _overrides(args):
    out = {}
    if getattr(args, "dt", None) is not None:
        out["integrator.dt"] = args.dt
    if getattr(args, "t_end", None) is not None:
        out["integrator.t_end"] = args.t_end
    if getattr(args, "zoh", None) is not None:
        out["integrator.zoh"] = args.zoh
    if getattr(args, "method", None) is not None:
        out["integrator.method"] = args.method
    return out


def _load_all(names, overrides):
    scenarios = []
    for arg in names:
        for path in resolve_scenarios(arg):
            scn = load_scenario(path)
            if overrides:
                scn = scn.with_overrides(**overrides)
            scenarios.append(scn)
    return scenarios


def _execute(scn):
    rec = run(scn)
    audit = rec.monitors.get("energy_audit", {})
    if not audit.get("passed", True):
        raise NumericalFailure(f"{scn.name}: energy audit failed "
                               f"({audit['violations']} steps, max rel {audit['max_rel_residual']:.3g})")
    lyap = rec.monitors.get("lyapunov")
    if lyap and lyap["violations"]:
        log.warning("%s: candidate energy increased on %d steps (max %.3g)", scn.name,
                    lyap["violations"], lyap["max_increase"])
    if rec.monitors.get("detectability", {}).get("flagged"):
        log.warning("%s: output vanished while the state did not settle", scn.name)
    return rec


def _row(scn, rec, extra=None):
    row = {"scenario": scn.name, "controller": _controller_label(scn)}
    if extra:
        row.update(extra)
    row.update({k: rec.metadata["metrics"][k] for k in METRIC_KEYS})
    return row


def _controller_label(scn):
    c = scn.doc["controller"]
    if c["type"] == "hogan":
        return "hogan+fe" if c["compensate_external"] else "hogan"
    return c["type"]


def _write_outputs(rec, scn, out_dir, plot):
    out_dir.mkdir(parents=True, exist_ok=True)
    written = [rec.to_csv(out_dir / f"{scn.name}.csv"),
               rec.write_event_log(out_dir / f"{scn.name}.events.jsonl")]
    metrics_path = out_dir / f"{scn.name}.metrics.json"
    metrics_path.write_text(json.dumps(rec.metadata["metrics"], indent=2, sort_keys=True) + "\n")
    written.append(metrics_path)
    if plot:
        written.extend(run_plots([rec], out_dir, scn.name))
    return written


def cmd_run(args):
    scenarios = _load_all([args.scenario], _overrides(args))
    out_dir = Path(args.out)
    rows = []
    for scn in scenarios:
        rec = _execute(scn)
        for path in _write_outputs(rec, scn, out_dir, args.plot):
            log.info("wrote %s", path)
        rows.append(_row(scn, rec))
    print(format_table(rows, ("scenario", "controller") + METRIC_KEYS))
    return EXIT_OK


def ordering_report(rows):
    """Impact-force ordering ``restlength < hogan+fe < hogan`` per contact group."""
    lines = []
    groups = {}
    for r in rows:
        groups.setdefault(r.get("contact"), {})[r["controller"]] = r["impact_force"]
    for contact, by_ctrl in sorted(groups.items(), key=lambda kv: str(kv[0])):
        needed = ("restlength", "hogan+fe", "hogan")
        if not all(k in by_ctrl for k in needed):
            continue
        f = [by_ctrl[k] for k in needed]
        if None in f:
            status = "undetermined (no contact in: " + ", ".join(
                k for k, v in zip(needed, f) if v is None) + ")"
        else:
            status = "ok" if f[0] < f[1] < f[2] else "violated"
        lines.append(f"impact ordering restlength < hogan+fe < hogan [{contact}]: {status}")
    return lines


def _run_many(scenarios, workers):
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        return list(pool.map(_execute, scenarios))


def cmd_compare(args):
    scenarios = _load_all(args.scenarios, _overrides(args))
    records = _run_many(scenarios, args.workers)
    rows = [_row(s, r, {"contact": s.contact_mode}) for s, r in zip(scenarios, records)]
    print(format_table(rows, ("scenario", "controller", "contact") + METRIC_KEYS))
    for line in ordering_report(rows):
        print(line)
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        for s, r in zip(scenarios, records):
            _write_outputs(r, s, out_dir, False)
        if args.plot:
            run_plots(records, out_dir, "compare")
    return EXIT_OK


def parse_param(text):
    """``path=v1,v2,...`` to ``(path, [values])``."""
    if "=" not in text:
        raise ConfigError(f"--param expects <path>=<v1,v2,...>, got {text!r}")
    path, _, values = text.partition("=")
    vals = [parse_scalar(v) for v in values.split(",") if v.strip()]
    if not path or not vals:
        raise ConfigError(f"--param expects <path>=<v1,v2,...>, got {text!r}")
    return path.strip(), vals


def cmd_sweep(args):
    base_list = _load_all([args.scenario], _overrides(args))
    params = [parse_param(p) for p in args.param]
    paths = [p for p, _ in params]
    scenarios, keys = [], []
    for base in base_list:
        for combo in itertools.product(*(v for _, v in params)):
            scenarios.append(base.with_overrides(**dict(zip(paths, combo))))
            keys.append(dict(zip(paths, combo)))
    records = _run_many(scenarios, args.workers)
    rows = [_row(s, r, k) for s, r, k in zip(scenarios, records, keys)]
    print(format_table(rows, ("scenario", "controller", *paths) + METRIC_KEYS))
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        lines = [",".join(("scenario", *paths) + METRIC_KEYS)]
        for r in rows:
            lines.append(",".join(_fmt(r[c]) for c in ("scenario", *paths) + METRIC_KEYS))
        (out_dir / "sweep.csv").write_text("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_verify(args):
    from .verify import run_all, sensitivity

    results = run_all()
    for r in results:
        print(r.line())
    if args.sensitivity:
        for name, param, value, m in sensitivity():
            print(f"sensitivity {name} {param}={value:g}: "
                  + ", ".join(f"{k}={_fmt(m[k])}" for k in METRIC_KEYS))
    failed = [r.id for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed"
          + (f"; failing: {', '.join(failed)}" if failed else ""))
    return EXIT_ACCEPTANCE if failed else EXIT_OK


def _positive(text):
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def _non_negative(text):
    v = float(text)
    if not v >= 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {text}")
    return v


def build_parser():
    parser = argparse.ArgumentParser(prog="phgrasp", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def integrator_flags(p):
        p.add_argument("--dt", type=_positive, help="integration step [s]")
        p.add_argument("--t-end", type=_non_negative, help="horizon [s]")
        p.add_argument("--zoh", type=_positive, nargs="?", const=DEFAULT_ZOH,
                       help=f"zero-order-hold control period [s] (default {DEFAULT_ZOH})")
        p.add_argument("--method", choices=("rk4", "semi-implicit-euler"))

    p = sub.add_parser("run", help="simulate one scenario and write CSV, event log and metrics")
    p.add_argument("scenario", help="scenario file, preset name, or presets/<glob>")
    p.add_argument("--plot", action="store_true", help="also write position and force SVG plots")
    p.add_argument("--out", default="out", help="output directory (default: out)")
    integrator_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("compare", help="run several scenarios and tabulate their metrics")
    p.add_argument("scenarios", nargs="+")
    p.add_argument("--out", help="also write per-run outputs here")
    p.add_argument("--plot", action="store_true", help="overlay plots (needs --out)")
    p.add_argument("--workers", type=int, default=4)
    integrator_flags(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("sweep", help="vary scenario parameters and tabulate metrics")
    p.add_argument("scenario")
    p.add_argument("--param", action="append", required=True,
                   help="dotted path and values, e.g. contact.body.m_c=0.05,0.1,0.2")
    p.add_argument("--out", help="write sweep.csv here")
    p.add_argument("--workers", type=int, default=4)
    integrator_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run the acceptance and invariant checks")
    p.add_argument("--sensitivity", action="store_true",
                   help="also print the penalty-stiffness and object-mass sweeps")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, ContractViolation) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DivergenceError, SingularMassError, NumericalFailure) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
