"""Command-line front end: ``su11fb sweep|figure|period|compare|validate``.

Exit status is 0 on success, 1 on a usage error (bad flags, unreadable or
invalid configuration) and 2 when the engine fails or a validation check
does not pass.  A sweep that hits engine errors at individual grid points
still writes every row, records the failure in the ``error`` column, lists
it on stderr and exits 0.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from .experiments import (
    PRESETS,
    SCHEME_LABELS,
    SweepSpec,
    compare_resources,
    plot_script,
    preset,
    run_sweep,
    write_csv,
)
from .schemes import PeriodNotResolvedError, SchemeConfig, SchemeKind, estimate_period

EXIT_OK, EXIT_USAGE, EXIT_FAILURE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list[float]:
    try:
        return [_number(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _number(text: str) -> float:
    """Float that also accepts ``pi`` multiples such as ``pi/4`` or ``0.5pi``."""
    t = text.strip().lower().replace("*", "")
    if "pi" not in t:
        return float(t)
    head, _, tail = t.partition("pi")
    coef = float(head) if head not in ("", "+", "-") else float(head + "1")
    if tail:
        if not tail.startswith("/"):
            raise ValueError(text)
        coef /= float(tail[1:])
    return coef * math.pi


def _scalar(text: str) -> float:
    try:
        return _number(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")


def _interval(text: str):
    if text == "auto":
        return text
    try:
        k = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"swap interval must be an integer or 'auto', got {text!r}")
    return k


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="output CSV path, '-' for stdout")
    p.add_argument("--precision", type=int, help="significant digits in the CSV (6-17)")
    p.add_argument("--jobs", type=int, default=1, help="worker processes (output order is fixed)")
    p.add_argument("--plot-script", metavar="PATH",
                   help="also write a gnuplot script for the CSV")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="su11fb", description="SU(1,1) feedback interferometer sweeps.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sw = sub.add_parser("sweep", help="evaluate a parameter grid and write CSV")
    sw.add_argument("--config", help="JSON file with SweepSpec fields; flags override it")
    sw.add_argument("--scheme", type=lambda s: s.split(","),
                    help=f"comma-separated schemes from {', '.join(SCHEME_LABELS)}")
    sw.add_argument("--r", type=_floats, help="squeezing amplitudes, comma-separated")
    sw.add_argument("--theta", type=_scalar, help="pump phase (radians)")
    sw.add_argument("--phi", type=_floats, help="explicit phases; overrides the phi range")
    sw.add_argument("--phi-min", type=_scalar)
    sw.add_argument("--phi-max", type=_scalar)
    sw.add_argument("--phi-steps", type=int)
    sw.add_argument("--loops", help="loop range a..b (or a single N)")
    sw.add_argument("--eta", type=_floats, help="loss values, comma-separated")
    sw.add_argument("--swap-interval", type=_interval, help="k for the swapping scheme, or 'auto'")
    sw.add_argument("--qfi-formula", choices=("auto", "pure", "noisy"))
    _add_output(sw)

    fig = sub.add_parser("figure", help="run a named figure preset")
    fig.add_argument("preset", help=f"one of {', '.join(PRESETS)} (fig4/5/6 alias the 'a' panels)")
    _add_output(fig)

    per = sub.add_parser("period", help="estimate the swap interval from the sequential scheme")
    per.add_argument("--r", type=_scalar, default=0.1)
    per.add_argument("--theta", type=_scalar, default=0.0)
    per.add_argument("--phi", type=_scalar, default=math.pi / 4)
    per.add_argument("--max-loops", type=int, default=64)

    cmp_ = sub.add_parser("compare", help="sequential vs partial vs standard S(Nr)")
    cmp_.add_argument("--r", type=_scalar, default=0.1)
    cmp_.add_argument("--theta", type=_scalar, default=0.0)
    cmp_.add_argument("--phi", type=_scalar, default=math.pi / 4)
    cmp_.add_argument("--n-max", type=int, default=12)
    _add_output(cmp_)

    sub.add_parser("validate", help="run the release-gate checks")
    return parser


_FLAG_FIELDS = {
    "scheme": "schemes", "r": "r", "theta": "theta", "phi": "phi", "phi_min": "phi_min",
    "phi_max": "phi_max", "phi_steps": "phi_steps", "loops": "loops", "eta": "eta",
    "swap_interval": "swap_interval", "qfi_formula": "qfi_formula", "out": "out",
    "precision": "precision",
}


def spec_from_args(args) -> SweepSpec:
    data = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}")
        if not isinstance(data, dict):
            raise UsageError("config must be a JSON object")
    for flag, name in _FLAG_FIELDS.items():
        value = getattr(args, flag, None)
        if value is not None:
            data[name] = value
    try:
        return SweepSpec.from_dict(data)
    except (ValueError, TypeError) as exc:
        raise UsageError(str(exc))


def _emit(rows, spec: SweepSpec, plot: str | None) -> int:
    failed = []

    def tap(rows):
        for row in rows:
            if row.error:
                failed.append(row)
            yield row

    if spec.out == "-":
        write_csv(tap(rows), sys.stdout, spec.precision)
        sys.stdout.flush()
    else:
        with open(spec.out, "w", encoding="utf-8", newline="") as fh:
            write_csv(tap(rows), fh, spec.precision)
    if plot:
        target = "-" if spec.out == "-" else spec.out
        with open(plot, "w", encoding="utf-8") as fh:
            fh.write(plot_script(target))
    for row in failed:
        print(f"warning: {row.scheme} r={row.r} N={row.N} phi={row.phi:.6g} eta={row.eta}: "
              f"{row.error}", file=sys.stderr)
    if failed:
        print(f"{len(failed)} grid point(s) failed; see the error column", file=sys.stderr)
    return EXIT_OK


def _with_output(spec: SweepSpec, args) -> SweepSpec:
    d = spec.to_dict()
    if args.out is not None:
        d["out"] = args.out
    if args.precision is not None:
        d["precision"] = args.precision
    try:
        return SweepSpec.from_dict(d)
    except ValueError as exc:
        raise UsageError(str(exc))


def _cmd_sweep(args) -> int:
    spec = spec_from_args(args)
    return _emit(run_sweep(spec, args.jobs), spec, args.plot_script)


def _cmd_figure(args) -> int:
    try:
        spec = preset(args.preset)
    except KeyError as exc:
        raise UsageError(exc.args[0])
    spec = _with_output(spec, args)
    return _emit(run_sweep(spec, args.jobs), spec, args.plot_script)


def _cmd_compare(args) -> int:
    if args.n_max < 1:
        raise UsageError("--n-max must be at least 1")
    spec = _with_output(SweepSpec(), args)
    rows = compare_resources(args.r, args.phi, args.n_max, args.theta, args.jobs)
    return _emit(rows, spec, args.plot_script)


def _cmd_period(args) -> int:
    if args.max_loops < 2:
        raise UsageError("--max-loops must be at least 2")
    cfg = SchemeConfig(SchemeKind.SEQUENTIAL, r=args.r, theta1=args.theta, theta2=args.theta)
    try:
        k = estimate_period(cfg, args.phi, args.max_loops)
    except PeriodNotResolvedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    print(k)
    return EXIT_OK


def _cmd_validate(args) -> int:
    from .validation import run_all

    results = run_all()
    for res in results:
        print(res.line())
    summary = {
        "passed": sum(r.passed for r in results),
        "failed": sum(not r.passed for r in results),
        "checks": [
            {"name": r.name, "passed": r.passed, "detail": r.detail, "seconds": round(r.seconds, 3)}
            for r in results
        ],
    }
    print(json.dumps(summary, indent=2))
    return EXIT_OK if summary["failed"] == 0 else EXIT_FAILURE


_COMMANDS = {
    "sweep": _cmd_sweep,
    "figure": _cmd_figure,
    "compare": _cmd_compare,
    "period": _cmd_period,
    "validate": _cmd_validate,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "jobs", 1) < 1:
        parser.error("--jobs must be at least 1")
    try:
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
