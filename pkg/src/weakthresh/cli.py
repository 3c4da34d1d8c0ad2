"""Command-line front end.

Subcommands: ``threshold``, ``recover``, ``certify``, ``phase-map`` and
``selftest``.  Exit status is 0 on success, 1 on usage errors and 2 when
a run completed only partially (failed grid points, non-optimal LPs,
indeterminate certificates, or failing self-test groups).
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import montecarlo as mc
from .recovery import RecoveryProblem, Verdict, certify_condition, recover, recovery_error
from .selftest import GROUPS, run_selftest
from .thresholds import Mode, ThresholdError, alpha_threshold, threshold_curve

log = logging.getLogger("weakthresh")

EXIT_OK, EXIT_USAGE, EXIT_PARTIAL = 0, 1, 2
MODES = tuple(m.value for m in Mode)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; the documented code is 1
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_grid(text: str) -> list[float]:
    """``start:end:count`` with inclusive endpoints, or a comma-separated list."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(f"grid {text!r} is not start:end:count")
        try:
            start, end, count = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"grid {text!r}: {exc}") from None
        if count < 1 or (count == 1 and start != end):
            raise argparse.ArgumentTypeError(f"grid {text!r}: count must be >= 1 (1 only when start == end)")
        return [float(v) for v in np.linspace(start, end, count)]
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"grid {text!r}: {exc}") from None


def _fraction(text: str) -> float:
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"{text} is not in [0, 1]")
    return v


def _finite_or_none(v: float) -> float | None:
    return float(v) if math.isfinite(v) else None


def _emit(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8", newline="")


def _config(args: argparse.Namespace, drop: tuple[str, ...] = ()) -> dict:
    skip = {"func", "verbose", "out", *drop}
    return {k: (v.value if isinstance(v, Mode) else v) for k, v in sorted(vars(args).items()) if k not in skip}


# ---------------------------------------------------------------------------
# subcommands


def cmd_threshold(args: argparse.Namespace) -> int:
    mode = args.mode
    eta = 0.0 if mode is Mode.STANDARD else args.eta
    config = {"command": "threshold", **_config(args)}
    failures: list[tuple[float, str]] = []
    if args.beta is not None:
        try:
            points = [alpha_threshold(args.beta, eta, mode)]
        except ThresholdError as exc:
            points, failures = [], [(args.beta, str(exc))]
    else:
        alphas = [args.alpha] if args.alpha is not None else args.grid
        curve = threshold_curve(alphas, eta, mode)
        points, failures = curve.points, curve.failures
    saturated = [p.alpha for p in points if p.saturated]
    if saturated:
        config["saturated_alphas"] = saturated
    if failures:
        config["failed"] = [{"value": v, "error": msg} for v, msg in failures]
        for v, msg in failures:
            log.error("point %r failed: %s", v, msg)
    _emit(mc.curve_csv(points, eta, mode, config), args.out)
    return EXIT_PARTIAL if failures else EXIT_OK


def _instance_from_args(args: argparse.Namespace) -> mc.ProblemInstance:
    if args.instance:
        return mc.read_instance_json(args.instance)
    missing = [f"--{name}" for name in ("n", "m", "k") if getattr(args, name) is None]
    if missing:
        raise UsageError(f"either --instance or all of --n/--m/--k is required (missing {', '.join(missing)})")
    return mc.gen_instance(mc.InstanceSpec(
        n=args.n, m=args.m, k=args.k, eta=args.eta, mode=args.mode,
        amplitude=args.amplitude, seed=args.seed,
    ))


def cmd_recover(args: argparse.Namespace) -> int:
    inst = _instance_from_args(args)
    if args.save_instance:
        mc.write_instance_json(inst, args.save_instance)
    result = recover(RecoveryProblem(inst.A, inst.y, inst.support_info))
    error = recovery_error(result.x_hat, inst.x_true) if result.optimal else math.inf
    report = {
        "config": {"command": "recover", **_config(args)},
        "status": result.lp_status.value,
        "objective": _finite_or_none(result.objective),
        "feasibility_residual": _finite_or_none(result.feasibility_residual),
        "relative_error": _finite_or_none(error),
        "success": bool(result.optimal and error <= args.tolerance),
        "x_hat": [_finite_or_none(v) for v in result.x_hat],
    }
    _emit(json.dumps(report, indent=1) + "\n", args.out)
    return EXIT_OK if result.optimal else EXIT_PARTIAL


def cmd_certify(args: argparse.Namespace) -> int:
    inst = _instance_from_args(args)
    K = list(inst.K)
    outcome = certify_condition(inst.A, K, inst.support_info, np.sign(inst.x_true[K]))
    report = {
        "config": {"command": "certify", **_config(args)},
        "verdict": outcome.verdict.value,
        "optimum": _finite_or_none(outcome.optimum),
        "unbounded": outcome.optimum == math.inf,
        "diagnostic": outcome.diagnostic,
        "witness": None if outcome.witness is None else outcome.witness.tolist(),
    }
    _emit(json.dumps(report, indent=1) + "\n", args.out)
    return EXIT_PARTIAL if outcome.verdict is Verdict.INDETERMINATE else EXIT_OK


def cmd_phase_map(args: argparse.Namespace) -> int:
    if args.jobs < 1:
        raise UsageError("--jobs must be >= 1")
    try:
        spec = mc.PhaseMapSpec(
            n=args.n, alphas=tuple(args.alphas), trials=args.trials, eta=args.eta, mode=args.mode,
            master_seed=args.seed, success_tolerance=args.tolerance, window_count=args.window_count,
            window_halfwidth=args.window_halfwidth,
            betas=None if args.betas is None else tuple(args.betas), amplitude=args.amplitude,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    pmap = mc.phase_map(spec, jobs=args.jobs)
    text = mc.phase_map_csv(pmap, {"command": "phase-map"})
    _emit(text, args.out)
    transition = mc.empirical_transition(pmap, args.level) if args.level is not None else []
    if args.out not in (None, "-"):
        sidecar = Path(args.out).with_suffix(".json")
        sidecar.write_text(json.dumps({
            "spec": spec.to_dict(),
            "level": args.level,
            "transition": [{"alpha": a, "beta_cross": b} for a, b in transition],
            "diagnostics": pmap.diagnostics,
        }, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    for a, b in transition:
        log.info("alpha=%.6g beta_cross=%.6g", a, b)
    return EXIT_PARTIAL if pmap.diagnostics else EXIT_OK


def cmd_selftest(args: argparse.Namespace) -> int:
    results = run_selftest(args.group)
    for r in results:
        print(r.line())
    failed = [r.name for r in results if not r.passed]
    print(f"selftest: {len(results) - len(failed)}/{len(results)} groups passed"
          + (f"; failing: {', '.join(failed)}" if failed else ""))
    return EXIT_PARTIAL if failed else EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _add_instance_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--instance", help="instance JSON container to load")
    p.add_argument("--n", type=int, help="signal dimension")
    p.add_argument("--m", type=int, help="number of measurements")
    p.add_argument("--k", type=int, help="sparsity")
    p.add_argument("--mode", choices=MODES, default=Mode.STANDARD)
    p.add_argument("--eta", type=_fraction, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--amplitude", choices=mc.Amplitude.ALL, default=mc.Amplitude.GAUSSIAN_UNIT)
    p.add_argument("--out", help="output path (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="weakthresh", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("threshold", help="weak-threshold curve points as CSV")
    p.add_argument("--mode", choices=MODES, required=True)
    p.add_argument("--eta", type=_fraction, default=0.0)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--alpha", type=float, help="single alpha; report the critical beta")
    g.add_argument("--beta", type=float, help="single beta; report the critical alpha")
    g.add_argument("--grid", type=parse_grid, help="alpha grid, start:end:count or a,b,c")
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("recover", help="solve one weighted l1 recovery")
    _add_instance_flags(p)
    p.add_argument("--tolerance", type=float, default=mc.DEFAULT_TOLERANCE)
    p.add_argument("--save-instance", help="also write the instance JSON here")
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("certify", help="null-space certificate for one instance")
    _add_instance_flags(p)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("phase-map", help="Monte Carlo success frequencies over (alpha, beta)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--alphas", type=parse_grid, required=True, help="start:end:count or a,b,c")
    p.add_argument("--mode", choices=MODES, required=True)
    p.add_argument("--eta", type=_fraction, default=0.0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--tolerance", type=float, default=mc.DEFAULT_TOLERANCE,
                   help="relative l2 error counted as success")
    p.add_argument("--window-count", type=int, default=9)
    p.add_argument("--window-halfwidth", type=float, default=0.4)
    p.add_argument("--betas", type=parse_grid, help="explicit beta grid shared by every alpha")
    p.add_argument("--amplitude", choices=mc.Amplitude.ALL, default=mc.Amplitude.GAUSSIAN_UNIT)
    p.add_argument("--level", type=float, default=0.5, help="success level for the transition")
    p.add_argument("--jobs", type=int, default=1, help="worker processes; output does not depend on it")
    p.add_argument("--out", help="CSV path; a sidecar .json holds the spec and transition")
    p.set_defaults(func=cmd_phase_map)

    p = sub.add_parser("selftest", help="fast invariant suite")
    p.add_argument("--group", action="append", choices=list(GROUPS), help="run only these groups")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "mode", None) is not None:
        args.mode = Mode.parse(args.mode)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (UsageError, ValueError, FileNotFoundError) as exc:
        parser.print_usage(sys.stderr)
        print(f"weakthresh: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
