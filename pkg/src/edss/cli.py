"""Command-line entry point: ``edss <verb> [options]``.

Exit codes: 0 when every check passes, 1 for a verified failure (the witness
is printed), 2 for a usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Any, Sequence

from . import noise, optimizer, suites
from .bell import BellDiagonalState, canonicalize, is_canonical, measures
from .protocol import run
from .separability import DecompositionError, separable_decomposition

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

SWEEP_HEADER = (
    "s01", "s10", "s11", "s", "branch", "lambda_c_ab", "lambda_a_bc", "p",
    "ent_lower_bound", "i_class", "i_edss_naive",
)


class UsageError(Exception):
    pass


def fmt(v: float) -> str:
    """Twelve significant digits."""
    return format(float(v), ".12g")


def rounded(obj: Any) -> Any:
    if isinstance(obj, bool) or obj is None or isinstance(obj, (str, int)):
        return obj
    if isinstance(obj, float) or hasattr(obj, "dtype"):
        v = float(obj)
        return v if not math.isfinite(v) else float(fmt(v))
    if isinstance(obj, dict):
        return {k: rounded(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [rounded(v) for v in obj]
    return obj


def _coefficient(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed number {text!r}") from None
    if not -1 <= v <= 1:
        raise argparse.ArgumentTypeError(f"coefficient {v} outside [-1, 1]")
    return v


def _unit(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed number {text!r}") from None
    if not 0 <= v <= 1:
        raise argparse.ArgumentTypeError(f"value {v} outside [0, 1]")
    return v


def _step(text: str) -> float:
    v = _unit(text)
    if v == 0:
        raise argparse.ArgumentTypeError("step must be positive")
    try:
        suites.value_grid(v)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return v


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed integer {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _add_state(p: argparse.ArgumentParser) -> None:
    p.add_argument("--s01", type=_coefficient, required=True)
    p.add_argument("--s10", type=_coefficient, required=True)
    p.add_argument("--s11", type=_coefficient, required=True)
    p.add_argument("--canonicalize", action="store_true",
                   help="bring the state to canonical order first (default: reject non-canonical input)")


def _add_out(p: argparse.ArgumentParser, formats: Sequence[str] = ("json",)) -> None:
    p.add_argument("--out", help="output file (default: standard output)")
    p.add_argument("--format", choices=formats, default=formats[0])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="edss", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("verify", help="run every verification suite and print a pass/fail table")
    p.add_argument("--step", type=_step, default=0.05, help="coefficient grid step (default 0.05)")
    p.add_argument("--s-step", type=_step, default=0.1, help="carrier parameter grid step (default 0.1)")
    p.add_argument("--samples", type=_positive_int, default=1000,
                   help="random samples for the sampled suites (default 1000)")
    p.add_argument("--seed", type=int, default=0, help="seed for the sampled suites (default 0)")
    _add_out(p)

    p = sub.add_parser("protocol", help="run the protocol on one resource state")
    _add_state(p)
    _add_out(p)

    p = sub.add_parser("sweep", help="run the protocol over the canonical grid")
    p.add_argument("--step", type=_step, default=0.05, help="coefficient grid step (default 0.05)")
    _add_out(p, ("csv", "json"))

    p = sub.add_parser("noise", help="noise thresholds for resources with lambda_1 = 1/2")
    p.add_argument("--kind", choices=[k.value for k in noise.NoiseKind], default="depolarizing")
    p.add_argument("--s-values", type=_unit, nargs="+", default=[0.1, 0.25, 0.5, 0.9],
                   help="carrier parameters selecting the resources (default 0.1 0.25 0.5 0.9)")
    _add_out(p, ("csv", "json"))

    p = sub.add_parser("optimize", help="search general interactions for a better protocol")
    _add_state(p)
    p.add_argument("--restarts", type=_positive_int, default=32, help="(default 32)")
    p.add_argument("--budget", type=_positive_int, default=5000, help="evaluations per restart (default 5000)")
    p.add_argument("--seed", type=int, default=0, help="(default 0)")
    _add_out(p)

    p = sub.add_parser("decompose", help="separable decomposition of a PPT cut")
    _add_state(p)
    p.add_argument("--s", type=_unit, default=None, help="carrier parameter (default: the protocol's choice)")
    p.add_argument("--cut", choices=["C", "A"], default="C")
    _add_out(p)
    return parser


def _state(args) -> BellDiagonalState:
    try:
        state = BellDiagonalState(args.s01, args.s10, args.s11)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.canonicalize:
        return canonicalize(state)
    if not is_canonical(state):
        raise UsageError(f"state {state.coefficients} is not canonical; pass --canonicalize")
    return state


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(obj: Any) -> str:
    return json.dumps(rounded(obj), indent=2) + "\n"


def _csv(header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, str) else fmt(v) for v in row])
    return buf.getvalue()


def cmd_verify(args) -> int:
    results = suites.run_all(args.step, args.s_step, args.samples, args.seed)
    width = max(len(r.name) for r in results)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{r.name:<{width}}  {status}  checked={r.checked} failures={r.failures}", file=sys.stderr)
    _emit(_json([r.to_dict() for r in results]), args.out)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


def cmd_protocol(args) -> int:
    out = run(_state(args))
    _emit(_json(out.to_dict()), args.out)
    return EXIT_OK


def sweep_rows(step: float) -> list[list]:
    rows = []
    for state in suites.canonical_grid(step) + suites.canonical_grid(step, negative=True):
        out = run(state)
        m = measures(state)
        rows.append([
            state.s01, state.s10, state.s11, out.s, out.branch.value, out.lambda_c_ab,
            out.lambda_a_bc, out.success_probability, out.ent_lower_bound, m.i_class, m.i_edss_naive,
        ])
    return rows


def cmd_sweep(args) -> int:
    rows = sweep_rows(args.step)
    if args.format == "csv":
        _emit(_csv(SWEEP_HEADER, rows), args.out)
    else:
        _emit(_json([dict(zip(SWEEP_HEADER, r)) for r in rows]), args.out)
    return EXIT_OK


def cmd_noise(args) -> int:
    from .protocol import half_fidelity_resource

    rows = []
    try:
        for s in args.s_values:
            rows.append(noise.compare(half_fidelity_resource(s), args.kind))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.format == "csv":
        _emit(_csv(noise.CSV_HEADER, [r.row() for r in rows]), args.out)
    else:
        _emit(_json([dict(zip(noise.CSV_HEADER, r.row())) for r in rows]), args.out)
    return EXIT_OK


def cmd_optimize(args) -> int:
    state = _state(args)
    try:
        result = optimizer.optimize(state, args.restarts, args.budget, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    except optimizer.OptimizationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        _emit(_json(exc.diagnostics), args.out)
        return EXIT_FAIL
    _emit(_json(result.to_dict()), args.out)
    if result.violation:
        print(
            "!!! CONTROLLED-PHASE BASELINE BEATEN BEYOND THE SLACK: "
            f"improvement {fmt(result.improvement)} > slack {fmt(result.slack)}",
            file=sys.stderr,
        )
        return EXIT_FAIL
    return EXIT_OK


def cmd_decompose(args) -> int:
    from .protocol import choose_s

    state = _state(args)
    s = choose_s(state) if args.s is None else args.s
    try:
        dec = separable_decomposition(state, s, args.cut)
    except DecompositionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    report = {
        "s01": state.s01, "s10": state.s10, "s11": state.s11, "s": s, "cut": args.cut,
        "method": dec.method, "terms": dec.to_json(), "residual": dec.residual(),
        "certified": dec.check(),
    }
    _emit(_json(report), args.out)
    return EXIT_OK if report["certified"] else EXIT_FAIL


COMMANDS = {
    "verify": cmd_verify,
    "protocol": cmd_protocol,
    "sweep": cmd_sweep,
    "noise": cmd_noise,
    "optimize": cmd_optimize,
    "decompose": cmd_decompose,
}


def parse(argv: Sequence[str] | None = None) -> argparse.Namespace:
    return build_parser().parse_args(argv)


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = parse(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return COMMANDS[args.verb](args)
    except UsageError as exc:
        print(f"edss {args.verb}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
