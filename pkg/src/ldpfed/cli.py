"""Command-line frontend: headless experiments, budget sweeps, and the server.

Exit codes: 0 success, 1 usage error, 2 runtime error.  Reports go to
stdout or, with --out, to a file; writing to a file also renders matplotlib
figures next to it unless --no-figures is passed.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .errors import LdpFedError
from .mechanisms import MechanismKind
from .models import ModelKind
from .recovery import DEFAULT_SHARPNESS
from .reports import run_experiment, run_sweep, sweep_to_csv

MODEL_CHOICES = [m.value for m in ModelKind]
MECHANISM_CHOICES = [m.value for m in MechanismKind]


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage; this tool reserves 2 for runtime errors
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ldpfed", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", parents=[], help="run one experiment and report it")
    _add_session_flags(sim)
    sim.add_argument("--epochs", type=int, default=1, help="training epochs (default 1)")
    sim.add_argument(
        "--format", choices=["json", "csv"], default="json", help="report format"
    )
    _add_output_flags(sim)

    swp = sub.add_parser("sweep", help="run a budget sweep, one CSV row per (epsilon, seed)")
    swp.add_argument("--model", choices=MODEL_CHOICES, required=True)
    swp.add_argument(
        "--mechanism",
        choices=[m for m in MECHANISM_CHOICES if m != "none"],
        required=True,
        help="perturbation mechanism to sweep",
    )
    swp.add_argument(
        "--epsilons",
        required=True,
        help="comma-separated list of privacy budgets, e.g. 0.5,1,2,4,8",
    )
    swp.add_argument("--seeds", type=int, default=1, help="seed count; runs seeds 0..N-1")
    swp.add_argument("--users", type=int, default=100)
    swp.add_argument("--epochs", type=int, default=1)
    swp.add_argument("--k", type=float, default=DEFAULT_SHARPNESS)
    swp.add_argument("--learning-rate", type=float, default=0.01)
    _add_output_flags(swp)

    srv = sub.add_parser("serve", help="run the HTTP service")
    srv.add_argument("--port", type=int, default=8000, help="overridden by env var PORT")
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--static-dir", default=None, help="directory of UI assets to serve at /")
    srv.add_argument(
        "--state-file", default=None, help="persist session snapshots here on shutdown"
    )

    return parser


def _add_session_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", choices=MODEL_CHOICES, required=True)
    p.add_argument("--mechanism", choices=MECHANISM_CHOICES, required=True)
    p.add_argument("--epsilon", type=float, default=None, help="total privacy budget")
    p.add_argument("--users", type=int, default=100)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--k", type=float, default=DEFAULT_SHARPNESS, help="recovery sharpness")
    p.add_argument("--learning-rate", type=float, default=0.01)


def _add_output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", type=Path, default=None, help="write report here instead of stdout")
    p.add_argument(
        "--figures",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="render figures next to --out (default: on when --out is set)",
    )


def _resolve_figures(parser, args) -> bool:
    if args.figures and args.out is None:
        parser.error("--figures requires --out")
    return args.out is not None if args.figures is None else args.figures


def _validate_run_flags(parser, args) -> None:
    # flag-value problems are usage errors (exit 1), not runtime errors
    if args.users < 1:
        parser.error("--users must be a positive integer")
    if args.epochs < 1:
        parser.error("--epochs must be a positive integer")
    if args.k <= 0:
        parser.error("--k must be positive")
    if args.learning_rate <= 0:
        parser.error("--learning-rate must be positive")
    if getattr(args, "seed", 0) < 0 or getattr(args, "seed", 0) >= 2**64:
        parser.error("--seed must fit in an unsigned 64-bit integer")
    if getattr(args, "epsilon", None) is not None and args.epsilon <= 0:
        parser.error("--epsilon must be positive")


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _cmd_simulate(parser, args) -> int:
    if args.mechanism != "none" and args.epsilon is None:
        parser.error(f"--mechanism {args.mechanism} requires --epsilon")
    _validate_run_flags(parser, args)
    figures = _resolve_figures(parser, args)
    report, recovery = run_experiment(
        model=ModelKind(args.model),
        mechanism=MechanismKind(args.mechanism),
        epsilon=args.epsilon,
        users=args.users,
        epochs=args.epochs,
        seed=args.seed,
        k=args.k,
        learning_rate=args.learning_rate,
    )
    _emit(report.to_json() if args.format == "json" else report.to_csv(), args.out)
    if figures:
        from .figures import render_experiment_figures

        for path in render_experiment_figures(report, recovery, args.out):
            print(f"figure written: {path}", file=sys.stderr)
    return 0


def _cmd_sweep(parser, args) -> int:
    try:
        epsilons = [float(tok) for tok in args.epsilons.split(",") if tok.strip()]
    except ValueError:
        parser.error(f"--epsilons must be a comma-separated list of reals: {args.epsilons!r}")
    if not epsilons or any(e <= 0 for e in epsilons):
        parser.error("--epsilons must contain at least one positive budget")
    if args.seeds < 1:
        parser.error("--seeds must be a positive integer")
    _validate_run_flags(parser, args)
    figures = _resolve_figures(parser, args)
    rows = run_sweep(
        model=ModelKind(args.model),
        mechanism=MechanismKind(args.mechanism),
        epsilons=epsilons,
        seeds=args.seeds,
        users=args.users,
        epochs=args.epochs,
        k=args.k,
        learning_rate=args.learning_rate,
    )
    _emit(sweep_to_csv(rows), args.out)
    if figures:
        from .figures import render_sweep_figures

        for path in render_sweep_figures(rows, args.out):
            print(f"figure written: {path}", file=sys.stderr)
    return 0


def _cmd_serve(parser, args) -> int:
    from .service import serve

    port = int(os.environ["PORT"]) if os.environ.get("PORT") else args.port
    serve(port=port, host=args.host, static_dir=args.static_dir, state_file=args.state_file)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"simulate": _cmd_simulate, "sweep": _cmd_sweep, "serve": _cmd_serve}
    try:
        return handlers[args.command](parser, args)
    except LdpFedError as exc:
        print(f"ldpfed: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"ldpfed: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
