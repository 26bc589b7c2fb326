"""Command-line front end: game I/O, campaigns, reproducible reports.

Commands: solve, check-obedience, verify-theorem, search-gain,
canonicalize. Inputs are single JSON files; reports go to --out as JSON or
CSV plus a PNG figure, and identical configurations produce byte-identical
data files. Exit codes: 0 success, 1 usage, 2 bad data, 3 theorem
violation, 4 internal error.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

from . import fileio
from .campaign import theorem_campaign, thread_cap
from .errors import (
    GameFormatError,
    InvariantViolation,
    DimensionMismatch,
    LPFailure,
    PersuasionLabError,
    TheoremViolation,
)
from .model import as_ambiguous, canonicalize
from .obedience import ambiguous_obedience, statistical_obedience
from .senderopt import gain_search, optimal_statistical_value

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_THEOREM = 3
EXIT_INTERNAL = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


@dataclass
class RunConfig:
    command: str
    game_path: str | None
    seed: int
    budget: int
    resolution: float
    output_path: str | None
    format: str
    experiment_path: str | None = None
    strategy_path: str | None = None
    figures: bool = True

    def validate(self) -> None:
        if self.budget < 0:
            raise InvariantViolation("budget must be nonnegative")
        if not 0.0 < self.resolution <= 0.5:
            raise InvariantViolation("resolution must lie in (0, 0.5]")


def build_parser() -> _Parser:
    parser = _Parser(prog="persuasion-lab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, game_required=True):
        p.add_argument("--game", required=game_required, help="game JSON file")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--budget", type=int, default=1000, help="trial count")
        p.add_argument("--resolution", type=float, default=1e-3)
        p.add_argument("--out", default=None, help="report file path")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--no-figures", action="store_true", help="skip PNG rendering")

    common(sub.add_parser("solve", help="optimal obedient statistical experiment"))
    p = sub.add_parser("check-obedience", help="certify an experiment file")
    common(p)
    p.add_argument("--experiment", required=True, help="experiment JSON file")
    p = sub.add_parser("canonicalize", help="garble an experiment through a strategy")
    common(p)
    p.add_argument("--experiment", required=True)
    p.add_argument("--strategy", required=True, help="receiver strategy JSON file")
    common(sub.add_parser("verify-theorem", help="run the no-gain campaign"), game_required=False)
    common(sub.add_parser("search-gain", help="compare ambiguous vs statistical values"))
    return parser


def _config_from_args(args) -> RunConfig:
    cfg = RunConfig(
        command=args.command,
        game_path=getattr(args, "game", None),
        seed=args.seed,
        budget=args.budget,
        resolution=args.resolution,
        output_path=args.out,
        format=args.format,
        experiment_path=getattr(args, "experiment", None),
        strategy_path=getattr(args, "strategy", None),
        figures=not args.no_figures,
    )
    cfg.validate()
    return cfg


def _emit(cfg: RunConfig, report: dict, rows: tuple[list, list] | None = None) -> None:
    """Write the report per config and echo a JSON summary to stdout."""
    if cfg.output_path:
        out = Path(cfg.output_path)
        if cfg.format == "csv" and rows is not None:
            header, data = rows
            fileio.write_csv(out, header, data)
        else:
            payload = dict(report)
            if rows is not None:
                header, data = rows
                payload["rows"] = [dict(zip(header, r)) for r in data]
            out.write_text(fileio.dumps_report(payload))
    sys.stdout.write(fileio.dumps_report(report))


def _figure_path(cfg: RunConfig) -> Path | None:
    if not (cfg.figures and cfg.output_path):
        return None
    return Path(cfg.output_path).with_suffix(".png")


def _cmd_solve(cfg: RunConfig) -> int:
    game = fileio.load_game(cfg.game_path)
    sol = optimal_statistical_value(game, resolution=cfg.resolution)
    report = {
        "value": sol.value,
        "method": sol.method,
        "exact": sol.exact,
        "experiment": fileio.experiment_to_dict(as_ambiguous(sol.experiment)),
        "witness": fileio.witness_to_dict(sol.obedience_witness),
    }
    _emit(cfg, report)
    fig = _figure_path(cfg)
    if fig is not None:
        from .plots import render_solve_figure

        render_solve_figure(game, sol, fig)
    return EXIT_OK


def _cmd_check_obedience(cfg: RunConfig) -> int:
    game = fileio.load_game(cfg.game_path)
    amb = fileio.load_experiment(cfg.experiment_path)
    if not amb.is_canonical_for(game):
        print(
            "error: experiment is not canonical (messages differ from the game's "
            "actions); run `persuasion-lab canonicalize` with a receiver strategy first",
            file=sys.stderr,
        )
        return EXIT_DATA
    if amb.n_generators == 1:
        witness = statistical_obedience(amb.generators[0], game)
    else:
        witness = ambiguous_obedience(amb, game)
    _emit(cfg, fileio.witness_to_dict(witness))
    return EXIT_OK


def _cmd_canonicalize(cfg: RunConfig) -> int:
    amb = fileio.load_experiment(cfg.experiment_path)
    tau = fileio.load_strategy(cfg.strategy_path)
    result = canonicalize(amb, tau)
    _emit(cfg, fileio.experiment_to_dict(result))
    return EXIT_OK


def _cmd_verify_theorem(cfg: RunConfig) -> int:
    game = fileio.load_game(cfg.game_path) if cfg.game_path else None
    report, records, failures = theorem_campaign(
        cfg.budget, cfg.seed, game=game, workers=thread_cap()
    )
    header = [
        "trial", "seed", "n_generators", "p_lo", "p_hi",
        "alpha", "lambda", "hat_x", "hat_y", "margin", "sample_attempts",
    ]
    data = [
        [r.trial, r.seed, r.n_generators, r.p_lo, r.p_hi,
         r.alpha, r.lam, r.hat_x, r.hat_y, r.margin, r.sample_attempts]
        for r in records
    ]
    payload = report.to_json()
    if failures:
        payload["failures"] = failures
    _emit(cfg, payload, rows=(header, data))
    fig = _figure_path(cfg)
    if fig is not None:
        from .plots import render_theorem_figure

        render_theorem_figure(records, fig)
    return EXIT_THEOREM if failures else EXIT_OK


def _cmd_search_gain(cfg: RunConfig) -> int:
    game = fileio.load_game(cfg.game_path)
    report, trials = gain_search(game, cfg.budget, cfg.seed, resolution=cfg.resolution)
    header = ["seed", "trial", "obedient", "sender_value"]
    data = [[t.seed, t.trial, t.obedient, t.sender_value] for t in trials]
    _emit(cfg, report.to_json(), rows=(header, data))
    fig = _figure_path(cfg)
    if fig is not None:
        from .plots import render_gain_figure

        render_gain_figure(report, trials, fig)
    return EXIT_OK


_HANDLERS = {
    "solve": _cmd_solve,
    "check-obedience": _cmd_check_obedience,
    "canonicalize": _cmd_canonicalize,
    "verify-theorem": _cmd_verify_theorem,
    "search-gain": _cmd_search_gain,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _config_from_args(args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except InvariantViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return _HANDLERS[cfg.command](cfg)
    except (GameFormatError, DimensionMismatch, InvariantViolation) as exc:
        field = getattr(exc, "field", None)
        where = f" (field: {field})" if field else ""
        print(f"error: {exc}{where}", file=sys.stderr)
        return EXIT_DATA
    except TheoremViolation as exc:
        print(f"theorem violation: {exc}", file=sys.stderr)
        return EXIT_THEOREM
    except (LPFailure, PersuasionLabError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    raise SystemExit(main())
