"""Command-line front end.

Exit statuses:

    0  success (for ``check``: every candidate accepted)
    1  ``check`` rejected at least one candidate
    2  bad input: unparsable graph6, order mismatch, empty or too-small set
    3  exhaustive enumeration refused by the budget guard
    4  archive download failed
    5  downloaded archive failed validation

Settings resolve as flag, then ``RAMSEY_OVE_<NAME>`` environment variable,
then the JSON file given by ``--config``, then the built-in default.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import archive, engine, iso, oracle
from .graph import Graph, Graph6Error, graph6_encode, read_graph6
from .oracle import RamseyParams

ENV_PREFIX = "RAMSEY_OVE_"

EXIT_OK = 0
EXIT_REJECTED = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3
EXIT_NETWORK = 4
EXIT_VALIDATION = 5


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    s: int = 3
    t: int = 3
    mode: str = "psi"
    hash: str = iso.DEFAULT_SCHEME
    workers: int = 1
    budget: int = oracle.DEFAULT_BUDGET
    archive_url: str = archive.DEFAULT_ARCHIVE_URL
    cache_dir: Optional[str] = None
    out: Optional[str] = None
    stats: str = "text"

    def __post_init__(self) -> None:
        if self.s < 2 or self.t < 2:
            raise InputError(f"--s and --t must be at least 2 (got s={self.s}, t={self.t})")
        if self.workers < 1:
            raise InputError("--workers must be at least 1")
        if self.mode not in engine.MODES:
            raise InputError(f"--mode must be one of {engine.MODES}")
        if self.hash not in iso.SCHEMES:
            raise InputError(f"--hash must be one of {iso.SCHEMES}")
        if self.stats not in ("text", "structured"):
            raise InputError("--stats must be 'text' or 'structured'")

    @property
    def params(self) -> RamseyParams:
        return RamseyParams(self.s, self.t)


_SETTINGS = {
    "s": int,
    "t": int,
    "mode": str,
    "hash": str,
    "workers": int,
    "budget": int,
    "archive_url": str,
    "cache_dir": str,
    "out": str,
    "stats": str,
}


def resolve_config(args: argparse.Namespace, environ=None) -> RunConfig:
    environ = os.environ if environ is None else environ
    file_values = {}
    if getattr(args, "config", None):
        try:
            file_values = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read config file {args.config}: {exc}") from exc
    values = {}
    for name, kind in _SETTINGS.items():
        flag = getattr(args, name, None)
        env = environ.get(ENV_PREFIX + name.upper())
        if flag is not None:
            values[name] = flag
        elif env is not None:
            try:
                values[name] = kind(env)
            except ValueError as exc:
                raise InputError(f"bad value for {ENV_PREFIX + name.upper()}: {env!r}") from exc
        elif name in file_values:
            values[name] = kind(file_values[name])
    return RunConfig(**values)


def _load_graphs(path: str) -> list[Graph]:
    try:
        return read_graph6(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from exc
    except Graph6Error as exc:
        raise InputError(f"{path}: {exc}") from exc


def _load_set(path: str, cfg: RunConfig, order: Optional[int] = None) -> engine.CounterexampleSet:
    graphs = _load_graphs(path)
    if not graphs and order is None:
        raise InputError(f"{path}: no graphs")
    set_order = graphs[0].order if graphs else order
    for lineno, g in enumerate(graphs, start=1):
        if g.order != set_order:
            raise InputError(f"{path}: graph {lineno} has order {g.order}, expected {set_order}")
    try:
        return engine.CounterexampleSet(cfg.params, set_order, graphs, scheme=cfg.hash)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc


def _emit_graphs(graphs, cfg: RunConfig) -> list[str]:
    lines = sorted(graph6_encode(g) for g in graphs)
    text = "".join(line + "\n" for line in lines)
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="ascii")
    else:
        sys.stdout.write(text)
    return lines


def _emit_report(record: dict, cfg: RunConfig, stream=None) -> None:
    stream = stream or (sys.stdout if cfg.out else sys.stderr)
    if cfg.stats == "structured":
        print(json.dumps(record, sort_keys=True), file=stream)
    else:
        for key, value in record.items():
            if isinstance(value, float):
                value = f"{value:.4f}"
            print(f"{key}={value}", file=stream)


def cmd_check(args, cfg: RunConfig) -> int:
    candidates = _load_graphs(args.candidates)
    if not candidates:
        raise InputError(f"{args.candidates}: no graphs")
    src = _load_set(args.set, cfg, order=candidates[0].order - 1)
    verdicts = []
    for lineno, g in enumerate(candidates, start=1):
        if g.order != src.order + 1:
            raise InputError(
                f"{args.candidates}: graph {lineno} has order {g.order}, set has order {src.order}"
            )
        try:
            ok = engine.check_candidate(g, src)
        except ValueError as exc:
            raise InputError(str(exc)) from exc
        verdicts.append(ok)
        print(f"{lineno}\t{graph6_encode(g)}\t{'true' if ok else 'false'}")
    _emit_report(
        {
            "candidates": len(verdicts),
            "accepted": sum(verdicts),
            "rejected": len(verdicts) - sum(verdicts),
            "iso_calls": src.index.iso_calls,
            "set_size": src.k,
        },
        cfg,
        stream=sys.stdout,
    )
    return EXIT_OK if all(verdicts) else EXIT_REJECTED


def cmd_extend(args, cfg: RunConfig) -> int:
    src = _load_set(args.set, cfg)
    if src.order < 2:
        raise InputError("extension needs graphs with at least 2 vertices")
    try:
        out, stats = engine.extend_set(src, mode=cfg.mode, workers=cfg.workers)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    _emit_graphs(out.members, cfg)
    _emit_report(stats.as_dict(), cfg)
    return EXIT_OK


def cmd_decrement(args, cfg: RunConfig) -> int:
    src = _load_set(args.set, cfg)
    if src.order < 2:
        raise InputError("decrementing needs graphs with at least 2 vertices")
    out = engine.decrement_set(src)
    _emit_graphs(out.members, cfg)
    _emit_report({"input": src.k, "output": out.k, "order": out.order}, cfg)
    return EXIT_OK


def cmd_enumerate(args, cfg: RunConfig) -> int:
    try:
        graphs = oracle.enumerate_counterexamples(cfg.params, args.n, budget=cfg.budget)
    except oracle.BudgetExceeded as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    _emit_graphs(graphs, cfg)
    _emit_report({"order": args.n, "classes": len(graphs)}, cfg)
    return EXIT_OK


def cmd_fetch(args, cfg: RunConfig) -> int:
    names = list(archive.ARCHIVES) if args.archive == "all" else [args.archive]
    for name in names:
        spec = archive.ARCHIVES[name]
        try:
            path = archive.fetch_archive(spec, cfg.archive_url, cfg.cache_dir)
        except archive.FetchError as exc:
            print(f"fetch failed: {exc}", file=sys.stderr)
            return EXIT_NETWORK
        except archive.ArchiveValidationError as exc:
            print(f"validation failed for {spec.filename}: {exc}", file=sys.stderr)
            return EXIT_VALIDATION
        print(f"{name}\t{spec.expected_count} graphs\t{path}")
    return EXIT_OK


def cmd_verify_chain(args, cfg: RunConfig) -> int:
    p = cfg.params
    if args.set:
        start = _load_set(args.set, cfg)
    elif args.start_order:
        try:
            graphs = oracle.enumerate_counterexamples(p, args.start_order, budget=cfg.budget)
        except oracle.BudgetExceeded as exc:
            print(f"refused: {exc}", file=sys.stderr)
            return EXIT_BUDGET
        start = engine.CounterexampleSet(p, args.start_order, graphs, scheme=cfg.hash)
    else:
        raise InputError("verify-chain needs a set file or --start-order")
    try:
        report = engine.verify_chain(p, start, args.target, mode=cfg.mode, workers=cfg.workers, budget=cfg.budget)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    if cfg.stats == "structured":
        print(json.dumps(report.as_dict(), sort_keys=True))
    else:
        for step in report.steps:
            extra = ""
            if step.stats:
                extra = f"\tcandidates={step.stats.candidates_examined}\tbound={step.stats.candidate_bound}"
            print(f"n={step.order}\tcount={step.count}{extra}")
    if cfg.out:
        _emit_graphs(report.final.members, cfg)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--s", type=int, help="clique threshold")
    common.add_argument("--t", type=int, help="independent-set threshold")
    common.add_argument("--mode", choices=engine.MODES)
    common.add_argument("--hash", choices=iso.SCHEMES)
    common.add_argument("--workers", type=int)
    common.add_argument("--budget", type=int, help="max labelled graphs for exhaustive search")
    common.add_argument("--archive-url", dest="archive_url")
    common.add_argument("--cache-dir", dest="cache_dir")
    common.add_argument("--out", help="write graph6 output here instead of stdout")
    common.add_argument("--stats", choices=("text", "structured"))
    common.add_argument("--config", help="JSON file with default settings")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="ramsey-ove", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", parents=[common], help="test candidates against a set one order lower")
    p.add_argument("candidates")
    p.add_argument("set")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("extend", parents=[common], help="one-vertex extension of a set")
    p.add_argument("set")
    p.set_defaults(func=cmd_extend)

    p = sub.add_parser("decrement", parents=[common], help="all single-vertex deletions of a set")
    p.add_argument("set")
    p.set_defaults(func=cmd_decrement)

    p = sub.add_parser("enumerate", parents=[common], help="exhaustive enumeration for small n")
    p.add_argument("n", type=int)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("fetch", parents=[common], help="download and validate a published archive")
    p.add_argument("--archive", choices=[*archive.ARCHIVES, "all"], default="all")
    p.set_defaults(func=cmd_fetch)

    p = sub.add_parser("verify-chain", parents=[common], help="extend repeatedly and report counts")
    p.add_argument("set", nargs="?")
    p.add_argument("--start-order", type=int, help="start from exhaustive enumeration at this order")
    p.add_argument("--target", type=int, required=True)
    p.set_defaults(func=cmd_verify_chain)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = resolve_config(args)
        return args.func(args, cfg)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
