"""Command-line entry point.

    glocal run     --algo glocal --seed 7
    glocal compare [--config FILE] [--set section.key=value ...]
    glocal ablate
    glocal report  --dir OUTPUT_DIR

Exit codes: 0 success, 1 usage or configuration error, 2 runtime failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import shutil
import sys
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

from . import config as cfgmod
from .harness import export_results, load_results, run_experiment, summarize

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2
OUT_ENV = "GLOCAL_OUT"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass
class CliInvocation:
    command: str
    config_path: str | None = None
    overrides: list[str] = field(default_factory=list)
    seed: int | None = None
    algorithm: str | None = None
    out_dir: str | None = None
    jobs: int = 1


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="glocal", description="GloCAL curriculum experiments on a surrogate learner")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def common(p, needs_config=True):
        if needs_config:
            p.add_argument("--config", help="YAML experiment config (default: shipped reference config)")
            p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                           help="override a config entry, e.g. glocal.threshold_B=80 (repeatable)")
            p.add_argument("--jobs", type=int, default=1, help="worker processes")
        p.add_argument("--out", help=f"output directory (default: ${OUT_ENV} or ./results)")

    p = sub.add_parser("run", help="one algorithm")
    common(p)
    p.add_argument("--algo", required=True, choices=cfgmod.ALGORITHMS)
    p.add_argument("--seed", type=int, help="single seed instead of the configured list")
    p = sub.add_parser("compare", help="all six algorithm variants")
    common(p)
    p.add_argument("--seed", type=int)
    p = sub.add_parser("ablate", help="GloCAL and its two ablations")
    common(p)
    p.add_argument("--seed", type=int)
    p = sub.add_parser("report", help="rebuild summary and plot series from stored logs")
    p.add_argument("--dir", required=True, help="output directory of an earlier run")
    p.add_argument("--out", help="where to write the report (default: --dir)")
    return parser


def parse_args(argv) -> CliInvocation:
    ns = build_parser().parse_args(argv)
    if ns.command is None:
        raise UsageError("glocal: a command is required (run, compare, ablate, report)")
    if ns.command == "report":
        return CliInvocation(command="report", config_path=ns.dir, out_dir=ns.out or ns.dir)
    if ns.jobs < 1:
        raise UsageError("--jobs must be >= 1")
    return CliInvocation(
        command=ns.command,
        config_path=ns.config,
        overrides=list(ns.overrides),
        seed=ns.seed,
        algorithm=getattr(ns, "algo", None),
        out_dir=ns.out or os.environ.get(OUT_ENV) or "results",
        jobs=ns.jobs,
    )


def effective_config(inv: CliInvocation) -> cfgmod.ExperimentConfig:
    cfg = cfgmod.load_config(inv.config_path, inv.overrides)
    if inv.command == "run":
        cfg = dataclasses.replace(cfg, algorithms=(inv.algorithm,))
    elif inv.command == "compare":
        cfg = dataclasses.replace(cfg, algorithms=cfgmod.ALGORITHMS)
    elif inv.command == "ablate":
        cfg = dataclasses.replace(cfg, algorithms=cfgmod.ABLATIONS)
    if inv.seed is not None:
        cfg = dataclasses.replace(cfg, seeds=(inv.seed,))
    return cfg


def _report(inv: CliInvocation) -> int:
    src = Path(inv.config_path)
    echo = src / "effective_config.yaml"
    if not echo.is_file():
        raise cfgmod.ConfigError(f"{src} has no effective_config.yaml; not an experiment directory")
    cfg = cfgmod.load_config(echo)
    results = load_results(src, cfg)
    export_results(results, summarize(results), inv.out_dir, cfg=None, write_logs=False)
    print(f"report written to {inv.out_dir}")
    return EXIT_OK


def execute(inv: CliInvocation) -> int:
    if inv.command == "report":
        return _report(inv)
    cfg = effective_config(inv)
    started = time.perf_counter()
    results = run_experiment(cfg, jobs=inv.jobs)
    summary = summarize(results)
    out = Path(inv.out_dir)
    # stage everything, then move into place, so a failed run leaves nothing behind
    out.parent.mkdir(parents=True, exist_ok=True)
    staging = Path(tempfile.mkdtemp(prefix=".glocal-", dir=out.parent))
    try:
        export_results(results, summary, staging, cfg=cfg)
        out.mkdir(exist_ok=True)
        for item in staging.iterdir():
            target = out / item.name
            if target.is_dir():
                shutil.rmtree(target)
            os.replace(item, target)
    finally:
        shutil.rmtree(staging, ignore_errors=True)
    elapsed = time.perf_counter() - started
    for algo, entry in summary["algorithms"].items():
        last = entry["checkpoints"][-1]
        p = "" if last["p_vs_glocal"] is None else f"  p_vs_glocal={last['p_vs_glocal']:.3g}"
        print(f"{algo:24s} median learnt {last['median']:>5} (min {last['min']}, max {last['max']}){p}")
    print(f"{len(results)} runs in {elapsed:.1f}s -> {out}")
    return EXIT_OK


def main(argv=None) -> int:
    try:
        inv = parse_args(sys.argv[1:] if argv is None else argv)
        # configuration problems are usage errors; surface them before any work starts
        if inv.command != "report":
            effective_config(inv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except cfgmod.ConfigError as exc:
        print(f"glocal: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        return execute(inv)
    except (cfgmod.ConfigError, OSError, ValueError, RuntimeError) as exc:
        print(f"glocal: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
