"""Seeded multi-algorithm experiments, checkpointed learnt counts, Welch t-tests
against GloCAL, and plain-text exports."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from .baselines import run_alp_gmm, run_random
from .config import ALGORITHMS, ConfigError, ExperimentConfig, to_document
from .curriculum import CurriculumLog, run_glocal
from .learner import init_prior
from .stats import welch_t_test

TABLE_HEADER = ("algorithm", "seed", "checkpoint_steps", "learnt_count")
REFERENCE = "glocal"


@dataclass
class RunResult:
    algorithm: str
    seed: int
    checkpoints: list[tuple[int, int]]
    final_learnt: frozenset[int]
    log: CurriculumLog


def seed_streams(master_seed: int, seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    """(prior stream, run stream) for one seed; identical across algorithms."""
    prior_ss, run_ss = np.random.SeedSequence([master_seed, seed]).spawn(2)
    return np.random.default_rng(prior_ss), np.random.default_rng(run_ss)


def run_algorithm(algorithm: str, cfg: ExperimentConfig, seed: int) -> RunResult:
    if algorithm not in ALGORITHMS:
        raise ConfigError(f"unknown algorithm {algorithm!r}")
    bank = cfg.bank.build()
    prior_rng, rng = seed_streams(cfg.master_seed, seed)
    prior = init_prior(bank, bank.by_label(cfg.bank.prior_task), cfg.learner, prior_rng)
    gcfg = cfg.glocal_config()
    if algorithm.startswith("glocal"):
        gcfg = dataclasses.replace(
            gcfg,
            ablation_no_global=algorithm == "glocal_no_global",
            ablation_random_cluster=algorithm == "glocal_random_cluster",
        )
        log = run_glocal(bank, prior, gcfg, cfg.learner, rng)
    elif algorithm == "random":
        log = run_random(bank, prior, gcfg, cfg.learner, rng)
    else:
        every = int(algorithm.rsplit("_", 1)[1])
        acfg = dataclasses.replace(cfg.alp_gmm, update_every=every)
        log = run_alp_gmm(bank, prior, gcfg, cfg.learner, acfg, rng)
        log.algorithm = algorithm
    return result_from_log(algorithm, seed, log, cfg.checkpoints)


def result_from_log(algorithm: str, seed: int, log: CurriculumLog, checkpoints) -> RunResult:
    return RunResult(
        algorithm=algorithm,
        seed=seed,
        checkpoints=[(s, log.learnt_at(s)) for s in checkpoints],
        final_learnt=frozenset(log.learnt),
        log=log,
    )


def _run_job(job):
    return run_algorithm(*job)


def run_experiment(cfg: ExperimentConfig, jobs: int = 1) -> list[RunResult]:
    """Every (algorithm, seed) pair, ordered as configured.  Runs share nothing,
    so ``jobs > 1`` farms them out to worker processes."""
    for name in cfg.algorithms:
        if name not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {name!r}")
    work = [(a, cfg, s) for a in cfg.algorithms for s in cfg.seeds]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_job, work))
    return [_run_job(w) for w in work]


def _sig(x: float) -> float:
    return float(f"{x:.9g}")


def summarize(results: list[RunResult]) -> dict:
    """Per algorithm and checkpoint: spread of learnt counts over seeds and a
    Welch t-test against GloCAL (p < 0.05 flagged as significant)."""
    by_algo: dict[str, list[RunResult]] = {}
    for r in results:
        by_algo.setdefault(r.algorithm, []).append(r)
    ref = by_algo.get(REFERENCE)
    out = {}
    for algo, runs in by_algo.items():
        runs = sorted(runs, key=lambda r: r.seed)
        steps = [s for s, _ in runs[0].checkpoints]
        rows = []
        for i, step in enumerate(steps):
            counts = [r.checkpoints[i][1] for r in runs]
            row = {
                "checkpoint_steps": step,
                "n": len(counts),
                "min": min(counts),
                "median": _sig(statistics.median(counts)),
                "max": max(counts),
                "mean": _sig(statistics.fmean(counts)),
                "zero_variance": len(set(counts)) == 1,
                "t_vs_glocal": None,
                "p_vs_glocal": None,
                "significant": None,
            }
            if ref is not None and algo != REFERENCE:
                ref_counts = [r.checkpoints[i][1] for r in sorted(ref, key=lambda r: r.seed)]
                if len(ref_counts) >= 2 and len(counts) >= 2:
                    t, p = welch_t_test(ref_counts, counts)
                    row.update(t_vs_glocal=_sig(t) if np.isfinite(t) else t,
                               p_vs_glocal=_sig(p), significant=p < 0.05)
            rows.append(row)
        out[algo] = {
            "checkpoints": rows,
            "final_learnt": {str(r.seed): sorted(r.final_learnt) for r in runs},
        }
    return {"algorithms": out}


def flat_table(results: list[RunResult]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(TABLE_HEADER)
    for r in results:
        for steps, count in r.checkpoints:
            w.writerow((r.algorithm, r.seed, steps, count))
    return buf.getvalue()


def read_table(text: str) -> dict[tuple[str, int], list[tuple[int, int]]]:
    rows = csv.DictReader(io.StringIO(text))
    if tuple(rows.fieldnames or ()) != TABLE_HEADER:
        raise ValueError(f"unexpected table header {rows.fieldnames}")
    out: dict[tuple[str, int], list[tuple[int, int]]] = {}
    for row in rows:
        out.setdefault((row["algorithm"], int(row["seed"])), []).append(
            (int(row["checkpoint_steps"]), int(row["learnt_count"])))
    return out


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.9g}"
    return str(x)


def series_tables(summary: dict, results: list[RunResult]) -> tuple[str, str]:
    """Learnt count vs steps (line plot) and final counts per seed (violin plot)."""
    line = io.StringIO()
    w = csv.writer(line, lineterminator="\n")
    w.writerow(("algorithm", "checkpoint_steps", "min", "median", "max", "mean", "p_vs_glocal", "significant"))
    for algo, entry in summary["algorithms"].items():
        for row in entry["checkpoints"]:
            sig = "" if row["significant"] is None else ("*" if row["significant"] else "")
            w.writerow((algo, row["checkpoint_steps"], row["min"], _fmt(row["median"]), row["max"],
                        _fmt(row["mean"]), _fmt(row["p_vs_glocal"]), sig))
    final = io.StringIO()
    w = csv.writer(final, lineterminator="\n")
    w.writerow(("algorithm", "seed", "final_learnt_count"))
    for r in results:
        w.writerow((r.algorithm, r.seed, r.checkpoints[-1][1] if r.checkpoints else 0))
    return line.getvalue(), final.getvalue()


def _write(path: Path, text: str) -> None:
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def export_results(results: list[RunResult], summary: dict, out_dir, cfg: ExperimentConfig | None = None,
                   write_logs: bool = True) -> dict[str, Path]:
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        if write_logs:
            (out / "logs").mkdir(exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc.strerror or exc}") from exc
    paths = {
        "table": out / "results.csv",
        "summary": out / "summary.json",
        "series": out / "series_learnt_vs_steps.csv",
        "final": out / "series_final_distribution.csv",
    }
    _write(paths["table"], flat_table(results))
    _write(paths["summary"], json.dumps(summary, indent=2, sort_keys=True) + "\n")
    line, final = series_tables(summary, results)
    _write(paths["series"], line)
    _write(paths["final"], final)
    if write_logs:
        for r in results:
            _write(out / "logs" / f"{r.algorithm}__seed{r.seed}.jsonl", r.log.to_jsonl())
    if cfg is not None:
        paths["config"] = out / "effective_config.yaml"
        _write(paths["config"], yaml.safe_dump(to_document(cfg), sort_keys=False))
    return paths


def load_results(out_dir, cfg: ExperimentConfig) -> list[RunResult]:
    """Rebuild run results from the curriculum logs of a finished experiment."""
    logs = Path(out_dir) / "logs"
    results = []
    for algo in cfg.algorithms:
        for seed in cfg.seeds:
            path = logs / f"{algo}__seed{seed}.jsonl"
            if not path.is_file():
                raise FileNotFoundError(f"missing curriculum log {path}")
            log = CurriculumLog.from_jsonl(path.read_text(), algorithm=algo)
            results.append(result_from_log(algo, seed, log, cfg.checkpoints))
    return results
