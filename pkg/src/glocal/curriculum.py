"""GloCAL curriculum: cluster remaining tasks by score, train the median task of
the best cluster as the global task, then its siblings as local tasks from a
copy of the global policy.  Only the global policy is carried forward.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .clustering import local_tasks, pick_global, select_clusters
from .learner import (LearnerConfig, PolicyState, clone_policy, evaluate,
                      evaluate_all, mark_mastered, train)
from .tasks import TaskBank


@dataclass(frozen=True)
class GlocalConfig:
    threshold_B: int = 75
    per_task_cap: int = 80_000
    max_iter: int = 50
    total_budget: int = 4_000_000
    k_min: int = 2
    k_max: int = 10
    kmeans_restarts: int = 16
    ablation_no_global: bool = False
    ablation_random_cluster: bool = False

    def __post_init__(self):
        if self.threshold_B <= 0:
            raise ValueError("threshold_B must be positive")
        if self.per_task_cap <= 0 or self.total_budget <= 0 or self.max_iter <= 0:
            raise ValueError("per_task_cap, total_budget and max_iter must be positive")
        if not 1 <= self.k_min <= self.k_max:
            raise ValueError("need 1 <= k_min <= k_max")


@dataclass(frozen=True)
class LogEntry:
    iteration: int
    task: int
    role: str            # "global", "local" or "sample"
    steps_used: int
    final_score: int
    learned: bool
    policy_id: str
    parent_policy_id: str | None
    cumulative_steps: int


@dataclass
class CurriculumLog:
    algorithm: str
    entries: list[LogEntry] = field(default_factory=list)
    learnt: list[int] = field(default_factory=list)
    steps_consumed: int = 0
    # policy credited with each learnt task, as it was when the task crossed B
    policies: dict[int, PolicyState] = field(default_factory=dict, repr=False)

    def record(self, entry: LogEntry, policy: PolicyState) -> None:
        self.entries.append(entry)
        if entry.learned:
            if entry.task in self.policies:
                raise RuntimeError(f"task {entry.task} learnt twice")
            self.learnt.append(entry.task)
            self.policies[entry.task] = policy

    def learnt_at(self, steps: int) -> int:
        """Number of tasks learnt once ``steps`` training steps had been spent."""
        return sum(1 for e in self.entries if e.learned and e.cumulative_steps <= steps)

    def to_jsonl(self) -> str:
        return "".join(json.dumps({"algorithm": self.algorithm, **asdict(e)}) + "\n"
                       for e in self.entries)

    @classmethod
    def from_jsonl(cls, text: str, algorithm: str | None = None) -> CurriculumLog:
        log = None
        for line in text.splitlines():
            if not line.strip():
                continue
            rec = json.loads(line)
            name = rec.pop("algorithm")
            if log is None:
                log = cls(algorithm=algorithm or name)
            entry = LogEntry(**rec)
            log.entries.append(entry)
            if entry.learned:
                log.learnt.append(entry.task)
            log.steps_consumed = entry.cumulative_steps
        return log if log is not None else cls(algorithm=algorithm or "")


@dataclass(frozen=True)
class Attempt:
    policy: PolicyState
    learned: bool
    steps_used: int
    score: int


def train_until_threshold(policy: PolicyState, task: int, bank: TaskBank, cfg: GlocalConfig,
                          lcfg: LearnerConfig, rng: np.random.Generator,
                          budget_left: int | None = None, cap: int | None = None) -> Attempt:
    """Evaluate, then alternate one training chunk and one evaluation until the
    score exceeds ``threshold_B`` or the step cap (or remaining budget) is spent.

    Evaluation trials cost no training steps.  A task that crosses the
    threshold after training counts as a mastery for the policy.
    """
    cap = cfg.per_task_cap if cap is None else cap
    limit = cap if budget_left is None else min(cap, budget_left)
    used = 0
    while True:
        score = evaluate(policy, task, bank, lcfg, rng)
        if score > cfg.threshold_B:
            if used > 0:
                policy = mark_mastered(policy, lcfg)
            return Attempt(policy, True, used, score)
        if used >= limit:
            return Attempt(policy, False, used, score)
        step = min(lcfg.train_chunk, limit - used)
        policy = train(policy, task, step, bank, lcfg)
        used += step


def remaining_tasks(bank: TaskBank, learnt) -> list[int]:
    done = set(learnt)
    if not done <= set(bank.ids):
        raise ValueError("learnt set contains tasks outside the bank")
    return [t for t in bank.ids if t not in done]


def algorithm_name(cfg: GlocalConfig) -> str:
    if cfg.ablation_no_global and cfg.ablation_random_cluster:
        return "glocal_no_global_random_cluster"
    if cfg.ablation_no_global:
        return "glocal_no_global"
    if cfg.ablation_random_cluster:
        return "glocal_random_cluster"
    return "glocal"


def run_glocal(bank: TaskBank, init_policy: PolicyState, cfg: GlocalConfig,
               lcfg: LearnerConfig, rng: np.random.Generator) -> CurriculumLog:
    log = CurriculumLog(algorithm=algorithm_name(cfg))
    learnt: set[int] = set()
    current = init_policy

    def attempt(policy, task, m, role):
        budget_left = cfg.total_budget - log.steps_consumed
        res = train_until_threshold(policy, task, bank, cfg, lcfg, rng, budget_left=budget_left)
        log.steps_consumed += res.steps_used
        log.record(LogEntry(m, task, role, res.steps_used, res.score, res.learned,
                            res.policy.policy_id, res.policy.parent_id, log.steps_consumed),
                   res.policy)
        if res.learned:
            learnt.add(task)
        return res.policy

    for m in range(1, cfg.max_iter + 1):
        todo = remaining_tasks(bank, learnt)
        if not todo or log.steps_consumed >= cfg.total_budget:
            break
        scores = evaluate_all(current, todo, bank, lcfg, rng)
        clusters = select_clusters(scores, rng, k_min=cfg.k_min, k_max=cfg.k_max,
                                   restarts=cfg.kmeans_restarts)
        if cfg.ablation_random_cluster:
            chosen = clusters.clusters[int(rng.integers(clusters.k))]
        else:
            chosen = clusters.clusters[0]
        glob = pick_global(chosen)

        global_policy = attempt(clone_policy(current, f"G{m}"), glob, m, "global")
        prev = global_policy
        for i, task in enumerate(local_tasks(chosen, glob)):
            if log.steps_consumed >= cfg.total_budget:
                break
            prev = attempt(clone_policy(prev, f"L{m}.{i}"), task, m, "local")
        current = prev if cfg.ablation_no_global else global_policy
    return log

