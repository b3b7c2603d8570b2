"""Comparison curricula on the discrete task bank: uniform random task order and
ALP-GMM (absolute learning progress fitted with a Gaussian mixture).

Both train one policy throughout and save a snapshot of it for every task the
moment that task crosses the success threshold.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .curriculum import (CurriculumLog, GlocalConfig, LogEntry, remaining_tasks,
                         train_until_threshold)
from .gmm import GaussianMixture, fit_gmm
from .learner import LearnerConfig, PolicyState, clone_policy
from .tasks import TaskBank


def run_random(bank: TaskBank, init_policy: PolicyState, cfg: GlocalConfig,
               lcfg: LearnerConfig, rng: np.random.Generator) -> CurriculumLog:
    log = CurriculumLog(algorithm="random")
    policy = clone_policy(init_policy, "random")
    attempt_no = 0
    while log.steps_consumed < cfg.total_budget:
        todo = remaining_tasks(bank, log.learnt)
        if not todo:
            break
        task = todo[int(rng.integers(len(todo)))]
        attempt_no += 1
        res = train_until_threshold(policy, task, bank, cfg, lcfg, rng,
                                    budget_left=cfg.total_budget - log.steps_consumed)
        policy = res.policy
        log.steps_consumed += res.steps_used
        log.record(LogEntry(attempt_no, task, "sample", res.steps_used, res.score, res.learned,
                            policy.policy_id, policy.parent_id, log.steps_consumed), policy)
    return log


@dataclass(frozen=True)
class AlpGmmConfig:
    update_every: int = 250
    p_rnd: float = 0.2
    window: int | None = None  # points kept for each fit; defaults to update_every
    k_range: tuple[int, ...] = (1, 2, 3, 4, 5)
    em_restarts: int = 10
    em_max_iter: int = 100
    em_tol: float = 1e-6
    cov_floor: float = 1e-6

    def __post_init__(self):
        if self.update_every < 1:
            raise ValueError("update_every must be >= 1")
        if self.window is not None and self.window < 2:
            raise ValueError("window must be >= 2")
        if not 0.0 <= self.p_rnd <= 1.0:
            raise ValueError("p_rnd must lie in [0, 1]")


@dataclass
class AlpGmmState:
    n_tasks: int
    update_every: int = 250
    p_rnd: float = 0.2
    window: int = 250
    history: dict[int, list[int]] = field(default_factory=dict)
    points: list[tuple[float, float]] = field(default_factory=list)
    gmm: GaussianMixture | None = None

    def task_param(self, task: int) -> float:
        return task / (self.n_tasks - 1) if self.n_tasks > 1 else 0.0

    def observe(self, task: int, score: int, s_bar: int) -> float:
        past = self.history.setdefault(task, [])
        alp = compute_alp(past[-1] if past else 0, score, s_bar)
        past.append(score)
        self.points.append((self.task_param(task), alp))
        if len(self.points) > self.window:
            del self.points[: len(self.points) - self.window]
        return alp


def compute_alp(old: int, new: int, s_bar: int) -> float:
    """Absolute learning progress between two consecutive scores, in [0, 1]."""
    return abs(new - old) / s_bar


def sample_task(state: AlpGmmState, remaining, rng: np.random.Generator) -> int:
    """Uniform with probability ``p_rnd`` (or before any fit); otherwise draw from
    a mixture component chosen in proportion to its mean ALP and snap the drawn
    task parameter to the nearest remaining task."""
    remaining = list(remaining)
    if not remaining:
        raise ValueError("no remaining tasks to sample from")
    if len(remaining) == 1:
        return remaining[0]
    if state.gmm is None or rng.random() < state.p_rnd:
        return remaining[int(rng.integers(len(remaining)))]
    alp = np.clip(state.gmm.means[:, 1], 0.0, None)
    probs = alp / alp.sum() if alp.sum() > 0 else state.gmm.weights
    comp = int(rng.choice(state.gmm.k, p=probs))
    param = float(state.gmm.sample(rng, comp)[0])
    params = np.array([state.task_param(t) for t in remaining])
    return remaining[int(np.argmin(np.abs(params - param)))]


def run_alp_gmm(bank: TaskBank, init_policy: PolicyState, cfg: GlocalConfig,
                lcfg: LearnerConfig, acfg: AlpGmmConfig, rng: np.random.Generator) -> CurriculumLog:
    """One sampling iteration = sample a task, train it for one chunk, evaluate.

    The mixture over (task parameter, ALP) is refitted every
    ``acfg.update_every`` iterations on the most recent ``acfg.window`` points,
    by default the points gathered since the previous fit.
    """
    log = CurriculumLog(algorithm=f"alp_gmm_{acfg.update_every}")
    window = acfg.window if acfg.window is not None else max(acfg.update_every, 2)
    state = AlpGmmState(bank.N, acfg.update_every, acfg.p_rnd, window)
    policy = clone_policy(init_policy, "alp_gmm")
    it = 0
    while log.steps_consumed < cfg.total_budget:
        todo = remaining_tasks(bank, log.learnt)
        if not todo:
            break
        it += 1
        task = sample_task(state, todo, rng)
        res = train_until_threshold(policy, task, bank, cfg, lcfg, rng,
                                    budget_left=cfg.total_budget - log.steps_consumed,
                                    cap=lcfg.train_chunk)
        policy = res.policy
        log.steps_consumed += res.steps_used
        log.record(LogEntry(it, task, "sample", res.steps_used, res.score, res.learned,
                            policy.policy_id, policy.parent_id, log.steps_consumed), policy)
        state.observe(task, res.score, lcfg.s_bar)
        if it % acfg.update_every == 0 and len(state.points) >= 2:
            state.gmm = fit_gmm(state.points, rng, k_range=acfg.k_range,
                                restarts=acfg.em_restarts, max_iter=acfg.em_max_iter,
                                tol=acfg.em_tol, cov_floor=acfg.cov_floor)
    return log
