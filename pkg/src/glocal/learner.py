"""Surrogate learner standing in for an RL agent on a discrete task bank.

A policy is a per-task competence vector plus a plasticity scalar.  Skill
transfers between tasks through the bank's similarity kernel; learning a
task is gated by how far its difficulty lies beyond what the policy can
already do, and every mastered task makes the policy a little less plastic.

Growth on task ``t`` over ``s`` steps::

    p   = max_j sim(j, t) * competence[j]           # effective prior
    rho = 1 / (1 + exp(-kappa * (p - difficulty[t] + delta)))
    c0  = max(competence[t], rho * p)               # warm start; competence[t] without it
    competence[t] <- 1 - (1 - c0) * exp(-eta * rho * adaptability * s)

With ``warm_start`` a task the policy already half-solves through transfer
needs far fewer steps than one it cannot do at all, the way a sparse-reward
learner only improves on tasks where it already sees some successes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .tasks import TaskBank


EVAL_MODES = ("gated", "transfer", "competence")


@dataclass(frozen=True)
class LearnerConfig:
    eta: float = 2e-4
    kappa: float = 13.0
    delta: float = 0.25
    lam: float = 0.12
    s_bar: int = 100
    train_chunk: int = 5_000
    baseline: float = 0.01
    prior_floor: float = 0.80
    # success probability at evaluation:
    #   "gated"      max(own competence, gate * effective prior)
    #   "transfer"   effective prior
    #   "competence" own competence only
    eval_mode: str = "gated"
    # score = round(s_bar * p) instead of Bernoulli trials
    deterministic_eval: bool = False
    # training on a task starts from its gated zero-shot success rather than
    # from its own competence alone (gated mode only)
    warm_start: bool = True

    def __post_init__(self):
        if self.eta <= 0 or self.kappa <= 0:
            raise ValueError("eta and kappa must be positive")
        if self.delta < 0:
            raise ValueError("delta must be non-negative")
        if not 0 <= self.lam < 1:
            raise ValueError("lam must lie in [0, 1)")
        if self.s_bar < 1 or self.train_chunk < 1:
            raise ValueError("s_bar and train_chunk must be >= 1")
        if not 0 <= self.baseline <= 1 or not 0 < self.prior_floor <= 1:
            raise ValueError("baseline and prior_floor must be probabilities")
        if self.eval_mode not in EVAL_MODES:
            raise ValueError(f"eval_mode must be one of {EVAL_MODES}")


@dataclass
class PolicyState:
    competence: np.ndarray
    adaptability: float = 1.0
    policy_id: str = "init"
    parent_id: str | None = None
    steps_trained: int = 0
    # shared by every version of one policy so default clone ids never repeat
    _clone_counter: list = field(default_factory=lambda: [0], repr=False, compare=False)

    def __eq__(self, other):
        if not isinstance(other, PolicyState):
            return NotImplemented
        return (np.array_equal(self.competence, other.competence)
                and self.adaptability == other.adaptability
                and self.policy_id == other.policy_id
                and self.parent_id == other.parent_id
                and self.steps_trained == other.steps_trained)


def init_prior(bank: TaskBank, prior_task: int, cfg: LearnerConfig,
               rng: np.random.Generator, policy_id: str = "init") -> PolicyState:
    """Policy pretrained on ``prior_task`` only; every other task sits at baseline.

    Training runs in chunks until the prior's competence reaches
    ``cfg.prior_floor`` and one evaluation confirms it.  Adaptability is left at
    1.0: pretraining is not counted as a mastery.
    """
    task = bank.check(prior_task)
    policy = PolicyState(competence=np.full(bank.N, cfg.baseline), policy_id=policy_id)
    floor_score = cfg.prior_floor * cfg.s_bar
    for _ in range(10_000):
        if policy.competence[task] >= cfg.prior_floor and evaluate(policy, task, bank, cfg, rng) >= floor_score:
            return replace(policy, steps_trained=0)
        policy = train(policy, task, cfg.train_chunk, bank, cfg)
    raise RuntimeError(f"prior task {bank.label(task)} is not learnable under this configuration")


def effective_prior(policy: PolicyState, task: int, bank: TaskBank) -> float:
    sim = bank.similarity_matrix[:, bank.check(task)]
    return float(np.max(sim * policy.competence))


def effective_priors(policy: PolicyState, bank: TaskBank) -> np.ndarray:
    """effective_prior for every task at once."""
    return np.max(bank.similarity_matrix * policy.competence[:, None], axis=0)


def gate(prior: float, difficulty: float, cfg: LearnerConfig) -> float:
    z = cfg.kappa * (prior - difficulty + cfg.delta)
    # logistic written to avoid overflow for large |z|
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    ez = math.exp(z)
    return ez / (1.0 + ez)


def train(policy: PolicyState, task: int, steps: int, bank: TaskBank, cfg: LearnerConfig) -> PolicyState:
    if steps < 0:
        raise ValueError("steps must be non-negative")
    if steps == 0:
        return policy
    task = bank.check(task)
    prior = effective_prior(policy, task, bank)
    rho = gate(prior, bank.tasks[task].difficulty, cfg)
    c = policy.competence[task]
    if cfg.warm_start and cfg.eval_mode == "gated":
        c = max(c, rho * min(prior, 1.0))
    competence = policy.competence.copy()
    competence[task] = 1.0 - (1.0 - c) * math.exp(-cfg.eta * rho * policy.adaptability * steps)
    return replace(policy, competence=competence, steps_trained=policy.steps_trained + steps)


def mark_mastered(policy: PolicyState, cfg: LearnerConfig) -> PolicyState:
    return replace(policy, adaptability=policy.adaptability * (1.0 - cfg.lam))


def clone_policy(policy: PolicyState, policy_id: str | None = None) -> PolicyState:
    """Independent copy whose parent is ``policy``.

    Without an explicit id the child is named ``<parent>/<k>`` with ``k``
    counting clones taken from that policy.
    """
    if policy_id is None:
        policy._clone_counter[0] += 1
        policy_id = f"{policy.policy_id}/{policy._clone_counter[0]}"
    return PolicyState(
        competence=policy.competence.copy(),
        adaptability=policy.adaptability,
        policy_id=policy_id,
        parent_id=policy.policy_id,
        steps_trained=policy.steps_trained,
    )


def gates(priors: np.ndarray, difficulties: np.ndarray, cfg: LearnerConfig) -> np.ndarray:
    z = cfg.kappa * (priors - difficulties + cfg.delta)
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def success_probabilities(policy: PolicyState, bank: TaskBank, cfg: LearnerConfig) -> np.ndarray:
    """Per-task probability that one evaluation trial succeeds.

    In the default ``gated`` mode a task's zero-shot success comes from the
    best transfer source, damped by the same gate that limits learning, so
    tasks far beyond the policy's reach score near zero.
    """
    if cfg.eval_mode == "competence":
        return policy.competence
    prior = np.clip(effective_priors(policy, bank), 0.0, 1.0)
    if cfg.eval_mode == "transfer":
        return prior
    return np.maximum(policy.competence, gates(prior, bank.difficulties, cfg) * prior)


def _scores(probs: np.ndarray, cfg: LearnerConfig, rng: np.random.Generator) -> np.ndarray:
    if cfg.deterministic_eval:
        return np.rint(probs * cfg.s_bar).astype(int)
    trials = rng.random((len(probs), cfg.s_bar))
    return (trials < probs[:, None]).sum(axis=1)


def evaluate(policy: PolicyState, task: int, bank: TaskBank, cfg: LearnerConfig,
             rng: np.random.Generator) -> int:
    """Successes out of ``cfg.s_bar`` independent trials on one task."""
    task = bank.check(task)
    p = success_probabilities(policy, bank, cfg)[task]
    return int(_scores(np.array([p]), cfg, rng)[0])


def evaluate_all(policy: PolicyState, tasks, bank: TaskBank, cfg: LearnerConfig,
                 rng: np.random.Generator) -> dict[int, int]:
    """Score every task in ascending id order; draws match repeated ``evaluate`` calls."""
    tasks = sorted(bank.check(t) for t in tasks)
    if not tasks:
        raise ValueError("cannot evaluate an empty task list")
    probs = success_probabilities(policy, bank, cfg)[tasks]
    return dict(zip(tasks, (int(s) for s in _scores(probs, cfg, rng))))
