"""Experiment configuration: a YAML document with one section per component.

Sections are ``bank``, ``learner``, ``glocal``, ``alp_gmm`` and
``experiment``.  Anything missing falls back to the shipped defaults and
``section.key=value`` overrides are applied last.
"""

from __future__ import annotations

import copy
import dataclasses
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import yaml

from .baselines import AlpGmmConfig
from .curriculum import GlocalConfig
from .learner import LearnerConfig
from .tasks import TaskBank, bank_from_entries, build_default_bank

ALGORITHMS = ("glocal", "glocal_no_global", "glocal_random_cluster",
              "random", "alp_gmm_250", "alp_gmm_10")
ABLATIONS = ("glocal", "glocal_no_global", "glocal_random_cluster")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class BankConfig:
    tau: float = 3.0
    row_weight: float = 1.0
    col_weight: float = 1.0
    prior_task: str = "A0"
    tasks: tuple | None = None  # explicit {label, row, col[, difficulty]} entries

    def build(self) -> TaskBank:
        if self.tasks:
            return bank_from_entries(self.tasks, tau=self.tau, row_weight=self.row_weight,
                                     col_weight=self.col_weight)
        return build_default_bank(tau=self.tau, row_weight=self.row_weight,
                                  col_weight=self.col_weight)


@dataclass(frozen=True)
class ExperimentConfig:
    algorithms: tuple[str, ...] = ALGORITHMS
    seeds: tuple[int, ...] = tuple(range(10))
    master_seed: int = 0
    total_budget: int = 4_000_000
    checkpoint_interval: int = 1_000_000
    bank: BankConfig = field(default_factory=BankConfig)
    learner: LearnerConfig = field(default_factory=LearnerConfig)
    glocal: GlocalConfig = field(default_factory=GlocalConfig)
    alp_gmm: AlpGmmConfig = field(default_factory=AlpGmmConfig)

    def __post_init__(self):
        unknown = [a for a in self.algorithms if a not in ALGORITHMS]
        if unknown:
            raise ConfigError(f"unknown algorithm(s) {unknown}; choose from {list(ALGORITHMS)}")
        if not self.algorithms:
            raise ConfigError("no algorithms selected")
        if len(set(self.seeds)) != len(self.seeds) or not self.seeds:
            raise ConfigError("seeds must be a non-empty list of distinct integers")
        if self.total_budget <= 0 or not 0 < self.checkpoint_interval <= self.total_budget:
            raise ConfigError("need 0 < checkpoint_interval <= total_budget")

    @property
    def checkpoints(self) -> list[int]:
        steps = list(range(self.checkpoint_interval, self.total_budget + 1, self.checkpoint_interval))
        if steps[-1] != self.total_budget:
            steps.append(self.total_budget)
        return steps

    def glocal_config(self) -> GlocalConfig:
        """Glocal settings with the experiment-wide step budget applied."""
        return dataclasses.replace(self.glocal, total_budget=self.total_budget)


SECTIONS = {"bank": BankConfig, "learner": LearnerConfig, "glocal": GlocalConfig,
            "alp_gmm": AlpGmmConfig}
EXPERIMENT_KEYS = ("algorithms", "seeds", "master_seed", "total_budget", "checkpoint_interval")


def default_document() -> dict:
    text = resources.files("glocal").joinpath("default_config.yaml").read_text()
    return yaml.safe_load(text)


def _merge(base: dict, update: dict, where: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, value in (update or {}).items():
        if key not in out:
            raise ConfigError(f"unknown config key {where + key!r}")
        if isinstance(out[key], dict) and isinstance(value, dict):
            out[key] = _merge(out[key], value, f"{where}{key}.")
        else:
            out[key] = value
    return out


def apply_override(doc: dict, assignment: str) -> dict:
    """Apply one ``section.key=value`` override; the value is parsed as YAML."""
    if "=" not in assignment:
        raise ConfigError(f"override {assignment!r} is not of the form key=value")
    path, raw = assignment.split("=", 1)
    keys = path.strip().split(".")
    value = yaml.safe_load(raw)
    update: dict = {}
    node = update
    for k in keys[:-1]:
        node = node.setdefault(k, {})
    node[keys[-1]] = value
    return _merge(doc, update)


def load_document(path: str | Path | None = None, overrides=()) -> dict:
    doc = default_document()
    if path is not None:
        path = Path(path)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        with open(path) as fh:
            user = yaml.safe_load(fh) or {}
        if not isinstance(user, dict):
            raise ConfigError(f"{path}: expected a mapping at the top level")
        doc = _merge(doc, user)
    for assignment in overrides:
        doc = apply_override(doc, assignment)
    return doc


def _section(cls, values: dict, name: str):
    names = {f.name for f in dataclasses.fields(cls)}
    extra = set(values) - names
    if extra:
        raise ConfigError(f"unknown keys in [{name}]: {sorted(extra)}")
    values = dict(values)
    for key in ("k_range", "tasks"):
        if isinstance(values.get(key), list):
            values[key] = tuple(values[key])
    try:
        return cls(**values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"[{name}] {exc}") from exc


def from_document(doc: dict) -> ExperimentConfig:
    exp = doc.get("experiment", {})
    extra = set(exp) - set(EXPERIMENT_KEYS)
    if extra:
        raise ConfigError(f"unknown keys in [experiment]: {sorted(extra)}")
    sections = {name: _section(cls, doc.get(name, {}), name) for name, cls in SECTIONS.items()}
    try:
        return ExperimentConfig(
            algorithms=tuple(exp.get("algorithms", ALGORITHMS)),
            seeds=tuple(int(s) for s in exp.get("seeds", range(10))),
            master_seed=int(exp.get("master_seed", 0)),
            total_budget=int(exp.get("total_budget", 4_000_000)),
            checkpoint_interval=int(exp.get("checkpoint_interval", 1_000_000)),
            **sections,
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path=None, overrides=()) -> ExperimentConfig:
    return from_document(load_document(path, overrides))


def to_document(cfg: ExperimentConfig) -> dict:
    def plain(obj):
        d = dataclasses.asdict(obj)
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in d.items()}
    return {
        "experiment": {
            "algorithms": list(cfg.algorithms),
            "seeds": list(cfg.seeds),
            "master_seed": cfg.master_seed,
            "total_budget": cfg.total_budget,
            "checkpoint_interval": cfg.checkpoint_interval,
        },
        "bank": plain(cfg.bank),
        "learner": plain(cfg.learner),
        "glocal": plain(cfg.glocal),
        "alp_gmm": plain(cfg.alp_gmm),
    }
