import dataclasses

import pytest
import yaml

from glocal.config import (ALGORITHMS, ConfigError, ExperimentConfig, default_document,
                           from_document, load_config, to_document)
from glocal.learner import LearnerConfig


def test_shipped_document_matches_defaults():
    assert from_document(default_document()) == ExperimentConfig()
    assert load_config() == ExperimentConfig()


def test_shipped_document_lists_every_field():
    doc = default_document()
    assert set(doc["learner"]) == {f.name for f in dataclasses.fields(LearnerConfig)}
    assert doc == to_document(ExperimentConfig())


def test_reference_constants():
    cfg = ExperimentConfig()
    assert cfg.algorithms == ALGORITHMS
    assert cfg.seeds == tuple(range(10))
    assert cfg.total_budget == 4_000_000 and cfg.checkpoint_interval == 1_000_000
    assert cfg.checkpoints == [1_000_000, 2_000_000, 3_000_000, 4_000_000]
    assert cfg.glocal.threshold_B == 75 and cfg.learner.s_bar == 100
    assert cfg.learner.train_chunk == 5000
    assert cfg.alp_gmm.p_rnd == 0.2 and cfg.alp_gmm.k_range == (1, 2, 3, 4, 5)


def test_overrides_last_wins(tmp_path):
    path = tmp_path / "c.yaml"
    path.write_text(yaml.safe_dump({"glocal": {"threshold_B": 70}, "experiment": {"seeds": [3, 4]}}))
    cfg = load_config(path, ["glocal.threshold_B=80", "glocal.threshold_B=81"])
    assert cfg.glocal.threshold_B == 81
    assert cfg.seeds == (3, 4)


def test_checkpoints_end_at_budget():
    cfg = ExperimentConfig(total_budget=2_500_000)
    assert cfg.checkpoints == [1_000_000, 2_000_000, 2_500_000]


@pytest.mark.parametrize("overrides", [
    ["glocal.nonsense=1"],
    ["nosection.x=1"],
    ["experiment.algorithms=[glocal, ppo]"],
    ["experiment.seeds=[1, 1]"],
    ["experiment.checkpoint_interval=5000000"],
    ["learner.lam=1.5"],
    ["threshold_B"],
])
def test_invalid_configs(overrides):
    with pytest.raises(ConfigError):
        load_config(None, overrides)


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.yaml")


def test_non_mapping_file(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text("- 1\n- 2\n")
    with pytest.raises(ConfigError):
        load_config(p)


def test_explicit_bank_entries():
    cfg = load_config(None, ["bank.tasks=[{label: A0, row: 0, col: 0}, {label: G6, row: 6, col: 6}]"])
    bank = cfg.bank.build()
    assert bank.N == 2 and bank.label(1) == "G6"
