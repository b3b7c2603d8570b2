import math

import numpy as np
import pytest
import yaml
from hypothesis import given, strategies as st

from glocal.tasks import (TaskBank, TaskSpec, bank_from_entries, build_default_bank, grid_difficulty,
                          load_bank, manhattan, similarity)


def test_default_bank_covers_grid(bank):
    assert bank.N == 49
    assert {(t.row, t.col) for t in bank.tasks} == {(r, c) for r in range(7) for c in range(7)}
    assert bank.ids == list(range(49))


def test_corner_difficulties(bank):
    a0, g6 = bank.tasks[bank.by_label("A0")], bank.tasks[bank.by_label("G6")]
    assert (a0.row, a0.col, a0.difficulty) == (0, 0, 0.0)
    assert (g6.row, g6.col, g6.difficulty) == (6, 6, 1.0)


def test_d3_difficulty(bank):
    assert bank.tasks[bank.by_label("D3")].difficulty == pytest.approx(0.5)


def test_similarity_examples(bank_tau2):
    b = bank_tau2
    assert similarity(b.by_label("A0"), b.by_label("A0"), b) == 1.0
    assert similarity(b.by_label("A0"), b.by_label("A1"), b) == pytest.approx(math.exp(-0.5))
    assert similarity(b.by_label("A0"), b.by_label("A1"), b) == pytest.approx(0.6065, abs=1e-4)
    assert similarity(b.by_label("A0"), b.by_label("G6"), b) == pytest.approx(0.00248, abs=1e-5)


def test_similarity_unknown_task(bank):
    with pytest.raises(KeyError):
        similarity(0, 49, bank)
    with pytest.raises(KeyError):
        similarity(-1, 0, bank)


def test_similarity_one_only_on_diagonal(bank):
    sim = bank.similarity_matrix
    assert np.all(np.diag(sim) == 1.0)
    off = sim[~np.eye(bank.N, dtype=bool)]
    assert np.all(off < 1.0)


def test_similarity_matrix_is_read_only(bank):
    with pytest.raises(ValueError):
        bank.similarity_matrix[0, 1] = 0.5


@given(st.integers(0, 48), st.integers(0, 48))
def test_similarity_symmetric(a, b):
    bank = build_default_bank()
    assert similarity(a, b, bank) == similarity(b, a, bank)
    assert similarity(a, b, bank) == pytest.approx(
        math.exp(-manhattan(bank.tasks[a], bank.tasks[b]) / bank.tau))


@given(st.integers(0, 6), st.integers(0, 5), st.floats(0.1, 5), st.floats(0.1, 5))
def test_difficulty_monotone(r, c, rw, cw):
    assert grid_difficulty(r, c + 1, rw, cw) > grid_difficulty(r, c, rw, cw)
    assert grid_difficulty(c + 1, r, rw, cw) > grid_difficulty(c, r, rw, cw)


def test_bank_validation():
    t = TaskSpec(0, 0, 0, 0.0)
    with pytest.raises(ValueError):
        TaskBank(())
    with pytest.raises(ValueError):
        TaskBank((t, TaskSpec(2, 0, 1, 0.1)))
    with pytest.raises(ValueError):
        TaskBank((t, TaskSpec(1, 0, 0, 0.1)))
    with pytest.raises(ValueError):
        TaskBank((t,), tau=0)


def test_bank_from_entries_override_and_default():
    bank = bank_from_entries([
        {"label": "A0", "row": 0, "col": 0},
        {"label": "X", "row": 3, "col": 3, "difficulty": 0.9},
    ], tau=2.0)
    assert bank.N == 2
    assert bank.difficulties.tolist() == [0.0, 0.9]
    assert bank.by_label("X") == 1
    with pytest.raises(ValueError):
        bank_from_entries([{"row": 0, "col": 0, "difficulty": 1.5}])


def test_load_bank(tmp_path):
    path = tmp_path / "bank.yaml"
    path.write_text(yaml.safe_dump({"tasks": [{"label": "A0", "row": 0, "col": 0},
                                              {"label": "A1", "row": 0, "col": 1}]}))
    bank = load_bank(path, tau=2.0)
    assert [t.label for t in bank.tasks] == ["A0", "A1"]
    assert similarity(0, 1, bank) == pytest.approx(math.exp(-0.5))


def test_unknown_label(bank):
    with pytest.raises(KeyError):
        bank.by_label("H9")
