"""Discrete task bank laid out on a 7x7 complexity/grasp-difficulty grid.

Rows A..G grow in shape complexity, columns 0..6 in grasp difficulty, so
``A0`` is the easiest object and ``G6`` the hardest.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

ROW_LABELS = "ABCDEFG"
GRID_SIZE = 7


@dataclass(frozen=True)
class TaskSpec:
    id: int
    row: int
    col: int
    difficulty: float
    label: str = ""


@dataclass(frozen=True)
class TaskBank:
    tasks: tuple[TaskSpec, ...]
    tau: float = 3.0
    _similarity: np.ndarray = field(init=False, repr=False, compare=False)
    _difficulty: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.tasks:
            raise ValueError("a task bank needs at least one task")
        if [t.id for t in self.tasks] != list(range(len(self.tasks))):
            raise ValueError("task ids must form the contiguous range 0..N-1")
        cells = {(t.row, t.col) for t in self.tasks}
        if len(cells) != len(self.tasks):
            raise ValueError("grid cells must be distinct")
        if self.tau <= 0:
            raise ValueError("tau must be positive")
        rows = np.array([t.row for t in self.tasks], dtype=float)
        cols = np.array([t.col for t in self.tasks], dtype=float)
        dist = np.abs(rows[:, None] - rows[None, :]) + np.abs(cols[:, None] - cols[None, :])
        sim = np.exp(-dist / self.tau)
        sim.setflags(write=False)
        object.__setattr__(self, "_similarity", sim)
        diff = np.array([t.difficulty for t in self.tasks])
        diff.setflags(write=False)
        object.__setattr__(self, "_difficulty", diff)

    @property
    def N(self) -> int:
        return len(self.tasks)

    @property
    def ids(self) -> list[int]:
        return list(range(self.N))

    @property
    def difficulties(self) -> np.ndarray:
        return self._difficulty

    @property
    def similarity_matrix(self) -> np.ndarray:
        """Read-only N x N matrix of pairwise task similarities."""
        return self._similarity

    def check(self, task: int) -> int:
        if not isinstance(task, (int, np.integer)) or not 0 <= task < self.N:
            raise KeyError(f"unknown task id {task!r} (bank has {self.N} tasks)")
        return int(task)

    def by_label(self, label: str) -> int:
        for t in self.tasks:
            if t.label == label:
                return t.id
        raise KeyError(f"no task labelled {label!r}")

    def label(self, task: int) -> str:
        return self.tasks[self.check(task)].label


def grid_label(row: int, col: int) -> str:
    return f"{ROW_LABELS[row]}{col}" if 0 <= row < len(ROW_LABELS) else f"R{row}C{col}"


def grid_difficulty(row: int, col: int, row_weight: float = 1.0, col_weight: float = 1.0,
                    size: int = GRID_SIZE) -> float:
    """Weighted position on the grid, scaled so the corners map to 0 and 1."""
    span = (row_weight + col_weight) * (size - 1)
    return (row_weight * row + col_weight * col) / span


def build_default_bank(tau: float = 3.0, row_weight: float = 1.0, col_weight: float = 1.0) -> TaskBank:
    tasks = []
    for row in range(GRID_SIZE):
        for col in range(GRID_SIZE):
            tasks.append(TaskSpec(
                id=len(tasks), row=row, col=col,
                difficulty=grid_difficulty(row, col, row_weight, col_weight),
                label=grid_label(row, col),
            ))
    return TaskBank(tuple(tasks), tau=tau)


def bank_from_entries(entries, tau: float = 3.0, row_weight: float = 1.0,
                      col_weight: float = 1.0) -> TaskBank:
    """Build a bank from ``{label, row, col[, difficulty]}`` mappings.

    Difficulty defaults to the 7x7 grid formula so a subset of the default
    grid keeps the same per-task difficulties.
    """
    tasks = []
    for i, entry in enumerate(entries):
        row, col = int(entry["row"]), int(entry["col"])
        if row < 0 or col < 0:
            raise ValueError(f"negative grid coordinate in entry {entry!r}")
        diff = entry.get("difficulty")
        if diff is None:
            diff = grid_difficulty(row, col, row_weight, col_weight)
        if not 0.0 <= float(diff) <= 1.0:
            raise ValueError(f"difficulty must lie in [0, 1], got {diff!r}")
        tasks.append(TaskSpec(id=i, row=row, col=col, difficulty=float(diff),
                              label=str(entry.get("label") or grid_label(row, col))))
    return TaskBank(tuple(tasks), tau=tau)


def load_bank(path: str | Path, tau: float = 3.0) -> TaskBank:
    with open(path) as fh:
        doc = yaml.safe_load(fh)
    entries = doc["tasks"] if isinstance(doc, dict) else doc
    return bank_from_entries(entries, tau=tau)


def similarity(a: int, b: int, bank: TaskBank) -> float:
    """exp(-(|drow| + |dcol|) / tau): 1 for the same task, decaying with grid distance."""
    return float(bank.similarity_matrix[bank.check(a), bank.check(b)])


def manhattan(a: TaskSpec, b: TaskSpec) -> int:
    return abs(a.row - b.row) + abs(a.col - b.col)


__all__ = [
    "TaskSpec", "TaskBank", "build_default_bank", "bank_from_entries", "load_bank",
    "similarity", "grid_difficulty", "grid_label", "manhattan",
]
