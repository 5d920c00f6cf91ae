"""Multiobjective set covering: evaluation, greedy repair, local search, crossover.

Solutions are frozensets of selected column indices.  The local-search
neighborhood removes one selected column at a time and greedily repairs the
cover with that column excluded, so every move yields a genuinely different
solution; the best strictly-improving repaired neighbor is applied (steepest
descent).  Recombination keeps the parents' common columns, adds each
single-parent column with probability 1/2, then covers any remaining rows
with uniformly random covering columns.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .engine import IMPROVEMENT_EPS, ProblemAdapter
from .scalarizing import ObjectivePoint, Scalarizer

__all__ = [
    "CoverSolution",
    "RepairError",
    "ScpAdapter",
    "ScpInstance",
    "greedy_repair",
    "random_cover",
    "scp_evaluate",
    "scp_local_search",
    "scp_recombine",
]

CoverSolution = frozenset


class RepairError(RuntimeError):
    """No admissible column can cover a remaining uncovered row."""


@dataclass(frozen=True)
class ScpInstance:
    """Set covering instance: `coverage[l, i]` is True when column i covers row l.

    `costs` has one row per objective and one entry per column; all costs are
    strictly positive and every row must be coverable.
    """

    costs: np.ndarray
    coverage: np.ndarray

    def __post_init__(self) -> None:
        costs = np.ascontiguousarray(np.asarray(self.costs, dtype=np.int64))
        coverage = np.ascontiguousarray(np.asarray(self.coverage, dtype=bool))
        if costs.ndim != 2 or coverage.ndim != 2:
            raise ValueError("costs and coverage must be 2-D")
        if costs.shape[1] != coverage.shape[1]:
            raise ValueError(
                f"costs describe {costs.shape[1]} columns, coverage {coverage.shape[1]}"
            )
        if costs.shape[0] < 1 or costs.shape[1] < 1 or coverage.shape[0] < 1:
            raise ValueError("need at least one objective, column and row")
        if not (costs > 0).all():
            raise ValueError("column costs must be strictly positive")
        if not coverage.any(axis=1).all():
            raise ValueError("every row must be covered by at least one column")
        costs.setflags(write=False)
        coverage.setflags(write=False)
        object.__setattr__(self, "costs", costs)
        object.__setattr__(self, "coverage", coverage)

    @property
    def n_rows(self) -> int:
        return self.coverage.shape[0]

    @property
    def n_columns(self) -> int:
        return self.coverage.shape[1]

    @property
    def n_objectives(self) -> int:
        return self.costs.shape[0]

    def row_covers(self, row: int) -> np.ndarray:
        """Indices of the columns covering `row`."""
        return np.flatnonzero(self.coverage[row])


def _as_columns(instance: ScpInstance, solution: Iterable[int]) -> np.ndarray:
    cols = np.asarray(sorted(solution), dtype=np.int64)
    if cols.size and (cols[0] < 0 or cols[-1] >= instance.n_columns):
        raise ValueError("column index out of range")
    if cols.size != len(set(cols.tolist())):
        raise ValueError("duplicate column in solution")
    return cols


def _covered_rows(instance: ScpInstance, cols: np.ndarray) -> np.ndarray:
    if cols.size == 0:
        return np.zeros(instance.n_rows, dtype=bool)
    return instance.coverage[:, cols].any(axis=1)


def scp_evaluate(instance: ScpInstance, solution: Iterable[int]) -> ObjectivePoint:
    """Per-objective cost sums of a feasible cover."""
    cols = _as_columns(instance, solution)
    if not _covered_rows(instance, cols).all():
        raise ValueError("infeasible cover: some rows are uncovered")
    return tuple(float(v) for v in instance.costs[:, cols].sum(axis=1))


def greedy_repair(
    instance: ScpInstance,
    partial: Iterable[int],
    scalarizer: Scalarizer,
    excluded: int | None = None,
) -> CoverSolution:
    """Extend `partial` to a feasible cover, never inserting `excluded`.

    While uncovered rows remain, insert the column with the lowest ratio of
    scalarizing-value increase to number of newly covered rows (ties go to
    the lowest column index).
    """
    cols = _as_columns(instance, partial)
    selected = set(cols.tolist())
    covered = _covered_rows(instance, cols)
    point = instance.costs[:, cols].sum(axis=1).astype(float)
    allowed = np.ones(instance.n_columns, dtype=bool)
    if excluded is not None:
        if not 0 <= excluded < instance.n_columns:
            raise ValueError("excluded column out of range")
        allowed[excluded] = False
    while not covered.all():
        newly = instance.coverage[~covered].sum(axis=0)
        candidates = np.flatnonzero((newly > 0) & allowed)
        if candidates.size == 0:
            raise RepairError("no admissible column covers the remaining rows")
        base = scalarizer.value(point)
        increase = scalarizer.value(point[None, :] + instance.costs[:, candidates].T) - base
        pick = int(candidates[np.argmin(increase / newly[candidates])])
        selected.add(pick)
        covered |= instance.coverage[:, pick]
        point += instance.costs[:, pick]
    return frozenset(selected)


def scp_local_search(
    instance: ScpInstance,
    solution: Iterable[int],
    scalarizer: Scalarizer,
    rng: np.random.Generator | None = None,
    value_trace: list[float] | None = None,
) -> CoverSolution:
    """Steepest-descent removal-and-repair search from a feasible cover.

    Each step tentatively removes every selected column in turn, repairs the
    cover with that column excluded, and applies the best repaired neighbor
    if it strictly improves the scalarizing value.
    """
    current = frozenset(_as_columns(instance, solution).tolist())
    value = scalarizer(scp_evaluate(instance, current))
    if value_trace is not None:
        value_trace.append(value)
    while True:
        best_value = value
        best: CoverSolution | None = None
        for col in sorted(current):
            try:
                neighbor = greedy_repair(
                    instance, current - {col}, scalarizer, excluded=col
                )
            except RepairError:
                continue
            neighbor_value = scalarizer(scp_evaluate(instance, neighbor))
            if neighbor_value < best_value - IMPROVEMENT_EPS:
                best_value = neighbor_value
                best = neighbor
        if best is None:
            return current
        current, value = best, best_value
        if value_trace is not None:
            value_trace.append(value)


def scp_recombine(
    parent_a: Iterable[int],
    parent_b: Iterable[int],
    rng: np.random.Generator,
    instance: ScpInstance,
) -> CoverSolution:
    """Common columns, plus each single-parent column with probability 1/2,
    plus uniformly random covering columns for any rows still uncovered."""
    a = frozenset(_as_columns(instance, parent_a).tolist())
    b = frozenset(_as_columns(instance, parent_b).tolist())
    selected = set(a & b)
    for col in sorted(a ^ b):
        if rng.random() < 0.5:
            selected.add(col)
    covered = _covered_rows(instance, np.asarray(sorted(selected), dtype=np.int64))
    for row in range(instance.n_rows):
        if covered[row]:
            continue
        pick = int(rng.choice(instance.row_covers(row)))
        selected.add(pick)
        covered |= instance.coverage[:, pick]
    return frozenset(selected)


def random_cover(instance: ScpInstance, rng: np.random.Generator) -> CoverSolution:
    """Visit rows in random order; cover each still-uncovered row with a
    uniformly random covering column."""
    selected: set[int] = set()
    covered = np.zeros(instance.n_rows, dtype=bool)
    for row in rng.permutation(instance.n_rows):
        if covered[row]:
            continue
        pick = int(rng.choice(instance.row_covers(int(row))))
        selected.add(pick)
        covered |= instance.coverage[:, pick]
    return frozenset(selected)


class ScpAdapter(ProblemAdapter):
    """Engine adapter for a set covering instance."""

    def __init__(self, instance: ScpInstance) -> None:
        self.instance = instance
        self.n_objectives = instance.n_objectives

    def random_solution(self, rng: np.random.Generator) -> CoverSolution:
        return random_cover(self.instance, rng)

    def evaluate(self, solution: CoverSolution) -> ObjectivePoint:
        return scp_evaluate(self.instance, solution)

    def local_search(self, solution: CoverSolution, scalarizer: Scalarizer) -> CoverSolution:
        return scp_local_search(self.instance, solution, scalarizer)

    def recombine(
        self, parent_a: CoverSolution, parent_b: CoverSolution, rng: np.random.Generator
    ) -> CoverSolution:
        return scp_recombine(parent_a, parent_b, rng, self.instance)
