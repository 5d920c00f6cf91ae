"""TSP with profits: collect profit while keeping the sub-tour short.

Solutions are sub-tours: numpy int arrays of distinct cities (any nonempty
subset, cyclic order).  Objectives are (tour length, -total profit), both
minimized.  Search operates on range-normalized objectives; archives keep the
raw values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .engine import IMPROVEMENT_EPS, ProblemAdapter
from .scalarizing import ObjectivePoint, Scalarizer, ScalarizerSpec

__all__ = [
    "TspwpInstance",
    "ObjectiveRanges",
    "tspwp_evaluate",
    "random_subtour",
    "estimate_ranges",
    "tspwp_local_search",
    "dpx_wp_recombine",
    "TspwpAdapter",
]

RANGE_PADDING = 0.01

# the two extreme weight vectors used for range estimation
_BOUNDARY_WEIGHTS = ((0.999, 0.001), (0.001, 0.999))


@dataclass(frozen=True)
class TspwpInstance:
    """Symmetric integer travel costs plus a nonnegative profit per city."""

    costs: np.ndarray
    profits: np.ndarray

    def __post_init__(self) -> None:
        c = np.ascontiguousarray(np.asarray(self.costs, dtype=np.int64))
        p = np.ascontiguousarray(np.asarray(self.profits, dtype=np.int64))
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise ValueError("cost matrix must be square")
        n = c.shape[0]
        if n < 4:
            raise ValueError("instance needs at least 4 cities")
        if p.shape != (n,):
            raise ValueError("profit vector length must match the city count")
        if (c < 0).any() or (p < 0).any():
            raise ValueError("costs and profits must be nonnegative")
        if (c != c.T).any():
            raise ValueError("cost matrix must be symmetric")
        if np.diagonal(c).any():
            raise ValueError("self-distances must be zero")
        object.__setattr__(self, "costs", c)
        object.__setattr__(self, "profits", p)

    @property
    def n(self) -> int:
        return self.costs.shape[0]

    @property
    def n_objectives(self) -> int:
        return 2


@dataclass(frozen=True)
class ObjectiveRanges:
    """Per-objective [low, high) brackets used for normalization."""

    lows: tuple[float, ...]
    highs: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.lows) != len(self.highs):
            raise ValueError("range bounds disagree on dimension")
        if any(h <= l for l, h in zip(self.lows, self.highs)):
            raise ValueError("each range must have high > low")

    def normalize(self, points: np.ndarray) -> np.ndarray:
        lows = np.asarray(self.lows)
        spans = np.asarray(self.highs) - lows
        return (np.asarray(points, dtype=float) - lows) / spans


def _check_subtour(instance: TspwpInstance, subtour: Sequence[int]) -> np.ndarray:
    t = np.asarray(subtour, dtype=np.int64)
    if t.ndim != 1 or t.size == 0:
        raise ValueError("sub-tour must be a nonempty city sequence")
    if len(np.unique(t)) != t.size or t.min() < 0 or t.max() >= instance.n:
        raise ValueError("sub-tour must list distinct valid cities")
    return t


def tspwp_evaluate(instance: TspwpInstance, subtour: Sequence[int]) -> ObjectivePoint:
    """(cyclic length, -collected profit); a single city has length 0."""
    t = _check_subtour(instance, subtour)
    if t.size == 1:
        length = 0
    else:
        nxt = np.roll(t, -1)
        length = int(instance.costs[t, nxt].sum())
    return (float(length), -float(instance.profits[t].sum()))


def random_subtour(instance: TspwpInstance, rng: np.random.Generator) -> np.ndarray:
    size = int(rng.integers(1, instance.n + 1))
    return rng.choice(instance.n, size=size, replace=False)


def _length_point(instance: TspwpInstance, t: np.ndarray) -> np.ndarray:
    return np.asarray(tspwp_evaluate(instance, t), dtype=float)


def tspwp_local_search(
    instance: TspwpInstance,
    subtour: Sequence[int],
    scalarizer: Scalarizer,
    value_trace: list[float] | None = None,
) -> np.ndarray:
    """Steepest descent over four move families.

    Per step, the best of: 2-opt edge exchange inside the sub-tour, insertion
    of an absent city at its cheapest position, deletion of a present city,
    exchange of a present city for an absent one in place.  The first strictly
    improving best move is applied; stops at a local optimum of the union
    neighborhood.
    """
    t = _check_subtour(instance, subtour).copy()
    costs, profits = instance.costs, instance.profits
    n = instance.n
    point = np.array(tspwp_evaluate(instance, t))
    value = scalarizer(point)
    if value_trace is not None:
        value_trace.append(value)
    while True:
        m = t.size
        absent = np.setdiff1d(np.arange(n), t)
        moves: list[tuple[float, tuple]] = []

        prv = np.roll(t, 1)
        nxt = np.roll(t, -1)
        if m >= 2:
            base_edges = costs[prv, t] + costs[t, nxt]

        if m >= 4:
            # 2-opt inside the sub-tour (length changes only)
            rem = costs[t, nxt]
            d_len = costs[t[:, None], t[None, :]] + costs[nxt[:, None], nxt[None, :]]
            d_len -= rem[:, None]
            d_len += -rem[None, :]
            i = np.arange(m)
            ok = (i[None, :] - i[:, None]) >= 2
            ok[0, m - 1] = False
            cand = np.stack(
                [point[0] + d_len, np.full((m, m), point[1])], axis=-1
            )
            vals = scalarizer.value(cand)
            vals[~ok] = np.inf
            flat = int(np.argmin(vals))
            bi, bk = divmod(flat, m)
            if vals[bi, bk] < np.inf:
                moves.append((float(vals[bi, bk]), ("edge", bi, bk)))

        if absent.size:
            # insertion: each absent city at its best (cheapest) position
            if m == 1:
                inc = 2 * costs[t[0], absent]
                best_pos = np.zeros(absent.size, dtype=np.int64)
            else:
                inc_all = costs[t[:, None], absent[None, :]] + costs[nxt[:, None], absent[None, :]]
                inc_all -= costs[t, nxt][:, None]
                best_pos = inc_all.argmin(axis=0)
                inc = inc_all[best_pos, np.arange(absent.size)]
            cand = np.stack(
                [point[0] + inc, point[1] - profits[absent].astype(float)], axis=-1
            )
            vals = scalarizer.value(cand)
            v = int(np.argmin(vals))
            moves.append((float(vals[v]), ("insert", int(absent[v]), int(best_pos[v]))))

            # exchange: absent city replaces a present one at its position
            if m == 1:
                d_len_x = np.zeros((1, absent.size))
            else:
                d_len_x = costs[prv[:, None], absent[None, :]] + costs[nxt[:, None], absent[None, :]]
                d_len_x -= base_edges[:, None]
            d_prof = profits[t][:, None] - profits[absent][None, :]
            cand = np.stack(
                [point[0] + d_len_x, point[1] + d_prof.astype(float)], axis=-1
            )
            vals = scalarizer.value(cand)
            flat = int(np.argmin(vals))
            xi, xv = divmod(flat, absent.size)
            moves.append((float(vals[xi, xv]), ("swap", xi, int(absent[xv]))))

        if m >= 2:
            # deletion of a present city
            if m == 2:
                d_len_d = -2.0 * costs[t[0], t[1]] * np.ones(2)
            else:
                d_len_d = costs[prv, nxt] - base_edges
            cand = np.stack(
                [point[0] + d_len_d, point[1] + profits[t].astype(float)], axis=-1
            )
            vals = scalarizer.value(cand)
            di = int(np.argmin(vals))
            moves.append((float(vals[di]), ("delete", di)))

        if not moves:
            break
        best_val, move = min(moves, key=lambda mv: mv[0])
        if not best_val < value - IMPROVEMENT_EPS:
            break
        kind = move[0]
        if kind == "edge":
            _, i, k = move
            t[i + 1 : k + 1] = t[i + 1 : k + 1][::-1]
        elif kind == "insert":
            _, city, pos = move
            t = np.insert(t, pos + 1, city)
        elif kind == "swap":
            _, pos, city = move
            t = t.copy()
            t[pos] = city
        else:  # delete
            _, pos = move
            t = np.delete(t, pos)
        point = np.array(tspwp_evaluate(instance, t))
        value = scalarizer(point)
        if value_trace is not None:
            value_trace.append(value)
    return t


def estimate_ranges(instance: TspwpInstance, rng: np.random.Generator) -> ObjectiveRanges:
    """Bracket each objective from two boundary local searches.

    One search per extreme weight vector (0.999, 0.001) / (0.001, 0.999),
    run on unnormalized objectives; the componentwise min/max of the two
    resulting points, padded by 1% (or widened by 1 when degenerate), gives
    the normalization ranges.
    """
    results = []
    for lam in _BOUNDARY_WEIGHTS:
        start = random_subtour(instance, rng)
        ref = tuple(float(v) for v in tspwp_evaluate(instance, start))
        spec = ScalarizerSpec("mixed", ref, w_linear=0.001, w_cheby=0.999)
        end = tspwp_local_search(instance, start, Scalarizer(lam, spec))
        results.append(tspwp_evaluate(instance, end))
    pts = np.array(results, dtype=float)
    lows, highs = pts.min(axis=0), pts.max(axis=0)
    span = highs - lows
    pad = np.where(span > 0, RANGE_PADDING * span, 1.0)
    return ObjectiveRanges(tuple(lows - pad), tuple(highs + pad))


def _cycle_edges(t: np.ndarray) -> set[tuple[int, int]]:
    if t.size < 2:
        return set()
    nxt = np.roll(t, -1)
    return {(int(a), int(b)) if a < b else (int(b), int(a)) for a, b in zip(t, nxt)}


def dpx_wp_recombine(
    parent_a: Sequence[int],
    parent_b: Sequence[int],
    rng: np.random.Generator,
    n_cities: int | None = None,
) -> np.ndarray:
    """Extended distance-preserving crossover for sub-tours.

    comSet = edges and nodes common to both parents; every other city joins
    with probability (expected node count - |comSet nodes|) / |remSet|, where
    the expected node count is the parents' average size and remSet is the
    set of cities outside comSet.  Common-edge fragments, isolated common
    nodes and the sampled cities are then chained randomly into a cycle.
    """
    pa = np.asarray(parent_a, dtype=np.int64)
    pb = np.asarray(parent_b, dtype=np.int64)
    if n_cities is None:
        n_cities = int(max(pa.max(), pb.max())) + 1
    ea, eb = _cycle_edges(pa), _cycle_edges(pb)
    common_edges = ea & eb
    common_nodes = set(pa.tolist()) & set(pb.tolist())

    adj: dict[int, list[int]] = {c: [] for c in common_nodes}
    for a, b in common_edges:
        adj[a].append(b)
        adj[b].append(a)
    if common_edges and common_nodes and all(len(adj[c]) == 2 for c in common_nodes):
        return pa.copy()  # identical cyclic sequences

    expected = (pa.size + pb.size) / 2.0
    rem = [c for c in range(n_cities) if c not in common_nodes]
    if rem:
        p_add = min(1.0, max(0.0, (expected - len(common_nodes)) / len(rem)))
    else:
        p_add = 0.0
    added = [c for c in rem if rng.random() < p_add]

    fragments: list[list[int]] = []
    seen: set[int] = set()
    for c in sorted(common_nodes):
        if c in seen:
            continue
        if len(adj[c]) >= 2:
            continue  # interior of a path, reached from an endpoint
        frag = [c]
        seen.add(c)
        prev, cur = None, c
        while True:
            nbrs = [x for x in adj[cur] if x != prev]
            if not nbrs:
                break
            prev, cur = cur, nbrs[0]
            frag.append(cur)
            seen.add(cur)
        fragments.append(frag)
    fragments.extend([c] for c in added)
    if not fragments:
        # degenerate: nothing common and nothing sampled; keep one random city
        pool = rem if rem else sorted(common_nodes)
        fragments = [[int(pool[int(rng.integers(len(pool)))])]]

    order = rng.permutation(len(fragments))
    chain: list[int] = []
    for idx in order:
        frag = fragments[int(idx)]
        if len(frag) > 1 and rng.random() < 0.5:
            frag = frag[::-1]
        chain.extend(frag)
    return np.asarray(chain, dtype=np.int64)


class TspwpAdapter(ProblemAdapter):
    """Engine adapter; estimates normalization ranges at the start of each run."""

    def __init__(self, instance: TspwpInstance):
        self.instance = instance
        self.n_objectives = 2
        self.ranges: ObjectiveRanges | None = None

    def begin_run(self, rng: np.random.Generator) -> None:
        self.ranges = estimate_ranges(self.instance, rng)

    def random_solution(self, rng: np.random.Generator) -> np.ndarray:
        return random_subtour(self.instance, rng)

    def evaluate(self, solution: np.ndarray) -> ObjectivePoint:
        return tspwp_evaluate(self.instance, solution)

    def local_search(self, solution: np.ndarray, scalarizer: Scalarizer) -> np.ndarray:
        return tspwp_local_search(self.instance, solution, scalarizer)

    def recombine(self, parent_a: np.ndarray, parent_b: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        return dpx_wp_recombine(parent_a, parent_b, rng, n_cities=self.instance.n)

    def normalize_points(self, points: np.ndarray) -> np.ndarray:
        if self.ranges is None:
            raise ValueError("normalization ranges not estimated; begin_run was not called")
        return self.ranges.normalize(points)

    def default_scalarizer(self) -> ScalarizerSpec:
        return ScalarizerSpec("mixed", w_linear=0.001, w_cheby=0.999)
