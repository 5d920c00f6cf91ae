"""Weight vectors and scalarizing functions.

All objectives are minimized; maximized quantities are negated by the owning
problem before they get here.  A scalarizing function collapses an objective
point to a single value, lower is better:

    linear       s(z) = sum_j lambda_j * z_j
    chebycheff   s(z) = max_j lambda_j * (z_j - z_ref_j)
    mixed        w_linear * linear + w_cheby * chebycheff
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

__all__ = [
    "ObjectivePoint",
    "WeightVector",
    "ScalarizerSpec",
    "Scalarizer",
    "as_point",
    "generate_uniform_weights",
    "draw_random_weight",
    "uniform_weight_count",
    "granularity_for_count",
    "evaluate_linear",
    "evaluate_chebycheff",
    "evaluate_mixed",
]

ObjectivePoint = tuple[float, ...]

WEIGHT_SUM_TOL = 1e-9

KINDS = ("linear", "chebycheff", "mixed")


def as_point(values: Iterable[float]) -> ObjectivePoint:
    """Validate and freeze an objective point (length >= 2, all finite)."""
    point = tuple(float(v) for v in values)
    if len(point) < 2:
        raise ValueError(f"objective point needs at least 2 components, got {len(point)}")
    if not all(math.isfinite(v) for v in point):
        raise ValueError(f"objective point has non-finite component: {point}")
    return point


@dataclass(frozen=True)
class WeightVector:
    """Nonnegative weights summing to 1 (within tolerance)."""

    lambdas: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.lambdas) < 2:
            raise ValueError("weight vector needs at least 2 components")
        if any(l < 0.0 for l in self.lambdas):
            raise ValueError(f"negative weight in {self.lambdas}")
        total = sum(self.lambdas)
        if abs(total - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"weights sum to {total!r}, expected 1")

    def __len__(self) -> int:
        return len(self.lambdas)

    def __getitem__(self, i: int) -> float:
        return self.lambdas[i]


@dataclass(frozen=True)
class ScalarizerSpec:
    """Scalarizing-function template: kind, mix weights, optional reference.

    The reference point is required for chebycheff/mixed evaluation but may be
    bound later (the engine maintains it online), hence it is optional here.
    """

    kind: str = "linear"
    reference_point: tuple[float, ...] | None = None
    w_linear: float | None = None
    w_cheby: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"unknown scalarizer kind {self.kind!r}")
        w_lin, w_che = self.w_linear, self.w_cheby
        if w_lin is None and w_che is None:
            w_lin, w_che = {"linear": (1.0, 0.0), "chebycheff": (0.0, 1.0), "mixed": (0.5, 0.5)}[self.kind]
        elif w_lin is None:
            w_lin = 1.0 - w_che
        elif w_che is None:
            w_che = 1.0 - w_lin
        object.__setattr__(self, "w_linear", float(w_lin))
        object.__setattr__(self, "w_cheby", float(w_che))
        if self.w_linear < 0.0 or self.w_cheby < 0.0:
            raise ValueError("mix weights must be nonnegative")
        if abs(self.w_linear + self.w_cheby - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"mix weights sum to {self.w_linear + self.w_cheby!r}, expected 1")

    def with_reference(self, reference_point: Sequence[float]) -> "ScalarizerSpec":
        return ScalarizerSpec(self.kind, tuple(float(v) for v in reference_point), self.w_linear, self.w_cheby)


class Scalarizer:
    """A scalarizing function bound to one weight vector.

    `transform`, when given, maps raw objective points into the space the
    function is defined on (e.g. range normalization); the reference point is
    expressed in that transformed space.
    """

    def __init__(
        self,
        weights: WeightVector | Sequence[float],
        spec: ScalarizerSpec,
        transform: Callable[[np.ndarray], np.ndarray] | None = None,
    ):
        lam = weights.lambdas if isinstance(weights, WeightVector) else tuple(float(v) for v in weights)
        WeightVector(lam)  # reuse invariant checks
        self.weights = np.asarray(lam, dtype=float)
        self.spec = spec
        self.transform = transform
        if spec.kind != "linear":
            if spec.reference_point is None:
                raise ValueError(f"{spec.kind} scalarizer needs a reference point")
            ref = np.asarray(spec.reference_point, dtype=float)
            if ref.shape != self.weights.shape:
                raise ValueError("reference point and weights disagree on dimension")
            self.reference = ref
        else:
            self.reference = None

    @property
    def kind(self) -> str:
        return self.spec.kind

    @property
    def is_plain_linear(self) -> bool:
        """True when the value is a plain dot product of raw objectives."""
        return self.spec.kind == "linear" and self.transform is None

    def value(self, z: np.ndarray) -> np.ndarray:
        """Scalarize an array of points, shape (..., J) -> (...)."""
        z = np.asarray(z, dtype=float)
        if z.shape[-1] != self.weights.shape[0]:
            raise ValueError(f"point dimension {z.shape[-1]} != weight dimension {self.weights.shape[0]}")
        if self.transform is not None:
            z = self.transform(z)
        kind = self.spec.kind
        if kind == "linear":
            return z @ self.weights
        cheby = (self.weights * (z - self.reference)).max(axis=-1)
        if kind == "chebycheff":
            return cheby
        if self.spec.w_cheby == 0.0:
            return z @ self.weights
        if self.spec.w_linear == 0.0:
            return cheby
        return self.spec.w_linear * (z @ self.weights) + self.spec.w_cheby * cheby

    def __call__(self, z: Sequence[float]) -> float:
        return float(self.value(np.asarray(z, dtype=float)))


def evaluate_linear(z: Sequence[float], weights: WeightVector | Sequence[float]) -> float:
    """Weighted sum of objectives."""
    return Scalarizer(weights, ScalarizerSpec("linear"))(z)


def evaluate_chebycheff(
    z: Sequence[float], weights: WeightVector | Sequence[float], z_ref: Sequence[float]
) -> float:
    """Weighted Chebycheff distance from the reference point (minimized form)."""
    return Scalarizer(weights, ScalarizerSpec("chebycheff", tuple(float(v) for v in z_ref)))(z)


def evaluate_mixed(z: Sequence[float], weights: WeightVector | Sequence[float], spec: ScalarizerSpec) -> float:
    """w_linear * linear + w_cheby * chebycheff, mix weights taken from `spec`."""
    if spec.kind != "mixed":
        raise ValueError(f"expected a mixed spec, got kind {spec.kind!r}")
    return Scalarizer(weights, spec)(z)


def uniform_weight_count(n_objectives: int, granularity: int) -> int:
    """Number of simplex-lattice vectors: C(H + J - 1, J - 1)."""
    return math.comb(granularity + n_objectives - 1, n_objectives - 1)


def granularity_for_count(n_objectives: int, count: int) -> int:
    """Invert uniform_weight_count; raises if `count` is not a lattice size."""
    h = 0
    while uniform_weight_count(n_objectives, h) < count:
        h += 1
    if uniform_weight_count(n_objectives, h) != count:
        raise ValueError(f"{count} is not a simplex-lattice count for {n_objectives} objectives")
    return h


def generate_uniform_weights(n_objectives: int, granularity: int) -> list[WeightVector]:
    """All weight vectors with components k/H, in lexicographic order."""
    if n_objectives < 2:
        raise ValueError("need at least 2 objectives")
    if granularity < 1:
        raise ValueError("granularity must be >= 1")
    h = granularity
    out: list[WeightVector] = []

    def rec(prefix: list[float], left: int, units: int) -> None:
        if left == 1:
            out.append(WeightVector(tuple(prefix + [units / h])))
            return
        for k in range(units + 1):
            rec(prefix + [k / h], left - 1, units - k)

    rec([], n_objectives, h)
    return out


def draw_random_weight(n_objectives: int, rng: np.random.Generator) -> WeightVector:
    """Uniform draw from the simplex via sorted uniform spacings."""
    if n_objectives < 2:
        raise ValueError("need at least 2 objectives")
    cuts = np.sort(rng.random(n_objectives - 1))
    gaps = np.diff(np.concatenate(([0.0], cuts, [1.0])))
    # renormalize away the last-bit float error so the invariant holds exactly
    gaps = gaps / gaps.sum()
    return WeightVector(tuple(float(g) for g in gaps))
