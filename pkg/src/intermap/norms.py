"""Nonnegative vectors and monotone norms.

Everything downstream works on the nonnegative orthant, so the only norms
offered here are ones that are provably monotone there: max, sum, euclidean
and their positively-weighted variants.  Weighted norms require strictly
positive weights, which preserves both monotonicity and definiteness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

NORM_KINDS = ("max", "sum", "euclidean", "weighted-max", "weighted-sum")
_WEIGHTED_KINDS = ("weighted-max", "weighted-sum")


def as_nonneg_vector(values, dim: int | None = None, name: str = "x") -> np.ndarray:
    """Validate and return a 1-D float array with finite entries >= 0."""
    x = np.atleast_1d(np.asarray(values, dtype=float))
    if x.ndim != 1 or x.size < 1:
        raise ValueError(f"{name} must be a 1-D vector with at least one entry")
    if dim is not None and x.size != dim:
        raise ValueError(f"{name} has dimension {x.size}, expected {dim}")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} must be finite")
    if np.any(x < 0):
        raise ValueError(f"{name} must be nonnegative")
    return x


def as_positive_vector(values, dim: int | None = None, name: str = "x") -> np.ndarray:
    """Validate and return a 1-D float array with finite entries > 0."""
    x = as_nonneg_vector(values, dim=dim, name=name)
    if np.any(x == 0):
        raise ValueError(f"{name} must be strictly positive")
    return x


@dataclass(frozen=True)
class MonotoneNorm:
    """A norm that is monotone on the nonnegative orthant.

    kind is one of NORM_KINDS; weighted kinds carry strictly positive
    weights (stored as a tuple so instances stay hashable and comparable).
    Instances are callable: ``norm(x)`` evaluates the norm.
    """

    kind: str
    weights: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.kind not in NORM_KINDS:
            raise ValueError(f"unknown norm kind {self.kind!r}; expected one of {NORM_KINDS}")
        if self.kind in _WEIGHTED_KINDS:
            if self.weights is None:
                raise ValueError(f"{self.kind} norm requires weights")
            w = as_positive_vector(self.weights, name="weights")
            object.__setattr__(self, "weights", tuple(float(v) for v in w))
        elif self.weights is not None:
            raise ValueError(f"{self.kind} norm takes no weights")

    @property
    def weight_array(self) -> np.ndarray | None:
        if self.weights is None:
            return None
        return np.asarray(self.weights, dtype=float)

    def __call__(self, x) -> float:
        return norm_eval(self, x)

    def __str__(self) -> str:
        return self.kind


def norm_eval(norm: MonotoneNorm, x) -> float:
    """Evaluate ``norm`` at ``x`` (any real vector; |x| is taken first)."""
    v = np.abs(np.atleast_1d(np.asarray(x, dtype=float)))
    w = norm.weight_array
    if w is not None and w.size != v.size:
        raise ValueError(f"norm weights have dimension {w.size}, vector has {v.size}")
    if norm.kind == "max":
        return float(np.max(v))
    if norm.kind == "sum":
        return float(np.sum(v))
    if norm.kind == "euclidean":
        return float(np.linalg.norm(v))
    if norm.kind == "weighted-max":
        return float(np.max(w * v))
    if norm.kind == "weighted-sum":
        return float(np.sum(w * v))
    raise ValueError(f"unknown norm kind {norm.kind!r}")


def _weights_or_ones(norm: MonotoneNorm, dim: int) -> np.ndarray:
    w = norm.weight_array
    if w is None:
        return np.ones(dim)
    if w.size != dim:
        raise ValueError(f"norm weights have dimension {w.size}, expected {dim}")
    return w


def norm_equivalence_alpha(a: MonotoneNorm, b: MonotoneNorm, dim: int) -> float:
    """Smallest constant alpha with ||x||_a <= alpha * ||x||_b for all x in R^dim.

    All pairs among the supported kinds have a closed-form tight constant;
    weighted kinds get the exact ratio computed from their weights.
    """
    if dim < 1:
        raise ValueError("dim must be >= 1")
    a_type = "euclidean" if a.kind == "euclidean" else ("max" if "max" in a.kind else "sum")
    b_type = "euclidean" if b.kind == "euclidean" else ("max" if "max" in b.kind else "sum")

    if a_type != "euclidean":
        va = _weights_or_ones(a, dim)
    if b_type != "euclidean":
        vb = _weights_or_ones(b, dim)

    # Tight sup of ||x||_a / ||x||_b, case by structural shape of each side.
    if a_type == "max" and b_type in ("max", "sum"):
        return float(np.max(va / vb))
    if a_type == "max" and b_type == "euclidean":
        return float(np.max(va))
    if a_type == "sum" and b_type == "max":
        return float(np.sum(va / vb))
    if a_type == "sum" and b_type == "sum":
        return float(np.max(va / vb))
    if a_type == "sum" and b_type == "euclidean":
        return float(np.linalg.norm(va))
    if a_type == "euclidean" and b_type == "max":
        return float(np.linalg.norm(1.0 / vb))
    if a_type == "euclidean" and b_type == "sum":
        return float(np.max(1.0 / vb))
    if a_type == "euclidean" and b_type == "euclidean":
        return 1.0
    raise ValueError(f"unsupported norm pair ({a.kind}, {b.kind})")


def parse_norm(kind: str, weights=None) -> MonotoneNorm:
    """Build a MonotoneNorm from its scenario-file name plus optional weights."""
    if not isinstance(kind, str):
        raise ValueError(f"norm kind must be a string, got {type(kind).__name__}")
    if kind in _WEIGHTED_KINDS:
        if weights is None:
            raise ValueError(f"norm {kind!r} requires weights")
        return MonotoneNorm(kind, tuple(float(v) for v in weights))
    if weights is not None:
        raise ValueError(f"norm {kind!r} takes no weights")
    return MonotoneNorm(kind)


MAX_NORM = MonotoneNorm("max")
SUM_NORM = MonotoneNorm("sum")
EUCLIDEAN_NORM = MonotoneNorm("euclidean")
