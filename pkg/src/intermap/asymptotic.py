"""Asymptotic mappings: the scale-limit behaviour of an interference mapping.

The asymptotic mapping of T evaluates the coordinate-wise limit of
T(h x) / h as h grows.  It is positively homogeneous, monotone, and maps 0
to 0.  For the affine and load-coupled families the limit is a plain
linear map with an explicit matrix; for anything else a scale ladder
estimates it numerically.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .mappings import LN2, AffineMapping, InterferenceMapping, LoadScenario, PropertyReport, Violation
from .norms import as_nonneg_vector

DEFAULT_SCALES = tuple(10.0 ** k for k in range(3, 10))

# coordinates this far below the largest one are treated as exact zeros,
# which keeps downstream spectral computations away from denormal noise
ZERO_SNAP = 1e-12


class NonConvergenceError(RuntimeError):
    """Raised when a ladder estimate fails to stabilise."""


@dataclass(frozen=True)
class LadderConfig:
    """Scale ladder for the numeric estimator.

    Consecutive rungs h1 < h2 agree when every coordinate of T(h x)/h moves
    by at most atol + rtol * scale, where scale is the max-norm of the
    earlier rung's value.  atol defaults to 0; set it when the whole limit
    may vanish (sublinear mappings), where relative agreement alone can
    never be reached.
    """

    scales: tuple[float, ...] = DEFAULT_SCALES
    rtol: float = 1e-6
    atol: float = 0.0

    def __post_init__(self):
        scales = tuple(float(h) for h in self.scales)
        if len(scales) < 2:
            raise ValueError("ladder needs at least two scales")
        if any(h <= 0 for h in scales) or any(b <= a for a, b in zip(scales, scales[1:])):
            raise ValueError("scales must be strictly increasing and positive")
        object.__setattr__(self, "scales", scales)
        if self.rtol <= 0:
            raise ValueError("rtol must be positive")
        if self.atol < 0:
            raise ValueError("atol must be nonnegative")


@dataclass(frozen=True)
class LadderDiagnostics:
    converged: bool
    rung: float | None           # h at which the estimate was accepted
    deviation: float             # final inter-rung deviation (max-norm)
    rungs_used: int
    monotone_violation: bool     # T(h x)/h increased along the ladder somewhere


def _snap(v: np.ndarray) -> np.ndarray:
    v = np.maximum(v, 0.0)
    top = float(np.max(v)) if v.size else 0.0
    if top > 0:
        v = np.where(v < ZERO_SNAP * top, 0.0, v)
    return v


def estimate_asymptotic(
    m: InterferenceMapping, x, cfg: LadderConfig | None = None
) -> tuple[np.ndarray, LadderDiagnostics]:
    """Estimate the asymptotic mapping of ``m`` at ``x`` along a scale ladder.

    Returns the value at the first rung whose predecessor already agrees
    with it, together with diagnostics.  For standard interference mappings
    T(h x)/h is nonincreasing in h, so an upward move between rungs is
    flagged as a numerical red flag.  Non-convergence is reported in the
    diagnostics, never silently accepted.
    """
    cfg = cfg or LadderConfig()
    x = as_nonneg_vector(x, dim=m.dim)
    if not np.any(x > 0):
        # positive homogeneity forces the value 0 at the origin
        diag = LadderDiagnostics(True, None, 0.0, 0, False)
        return np.zeros(m.dim), diag

    monotone_violation = False
    prev = m(cfg.scales[0] * x) / cfg.scales[0]
    deviation = float("inf")
    for count, h in enumerate(cfg.scales[1:], start=2):
        cur = m(h * x) / h
        scale = float(np.max(np.abs(prev)))
        deviation = float(np.max(np.abs(prev - cur)))
        if np.any(cur - prev > 1e-9 * max(scale, 1e-300)):
            monotone_violation = True
        if deviation <= cfg.atol + cfg.rtol * scale:
            diag = LadderDiagnostics(True, float(h), deviation, count, monotone_violation)
            return _snap(cur), diag
        prev = cur
    diag = LadderDiagnostics(False, None, deviation, len(cfg.scales), monotone_violation)
    return _snap(prev), diag


class AsymptoticMapping:
    """Positively homogeneous monotone mapping on the nonnegative orthant."""

    provenance = "numeric"

    def __init__(self, dim: int):
        self.dim = int(dim)

    def __call__(self, x) -> np.ndarray:
        x = as_nonneg_vector(x, dim=self.dim)
        return self._evaluate(x)

    def _evaluate(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class LinearAsymptotic(AsymptoticMapping):
    """Exact asymptotic mapping x -> A x for a nonnegative matrix A."""

    provenance = "exact-linear"

    def __init__(self, matrix):
        A = np.asarray(matrix, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError("matrix must be square")
        if not np.all(np.isfinite(A)) or np.any(A < 0):
            raise ValueError("matrix must be finite and entrywise nonnegative")
        super().__init__(A.shape[0])
        self.matrix = A.copy()

    def _evaluate(self, x):
        return self.matrix @ x


class NumericAsymptotic(AsymptoticMapping):
    """Ladder-estimated asymptotic mapping of an arbitrary interference mapping."""

    provenance = "numeric"

    def __init__(self, base: InterferenceMapping, cfg: LadderConfig | None = None):
        super().__init__(base.dim)
        self.base = base
        self.cfg = cfg or LadderConfig()

    def _evaluate(self, x):
        value, diag = estimate_asymptotic(self.base, x, self.cfg)
        if not diag.converged:
            raise NonConvergenceError(
                f"scale ladder did not stabilise (last deviation {diag.deviation:.3e} "
                f"over {diag.rungs_used} rungs)"
            )
        return value


def exact_asymptotic_affine(m: AffineMapping) -> LinearAsymptotic:
    """The affine mapping x -> X x + u scales to the linear mapping x -> X x."""
    return LinearAsymptotic(m.X)


def load_coupling_matrix(s: LoadScenario) -> np.ndarray:
    """Demand-weighted gain-ratio matrix of the load model.

    Entry (i, k), i != k, is sum over users j of base station i of
    ln(2) * d_j * g[k, j] / (K * B * g[i, j]); the diagonal is zero.  The
    spectral radius of this matrix decides fixed-point existence for both
    the plain and the capped load mapping.
    """
    M = np.zeros((s.num_bs, s.num_bs))
    for i, cell in enumerate(s.assignment):
        idx = np.asarray(cell)
        weights = LN2 * s.demands[idx] / (s.num_rb * s.rb_bandwidth * s.gains[i, idx])
        for k in range(s.num_bs):
            if k == i:
                continue
            M[i, k] = float(np.sum(weights * s.gains[k, idx]))
    return M


def exact_asymptotic_load(s: LoadScenario) -> LinearAsymptotic:
    """Exact linear asymptotic mapping of the (capped or plain) load model.

    Rate caps vanish in the scale limit, so capped and uncapped scenarios
    share this mapping: x -> diag(p)^{-1} M diag(p) x.
    """
    M = load_coupling_matrix(s)
    A = M * (s.powers[np.newaxis, :] / s.powers[:, np.newaxis])
    return LinearAsymptotic(A)


def asymptotic_eval(a: AsymptoticMapping, x) -> np.ndarray:
    """Evaluate an asymptotic mapping (exact matrix product or ladder estimate)."""
    return a(x)


def check_asymptotic_properties(
    a: AsymptoticMapping, samples: int = 200, seed: int = 0, rtol: float | None = None
) -> list[PropertyReport]:
    """Sampled homogeneity and monotonicity checks for an asymptotic mapping.

    Homogeneity compares a(c x) against c * a(x) for c in {0.5, 2, 10};
    the tolerance defaults to 1e-9 for exact-linear mappings and to the
    ladder rtol for numeric ones.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if rtol is None:
        rtol = 1e-9 if a.provenance == "exact-linear" else getattr(a, "cfg", LadderConfig()).rtol * 10
    rng = np.random.default_rng(seed)
    xs = 10.0 ** rng.uniform(-2.0, 2.0, size=(samples, a.dim))
    shrink = rng.random((samples, a.dim))

    homo_viol: list[Violation] = []
    mono_viol: list[Violation] = []
    for k in range(samples):
        x = xs[k]
        ax = a(x)
        scale = max(float(np.max(np.abs(ax))), 1e-300)
        for c in (0.5, 2.0, 10.0):
            acx = a(c * x)
            if float(np.max(np.abs(acx - c * ax))) > rtol * c * scale:
                homo_viol.append(Violation(x=tuple(x), observed=tuple(acx - c * ax), alpha=c))
        x2 = shrink[k] * x
        ax2 = a(x2)
        if np.any(ax - ax2 < -rtol * scale):
            mono_viol.append(Violation(x=tuple(x), observed=tuple(ax - ax2), x2=tuple(x2)))

    return [
        PropertyReport("homogeneity", samples, seed, tuple(homo_viol)),
        PropertyReport("asymptotic-monotonicity", samples, seed, tuple(mono_viol)),
    ]
