"""Fixed-point engines and spectral-radius computation.

Three iterations cover everything downstream:

* plain fixed-point iteration x <- T(x), with a growth guard that catches
  the infeasible case cheaply;
* normalized fixed-point iteration p <- (p_bar / ||T(p)||_a) T(p), which
  solves the norm-constrained utility maximization problem and, run on a
  homogeneous mapping, conditional eigenvalue problems;
* Collatz-Wielandt bracketing for the spectral radius of a nonnegative
  matrix, with a budget-ladder alternative that needs only the ability to
  solve the utility problem at growing power budgets.

All solves are deterministic: fixed start vectors, no randomness.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .asymptotic import AsymptoticMapping, LinearAsymptotic
from .mappings import InterferenceMapping
from .norms import MAX_NORM, MonotoneNorm, as_nonneg_vector

STOP_TOLERANCE = "tolerance"
STOP_MAX_ITERATIONS = "max-iterations"
STOP_DIVERGENCE_GUARD = "divergence-guard"

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 100_000
DEFAULT_GROWTH_GUARD = 1e12

DEFAULT_BUDGET_RUNGS = tuple(10.0 ** k for k in range(2, 15))


@dataclass(frozen=True)
class SolveReport:
    iterations: int
    residual: float
    converged: bool
    stop_reason: str
    flags: tuple[str, ...] = ()

    def __post_init__(self):
        if self.converged != (self.stop_reason == STOP_TOLERANCE):
            raise ValueError("converged must hold exactly when the stop reason is 'tolerance'")


@dataclass(frozen=True)
class EigenPair:
    """Normalized eigenvector and its eigenvalue, ||x||_a = 1."""

    x: np.ndarray
    value: float

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        if self.value < 0:
            raise ValueError("eigenvalue must be nonnegative")


@dataclass(frozen=True)
class CanonicalSolution:
    """Solution of the norm-constrained utility problem at one power budget."""

    p_star: np.ndarray
    c_star: float
    report: SolveReport


@dataclass(frozen=True)
class SpectralRadiusResult:
    value: float
    method: str
    converged: bool
    iterations: int
    flags: tuple[str, ...] = ()
    bracket: tuple[float, float] | None = None      # linear-power: certified bounds
    ladder: tuple[tuple[float, float], ...] | None = None  # budget-ladder: (p_bar, lambda)


def fixed_point(
    m: InterferenceMapping,
    x0=None,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
    growth_guard: float = DEFAULT_GROWTH_GUARD,
) -> tuple[np.ndarray, SolveReport]:
    """Iterate x <- T(x) until the relative residual drops below tol.

    Starts from zero by default, which makes the iterate sequence monotone
    increasing for standard interference mappings.  When no fixed point
    exists the iterates grow without bound; the growth guard turns that
    into a reported 'divergence-guard' outcome rather than an exception.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    x = np.zeros(m.dim) if x0 is None else as_nonneg_vector(x0, dim=m.dim, name="x0")
    residual = float("inf")
    for n in range(1, max_iter + 1):
        tx = m(x)
        residual = float(np.max(np.abs(x - tx))) / max(1.0, float(np.max(np.abs(x))))
        if residual <= tol:
            return x, SolveReport(n, residual, True, STOP_TOLERANCE)
        if float(np.max(tx)) > growth_guard:
            return tx, SolveReport(n, residual, False, STOP_DIVERGENCE_GUARD)
        x = tx
    return x, SolveReport(max_iter, residual, False, STOP_MAX_ITERATIONS)


def solve_canonical(
    m: InterferenceMapping,
    norm_a: MonotoneNorm,
    p_bar: float,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> CanonicalSolution:
    """Maximize c subject to p = c T(p) and ||p||_a <= p_bar.

    The problem has a unique solution for every positive budget; it is the
    limit of p <- (p_bar / ||T(p)||_a) T(p), and the optimal utility is
    c = p_bar / ||T(p)||_a.  The iterate is renormalized at every step, so
    the budget constraint holds exactly (up to rounding) on return.
    """
    if p_bar <= 0:
        raise ValueError("p_bar must be positive")
    if tol <= 0:
        raise ValueError("tol must be positive")
    x = np.ones(m.dim)
    x *= p_bar / norm_a(x)
    residual = float("inf")
    c = 0.0
    for n in range(1, max_iter + 1):
        tx = m(x)
        c = p_bar / norm_a(tx)
        nxt = c * tx
        residual = float(np.max(np.abs(x - nxt))) / float(np.max(np.abs(x)))
        if residual <= tol:
            return CanonicalSolution(x, c, SolveReport(n, residual, True, STOP_TOLERANCE))
        x = nxt
    return CanonicalSolution(x, c, SolveReport(max_iter, residual, False, STOP_MAX_ITERATIONS))


def _normalized_eigen_iteration(mapping, norm_a, x0, delta, tol, max_iter):
    """One run of the (optionally damped) normalized iteration.

    Returns (x, value, report-ish tuple, hit_zero).  Damping iterates on
    T(x) + delta * x, which has exactly the same eigenvectors with values
    shifted by delta; the convergence test below is always on the
    undamped mapping.
    """
    x = x0
    value = 0.0
    residual = float("inf")
    for n in range(1, max_iter + 1):
        tx = mapping(x)
        if not np.any(tx > 0):
            return x, 0.0, (n, 0.0, STOP_TOLERANCE), True
        value = norm_a(tx)
        residual = float(np.max(np.abs(tx - value * x)))
        if residual <= tol * max(1.0, value):
            return x, float(value), (n, residual, STOP_TOLERANCE), False
        y = tx + delta * x
        x = y / norm_a(y)
    return x, float(value), (max_iter, residual, STOP_MAX_ITERATIONS), False


def conditional_eigen(
    mapping,
    norm_a: MonotoneNorm,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> tuple[EigenPair, SolveReport]:
    """Find (x, lambda) with T(x) = lambda x and ||x||_a = 1.

    ``mapping`` may be an interference mapping or an asymptotic mapping;
    it only needs ``dim`` and evaluation.  The iteration normalizes T(x)
    at every step, starting from the normalized all-ones vector.

    Homogeneous mappings can send an iterate to zero (reducible linear
    parts): the solver then restarts once from a perturbed start, and if
    the restart dies as well it reports lambda = 0 with a 'zero-direction'
    flag — that pair is an exact solution, T(x) = 0 = 0 * x.

    Imprimitive linear mappings make the plain iteration oscillate; on a
    max-iterations stop the solver retries once with damping (iterating on
    T(x) + delta x, same eigenvectors, values shifted by delta), which
    restores convergence for that class.  The retry is recorded in flags.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    ones = np.ones(mapping.dim)
    x0 = ones / norm_a(ones)
    flags: list[str] = []

    x, value, (iters, residual, reason), hit_zero = _normalized_eigen_iteration(
        mapping, norm_a, x0, 0.0, tol, max_iter
    )
    if hit_zero:
        perturbed = x0 + 1e-9 * ones
        perturbed /= norm_a(perturbed)
        x, value, (iters, residual, reason), hit_zero = _normalized_eigen_iteration(
            mapping, norm_a, perturbed, 0.0, tol, max_iter
        )
        if hit_zero:
            flags.append("zero-direction")
            value, reason, residual = 0.0, STOP_TOLERANCE, 0.0

    if reason == STOP_MAX_ITERATIONS and value > 0:
        delta = 0.5 * value
        x, value, (iters, residual, reason), hit_zero = _normalized_eigen_iteration(
            mapping, norm_a, x0, delta, tol, max_iter
        )
        flags.append("damped-retry")
        if hit_zero:
            flags.append("zero-direction")
            value, reason, residual = 0.0, STOP_TOLERANCE, 0.0

    report = SolveReport(iters, residual, reason == STOP_TOLERANCE, reason, tuple(flags))
    return EigenPair(x, value), report


def _collatz_wielandt(A: np.ndarray, tol: float, max_iter: int):
    """Two-sided spectral-radius bracket for a nonnegative square matrix.

    Runs power iteration on the diagonally shifted matrix A + delta I,
    whose iterates stay strictly positive, so every step yields certified
    Collatz-Wielandt bounds; the shift also removes the oscillation of
    imprimitive matrices and is subtracted back exactly at the end.
    """
    n = A.shape[0]
    if not A.any():
        return 0.0, (0.0, 0.0), 0, True
    scale = float(np.max(np.sum(A, axis=1)))
    delta = 0.05 * scale
    B = A + delta * np.eye(n)
    x = np.full(n, 1.0 / n)
    lo_best, hi_best = 0.0, float("inf")
    for it in range(1, max_iter + 1):
        y = B @ x
        ratios = y / x
        lo_best = max(lo_best, float(np.min(ratios)))
        hi_best = min(hi_best, float(np.max(ratios)))
        mid = 0.5 * (lo_best + hi_best) - delta
        if hi_best - lo_best < tol * max(1.0, abs(mid)):
            return mid, (lo_best - delta, hi_best - delta), it, True
        x = y / float(np.sum(y))
    # reducible matrices can leave the lower bound permanently loose; the
    # upper bound is still certified, so fall back to it with a flag
    return hi_best - delta, (lo_best - delta, hi_best - delta), max_iter, False


def spectral_radius(
    a: AsymptoticMapping | None,
    method: str = "linear-power",
    base: InterferenceMapping | None = None,
    norm_a: MonotoneNorm = MAX_NORM,
    tol: float = 1e-9,
    max_iter: int = 50_000,
    budget_rungs: tuple[float, ...] = DEFAULT_BUDGET_RUNGS,
    budget_rtol: float = 1e-6,
) -> SpectralRadiusResult:
    """Spectral radius of an asymptotic mapping.

    'linear-power' needs exact-linear provenance and runs Collatz-Wielandt
    bracketing; the result carries certified two-sided bounds (on
    reducible matrices the bracket may stay loose, in which case the upper
    bound is returned with a 'loose-bracket' flag).

    'budget-ladder' needs the base interference mapping: it solves the
    utility problem at growing power budgets and returns 1/c* at the first
    rung where consecutive values agree within budget_rtol.  The ladder
    values are upper bounds decreasing toward the spectral radius.
    """
    if method == "linear-power":
        if getattr(a, "provenance", None) != "exact-linear" or not isinstance(a, LinearAsymptotic):
            raise ValueError("linear-power requires an exact-linear asymptotic mapping")
        value, bracket, iters, tight = _collatz_wielandt(a.matrix, tol, max_iter)
        flags = () if tight else ("loose-bracket",)
        return SpectralRadiusResult(value, method, True, iters, flags, bracket=bracket)

    if method == "budget-ladder":
        if base is None:
            raise ValueError("budget-ladder requires the base interference mapping")
        ladder: list[tuple[float, float]] = []
        flags: list[str] = []
        total_iters = 0
        prev = None
        for p_bar in budget_rungs:
            sol = solve_canonical(base, norm_a, p_bar)
            total_iters += sol.report.iterations
            if not sol.report.converged:
                flags.append(f"rung {p_bar:g}: {sol.report.stop_reason}")
            lam = 1.0 / sol.c_star
            ladder.append((float(p_bar), float(lam)))
            if prev is not None:
                if lam > prev * (1.0 + 1e-9):
                    flags.append("non-monotone-ladder")
                if abs(prev - lam) <= budget_rtol * max(lam, prev):
                    return SpectralRadiusResult(
                        float(lam), method, True, total_iters, tuple(flags), ladder=tuple(ladder)
                    )
            prev = lam
        flags.append("ladder-exhausted")
        return SpectralRadiusResult(
            float(prev), method, False, total_iters, tuple(flags), ladder=tuple(ladder)
        )

    raise ValueError(f"unknown spectral radius method {method!r}")
