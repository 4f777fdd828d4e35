"""Higher-level analyses built on the solvers.

Feasibility of an interference model reduces to one number: the spectral
radius of its asymptotic mapping.  Below one, a fixed point exists; above,
none does.  On top of that sit the power-budget sweep (utility, power and
energy-efficiency with their closed-form upper bounds), the transition
point separating the noise-limited from the interference-limited regime,
and bottleneck ranking for load scenarios.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .asymptotic import AsymptoticMapping, exact_asymptotic_affine, exact_asymptotic_load
from .mappings import AffineMapping, InterferenceMapping, LoadScenario
from .norms import MonotoneNorm, norm_equivalence_alpha
from .solvers import (
    DEFAULT_MAX_ITER,
    DEFAULT_TOL,
    EigenPair,
    SolveReport,
    SpectralRadiusResult,
    conditional_eigen,
    fixed_point,
    solve_canonical,
    spectral_radius,
)

# within this distance of 1 the strict inequality test is numerically
# meaningless, so the verdict is flagged instead of trusted
NEAR_CRITICAL_BAND = 1e-6

LOW_POWER = "low-power"
HIGH_POWER = "high-power"

# tail cut for slope fits: far enough from the transition point that the
# theoretical slopes are within ~0.02 of their limits
_TAIL_FACTOR = 50.0


@dataclass(frozen=True)
class FeasibilityVerdict:
    rho: float
    feasible: bool                       # strictly rho < 1
    margin: float                        # 1 - rho
    near_critical: bool
    fixed_point: np.ndarray | None = None
    spectral: SpectralRadiusResult | None = None
    solve: SolveReport | None = None


@dataclass(frozen=True)
class UnitBallTestResult:
    pair: EigenPair
    within_unit_ball: bool               # eigenvalue <= 1
    report: SolveReport


@dataclass(frozen=True)
class SweepRow:
    p_bar: float
    utility: float
    power: tuple[float, ...]
    ee: float
    utility_bound: float
    ee_bound: float
    regime: str
    status: str = "ok"


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    lambda_inf: float
    transition: float | None             # None when the spectral radius is zero
    t0_norm_a: float                     # ||T(0)||_a
    t0_norm_b: float                     # ||T(0)||_b
    alpha: float                         # ||.||_a <= alpha ||.||_b
    notes: tuple[str, ...] = ()

    def __iter__(self):
        return iter(self.rows)


@dataclass(frozen=True)
class BottleneckEntry:
    base_station: int
    load: float
    overloaded: bool                     # load > 1: unserved demand


@dataclass(frozen=True)
class BottleneckRanking:
    entries: tuple[BottleneckEntry, ...]
    verdict: FeasibilityVerdict

    @property
    def available(self) -> bool:
        return bool(self.entries)


@dataclass(frozen=True)
class ScalingReport:
    ok: bool
    note: str = ""
    low_slope_utility: float | None = None
    low_slope_ee: float | None = None
    high_slope_utility: float | None = None
    high_slope_ee: float | None = None
    # deviations from the theoretical pattern {U: 1 -> 0, E: 0 -> -1}
    low_dev_utility: float | None = None
    low_dev_ee: float | None = None
    high_dev_utility: float | None = None
    high_dev_ee: float | None = None
    lambda_at_top: float | None = None   # 1/U at the largest budget
    lambda_gap: float | None = None      # relative gap to lambda_inf


def default_asymptotic(m: InterferenceMapping) -> AsymptoticMapping | None:
    """Exact asymptotic route for the built-in families, None otherwise."""
    if isinstance(m, AffineMapping):
        return exact_asymptotic_affine(m)
    scenario = getattr(m, "scenario", None)
    if isinstance(scenario, LoadScenario):
        return exact_asymptotic_load(scenario)
    return None


def _radius(m: InterferenceMapping, a: AsymptoticMapping | None) -> SpectralRadiusResult:
    if a is None:
        a = default_asymptotic(m)
    if a is not None and a.provenance == "exact-linear":
        return spectral_radius(a, "linear-power")
    return spectral_radius(a, "budget-ladder", base=m) if a is not None else spectral_radius(
        AsymptoticMapping(m.dim), "budget-ladder", base=m
    )


def feasibility_check(
    m: InterferenceMapping,
    a: AsymptoticMapping | None = None,
    compute_fp: bool = False,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> FeasibilityVerdict:
    """Decide fixed-point existence from the spectral radius of ``a``.

    ``a`` must be the asymptotic mapping of ``m`` (the caller's
    responsibility; by default the exact route is derived for the built-in
    families).  A radius within NEAR_CRITICAL_BAND of 1 is flagged
    near-critical: the boundary cannot be decided in floating point.
    """
    spectral = _radius(m, a)
    rho = spectral.value
    feasible = rho < 1.0
    near = abs(rho - 1.0) < NEAR_CRITICAL_BAND
    fp = None
    solve = None
    if feasible and not near and compute_fp:
        fp, solve = fixed_point(m, tol=tol, max_iter=max_iter)
    return FeasibilityVerdict(rho, feasible, 1.0 - rho, near, fp, spectral, solve)


def unit_ball_fixed_point_test(
    m: InterferenceMapping,
    norm: MonotoneNorm,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> UnitBallTestResult:
    """Location test: is there a fixed point inside the unit ball of ``norm``?

    Solves T(x) = lambda x with ||x|| = 1 on the interference mapping
    itself; the answer is yes exactly when lambda <= 1.
    """
    pair, report = conditional_eigen(m, norm, tol=tol, max_iter=max_iter)
    return UnitBallTestResult(pair, pair.value <= 1.0, report)


def transition_point(m: InterferenceMapping, norm_a: MonotoneNorm, lambda_inf: float) -> float:
    """Power budget ||T(0)||_a / lambda_inf separating the two regimes.

    Below it the network is noise limited, above it interference limited.
    """
    if lambda_inf <= 0:
        raise ValueError("transition point requires a positive spectral radius")
    return norm_a(m(np.zeros(m.dim))) / lambda_inf


def sweep(
    m: InterferenceMapping,
    norm_a: MonotoneNorm,
    norm_b: MonotoneNorm,
    p_bar_grid,
    a: AsymptoticMapping | None = None,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> SweepResult:
    """Solve the utility problem along a budget grid and attach the bounds.

    Each row carries the utility U, the power vector P, the energy
    efficiency E = U / ||P||_b, the upper bounds
    min{p_bar/||T(0)||_a, 1/lambda_inf} on U and
    min{1/||T(0)||_b, alpha/(lambda_inf p_bar)} on E, and the regime label
    (low-power iff p_bar <= transition point).  Per-row solver failures are
    recorded in the row status; the sweep continues.
    """
    grid = [float(p) for p in p_bar_grid]
    if not grid or any(p <= 0 for p in grid):
        raise ValueError("p_bar grid must be positive")
    if any(b <= a_ for a_, b in zip(grid, grid[1:])):
        raise ValueError("p_bar grid must be strictly increasing")

    spectral = _radius(m, a)
    lam = spectral.value
    t0 = m(np.zeros(m.dim))
    t0a = norm_a(t0)
    t0b = norm_b(t0)
    alpha = norm_equivalence_alpha(norm_a, norm_b, m.dim)
    notes = []
    if lam > 0:
        p_t = t0a / lam
    else:
        p_t = None
        notes.append(
            "spectral radius is zero: utility is unbounded, no transition point, "
            "all budgets are in the low-power regime"
        )
    if not spectral.converged:
        notes.append("spectral radius estimate did not converge; bounds may be off")

    rows = []
    for p_bar in grid:
        sol = solve_canonical(m, norm_a, p_bar, tol=tol, max_iter=max_iter)
        u = sol.c_star
        e = u / norm_b(sol.p_star)
        u_bound = p_bar / t0a if lam <= 0 else min(p_bar / t0a, 1.0 / lam)
        e_bound = 1.0 / t0b if lam <= 0 else min(1.0 / t0b, alpha / (lam * p_bar))
        regime = LOW_POWER if (p_t is None or p_bar <= p_t) else HIGH_POWER
        status = "ok" if sol.report.converged else sol.report.stop_reason
        rows.append(
            SweepRow(p_bar, u, tuple(sol.p_star), e, u_bound, e_bound, regime, status)
        )
    return SweepResult(tuple(rows), lam, p_t, t0a, t0b, alpha, tuple(notes))


def _fit_slope(points: list[tuple[float, float]]) -> float:
    logs = np.log10(np.asarray(points))
    return float(np.polyfit(logs[:, 0], logs[:, 1], 1)[0])


def scaling_diagnostics(result: SweepResult, lambda_inf: float | None = None) -> ScalingReport:
    """Log-log slopes of U and E on the regime tails.

    The theoretical pattern is slope 1 -> 0 for the utility and 0 -> -1
    for the energy efficiency as the budget crosses the transition point.
    Tails are the grid points at least _TAIL_FACTOR away from the
    transition point on either side; at least two points per tail are
    needed, otherwise the span is reported as insufficient.
    """
    lam = result.lambda_inf if lambda_inf is None else lambda_inf
    if lam <= 0:
        return ScalingReport(False, "spectral radius is zero: no transition point")
    p_t = result.t0_norm_a / lam
    ok_rows = [r for r in result.rows if r.status == "ok"]
    low = [(r.p_bar, r.utility, r.ee) for r in ok_rows if r.p_bar <= p_t / _TAIL_FACTOR]
    high = [(r.p_bar, r.utility, r.ee) for r in ok_rows if r.p_bar >= p_t * _TAIL_FACTOR]
    if len(low) < 2 or len(high) < 2:
        return ScalingReport(
            False,
            f"insufficient span: need >= 2 grid points below {p_t / _TAIL_FACTOR:g} "
            f"and above {p_t * _TAIL_FACTOR:g}",
        )
    low_u = _fit_slope([(p, u) for p, u, _ in low])
    low_e = _fit_slope([(p, e) for p, _, e in low])
    high_u = _fit_slope([(p, u) for p, u, _ in high])
    high_e = _fit_slope([(p, e) for p, _, e in high])
    top = ok_rows[-1]
    lam_top = 1.0 / top.utility
    return ScalingReport(
        True,
        "",
        low_slope_utility=low_u,
        low_slope_ee=low_e,
        high_slope_utility=high_u,
        high_slope_ee=high_e,
        low_dev_utility=abs(low_u - 1.0),
        low_dev_ee=abs(low_e),
        high_dev_utility=abs(high_u),
        high_dev_ee=abs(high_e + 1.0),
        lambda_at_top=lam_top,
        lambda_gap=abs(lam_top - lam) / lam,
    )


def bottleneck_ranking(
    s: LoadScenario, tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER
) -> BottleneckRanking:
    """Rank base stations by their load at the fixed point, highest first.

    Loads above 1 mark overloaded cells (unserved demand).  When the
    scenario is infeasible the fixed point does not exist, so the ranking
    is unavailable and only the verdict is returned.
    """
    m = s.mapping()
    verdict = feasibility_check(m, exact_asymptotic_load(s), compute_fp=True,
                                tol=tol, max_iter=max_iter)
    if verdict.fixed_point is None:
        return BottleneckRanking((), verdict)
    loads = verdict.fixed_point
    order = sorted(range(s.num_bs), key=lambda i: (-loads[i], i))
    entries = tuple(
        BottleneckEntry(i, float(loads[i]), bool(loads[i] > 1.0)) for i in order
    )
    return BottleneckRanking(entries, verdict)
