"""Standard interference mappings: the contract and its concrete families.

A standard interference mapping T maps nonnegative vectors to strictly
positive ones and satisfies, coordinate-wise,

  scalability:   alpha * T(x) > T(alpha * x)   for every alpha > 1,
  monotonicity:  x1 >= x2  implies  T(x1) >= T(x2).

Its fixed point, when it exists, is unique and is the operating point of
the network model built on top of it.  Two concrete families are provided:
affine mappings x -> X x + u, and the cellular load-coupling model in
which base-station loads interact through per-resource-block rates.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .norms import as_nonneg_vector, as_positive_vector

LN2 = float(np.log(2.0))


class InterferenceMapping:
    """Evaluable mapping from R^N_+ into R^N_++.

    Subclasses implement ``_evaluate``; calling an instance validates the
    input and delegates.  Outputs are deliberately not validated per call:
    positivity is a sampled property (see ``check_standard_properties``),
    and diagnosing a broken custom mapping requires being able to call it.
    """

    family = "custom"

    def __init__(self, dim: int):
        if int(dim) < 1:
            raise ValueError("dim must be >= 1")
        self.dim = int(dim)

    def __call__(self, x) -> np.ndarray:
        x = as_nonneg_vector(x, dim=self.dim)
        return np.asarray(self._evaluate(x), dtype=float)

    def _evaluate(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class CustomMapping(InterferenceMapping):
    """Wrap an arbitrary callable as an interference mapping (unchecked)."""

    family = "custom"

    def __init__(self, fn, dim: int):
        super().__init__(dim)
        self._fn = fn

    def _evaluate(self, x):
        return self._fn(x)


class AffineMapping(InterferenceMapping):
    """x -> X x + u with X >= 0 entrywise and u > 0."""

    family = "affine"

    def __init__(self, X, u):
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[0] != X.shape[1]:
            raise ValueError("X must be a square matrix")
        if not np.all(np.isfinite(X)):
            raise ValueError("X must be finite")
        if np.any(X < 0):
            raise ValueError("X must be entrywise nonnegative")
        u = as_positive_vector(u, dim=X.shape[0], name="u")
        super().__init__(X.shape[0])
        self.X = X.copy()
        self.u = u

    def _evaluate(self, x):
        return self.X @ x + self.u


def affine_eval(m: AffineMapping, x) -> np.ndarray:
    """Evaluate X x + u."""
    return m(x)


@dataclass(frozen=True)
class LoadScenario:
    """Parameters of the load-coupled cellular model.

    num_bs base stations serve num_users users; ``assignment[i]`` lists the
    users of base station i (a partition of range(num_users), every cell
    nonempty).  Gains are linear (dB conversion happens at file ingestion),
    demands in bits/s, powers in Watt per resource block, sigma2 in Watt
    per resource block, rb_bandwidth in Hz.  ``caps``, when present, gives
    the maximum achievable rate of one resource block per base station in
    bits/s, modelling a finite set of modulation and coding schemes.
    """

    num_bs: int
    num_users: int
    assignment: tuple[tuple[int, ...], ...]
    gains: np.ndarray             # (num_bs, num_users), linear pathloss
    demands: np.ndarray           # (num_users,), bits/s
    num_rb: int                   # resource blocks per base station
    rb_bandwidth: float           # Hz per resource block
    sigma2: float                 # noise power per resource block, Watt
    powers: np.ndarray            # (num_bs,), Watt per resource block
    caps: np.ndarray | None = field(default=None)

    def __post_init__(self):
        if self.num_bs < 1 or self.num_users < 1:
            raise ValueError("num_bs and num_users must be >= 1")
        assignment = tuple(tuple(int(j) for j in cell) for cell in self.assignment)
        if len(assignment) != self.num_bs:
            raise ValueError(f"assignment has {len(assignment)} cells, expected {self.num_bs}")
        seen: set[int] = set()
        for i, cell in enumerate(assignment):
            if not cell:
                raise ValueError(f"base station {i} has no assigned users")
            for j in cell:
                if not 0 <= j < self.num_users:
                    raise ValueError(f"user index {j} at base station {i} out of range")
                if j in seen:
                    raise ValueError(f"user {j} assigned to more than one base station")
                seen.add(j)
        if len(seen) != self.num_users:
            missing = sorted(set(range(self.num_users)) - seen)
            raise ValueError(f"users {missing} not assigned to any base station")
        object.__setattr__(self, "assignment", assignment)

        gains = np.asarray(self.gains, dtype=float)
        if gains.shape != (self.num_bs, self.num_users):
            raise ValueError(f"gains must have shape ({self.num_bs}, {self.num_users})")
        if not np.all(np.isfinite(gains)) or np.any(gains <= 0):
            raise ValueError("gains must be finite and strictly positive")
        object.__setattr__(self, "gains", gains.copy())

        object.__setattr__(
            self, "demands", as_positive_vector(self.demands, dim=self.num_users, name="demands")
        )
        object.__setattr__(
            self, "powers", as_positive_vector(self.powers, dim=self.num_bs, name="powers")
        )
        if self.num_rb < 1:
            raise ValueError("num_rb must be >= 1")
        if not (np.isfinite(self.rb_bandwidth) and self.rb_bandwidth > 0):
            raise ValueError("rb_bandwidth must be positive")
        if not (np.isfinite(self.sigma2) and self.sigma2 > 0):
            raise ValueError("sigma2 must be positive")
        if self.caps is not None:
            object.__setattr__(
                self, "caps", as_positive_vector(self.caps, dim=self.num_bs, name="caps")
            )

    def load_mapping(self) -> "LoadMapping":
        return LoadMapping(self)

    def capped_load_mapping(self) -> "CappedLoadMapping":
        return CappedLoadMapping(self)

    def mapping(self) -> InterferenceMapping:
        """The scenario's natural mapping: capped when caps are present."""
        return self.capped_load_mapping() if self.caps is not None else self.load_mapping()


def rate_per_rb(s: LoadScenario, x, i: int, j: int) -> float:
    """Achievable rate (bits/s) of one resource block from base station i to user j.

    Strictly decreasing in every other station's load, independent of x[i].
    """
    x = as_nonneg_vector(x, dim=s.num_bs)
    if not 0 <= i < s.num_bs:
        raise ValueError(f"base station index {i} out of range")
    if not 0 <= j < s.num_users:
        raise ValueError(f"user index {j} out of range")
    interference = float(np.sum(x * s.powers * s.gains[:, j])) - x[i] * s.powers[i] * s.gains[i, j]
    snr = s.powers[i] * s.gains[i, j] / (interference + s.sigma2)
    return float(s.rb_bandwidth * np.log1p(snr) / LN2)


def _rb_fractions(s: LoadScenario, x: np.ndarray) -> list[np.ndarray]:
    """Per-user resource-block fraction d_j / (K * rate) grouped by base station."""
    # total received power per user from all loaded stations; remove own cell
    total = (x * s.powers) @ s.gains                      # (num_users,)
    fractions = []
    for i, cell in enumerate(s.assignment):
        idx = np.asarray(cell)
        interference = total[idx] - x[i] * s.powers[i] * s.gains[i, idx]
        snr = s.powers[i] * s.gains[i, idx] / (interference + s.sigma2)
        rate = s.rb_bandwidth * np.log1p(snr) / LN2
        fractions.append(s.demands[idx] / (s.num_rb * rate))
    return fractions


def load_eval(s: LoadScenario, x) -> np.ndarray:
    """Load each base station needs to serve its demand at interference level x."""
    x = as_nonneg_vector(x, dim=s.num_bs)
    fractions = _rb_fractions(s, x)
    return np.array([float(np.sum(f)) for f in fractions])


def capped_load_eval(s: LoadScenario, x) -> np.ndarray:
    """Load with per-resource-block rates capped at the scenario's caps.

    Each user's term is max{d_j / (K * rate), d_j / (K * cap_i)}: a resource
    block never delivers more than cap_i bits/s, so the second argument is
    the floor on the fraction of the K blocks the user occupies.
    """
    if s.caps is None:
        raise ValueError("scenario has no caps; use load_eval")
    x = as_nonneg_vector(x, dim=s.num_bs)
    fractions = _rb_fractions(s, x)
    out = np.empty(s.num_bs)
    for i, cell in enumerate(s.assignment):
        idx = np.asarray(cell)
        floor = s.demands[idx] / (s.num_rb * s.caps[i])
        out[i] = float(np.sum(np.maximum(fractions[i], floor)))
    return out


class LoadMapping(InterferenceMapping):
    family = "load"

    def __init__(self, scenario: LoadScenario):
        super().__init__(scenario.num_bs)
        self.scenario = scenario

    def _evaluate(self, x):
        return load_eval(self.scenario, x)


class CappedLoadMapping(InterferenceMapping):
    family = "load-capped"

    def __init__(self, scenario: LoadScenario):
        if scenario.caps is None:
            raise ValueError("capped load mapping requires caps for every base station")
        super().__init__(scenario.num_bs)
        self.scenario = scenario

    def _evaluate(self, x):
        return capped_load_eval(self.scenario, x)


@dataclass(frozen=True)
class Violation:
    """One failed sampled check: the inputs involved and what was observed."""

    x: tuple[float, ...]
    observed: tuple[float, ...]
    alpha: float | None = None
    x2: tuple[float, ...] | None = None


@dataclass(frozen=True)
class PropertyReport:
    property_name: str
    samples: int
    seed: int
    violations: tuple[Violation, ...] = ()

    @property
    def passed(self) -> bool:
        return not self.violations


def _sample_points(rng: np.random.Generator, dim: int, count: int) -> np.ndarray:
    # log-uniform coordinates over [1e-6, 1e3]
    return 10.0 ** rng.uniform(-6.0, 3.0, size=(count, dim))


def check_standard_properties(
    m: InterferenceMapping, samples: int = 1000, seed: int = 0
) -> list[PropertyReport]:
    """Sampled scalability / monotonicity / positivity checks.

    Draws deterministic pseudo-random points (log-uniform in [1e-6, 1e3])
    and scaling factors alpha in (1, 10].  Violations are returned as data,
    one report per property; they are not raised.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    xs = _sample_points(rng, m.dim, samples)
    alphas = 1.0 + 9.0 * rng.random(samples)          # (1, 10]
    shrink = rng.random((samples, m.dim))             # x2 = shrink * x1 <= x1

    scal_viol: list[Violation] = []
    mono_viol: list[Violation] = []
    pos_viol: list[Violation] = []

    # positivity is checked at x = 0 too: T(0) > 0 is part of the contract
    zero = np.zeros(m.dim)
    t0 = m(zero)
    if not np.all(t0 > 0):
        pos_viol.append(Violation(x=tuple(zero), observed=tuple(t0)))

    for k in range(samples):
        x = xs[k]
        tx = m(x)
        if not np.all(tx > 0):
            pos_viol.append(Violation(x=tuple(x), observed=tuple(tx)))

        a = float(alphas[k])
        tax = m(a * x)
        gap = a * tx - tax
        if not np.all(gap > 0):
            scal_viol.append(Violation(x=tuple(x), observed=tuple(gap), alpha=a))

        x2 = shrink[k] * x
        tx2 = m(x2)
        if not np.all(tx - tx2 >= 0):
            mono_viol.append(Violation(x=tuple(x), observed=tuple(tx - tx2), x2=tuple(x2)))

    return [
        PropertyReport("scalability", samples, seed, tuple(scal_viol)),
        PropertyReport("monotonicity", samples, seed, tuple(mono_viol)),
        PropertyReport("positivity", samples, seed, tuple(pos_viol)),
    ]
