"""Design diagnostics: standard errors, power, sign/magnitude errors, sample sizes.

Everything uses the normal approximation. Closed forms cover fixed
effects; Monte Carlo handles effect distributions. Both paths share the
same significance rule so they are directly comparable.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import norm

from .effects import EffectDistribution, mixture_mean, sample_with

TWO_SIDED = "two_sided"
ONE_SIDED = "one_sided"

# Below this magnitude an effect is treated as exactly null when deciding
# whether the exaggeration ratio is defined.
_NULL_EFFECT_TOL = 1e-12
_NULL_MEAN_TOL = 1e-6


class DesignError(ValueError):
    """Invalid design-metrics input."""


# ---------------------------------------------------------------------------
# Standard-error models


def se_two_proportion(p1: float, p2: float, n1: int, n2: int) -> float:
    """SE of a difference in proportions at the given rates and arm sizes."""
    for p in (p1, p2):
        if not (0.0 <= p <= 1.0):
            raise DesignError(f"rates must be in [0, 1], got {p}")
    _check_counts(n1, n2)
    return math.sqrt(p1 * (1 - p1) / n1 + p2 * (1 - p2) / n2)


def se_conservative_binary(n1: int, n2: int) -> float:
    """Upper bound on the two-proportion SE (both rates at 0.5)."""
    _check_counts(n1, n2)
    return math.sqrt(0.25 / n1 + 0.25 / n2)


def se_two_mean(sd: float, n1: int, n2: int) -> float:
    """SE of a difference in means with common residual SD."""
    if not (sd > 0):
        raise DesignError(f"sd must be > 0, got {sd}")
    _check_counts(n1, n2)
    return sd * math.sqrt(1.0 / n1 + 1.0 / n2)


def _check_counts(*ns: int) -> None:
    for n in ns:
        if n < 2:
            raise DesignError(f"arm sizes must be >= 2, got {n}")


# ---------------------------------------------------------------------------
# Design spec


@dataclass(frozen=True)
class BinaryOutcome:
    """Binary outcome; conservative=True bounds the rate at 0.5."""

    base_rate: float | None = None
    conservative: bool = True

    def se(self, n1: int, n2: int) -> float:
        if self.conservative or self.base_rate is None:
            return se_conservative_binary(n1, n2)
        return se_two_proportion(self.base_rate, self.base_rate, n1, n2)


@dataclass(frozen=True)
class ContinuousOutcome:
    sd: float

    def __post_init__(self):
        if not (self.sd > 0):
            raise DesignError(f"sd must be > 0, got {self.sd}")

    def se(self, n1: int, n2: int) -> float:
        return se_two_mean(self.sd, n1, n2)


OutcomeModel = BinaryOutcome | ContinuousOutcome


@dataclass(frozen=True)
class DesignSpec:
    n_treat: int
    n_control: int
    outcome: OutcomeModel
    alpha: float = 0.05
    sides: str = TWO_SIDED

    def __post_init__(self):
        _check_counts(self.n_treat, self.n_control)
        if not (0.0 < self.alpha < 1.0):
            raise DesignError(f"alpha must be in (0, 1), got {self.alpha}")
        _check_sides(self.sides)

    def se(self) -> float:
        return self.outcome.se(self.n_treat, self.n_control)


def _check_sides(sides: str) -> None:
    if sides not in (TWO_SIDED, ONE_SIDED):
        raise DesignError(f"sides must be '{TWO_SIDED}' or '{ONE_SIDED}', got {sides!r}")


def critical_z(alpha: float, sides: str = TWO_SIDED) -> float:
    if not (0.0 < alpha < 1.0):
        raise DesignError(f"alpha must be in (0, 1), got {alpha}")
    _check_sides(sides)
    tail = alpha / 2 if sides == TWO_SIDED else alpha
    return float(norm.ppf(1.0 - tail))


# ---------------------------------------------------------------------------
# Power and diagnostics, fixed effect


def power_fixed(effect: float, se: float, alpha: float = 0.05, sides: str = TWO_SIDED) -> float:
    """Probability the estimate clears the significance threshold."""
    if not (se > 0):
        raise DesignError(f"se must be > 0, got {se}")
    z = critical_z(alpha, sides)
    lam = effect / se
    if sides == TWO_SIDED:
        return float(norm.cdf(-z - lam) + 1.0 - norm.cdf(z - lam))
    return float(1.0 - norm.cdf(z - lam))


@dataclass(frozen=True)
class DesignDiagnostics:
    power: float
    type_s: float
    exaggeration: float | None  # None when the reference effect is null
    se: float
    z_crit: float
    # fallback magnitude reported when exaggeration is undefined
    median_significant_magnitude: float | None = None
    inputs: dict = field(default_factory=dict, compare=False)

    def to_json(self) -> dict:
        return {
            "power": self.power,
            "type_s": self.type_s,
            "exaggeration": self.exaggeration if self.exaggeration is not None else "undefined",
            "se": self.se,
            "z_crit": self.z_crit,
            "median_significant_magnitude": self.median_significant_magnitude,
            "inputs": self.inputs,
        }


def diagnostics_fixed(
    effect: float, se: float, alpha: float = 0.05, sides: str = TWO_SIDED
) -> DesignDiagnostics:
    """Closed-form power, sign-error rate, and exaggeration for a fixed effect.

    Sign error is the chance a significant estimate has the wrong sign;
    exaggeration is the expected significant magnitude over the true
    magnitude (truncated-normal expectations).
    """
    if not (se > 0):
        raise DesignError(f"se must be > 0, got {se}")
    z = critical_z(alpha, sides)
    power = power_fixed(effect, se, alpha, sides)
    lam = effect / se

    if sides == TWO_SIDED:
        upper = 1.0 - norm.cdf(z - lam)  # P(est > +c)
        lower = norm.cdf(-z - lam)  # P(est < -c)
    else:
        upper = 1.0 - norm.cdf(z - lam)
        lower = 0.0

    if abs(effect) < _NULL_EFFECT_TOL:
        type_s = 0.5 if sides == TWO_SIDED else 0.0
        exaggeration = None
    else:
        wrong = lower if effect > 0 else upper
        type_s = wrong / power if power > 0 else 0.0
        # E[|est| ; est beyond each threshold] via truncated-normal identities
        c = z * se
        mass_hi = effect * upper + se * norm.pdf((c - effect) / se)
        mass_lo = -effect * lower + se * norm.pdf((c + effect) / se)
        expected_magnitude = (mass_hi + mass_lo) / power if power > 0 else 0.0
        exaggeration = expected_magnitude / abs(effect)

    return DesignDiagnostics(
        power=power,
        type_s=float(type_s),
        exaggeration=float(exaggeration) if exaggeration is not None else None,
        se=se,
        z_crit=z,
        inputs={"effect": effect, "se": se, "alpha": alpha, "sides": sides},
    )


# ---------------------------------------------------------------------------
# Diagnostics for effect distributions, by Monte Carlo

_MIN_DRAWS = 10_000
_CHUNK = 1_000_000


def diagnostics_mixture(
    dist: EffectDistribution,
    se: float,
    alpha: float = 0.05,
    sides: str = TWO_SIDED,
    draws: int = 100_000,
    seed: int = 0,
) -> DesignDiagnostics:
    """Monte Carlo diagnostics when the true effect is itself a mixture.

    Deterministic given (seed, draws); draws are chunked with seeds
    derived per chunk, so chunking never changes results.
    """
    if not (se > 0):
        raise DesignError(f"se must be > 0, got {se}")
    if draws < _MIN_DRAWS:
        raise DesignError(f"draws must be >= {_MIN_DRAWS}, got {draws}")
    z = critical_z(alpha, sides)
    c = z * se

    n_sig = 0
    n_wrong = 0
    sum_abs_sig = 0.0
    sig_magnitudes: list[np.ndarray] = []

    root = np.random.SeedSequence(seed)
    n_chunks = (draws + _CHUNK - 1) // _CHUNK
    children = root.spawn(n_chunks)
    for i in range(n_chunks):
        n = min(_CHUNK, draws - i * _CHUNK)
        rng = np.random.default_rng(children[i])
        effects = sample_with(dist, n, rng)
        estimates = effects + rng.normal(0.0, se, size=n)
        if sides == TWO_SIDED:
            sig = np.abs(estimates) > c
        else:
            sig = estimates > c
        n_sig += int(sig.sum())
        n_wrong += int(((effects != 0) & (np.sign(estimates) != np.sign(effects)) & sig).sum())
        sum_abs_sig += float(np.abs(estimates[sig]).sum())
        sig_magnitudes.append(np.abs(estimates[sig]))

    power = n_sig / draws
    type_s = n_wrong / n_sig if n_sig else 0.0
    mean = mixture_mean(dist)
    median_mag = None
    if n_sig:
        median_mag = float(np.median(np.concatenate(sig_magnitudes)))
    if abs(mean) < _NULL_MEAN_TOL:
        warnings.warn(
            "mixture mean is near zero; exaggeration ratio is undefined, "
            "reporting the median significant magnitude instead",
            stacklevel=2,
        )
        exaggeration = None
    else:
        exaggeration = (sum_abs_sig / n_sig) / abs(mean) if n_sig else None

    return DesignDiagnostics(
        power=power,
        type_s=type_s,
        exaggeration=exaggeration,
        se=se,
        z_crit=z,
        median_significant_magnitude=median_mag,
        inputs={
            "distribution": dist.to_json(),
            "se": se,
            "alpha": alpha,
            "sides": sides,
            "draws": draws,
            "seed": seed,
        },
    )


# ---------------------------------------------------------------------------
# Required sample size


@dataclass(frozen=True)
class SampleSizeResult:
    n_treat: int
    n_control: int
    achieved_power: float

    @property
    def n_total(self) -> int:
        return self.n_treat + self.n_control

    def to_json(self) -> dict:
        return {
            "n_treat": self.n_treat,
            "n_control": self.n_control,
            "achieved_power": self.achieved_power,
        }


def required_n(
    effect: float,
    outcome: OutcomeModel,
    alpha: float = 0.05,
    sides: str = TWO_SIDED,
    target_power: float = 0.8,
    allocation: float = 1.0,
) -> SampleSizeResult:
    """Smallest arm sizes reaching the target power at the given allocation.

    n_control = ceil(allocation * n_treat). Power is monotone in n, so a
    doubling search brackets the answer and bisection pins it down.
    """
    if effect == 0:
        raise DesignError("effect must be nonzero; target power is unreachable at zero effect")
    if not (0.0 < target_power < 1.0):
        raise DesignError(f"target_power must be in (0, 1), got {target_power}")
    if target_power <= alpha:
        raise DesignError(f"target_power ({target_power}) must exceed alpha ({alpha})")
    if not (allocation > 0):
        raise DesignError(f"allocation must be > 0, got {allocation}")

    def power_at(n_treat: int) -> float:
        n_control = max(2, math.ceil(allocation * n_treat))
        return power_fixed(effect, outcome.se(n_treat, n_control), alpha, sides)

    lo, hi = 2, 2
    while power_at(hi) < target_power:
        lo, hi = hi, hi * 2
        if hi > 10**9:
            raise DesignError("required sample size exceeds 1e9 per arm")
    while lo < hi:
        mid = (lo + hi) // 2
        if power_at(mid) >= target_power:
            hi = mid
        else:
            lo = mid + 1
    n_treat = hi
    n_control = max(2, math.ceil(allocation * n_treat))
    return SampleSizeResult(n_treat, n_control, achieved_power=power_at(n_treat))


# ---------------------------------------------------------------------------
# Pilot-study report


@dataclass(frozen=True)
class PilotResult:
    successes_treat: int
    n_treat: int
    successes_control: int
    n_control: int

    def __post_init__(self):
        _check_counts(self.n_treat, self.n_control)
        if not (0 <= self.successes_treat <= self.n_treat):
            raise DesignError("treatment successes must be between 0 and n_treat")
        if not (0 <= self.successes_control <= self.n_control):
            raise DesignError("control successes must be between 0 and n_control")


@dataclass(frozen=True)
class PilotReport:
    estimate: float
    se: float
    interval_lo: float
    interval_hi: float
    n_multipliers: dict[float, float]

    def to_json(self) -> dict:
        return {
            "estimate": self.estimate,
            "se": self.se,
            "interval_lo": self.interval_lo,
            "interval_hi": self.interval_hi,
            "n_multipliers": {str(k): v for k, v in self.n_multipliers.items()},
        }


def pilot_report(
    pilot: PilotResult,
    alpha: float = 0.05,
    candidate_effects: tuple[float, ...] | None = None,
    target_power: float = 0.8,
) -> PilotReport:
    """Quantify how little a pilot estimate constrains the design.

    Tabulates, for candidate true effects across the pilot interval, how
    much larger a study would need to be than one sized for the pilot
    estimate itself.
    """
    p_t = pilot.successes_treat / pilot.n_treat
    p_c = pilot.successes_control / pilot.n_control
    estimate = p_t - p_c
    se = se_two_proportion(p_t, p_c, pilot.n_treat, pilot.n_control)
    z = critical_z(alpha, TWO_SIDED)
    lo, hi = estimate - z * se, estimate + z * se

    if candidate_effects is None:
        candidate_effects = tuple(
            round(lo + k * (hi - lo) / 4, 10) for k in range(5)
        )

    multipliers: dict[float, float] = {}
    if estimate != 0:
        outcome = BinaryOutcome(conservative=True)
        base = required_n(estimate, outcome, alpha, TWO_SIDED, target_power)
        for candidate in candidate_effects:
            if candidate == 0:
                multipliers[candidate] = math.inf
                continue
            need = required_n(candidate, outcome, alpha, TWO_SIDED, target_power)
            multipliers[candidate] = need.n_total / base.n_total

    return PilotReport(
        estimate=estimate,
        se=se,
        interval_lo=lo,
        interval_hi=hi,
        n_multipliers=multipliers,
    )
