"""Distributions of individual treatment effects.

The central object is a weighted mixture of simple components (point
masses, uniforms, normals, discrete bins).  Everything downstream --
implied average effects, power diagnostics, elicitation -- consumes
these mixtures.  All types are immutable; all operations are pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SCHEMA_VERSION = 1

# Weight / mass sums are accepted within this tolerance and silently
# renormalized; anything further off is a real error.
_SUM_TOL = 1e-9

# Default null-share presets. Never applied silently.
P_NULL_DIRECT_INTERVENTION = 0.5
P_NULL_INDIRECT_MARKETING = 0.9


class EffectModelError(ValueError):
    """Invalid effect-model input."""


# ---------------------------------------------------------------------------
# Components


@dataclass(frozen=True)
class PointMass:
    value: float

    kind = "point_mass"

    def mean(self) -> float:
        return self.value

    def variance(self) -> float:
        return 0.0

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return np.full(n, self.value)

    def to_json(self) -> dict:
        return {"kind": self.kind, "value": self.value}


@dataclass(frozen=True)
class Uniform:
    lo: float
    hi: float

    kind = "uniform"

    def __post_init__(self):
        if not (self.lo <= self.hi):
            raise EffectModelError(f"uniform requires lo <= hi, got ({self.lo}, {self.hi})")

    def mean(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def variance(self) -> float:
        return (self.hi - self.lo) ** 2 / 12.0

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.uniform(self.lo, self.hi, size=n)

    def to_json(self) -> dict:
        return {"kind": self.kind, "lo": self.lo, "hi": self.hi}


@dataclass(frozen=True)
class Normal:
    center: float
    scale: float

    kind = "normal"

    def __post_init__(self):
        if not (self.scale > 0):
            raise EffectModelError(f"normal requires scale > 0, got {self.scale}")

    def mean(self) -> float:
        return self.center

    def variance(self) -> float:
        return self.scale**2

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return rng.normal(self.center, self.scale, size=n)

    def to_json(self) -> dict:
        return {"kind": self.kind, "center": self.center, "scale": self.scale}


@dataclass(frozen=True)
class Discrete:
    values: tuple[float, ...]
    masses: tuple[float, ...]

    kind = "discrete"

    def __init__(self, values, masses):
        values = tuple(float(v) for v in values)
        masses = tuple(float(m) for m in masses)
        if len(values) != len(masses) or len(values) < 1:
            raise EffectModelError("discrete needs equal-length nonempty values and masses")
        if any(m < 0 for m in masses):
            raise EffectModelError("discrete masses must be nonnegative")
        total = math.fsum(masses)
        if abs(total - 1.0) > _SUM_TOL:
            raise EffectModelError(f"discrete masses must sum to 1, got {total}")
        masses = tuple(m / total for m in masses)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "masses", masses)

    def mean(self) -> float:
        return math.fsum(v * m for v, m in zip(self.values, self.masses))

    def variance(self) -> float:
        mu = self.mean()
        return math.fsum(m * (v - mu) ** 2 for v, m in zip(self.values, self.masses))

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        idx = rng.choice(len(self.values), size=n, p=np.asarray(self.masses))
        return np.asarray(self.values)[idx]

    def to_json(self) -> dict:
        return {"kind": self.kind, "values": list(self.values), "masses": list(self.masses)}


EffectComponent = PointMass | Uniform | Normal | Discrete

_COMPONENT_KINDS = {cls.kind: cls for cls in (PointMass, Uniform, Normal, Discrete)}


def component_from_json(doc: dict) -> EffectComponent:
    kind = doc.get("kind")
    if kind not in _COMPONENT_KINDS:
        raise EffectModelError(f"unknown component kind {kind!r}")
    params = {k: v for k, v in doc.items() if k not in ("kind", "weight")}
    return _COMPONENT_KINDS[kind](**params)


# ---------------------------------------------------------------------------
# Mixtures


@dataclass(frozen=True)
class EffectDistribution:
    """Weighted mixture of effect components. Weights must sum to 1."""

    components: tuple[tuple[float, EffectComponent], ...]
    units: str = ""

    def __init__(self, components, units: str = ""):
        comps = tuple((float(w), c) for w, c in components)
        if not comps:
            raise EffectModelError("mixture needs at least one component")
        if any(w < 0 for w, _ in comps):
            raise EffectModelError("mixture weights must be nonnegative")
        total = math.fsum(w for w, _ in comps)
        if abs(total - 1.0) > _SUM_TOL:
            raise EffectModelError(f"mixture weights must sum to 1, got {total}")
        comps = tuple((w / total, c) for w, c in comps)
        object.__setattr__(self, "components", comps)
        object.__setattr__(self, "units", units)

    def to_json(self) -> dict:
        doc = {
            "schema_version": SCHEMA_VERSION,
            "components": [{"weight": w, **c.to_json()} for w, c in self.components],
        }
        if self.units:
            doc["units"] = self.units
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "EffectDistribution":
        version = doc.get("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise EffectModelError(
                f"unsupported distribution schema_version {version} (reader supports {SCHEMA_VERSION})"
            )
        comps = doc.get("components")
        if not comps:
            raise EffectModelError("distribution document has no components")
        return cls(
            [(c["weight"], component_from_json(c)) for c in comps],
            units=doc.get("units", ""),
        )


def point_mass_distribution(value: float) -> EffectDistribution:
    return EffectDistribution([(1.0, PointMass(value))])


def mixture_mean(dist: EffectDistribution) -> float:
    """Weight-dot-product of component means."""
    return math.fsum(w * c.mean() for w, c in dist.components)


def mixture_variance(dist: EffectDistribution) -> float:
    """Law of total variance over the mixture components."""
    mu = mixture_mean(dist)
    second = math.fsum(w * (c.variance() + c.mean() ** 2) for w, c in dist.components)
    return max(second - mu**2, 0.0)


def sample(dist: EffectDistribution, n: int, seed: int) -> np.ndarray:
    """n independent draws from the mixture, deterministic given seed."""
    if n < 1:
        raise EffectModelError(f"sample size must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    return sample_with(dist, n, rng)


def sample_with(dist: EffectDistribution, n: int, rng: np.random.Generator) -> np.ndarray:
    weights = np.array([w for w, _ in dist.components])
    which = rng.choice(len(weights), size=n, p=weights)
    out = np.empty(n)
    for i, (_, comp) in enumerate(dist.components):
        mask = which == i
        count = int(mask.sum())
        if count:
            out[mask] = comp.draw(rng, count)
    return out


# ---------------------------------------------------------------------------
# Range -> distribution rule and null mass


@dataclass(frozen=True)
class PlausibleRange:
    """Range of individual effects under real-world conditions."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (self.lo < self.hi):
            raise EffectModelError(f"range requires lo < hi, got ({self.lo}, {self.hi})")


def from_plausible_range(prange: PlausibleRange) -> Normal:
    """Approximate a plausible range by a normal at its midpoint.

    Scale is the half-width, so a (0, X) range becomes Normal(X/2, X/2).
    Deliberately untruncated: rare cases beyond the range stay possible.
    """
    return Normal(center=0.5 * (prange.lo + prange.hi), scale=0.5 * (prange.hi - prange.lo))


def with_null_mass(base: EffectComponent, p_null: float) -> EffectDistribution:
    """Mix a share of exact zero effects (never-activated units) with base."""
    if not (0.0 <= p_null <= 1.0):
        raise EffectModelError(f"p_null must be in [0, 1], got {p_null}")
    return EffectDistribution([(p_null, PointMass(0.0)), (1.0 - p_null, base)])


def heuristic_ate(x: float, p_null: float) -> float:
    """First-guess average effect: (1 - p_null) * x/2 for a (0, x) range."""
    if not (0.0 <= p_null <= 1.0):
        raise EffectModelError(f"p_null must be in [0, 1], got {p_null}")
    return (1.0 - p_null) * 0.5 * x


# ---------------------------------------------------------------------------
# Binary potential-outcome types


@dataclass(frozen=True)
class BinaryTypeModel:
    """Shares of the four potential-outcome types for a binary outcome.

    always: outcome 1 under treatment and control; saved: 1 only under
    treatment; harmed: 1 only under control; never: 0 either way.
    """

    p_always: float
    p_saved: float
    p_harmed: float
    p_never: float

    def __post_init__(self):
        probs = (self.p_always, self.p_saved, self.p_harmed, self.p_never)
        if any(not (0.0 <= p <= 1.0) for p in probs):
            raise EffectModelError(f"type shares must be in [0, 1], got {probs}")
        total = math.fsum(probs)
        if abs(total - 1.0) > _SUM_TOL:
            raise EffectModelError(f"type shares must sum to 1, got {total}")


@dataclass(frozen=True)
class BinaryTypeSummary:
    ate: float
    treat_rate: float
    control_rate: float


def binary_type_ate(model: BinaryTypeModel) -> BinaryTypeSummary:
    """Arm-level outcome rates and their difference."""
    treat = model.p_always + model.p_saved
    control = model.p_always + model.p_harmed
    return BinaryTypeSummary(ate=treat - control, treat_rate=treat, control_rate=control)


def binary_to_distribution(model: BinaryTypeModel) -> EffectDistribution:
    """Individual effects implied by the type shares: +1 saved, -1 harmed, 0 rest."""
    return EffectDistribution(
        [
            (model.p_saved, PointMass(1.0)),
            (model.p_harmed, PointMass(-1.0)),
            (model.p_always + model.p_never, PointMass(0.0)),
        ]
    )


# ---------------------------------------------------------------------------
# Stratified effects


@dataclass(frozen=True)
class Stratum:
    label: str
    effect: float
    population_share: float
    sample_share: float


@dataclass(frozen=True)
class StratifiedEffectCurve:
    """Discretized effect-vs-covariate relationship with two weightings."""

    strata: tuple[Stratum, ...]

    def __init__(self, strata):
        strata = tuple(s if isinstance(s, Stratum) else Stratum(*s) for s in strata)
        if not strata:
            raise EffectModelError("need at least one stratum")
        if any(s.population_share < 0 or s.sample_share < 0 for s in strata):
            raise EffectModelError("shares must be nonnegative")
        for attr in ("population_share", "sample_share"):
            total = math.fsum(getattr(s, attr) for s in strata)
            if abs(total - 1.0) > _SUM_TOL:
                raise EffectModelError(f"{attr}s must sum to 1, got {total}")
        object.__setattr__(self, "strata", strata)


def stratified_ate(curve: StratifiedEffectCurve, weighting: str = "population") -> float:
    """Average effect under population or in-sample weighting."""
    if weighting not in ("population", "sample"):
        raise EffectModelError(f"weighting must be 'population' or 'sample', got {weighting!r}")
    attr = "population_share" if weighting == "population" else "sample_share"
    return math.fsum(s.effect * getattr(s, attr) for s in curve.strata)
