"""Executable worked-example scenarios and retrospective plausibility checks.

Scenario expected values are frozen constants in JSON fixtures, never
recomputed from the engine, so regressions stay detectable. Each fixture
records where its numbers come from in a free-text provenance field.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from .design import (
    BinaryOutcome,
    ContinuousOutcome,
    diagnostics_mixture,
    pilot_report,
    power_fixed,
    required_n,
    se_conservative_binary,
    PilotResult,
)
from .effects import (
    BinaryTypeModel,
    EffectDistribution,
    binary_to_distribution,
    binary_type_ate,
    mixture_mean,
)


class ScenarioError(KeyError):
    """Unknown scenario name."""


@dataclass(frozen=True)
class ExpectedValue:
    quantity: str
    value: float
    tolerance: float
    provenance: str


@dataclass(frozen=True)
class Scenario:
    name: str
    description: str
    kind: str
    inputs: dict
    expected: tuple[ExpectedValue, ...]


@dataclass(frozen=True)
class ScenarioOutcome:
    name: str
    computed: dict
    checks: tuple[dict, ...]

    @property
    def passed(self) -> bool:
        return all(c["pass"] for c in self.checks)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "computed": self.computed,
            "checks": list(self.checks),
        }

    def table(self) -> str:
        lines = [f"scenario: {self.name}  [{'PASS' if self.passed else 'FAIL'}]"]
        for c in self.checks:
            mark = "ok " if c["pass"] else "FAIL"
            lines.append(
                f"  {mark} {c['quantity']:<28} computed={c['computed']:< 14.6g} "
                f"expected={c['expected']:< 14.6g} tol={c['tolerance']:g}"
            )
        return "\n".join(lines)


def _load_fixtures() -> dict[str, Scenario]:
    out = {}
    fixture_dir = resources.files("effectmix").joinpath("fixtures")
    for entry in sorted(fixture_dir.iterdir(), key=lambda p: p.name):
        if not entry.name.endswith(".json"):
            continue
        doc = json.loads(entry.read_text())
        expected = tuple(
            ExpectedValue(e["quantity"], e["value"], e["tolerance"], e["provenance"])
            for e in doc["expected"]
        )
        out[doc["name"]] = Scenario(
            name=doc["name"],
            description=doc["description"],
            kind=doc["kind"],
            inputs=doc["inputs"],
            expected=expected,
        )
    return out


_REGISTRY: dict[str, Scenario] | None = None


def registry() -> dict[str, Scenario]:
    global _REGISTRY
    if _REGISTRY is None:
        _REGISTRY = _load_fixtures()
    return _REGISTRY


def list_scenarios() -> list[str]:
    return sorted(registry())


# ---------------------------------------------------------------------------
# Per-kind computations


def _compute_binary_types(inputs: dict) -> dict:
    model = BinaryTypeModel(inputs["p_always"], inputs["p_saved"],
                            inputs["p_harmed"], inputs["p_never"])
    summary = binary_type_ate(model)
    return {
        "ate": summary.ate,
        "treat_rate": summary.treat_rate,
        "control_rate": summary.control_rate,
        "distribution_mean": mixture_mean(binary_to_distribution(model)),
    }


def _compute_trial_power(inputs: dict) -> dict:
    n = inputs["n_per_arm"]
    effect = inputs["effect"]
    alpha = inputs.get("alpha", 0.05)
    se = se_conservative_binary(n, n)
    target = inputs.get("target_power", 0.8)
    # effect/se ratio at which power crosses the target, by bisection
    lo, hi = 0.0, 10.0
    while hi - lo > 1e-10:
        mid = 0.5 * (lo + hi)
        if power_fixed(mid, 1.0, alpha) >= target:
            hi = mid
        else:
            lo = mid
    solved = required_n(effect, BinaryOutcome(conservative=True), alpha,
                        target_power=target)
    return {
        "se": se,
        "power": power_fixed(effect, se, alpha),
        "power_threshold_ratio": hi,
        "n_per_arm_required": solved.n_treat,
        "n_total_required": solved.n_total,
    }


def _compute_mixture_ate(inputs: dict) -> dict:
    dist = EffectDistribution.from_json(inputs["distribution"])
    return {"ate": mixture_mean(dist)}


def _compute_pilot(inputs: dict) -> dict:
    pilot = PilotResult(inputs["successes_treat"], inputs["n_treat"],
                        inputs["successes_control"], inputs["n_control"])
    alpha = inputs.get("alpha", 0.05)
    candidates = tuple(inputs.get("candidate_effects", ()))
    report = pilot_report(pilot, alpha, candidate_effects=candidates or None)
    out = {
        "estimate": report.estimate,
        "se": report.se,
        "interval_lo": report.interval_lo,
        "interval_hi": report.interval_hi,
    }
    for effect, mult in report.n_multipliers.items():
        out[f"n_multiplier_{effect:g}"] = mult
    return out


def _compute_scaling_penalty(inputs: dict) -> dict:
    """Sample-size ratio after shrinking the effect and inflating the noise."""
    base_effect = inputs["base_effect"]
    base_sd = inputs.get("base_sd", 1.0)
    alpha = inputs.get("alpha", 0.05)
    target = inputs.get("target_power", 0.8)
    new_effect = base_effect * inputs["effect_factor"]
    new_sd = base_sd * inputs["sd_factor"]
    base = required_n(base_effect, ContinuousOutcome(base_sd), alpha, target_power=target)
    new = required_n(new_effect, ContinuousOutcome(new_sd), alpha, target_power=target)
    return {"n_ratio": new.n_total / base.n_total}


_COMPUTERS = {
    "binary_types": _compute_binary_types,
    "trial_power": _compute_trial_power,
    "mixture_ate": _compute_mixture_ate,
    "pilot": _compute_pilot,
    "scaling_penalty": _compute_scaling_penalty,
}


def run_scenario(name: str) -> ScenarioOutcome:
    reg = registry()
    if name not in reg:
        raise ScenarioError(name)
    scenario = reg[name]
    computed = _COMPUTERS[scenario.kind](scenario.inputs)
    checks = tuple(
        {
            "quantity": e.quantity,
            "computed": computed[e.quantity],
            "expected": e.value,
            "tolerance": e.tolerance,
            "provenance": e.provenance,
            "pass": abs(computed[e.quantity] - e.value) <= e.tolerance,
        }
        for e in scenario.expected
    )
    return ScenarioOutcome(name=name, computed=computed, checks=checks)


def run_all() -> list[ScenarioOutcome]:
    return [run_scenario(name) for name in list_scenarios()]


# ---------------------------------------------------------------------------
# Retrospective plausibility


@dataclass(frozen=True)
class DecompositionRow:
    p_null: float
    magnitude_needed: float


@dataclass(frozen=True)
class PlausibilityReport:
    claimed_effect: float
    claimed_se: float
    implied_power: float
    implied_exaggeration: float | None
    median_significant_magnitude: float | None
    hypothesized_mean: float
    decomposition: tuple[DecompositionRow, ...]

    def to_json(self) -> dict:
        return {
            "claimed_effect": self.claimed_effect,
            "claimed_se": self.claimed_se,
            "implied_power": self.implied_power,
            "implied_exaggeration": (self.implied_exaggeration
                                     if self.implied_exaggeration is not None else "undefined"),
            "median_significant_magnitude": self.median_significant_magnitude,
            "hypothesized_mean": self.hypothesized_mean,
            "decomposition": [
                {"p_null": r.p_null, "magnitude_needed": r.magnitude_needed}
                for r in self.decomposition
            ],
        }

    def table(self) -> str:
        lines = [
            f"claimed effect {self.claimed_effect:g} (se {self.claimed_se:g}); "
            f"hypothesized average {self.hypothesized_mean:g}",
            f"implied power {self.implied_power:.3f}; implied exaggeration "
            + (f"{self.implied_exaggeration:.2f}x" if self.implied_exaggeration is not None
               else "undefined (average near zero)"),
            "for the claimed average to hold, responders would need:",
        ]
        for row in self.decomposition:
            lines.append(
                f"  null share {row.p_null:>4.0%} -> responder effect {row.magnitude_needed:g}"
            )
        return "\n".join(lines)


_P_NULL_GRID = (0.0, 0.25, 0.5, 0.75, 0.9)


def retrospective_plausibility(
    claimed_effect: float,
    claimed_se: float,
    hypothesized: EffectDistribution,
    alpha: float = 0.05,
    draws: int = 1_000_000,
    seed: int = 0,
) -> PlausibilityReport:
    """Interrogate a published claim against a hypothesized effect mix.

    Reports the power and exaggeration the claim's design would have had
    under the hypothesized distribution, and what responders would need
    to average for the claim to hold at various null shares.
    """
    if not (claimed_se > 0):
        raise ValueError(f"claimed_se must be > 0, got {claimed_se}")
    import warnings as _warnings

    with _warnings.catch_warnings():
        _warnings.simplefilter("ignore")
        diag = diagnostics_mixture(hypothesized, claimed_se, alpha, draws=draws, seed=seed)
    decomposition = tuple(
        DecompositionRow(p_null=p, magnitude_needed=claimed_effect / (1.0 - p))
        for p in _P_NULL_GRID
    )
    return PlausibilityReport(
        claimed_effect=claimed_effect,
        claimed_se=claimed_se,
        implied_power=diag.power,
        implied_exaggeration=diag.exaggeration,
        median_significant_magnitude=diag.median_significant_magnitude,
        hypothesized_mean=mixture_mean(hypothesized),
        decomposition=decomposition,
    )
