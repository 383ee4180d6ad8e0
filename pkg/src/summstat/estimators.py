"""Mean and standard-deviation estimators for reported summary statistics.

Clinical trials often report a five-number summary (or part of one)
instead of the mean and SD that meta-analysis needs.  Three reporting
patterns are supported, each with its own estimator family:

* C1: {min, median, max; n}
* C2: {min, q1, median, q3, max; n}
* C3: {q1, median, q3; n}

Mean estimators are weighted combinations of the reported quantiles.
SD estimators divide the range and/or IQR by the expected range/IQR of
a standard-normal sample of the same size (``xi(n)`` / ``eta(n)`` from
:mod:`summstat.order_stats`, exactly or in Blom's closed form), or use
one of the legacy rules kept for comparison: the (b-a)/4 range rule,
Hozo's size-adaptive range rule, Hozo's and Bland's moment-style
formulas, and the Cochrane IQR/1.35 rule.

``estimate`` dispatches a (scenario, method) pair and reports any
adjustments (clamping, Blom fallback) as flags on the result.
"""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

from .order_stats import blom_eta, blom_xi, eta, xi

__all__ = [
    "C1",
    "C2",
    "C3",
    "DEFAULT_METHODS",
    "Estimate",
    "Flag",
    "MethodDispatchError",
    "MethodId",
    "ScenarioInput",
    "ValidationError",
    "allowed_methods",
    "estimate",
    "mean_c1",
    "mean_c2",
    "mean_c3",
    "sd_c1",
    "sd_c2",
    "sd_c3",
]


class ValidationError(ValueError):
    """Summary statistics violate ordering or sample-size constraints."""


class MethodDispatchError(ValueError):
    """Requested method is not defined for the input's scenario."""


class MethodId(str, Enum):
    """Identifiers for the estimation formulas (lowercase wire tokens)."""

    MEAN_SIMPLE = "mean_simple"
    MEAN_FULL = "mean_full"
    SD_RANGE_RULE = "sd_range_rule"
    SD_HOZO_ADAPTIVE = "sd_hozo_adaptive"
    SD_HOZO_EXACT = "sd_hozo_exact"
    SD_WAN_EXACT = "sd_wan_exact"
    SD_WAN_BLOM = "sd_wan_blom"
    SD_BLAND = "sd_bland"
    SD_COCHRANE = "sd_cochrane"


class Flag(str, Enum):
    """Adjustments applied while producing an estimate."""

    SD_CLAMPED_TO_ZERO = "sd_clamped_to_zero"
    BLOM_APPROXIMATION_USED = "blom_approximation_used"
    ETA_FALLBACK_USED = "eta_fallback_used"


def _as_sample_size(n) -> int:
    if isinstance(n, bool):
        raise ValidationError(f"sample size must be an integer, got {n!r}")
    try:
        n = operator.index(n)
    except TypeError:
        raise ValidationError(f"sample size must be an integer, got {n!r}") from None
    if n < 1:
        raise ValidationError(f"sample size must be >= 1, got {n}")
    return n


def _normalize(obj, fields: dict) -> None:
    # Frozen dataclasses: coerce to plain float/int and validate ordering.
    ordered = []
    for name, attr in fields.items():
        try:
            value = float(getattr(obj, attr))
        except (TypeError, ValueError):
            raise ValidationError(f"{name} must be a number, got {getattr(obj, attr)!r}") from None
        if not math.isfinite(value):
            raise ValidationError(f"{name} must be finite, got {value!r}")
        object.__setattr__(obj, attr, value)
        ordered.append((name, value))
    object.__setattr__(obj, "n", _as_sample_size(obj.n))
    for (lo_name, lo), (hi_name, hi) in zip(ordered, ordered[1:]):
        if not lo <= hi:
            raise ValidationError(f"ordering violated: {lo_name}={lo} > {hi_name}={hi}")


@dataclass(frozen=True)
class C1:
    """Reported {min, median, max} with sample size."""

    a: float
    m: float
    b: float
    n: int

    scenario = "C1"

    def __post_init__(self):
        _normalize(self, {"min": "a", "median": "m", "max": "b"})


@dataclass(frozen=True)
class C2:
    """Full five-number summary with sample size."""

    a: float
    q1: float
    m: float
    q3: float
    b: float
    n: int

    scenario = "C2"

    def __post_init__(self):
        _normalize(self, {"min": "a", "q1": "q1", "median": "m", "q3": "q3", "max": "b"})


@dataclass(frozen=True)
class C3:
    """Reported {q1, median, q3} with sample size (no extremes)."""

    q1: float
    m: float
    q3: float
    n: int

    scenario = "C3"

    def __post_init__(self):
        _normalize(self, {"q1": "q1", "median": "m", "q3": "q3"})


ScenarioInput = Union[C1, C2, C3]


@dataclass(frozen=True)
class Estimate:
    """Result of one (scenario, mean method, sd method) evaluation."""

    mean: Optional[float]
    sd: Optional[float]
    mean_method: MethodId
    sd_method: MethodId
    scenario: str
    flags: frozenset = field(default_factory=frozenset)


# Dispatch map: which methods are meaningful for which scenario.
_MEAN_METHODS = {
    "C1": frozenset({MethodId.MEAN_SIMPLE, MethodId.MEAN_FULL}),
    "C2": frozenset({MethodId.MEAN_SIMPLE, MethodId.MEAN_FULL}),
    "C3": frozenset({MethodId.MEAN_SIMPLE}),
}
_SD_METHODS = {
    "C1": frozenset({
        MethodId.SD_RANGE_RULE,
        MethodId.SD_HOZO_ADAPTIVE,
        MethodId.SD_HOZO_EXACT,
        MethodId.SD_WAN_EXACT,
        MethodId.SD_WAN_BLOM,
    }),
    "C2": frozenset({MethodId.SD_BLAND, MethodId.SD_WAN_EXACT, MethodId.SD_WAN_BLOM}),
    "C3": frozenset({MethodId.SD_COCHRANE, MethodId.SD_WAN_EXACT, MethodId.SD_WAN_BLOM}),
}

# Recommended defaults per scenario: quantile-weighted mean plus the
# Blom-form SD (valid for any n >= 2, no quadrature needed).
DEFAULT_METHODS = {
    "C1": (MethodId.MEAN_SIMPLE, MethodId.SD_WAN_BLOM),
    "C2": (MethodId.MEAN_SIMPLE, MethodId.SD_WAN_BLOM),
    "C3": (MethodId.MEAN_SIMPLE, MethodId.SD_WAN_BLOM),
}


def allowed_methods(scenario: str) -> tuple[frozenset, frozenset]:
    """(mean methods, sd methods) defined for ``scenario``."""
    try:
        return _MEAN_METHODS[scenario], _SD_METHODS[scenario]
    except KeyError:
        raise ValueError(f"unknown scenario {scenario!r}") from None


def mean_c1(inp: C1, method: MethodId = MethodId.MEAN_SIMPLE) -> float:
    """Mean from {a, m, b}: (a + 2m + b)/4, optionally with the O(1/n)
    correction term (a - 2m + b)/(4n) from the order-statistic bounds."""
    simple = (inp.a + 2.0 * inp.m + inp.b) / 4.0
    if method is MethodId.MEAN_SIMPLE:
        return simple
    if method is MethodId.MEAN_FULL:
        return simple + (inp.a - 2.0 * inp.m + inp.b) / (4.0 * inp.n)
    raise MethodDispatchError(f"{method.value} is not a C1 mean method")


def mean_c2(inp: C2, method: MethodId = MethodId.MEAN_SIMPLE) -> float:
    """Mean from the five-number summary: (a + 2q1 + 2m + 2q3 + b)/8.

    The full variant averages the lower/upper order-statistic bounds,
    adding (3a + 3b - 2(q1 + m + q3))/(8n); it coincides with the simple
    form for symmetric summaries and as n grows.
    """
    simple = (inp.a + 2.0 * (inp.q1 + inp.m + inp.q3) + inp.b) / 8.0
    if method is MethodId.MEAN_SIMPLE:
        return simple
    if method is MethodId.MEAN_FULL:
        correction = (3.0 * (inp.a + inp.b) - 2.0 * (inp.q1 + inp.m + inp.q3)) / (8.0 * inp.n)
        return simple + correction
    raise MethodDispatchError(f"{method.value} is not a C2 mean method")


def mean_c3(inp: C3, method: MethodId = MethodId.MEAN_SIMPLE) -> float:
    """Mean from quartiles only: (q1 + m + q3)/3."""
    if method is not MethodId.MEAN_SIMPLE:
        raise MethodDispatchError(f"{method.value} is not a C3 mean method")
    return (inp.q1 + inp.m + inp.q3) / 3.0


def _clamped_sqrt(variance: float) -> tuple[float, frozenset]:
    # Moment-style formulas can go (slightly) negative on extreme
    # inputs; batch runs must not abort, so clamp and flag.
    if variance < 0.0:
        return 0.0, frozenset({Flag.SD_CLAMPED_TO_ZERO})
    return math.sqrt(variance), frozenset()


def _require_n2(n: int, method: MethodId) -> None:
    if n < 2:
        raise ValueError(f"{method.value} needs a sample size of at least 2, got n={n}")


def _sd_c1_impl(inp: C1, method: MethodId) -> tuple[float, frozenset]:
    a, m, b, n = inp.a, inp.m, inp.b, inp.n
    _require_n2(n, method)
    if method is MethodId.SD_RANGE_RULE:
        return (b - a) / 4.0, frozenset()
    if method is MethodId.SD_HOZO_ADAPTIVE:
        if n <= 15:
            return math.sqrt(((b - a) ** 2 + (a - 2.0 * m + b) ** 2 / 4.0) / 12.0), frozenset()
        if n <= 70:
            return (b - a) / 4.0, frozenset()
        return (b - a) / 6.0, frozenset()
    if method is MethodId.SD_HOZO_EXACT:
        mean_sq = n * (a + 2.0 * m + b) ** 2 / 16.0
        sum_sq = a * a + m * m + b * b + (n - 3.0) / 2.0 * ((a + m) ** 2 + (m + b) ** 2) / 4.0
        return _clamped_sqrt((sum_sq - mean_sq) / (n - 1.0))
    if method is MethodId.SD_WAN_EXACT:
        return (b - a) / xi(n), frozenset()
    if method is MethodId.SD_WAN_BLOM:
        return (b - a) / blom_xi(n), frozenset()
    raise MethodDispatchError(f"{method.value} is not a C1 sd method")


def sd_c1(inp: C1, method: MethodId = MethodId.SD_WAN_BLOM) -> float:
    """SD from {a, m, b; n}; see the module docstring for the methods."""
    return _sd_c1_impl(inp, method)[0]


def _eta_term(n: int) -> tuple[float, frozenset]:
    # Exact expected IQR when the quartile positions are exact
    # (n = 4Q+1); otherwise fall back to the Blom form and say so.
    q, rem = divmod(n - 1, 4)
    if rem == 0 and q >= 1:
        return eta(n), frozenset()
    return blom_eta(n), frozenset({Flag.ETA_FALLBACK_USED, Flag.BLOM_APPROXIMATION_USED})


def _sd_c2_impl(inp: C2, method: MethodId) -> tuple[float, frozenset]:
    a, q1, m, q3, b, n = inp.a, inp.q1, inp.m, inp.q3, inp.b, inp.n
    _require_n2(n, method)
    if method is MethodId.SD_BLAND:
        total = a + 2.0 * (q1 + m + q3) + b
        variance = (
            (a * a + 2.0 * (q1 * q1 + m * m + q3 * q3) + b * b) / 16.0
            + (a * q1 + q1 * m + m * q3 + q3 * b) / 8.0
            - total * total / 64.0
        )
        return _clamped_sqrt(variance)
    if method is MethodId.SD_WAN_EXACT:
        eta_n, flags = _eta_term(n)
        return (b - a) / (2.0 * xi(n)) + (q3 - q1) / (2.0 * eta_n), flags
    if method is MethodId.SD_WAN_BLOM:
        return (b - a) / (2.0 * blom_xi(n)) + (q3 - q1) / (2.0 * blom_eta(n)), frozenset()
    raise MethodDispatchError(f"{method.value} is not a C2 sd method")


def sd_c2(inp: C2, method: MethodId = MethodId.SD_WAN_BLOM) -> float:
    """SD from the five-number summary; average of the range- and
    IQR-based estimates for the combined methods."""
    return _sd_c2_impl(inp, method)[0]


def _sd_c3_impl(inp: C3, method: MethodId) -> tuple[float, frozenset]:
    iqr = inp.q3 - inp.q1
    if method is MethodId.SD_COCHRANE:
        return iqr / 1.35, frozenset()
    if method is MethodId.SD_WAN_EXACT:
        _require_n2(inp.n, method)
        eta_n, flags = _eta_term(inp.n)
        return iqr / eta_n, flags
    if method is MethodId.SD_WAN_BLOM:
        _require_n2(inp.n, method)
        return iqr / blom_eta(inp.n), frozenset()
    raise MethodDispatchError(f"{method.value} is not a C3 sd method")


def sd_c3(inp: C3, method: MethodId = MethodId.SD_WAN_BLOM) -> float:
    """SD from quartiles only (IQR divided by the expected normal IQR,
    or by the Cochrane constant 1.35)."""
    return _sd_c3_impl(inp, method)[0]


_MEAN_IMPL = {"C1": mean_c1, "C2": mean_c2, "C3": mean_c3}
_SD_IMPL = {"C1": _sd_c1_impl, "C2": _sd_c2_impl, "C3": _sd_c3_impl}


def _coerce_method(value, kind: str) -> MethodId:
    if isinstance(value, MethodId):
        return value
    try:
        return MethodId(value)
    except ValueError:
        tokens = ", ".join(m.value for m in MethodId)
        raise MethodDispatchError(f"unknown {kind} method {value!r}; valid tokens: {tokens}") from None


def estimate(
    inp: ScenarioInput,
    mean_method: Union[MethodId, str, None] = None,
    sd_method: Union[MethodId, str, None] = None,
) -> Estimate:
    """Estimate mean and SD for a summary, dispatching on its scenario.

    Unspecified methods fall back to the scenario defaults
    (:data:`DEFAULT_METHODS`).  A method that is not defined for the
    input's scenario raises :class:`MethodDispatchError` naming the
    allowed set.
    """
    scenario = inp.scenario
    default_mean, default_sd = DEFAULT_METHODS[scenario]
    mean_method = default_mean if mean_method is None else _coerce_method(mean_method, "mean")
    sd_method = default_sd if sd_method is None else _coerce_method(sd_method, "sd")

    allowed_mean, allowed_sd = allowed_methods(scenario)
    if mean_method not in allowed_mean:
        raise MethodDispatchError(
            f"{mean_method.value} is not defined for scenario {scenario}; "
            f"allowed: {sorted(m.value for m in allowed_mean)}"
        )
    if sd_method not in allowed_sd:
        raise MethodDispatchError(
            f"{sd_method.value} is not defined for scenario {scenario}; "
            f"allowed: {sorted(m.value for m in allowed_sd)}"
        )

    mean = _MEAN_IMPL[scenario](inp, mean_method)
    sd, flags = _SD_IMPL[scenario](inp, sd_method)
    return Estimate(
        mean=mean,
        sd=sd,
        mean_method=mean_method,
        sd_method=sd_method,
        scenario=scenario,
        flags=flags,
    )
