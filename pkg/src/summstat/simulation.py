"""Monte Carlo evaluation of the summary-statistic estimators.

For each (distribution, sample size, scenario, method) grid point the
harness draws ``reps`` fresh samples, computes the true sample mean/SD
from the whole sample and the estimates from the sample's five-number
summary, and averages the per-replication relative errors
(estimate - truth) / truth.

Reproducibility: every variate is produced by inverse transform from a
per-replication uniform stream whose seed derives deterministically
from (master seed, distribution, n, replication index).  Grid points
are therefore order-independent, individually re-creatable, and the
whole run is bit-for-bit a function of its configuration.  Replications
are shared across scenarios and methods of the same (distribution, n)
point, matching how competing estimators are normally compared.
"""

from __future__ import annotations

import hashlib
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from . import estimators
from .estimators import C1, C2, C3, MethodId
from .normal_math import quantile_array

__all__ = [
    "Beta",
    "DEFAULT_SEED",
    "DistributionSpec",
    "Exponential",
    "LogNormal",
    "Normal",
    "SampleSummary",
    "SimulationCell",
    "SimulationConfig",
    "Weibull",
    "preset_study",
    "relative_error",
    "run_grid",
    "run_study",
    "sample",
    "summarize",
    "write_cells_csv",
]

DEFAULT_SEED = 42

CSV_HEADER = "dist,n,scenario,method,avg_rel_err_mean,avg_rel_err_sd,reps,seed"


def _positive(value: float, name: str) -> float:
    value = float(value)
    if not (math.isfinite(value) and value > 0.0):
        raise ValueError(f"{name} must be a positive finite number, got {value!r}")
    return value


@dataclass(frozen=True)
class Normal:
    mu: float
    sigma: float

    def __post_init__(self):
        object.__setattr__(self, "mu", float(self.mu))
        object.__setattr__(self, "sigma", _positive(self.sigma, "sigma"))

    @property
    def label(self) -> str:
        return f"normal:{self.mu:g}:{self.sigma:g}"


@dataclass(frozen=True)
class LogNormal:
    """Parameters on the log scale: exp(mu + sigma * Z)."""

    mu: float
    sigma: float

    def __post_init__(self):
        object.__setattr__(self, "mu", float(self.mu))
        object.__setattr__(self, "sigma", _positive(self.sigma, "sigma"))

    @property
    def label(self) -> str:
        return f"lognormal:{self.mu:g}:{self.sigma:g}"


@dataclass(frozen=True)
class Beta:
    alpha: float
    beta: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", _positive(self.alpha, "alpha"))
        object.__setattr__(self, "beta", _positive(self.beta, "beta"))

    @property
    def label(self) -> str:
        return f"beta:{self.alpha:g}:{self.beta:g}"


@dataclass(frozen=True)
class Exponential:
    rate: float

    def __post_init__(self):
        object.__setattr__(self, "rate", _positive(self.rate, "rate"))

    @property
    def label(self) -> str:
        return f"exponential:{self.rate:g}"


@dataclass(frozen=True)
class Weibull:
    shape: float
    scale: float

    def __post_init__(self):
        object.__setattr__(self, "shape", _positive(self.shape, "shape"))
        object.__setattr__(self, "scale", _positive(self.scale, "scale"))

    @property
    def label(self) -> str:
        return f"weibull:{self.shape:g}:{self.scale:g}"


DistributionSpec = Union[Normal, LogNormal, Beta, Exponential, Weibull]


def _dist_seed_words(dist: DistributionSpec) -> tuple[int, int]:
    # Stable across runs/platforms, unlike hash(): two 32-bit words from
    # a digest of the label.
    digest = hashlib.sha256(dist.label.encode("ascii")).digest()
    return int.from_bytes(digest[:4], "big"), int.from_bytes(digest[4:8], "big")


def replication_stream(
    master_seed: int, dist: DistributionSpec, n: int, rep: int
) -> np.random.Generator:
    """The uniform stream for one replication; the derivation contract
    that makes every grid cell individually reproducible."""
    w0, w1 = _dist_seed_words(dist)
    ss = np.random.SeedSequence([master_seed, w0, w1, n, rep])
    return np.random.Generator(np.random.PCG64(ss))


def _uniform_open(rng: np.random.Generator, size: int) -> np.ndarray:
    u = rng.random(size)
    # random() can return exactly 0.0 (prob 2^-53 per draw); the inverse
    # transforms need the open interval.
    if not u.all():
        u = np.where(u == 0.0, 2.0 ** -53, u)
    return u


def _standard_gamma(rng: np.random.Generator, shape: float, size: int) -> np.ndarray:
    # Marsaglia-Tsang squeeze-rejection, driven by the replication's
    # uniform stream (normals via inverse transform, like everything
    # else in the pipeline).
    if shape < 1.0:
        boost = _uniform_open(rng, size) ** (1.0 / shape)
        return _standard_gamma(rng, shape + 1.0, size) * boost
    d = shape - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    out = np.empty(size)
    filled = 0
    while filled < size:
        want = size - filled
        m = want + (want >> 3) + 8
        x = quantile_array(_uniform_open(rng, m))
        v = (1.0 + c * x) ** 3
        u = _uniform_open(rng, m)
        ok = v > 0.0
        logv = np.log(np.where(ok, v, 1.0))
        ok &= np.log(u) < 0.5 * x * x + d - d * v + d * logv
        accepted = (d * v)[ok][:want]
        out[filled:filled + accepted.size] = accepted
        filled += accepted.size
    return out


def sample(dist: DistributionSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``n`` values from ``dist`` using the given stream."""
    if n < 1:
        raise ValueError(f"sample size must be >= 1, got {n}")
    if isinstance(dist, Normal):
        return dist.mu + dist.sigma * quantile_array(_uniform_open(rng, n))
    if isinstance(dist, LogNormal):
        return np.exp(dist.mu + dist.sigma * quantile_array(_uniform_open(rng, n)))
    if isinstance(dist, Exponential):
        return -np.log1p(-_uniform_open(rng, n)) / dist.rate
    if isinstance(dist, Weibull):
        return dist.scale * (-np.log1p(-_uniform_open(rng, n))) ** (1.0 / dist.shape)
    if isinstance(dist, Beta):
        g1 = _standard_gamma(rng, dist.alpha, n)
        g2 = _standard_gamma(rng, dist.beta, n)
        return g1 / (g1 + g2)
    raise ValueError(f"unknown distribution spec {dist!r}")


@dataclass(frozen=True)
class SampleSummary:
    """Five-number summary plus the whole-sample truth."""

    a: float
    q1: float
    median: float
    q3: float
    b: float
    n: int
    true_mean: float
    true_sd: float

    def to_scenario(self, scenario: str) -> estimators.ScenarioInput:
        if scenario == "C1":
            return C1(a=self.a, m=self.median, b=self.b, n=self.n)
        if scenario == "C2":
            return C2(a=self.a, q1=self.q1, m=self.median, q3=self.q3, b=self.b, n=self.n)
        if scenario == "C3":
            return C3(q1=self.q1, m=self.median, q3=self.q3, n=self.n)
        raise ValueError(f"unknown scenario {scenario!r}")


def summarize(values: Sequence[float]) -> SampleSummary:
    """Order statistics at the exact quartile positions.

    Requires n = 4Q+1 (Q >= 1) so that q1, median and q3 sit exactly on
    the (Q+1)-th, (2Q+1)-th and (3Q+1)-th order statistics.  The truth
    columns use the n-1 denominator for the SD.
    """
    x = np.sort(np.asarray(values, dtype=np.float64))
    n = x.size
    q, rem = divmod(n - 1, 4)
    if rem != 0 or q < 1:
        raise ValueError(f"summaries need n = 4Q+1 with Q >= 1 for exact quartiles, got n={n}")
    return SampleSummary(
        a=float(x[0]),
        q1=float(x[q]),
        median=float(x[2 * q]),
        q3=float(x[3 * q]),
        b=float(x[-1]),
        n=int(n),
        true_mean=float(x.mean()),
        true_sd=float(x.std(ddof=1)),
    )


def relative_error(estimated: float, truth: float) -> float:
    """(estimated - truth) / truth; undefined (raises) for zero truth."""
    if truth == 0.0:
        raise ValueError("relative error is undefined for zero truth")
    return (estimated - truth) / truth


MethodPair = tuple[MethodId, MethodId]


@dataclass(frozen=True)
class SimulationConfig:
    """One distribution crossed with a sample-size grid and methods.

    ``methods`` maps scenario tag -> list of (mean, sd) method pairs.
    Every n must be of the form 4Q+1 (Q >= 1): the summaries place the
    quartiles and median on exact order-statistic positions.
    """

    dist: DistributionSpec
    n_grid: tuple[int, ...]
    reps: int
    master_seed: int = DEFAULT_SEED
    methods: Mapping[str, Sequence[MethodPair]] = field(
        default_factory=lambda: {"C1": [estimators.DEFAULT_METHODS["C1"]]}
    )

    def __post_init__(self):
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        if not self.n_grid:
            raise ValueError("n_grid must not be empty")
        for n in self.n_grid:
            if n < 5 or (n - 1) % 4 != 0:
                raise ValueError(f"grid sizes must be 4Q+1 with Q >= 1, got n={n}")
        if self.reps < 1:
            raise ValueError(f"reps must be >= 1, got {self.reps}")
        if self.master_seed < 0:
            raise ValueError("master_seed must be a non-negative integer")
        methods = {}
        for scenario, pairs in self.methods.items():
            allowed_mean, allowed_sd = estimators.allowed_methods(scenario)
            pairs = tuple((MethodId(mm), MethodId(sm)) for mm, sm in pairs)
            for mm, sm in pairs:
                if mm not in allowed_mean or sm not in allowed_sd:
                    raise ValueError(
                        f"method pair ({mm.value}, {sm.value}) is not valid for scenario {scenario}"
                    )
            methods[scenario] = pairs
        if not methods:
            raise ValueError("at least one scenario with methods is required")
        object.__setattr__(self, "methods", methods)

    @property
    def scenarios(self) -> tuple[str, ...]:
        return tuple(self.methods)


@dataclass(frozen=True)
class SimulationCell:
    """Averaged relative errors for one (dist, n, scenario, method pair)."""

    dist: str
    n: int
    scenario: str
    mean_method: MethodId
    sd_method: MethodId
    avg_rel_err_mean: float
    avg_rel_err_sd: float
    reps: int
    master_seed: int
    seed_lineage: str
    discarded: int = 0

    @property
    def method(self) -> str:
        return f"{self.mean_method.value}+{self.sd_method.value}"


def _run_one_n(config: SimulationConfig, n: int) -> list[SimulationCell]:
    keys = [
        (scenario, pair)
        for scenario in config.methods
        for pair in config.methods[scenario]
    ]
    sums = {key: [0.0, 0.0] for key in keys}
    collected = 0
    rep = 0
    discarded = 0
    while collected < config.reps:
        rng = replication_stream(config.master_seed, config.dist, n, rep)
        rep += 1
        summary = summarize(sample(config.dist, n, rng))
        if summary.true_sd == 0.0 or summary.true_mean == 0.0:
            discarded += 1  # relative error undefined; redraw (prob. 0 for these parents)
            continue
        inputs = {scenario: summary.to_scenario(scenario) for scenario in config.methods}
        for scenario, pair in keys:
            est = estimators.estimate(inputs[scenario], pair[0], pair[1])
            acc = sums[(scenario, pair)]
            acc[0] += relative_error(est.mean, summary.true_mean)
            acc[1] += relative_error(est.sd, summary.true_sd)
        collected += 1
    lineage = f"seedseq(master={config.master_seed},dist={config.dist.label},n={n},rep=0..{rep - 1})"
    return [
        SimulationCell(
            dist=config.dist.label,
            n=n,
            scenario=scenario,
            mean_method=pair[0],
            sd_method=pair[1],
            avg_rel_err_mean=sums[(scenario, pair)][0] / config.reps,
            avg_rel_err_sd=sums[(scenario, pair)][1] / config.reps,
            reps=config.reps,
            master_seed=config.master_seed,
            seed_lineage=lineage,
            discarded=discarded,
        )
        for scenario, pair in keys
    ]


def run_grid(config: SimulationConfig, workers: int = 1) -> list[SimulationCell]:
    """All cells for one configuration, in deterministic grid order.

    ``workers`` > 1 distributes sample-size blocks over threads; the
    per-replication seed derivation makes the result identical to the
    sequential run.
    """
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(lambda n: _run_one_n(config, n), config.n_grid))
    else:
        blocks = [_run_one_n(config, n) for n in config.n_grid]
    return [cell for block in blocks for cell in block]


def run_study(configs: Iterable[SimulationConfig], workers: int = 1) -> list[SimulationCell]:
    """Concatenate the grids of several configurations."""
    cells: list[SimulationCell] = []
    for config in configs:
        cells.extend(run_grid(config, workers=workers))
    return cells


def write_cells_csv(cells: Iterable[SimulationCell], stream) -> None:
    """One row per cell; floats at full precision so runs diff cleanly."""
    stream.write(CSV_HEADER + "\n")
    for cell in cells:
        stream.write(
            f"{cell.dist},{cell.n},{cell.scenario},{cell.method},"
            f"{cell.avg_rel_err_mean!r},{cell.avg_rel_err_sd!r},{cell.reps},{cell.master_seed}\n"
        )


def _q_grid(q_values: Iterable[int]) -> tuple[int, ...]:
    return tuple(4 * int(q) + 1 for q in q_values)


_STUDY_DISTS = {
    "c1-normal": [Normal(50.0, 17.0)],
    "c1-skewed": [
        LogNormal(4.0, 0.3),
        Beta(9.0, 4.0),
        Exponential(10.0),
        Weibull(2.0, 35.0),
    ],
    "c2": [
        Normal(5.0, 1.0),
        LogNormal(5.0, 0.25),
        LogNormal(5.0, 0.5),
        LogNormal(5.0, 1.0),
    ],
    "c3": [
        Normal(50.0, 17.0),
        LogNormal(4.0, 0.3),
        Beta(9.0, 4.0),
        Exponential(10.0),
        Weibull(2.0, 35.0),
    ],
}

_STUDY_DEFAULT_QMAX = {"c1-normal": 250, "c1-skewed": 25, "c2": 50, "c3": 50}


def preset_study(
    name: str,
    reps: int = 1000,
    master_seed: int = DEFAULT_SEED,
    q_values: Sequence[int] | None = None,
    sd_methods: Sequence[MethodId] | None = None,
    dist_filter: str | None = None,
) -> list[SimulationConfig]:
    """Configurations for the four canned studies.

    * ``c1-normal``: N(50, 17), n = 4Q+1 for Q = 1..250, scenario C1,
      SD via Hozo's adaptive rule and the Blom range form.
    * ``c1-skewed``: four skewed distributions, Q = 1..25, same methods.
    * ``c2``: N(5, 1) and three log-normals, Q = 1..50, scenario C2,
      SD via Bland's formula and the combined Blom form.
    * ``c3``: five distributions, Q = 1..50, scenarios C1/C2/C3 side by
      side with each scenario's recommended estimator (exact expected
      IQR for C3).

    ``q_values`` overrides the Q grid; ``sd_methods`` replaces the SD
    method list (single-scenario studies only); ``dist_filter`` keeps
    only distributions whose label starts with the given prefix.
    """
    if name not in _STUDY_DISTS:
        raise ValueError(f"unknown study {name!r}; expected one of {sorted(_STUDY_DISTS)}")
    dists = _STUDY_DISTS[name]
    if dist_filter is not None:
        dists = [d for d in dists if d.label.startswith(dist_filter)]
        if not dists:
            raise ValueError(f"dist filter {dist_filter!r} matches nothing in study {name}")
    n_grid = _q_grid(q_values if q_values is not None else range(1, _STUDY_DEFAULT_QMAX[name] + 1))

    if name in ("c1-normal", "c1-skewed"):
        sd_list = list(sd_methods) if sd_methods else [MethodId.SD_HOZO_ADAPTIVE, MethodId.SD_WAN_BLOM]
        methods = {"C1": [(MethodId.MEAN_SIMPLE, MethodId(sd)) for sd in sd_list]}
    elif name == "c2":
        sd_list = list(sd_methods) if sd_methods else [MethodId.SD_BLAND, MethodId.SD_WAN_BLOM]
        methods = {"C2": [(MethodId.MEAN_SIMPLE, MethodId(sd)) for sd in sd_list]}
    else:
        if sd_methods:
            raise ValueError("the c3 study fixes one method per scenario; --sd-methods not supported")
        methods = {
            "C1": [(MethodId.MEAN_SIMPLE, MethodId.SD_WAN_BLOM)],
            "C2": [(MethodId.MEAN_SIMPLE, MethodId.SD_WAN_BLOM)],
            "C3": [(MethodId.MEAN_SIMPLE, MethodId.SD_WAN_EXACT)],
        }

    return [
        SimulationConfig(dist=dist, n_grid=n_grid, reps=reps, master_seed=master_seed, methods=methods)
        for dist in dists
    ]
