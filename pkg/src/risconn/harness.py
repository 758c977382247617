"""Monte Carlo comparison of link-selection schemes over parameter sweeps.

Seeding: each sweep cell ``(value index i, iteration k)`` samples its
scenario with the seed ``SeedSequence(master, spawn_key=(i, k))``, so a
cell's draws do not depend on how many iterations other cells run.  The
random scheme draws from ``SeedSequence(scenario_seed, spawn_key=(1,))``.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field

import numpy as np

from risconn.channel import PhaseMode, pairwise_ris_links
from risconn.config import ExperimentConfig
from risconn.errors import ConfigurationError
from risconn.graph import build_graph, laplacian
from risconn.optimizer import (
    Scheme,
    SolverSettings,
    case1_linear_search,
    enumerate_candidates,
    exhaustive_oracle,
    original_scheme,
    random_scheme,
    sdp_relaxation_scheme,
)
from risconn.scenario import Scenario

SWEPT_PARAMETERS = ("num_uav", "num_ue", "gamma0_ris")
CSV_HEADER = (
    "scheme",
    "swept_parameter",
    "swept_value",
    "mean_lambda2",
    "std_lambda2",
    "iterations",
    "fraction_noop",
)


def derive_seed(master: int, *keys: int) -> int:
    """64-bit child seed of ``master`` for the spawn key ``keys``."""
    seq = np.random.SeedSequence(master, spawn_key=tuple(int(k) for k in keys))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class InstanceResult:
    lambda2: dict[Scheme, float]
    num_candidates: int

    @property
    def noop(self) -> bool:
        return self.num_candidates == 0


def run_instance(
    sc: Scenario,
    schemes,
    phase_mode: PhaseMode | str = PhaseMode.PAPER,
    settings: SolverSettings = SolverSettings(),
    ue: int = 0,
) -> InstanceResult:
    """Evaluate each scheme on one scenario (same graph, same candidates).

    ``ue`` is the designated UE (0-based) for the linear-search scheme.
    """
    schemes = [Scheme(s) for s in schemes]
    g = build_graph(sc)
    L = laplacian(g)
    links = pairwise_ris_links(sc, phase_mode)
    cands = enumerate_candidates(sc, g, phase_mode=phase_mode, links=links)
    out = {}
    for scheme in schemes:
        if scheme is Scheme.ORIGINAL:
            res = original_scheme(L)
        elif scheme is Scheme.RANDOM:
            res = random_scheme(L, cands, derive_seed(sc.seed, 1))
        elif scheme is Scheme.LINEAR:
            if not 0 <= ue < sc.num_ue:
                raise ConfigurationError(f"designated UE {ue} out of range for {sc.num_ue} UEs")
            res = case1_linear_search(sc, g, [c for c in cands if c.ue == ue])
        elif scheme is Scheme.SDP:
            res = sdp_relaxation_scheme(L, cands, settings)
        else:
            res = exhaustive_oracle(L, cands)
        out[scheme] = res.lambda2_after
    return InstanceResult(lambda2=out, num_candidates=len(cands))


@dataclass(frozen=True)
class SweepSpec:
    swept_parameter: str
    values: tuple
    iterations: int = 500
    schemes: tuple = (Scheme.ORIGINAL, Scheme.RANDOM, Scheme.SDP, Scheme.EXHAUSTIVE)
    base: ExperimentConfig = field(default_factory=ExperimentConfig)
    seed: int = 0

    def __post_init__(self):
        if self.swept_parameter not in SWEPT_PARAMETERS:
            raise ConfigurationError(
                f"swept_parameter must be one of {SWEPT_PARAMETERS}, got {self.swept_parameter!r}"
            )
        if self.iterations < 1:
            raise ConfigurationError("iterations must be >= 1")
        if not self.values:
            raise ConfigurationError("sweep values must be non-empty")
        if list(self.values) != sorted(self.values):
            raise ConfigurationError("sweep values must be sorted ascending")
        if not 0 <= self.seed < 2**64:
            raise ConfigurationError("seed must be an unsigned 64-bit integer")
        object.__setattr__(self, "schemes", tuple(Scheme(s) for s in self.schemes))

    def config_for(self, value) -> ExperimentConfig:
        if self.swept_parameter == "gamma0_ris":
            return self.base.with_overrides(gamma0_ris=float(value))
        return self.base.with_overrides(**{self.swept_parameter: int(value)})


@dataclass(frozen=True)
class SweepRecord:
    scheme: Scheme
    swept_parameter: str
    swept_value: float
    mean_lambda2: float
    std_lambda2: float
    num_iterations: int
    fraction_noop: float


def _mean_std(samples) -> tuple[float, float]:
    n = len(samples)
    mean = math.fsum(samples) / n
    var = math.fsum((x - mean) ** 2 for x in samples) / n
    return mean, math.sqrt(var)


def run_sweep(spec: SweepSpec, progress=None) -> list[SweepRecord]:
    """Aggregate per-scheme mean / population std of lambda_2 per swept value.

    Records are ordered by swept value, then by ``spec.schemes`` order.
    ``progress``, if given, is called as ``progress(value, iteration)``.
    """
    records = []
    for i, value in enumerate(spec.values):
        cfg = spec.config_for(value)
        samples = {s: [] for s in spec.schemes}
        noops = 0
        for k in range(spec.iterations):
            sc = cfg.scenario(seed=derive_seed(spec.seed, i, k))
            res = run_instance(sc, spec.schemes, cfg.phase_mode, cfg.solver)
            noops += res.noop
            for s in spec.schemes:
                samples[s].append(res.lambda2[s])
            if progress is not None:
                progress(value, k)
        for s in spec.schemes:
            mean, std = _mean_std(samples[s])
            records.append(
                SweepRecord(
                    scheme=s,
                    swept_parameter=spec.swept_parameter,
                    swept_value=value,
                    mean_lambda2=mean,
                    std_lambda2=std,
                    num_iterations=spec.iterations,
                    fraction_noop=noops / spec.iterations,
                )
            )
    return records


def _fmt(x) -> str:
    return f"{x:.9g}"


def write_csv(records, fh) -> None:
    """Write sweep records as CSV (9 significant digits) to an open text stream."""
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in records:
        writer.writerow(
            [
                r.scheme.value,
                r.swept_parameter,
                _fmt(r.swept_value),
                _fmt(r.mean_lambda2),
                _fmt(r.std_lambda2),
                r.num_iterations,
                _fmt(r.fraction_noop),
            ]
        )


def emit_csv(records, path) -> None:
    try:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            write_csv(records, fh)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write CSV to {os.fspath(path)}: {exc.strerror}") from exc
