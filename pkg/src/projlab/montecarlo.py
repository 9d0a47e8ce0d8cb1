"""Seeded, reproducible Monte Carlo estimation over independent noise draws.

Replication k of an experiment draws its matrix from the stream
(seed root, (experiment, k)), so results are independent of scheduling and
worker count; aggregation always runs in replication order with compensated
summation. Every replication re-checks the pathwise inequalities
(sup Z1 <= Y and sup Z <= sup Z1 + sup Z2) before aggregation and aborts with
a reproducer seed on violation; failed replications are fatal, never skipped.

The hot path works with singular/eigen values only (no factor matrices), with
exact fast paths for C = 0 (the interaction matrix vanishes and X is bitwise
E, so its spectrum is reused).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import bounds
from .errors import InvalidInputError, ReplicationFailureError
from .linalg import as_matrix, load_matrix, projected_energy, singular_values
from .randgen import NORMALIZATIONS, EntryDistribution, Seed, sample_matrix
from .zprocess import interaction_matrix, oracle_projection

STATISTICS = ("z_sup", "z1_sup", "z2_sup", "sigma1", "sigma1_sq", "unbiased_energy")


@dataclass(frozen=True)
class ExperimentConfig:
    """One Monte Carlo configuration; reps replications of E for a fixed C."""

    M: int
    r: int
    c_spec: str
    dist: EntryDistribution
    reps: int = 200
    seed: int = 0
    normalization: str = "none"
    experiment: int = 0
    verify_pathwise: bool = True

    def __post_init__(self):
        if self.M < 2 or not 1 <= self.r < self.M:
            raise InvalidInputError(f"need 1 <= r < M, got r={self.r}, M={self.M}")
        if self.reps < 2:
            raise InvalidInputError(f"reps must be >= 2, got {self.reps}")
        if self.normalization not in NORMALIZATIONS:
            raise InvalidInputError(f"unknown normalization {self.normalization!r}")

    def entry_variance(self) -> float:
        var = self.dist.variance()
        return var / self.M if self.normalization == "inv-sqrt-M" else var

    def entry_fourth_moment(self) -> float:
        m4 = self.dist.fourth_moment()
        return m4 / self.M ** 2 if self.normalization == "inv-sqrt-M" else m4


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    stderr: float
    n: int
    min: float
    max: float


def build_c(spec: str, m: int) -> np.ndarray:
    """Deterministic signal matrix from the mini-language:
    "zero" | "diag:v1,v2,..." | "rank1:lambda=x" | "file:path"."""
    kind, _, rest = str(spec).strip().partition(":")
    if kind == "zero":
        return np.zeros((m, m))
    if kind == "diag":
        try:
            values = [float(x) for x in rest.split(",") if x != ""]
        except ValueError as exc:
            raise InvalidInputError(f"bad diag spec {spec!r}: {exc}") from exc
        if not values or len(values) > m:
            raise InvalidInputError(f"diag spec needs 1..M values, got {len(values)}")
        out = np.zeros((m, m))
        out[: len(values), : len(values)] = np.diag(values)
        return out
    if kind == "rank1":
        key, _, val = rest.partition("=")
        if key != "lambda":
            raise InvalidInputError(f"rank1 spec must be rank1:lambda=x, got {spec!r}")
        try:
            lam = float(val)
        except ValueError as exc:
            raise InvalidInputError(f"bad rank1 spec {spec!r}: {exc}") from exc
        out = np.zeros((m, m))
        out[0, 0] = lam
        return out
    if kind == "file":
        arr = load_matrix(rest)
        if arr.shape != (m, m):
            raise InvalidInputError(
                f"matrix file {rest} has shape {arr.shape}, expected ({m}, {m})"
            )
        return arr
    raise InvalidInputError(f"unknown C spec {spec!r}")


class _Experiment:
    """Prepared per-config state shared read-only by all replications."""

    def __init__(self, config: ExperimentConfig, statistics: tuple[str, ...]):
        for name in statistics:
            if name not in STATISTICS:
                raise InvalidInputError(f"unknown statistic {name!r}")
        self.config = config
        self.statistics = statistics
        self.c = as_matrix(build_c(config.c_spec, config.M), square=True)
        self.c_is_zero = not self.c.any()
        self.spectrum_c = (
            np.zeros(config.M) if self.c_is_zero else singular_values(self.c)
        )
        self.pi = oracle_projection(self.c, config.r)
        need = set(statistics)
        ride = config.verify_pathwise
        self.need_sv_e = ride or bool(need & {"sigma1", "sigma1_sq", "z2_sup"})
        self.need_sv_x = ride or "z_sup" in need
        self.need_z1 = ride or "z1_sup" in need

    def replicate(self, k: int) -> dict[str, float]:
        cfg = self.config
        seed = Seed(cfg.seed, (cfg.experiment, k))
        try:
            return self._replicate(seed)
        except ReplicationFailureError:
            raise
        except Exception as exc:
            raise ReplicationFailureError(
                str(exc), index=k, seed_root=cfg.seed, labels=seed.labels
            ) from exc

    def _replicate(self, seed: Seed) -> dict[str, float]:
        cfg = self.config
        r = cfg.r
        e = sample_matrix(cfg.dist, cfg.M, seed, cfg.normalization)
        x = e if self.c_is_zero else self.c + e

        sv_e = sv_x = None
        if self.need_sv_e:
            sv_e = np.linalg.svd(e, compute_uv=False)
        if self.need_sv_x:
            sv_x = sv_e if self.c_is_zero else np.linalg.svd(x, compute_uv=False)

        pi_energy_e = projected_energy(self.pi, e) if sv_e is not None else None
        z2v = (
            float(np.sum(sv_e[:r] ** 2)) - pi_energy_e
            if sv_e is not None
            else None
        )
        zsv = None
        if sv_x is not None:
            pi_energy_x = pi_energy_e if self.c_is_zero else projected_energy(self.pi, x)
            zsv = float(np.sum(sv_x[:r] ** 2)) - pi_energy_x
        z1v = None
        if self.need_z1:
            if self.c_is_zero:
                z1v = 0.0
            else:
                s = interaction_matrix(self.c, e)
                w = np.linalg.eigvalsh(s)
                z1v = float(np.sum(w[-r:])) - float(np.vdot(self.pi.basis, s @ self.pi.basis))

        if cfg.verify_pathwise:
            y = bounds.prop1_Y(self.spectrum_c, cfg.M, r, float(sv_e[0])).Y
            if z1v > y * (1.0 + 1e-8):
                raise ReplicationFailureError(
                    f"pathwise bound violated: sup Z1 = {z1v} > Y = {y}",
                    index=seed.labels[-1], seed_root=cfg.seed, labels=seed.labels,
                )
            slack = 1e-9 * (1.0 + abs(z1v) + abs(z2v))
            if zsv > z1v + z2v + slack:
                raise ReplicationFailureError(
                    f"sup Z = {zsv} exceeds sup Z1 + sup Z2 = {z1v + z2v}",
                    index=seed.labels[-1], seed_root=cfg.seed, labels=seed.labels,
                )

        out = {}
        for name in self.statistics:
            if name == "z_sup":
                out[name] = zsv
            elif name == "z1_sup":
                out[name] = z1v
            elif name == "z2_sup":
                out[name] = z2v
            elif name == "sigma1":
                out[name] = float(sv_e[0])
            elif name == "sigma1_sq":
                out[name] = float(sv_e[0]) ** 2
            else:  # unbiased_energy
                out[name] = (
                    projected_energy(self.pi, x)
                    - cfg.entry_variance() * r * cfg.M
                )
        return out


def _aggregate(values: list[float]) -> MCEstimate:
    n = len(values)
    mean = math.fsum(values) / n
    var = math.fsum((v - mean) ** 2 for v in values) / (n - 1)
    return MCEstimate(
        mean=mean, stderr=math.sqrt(var / n), n=n,
        min=min(values), max=max(values),
    )


def estimate_many(
    config: ExperimentConfig,
    statistics: tuple[str, ...] | list[str],
    workers: int = 1,
) -> dict[str, MCEstimate]:
    """Estimate several statistics on one shared replication stream."""
    exp = _Experiment(config, tuple(statistics))
    if workers <= 1:
        rows = [exp.replicate(k) for k in range(config.reps)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(exp.replicate, range(config.reps)))
    return {
        name: _aggregate([row[name] for row in rows]) for name in exp.statistics
    }


def estimate(config: ExperimentConfig, statistic: str, workers: int = 1) -> MCEstimate:
    """Monte Carlo estimate of one statistic; bit-identical across runs and
    worker counts for a fixed config."""
    return estimate_many(config, (statistic,), workers=workers)[statistic]


@dataclass(frozen=True)
class RatioRow:
    config: ExperimentConfig
    estimate: MCEstimate
    thm3_value: float
    ratio: float


@dataclass(frozen=True)
class RatioReport:
    rows: tuple[RatioRow, ...]

    @property
    def max_ratio(self) -> float:
        return max(row.ratio for row in self.rows)


def ratio_report(
    configs: list[ExperimentConfig] | tuple[ExperimentConfig, ...],
    workers: int = 1,
) -> RatioReport:
    """Empirical calibration of the universal constant: for each config the
    ratio of the Monte Carlo mean of sup Z to the moment bound value."""
    if not configs:
        raise InvalidInputError("ratio_report needs a non-empty config grid")
    rows = []
    for config in configs:
        est = estimate(config, "z_sup", workers=workers)
        spectrum = singular_values(build_c(config.c_spec, config.M))
        report = bounds.thm3_bound(
            spectrum, config.M, config.r,
            config.entry_variance(), config.entry_fourth_moment(),
        )
        rows.append(
            RatioRow(config, est, report.thm3_value, est.mean / report.thm3_value)
        )
    rows.sort(key=lambda row: (row.config.M, row.config.r))
    return RatioReport(tuple(rows))
