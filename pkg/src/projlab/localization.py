"""Large-M experiments: locating the top singular value of C_M + E_M,
tail conditions on singular-vector coordinates, the covariance quadratic
form and its strong-law trajectories, and accuracy-based rank selection.

Throughout, E_M is the 1/sqrt(M)-normalized noise matrix whose raw entries
have variance sigma^2, so its spectral radius approaches 2 sigma and the
covariance quadratic form u~.T E E.T u~ approaches sigma^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .linalg import as_matrix, load_matrix, singular_values
from .randgen import EntryDistribution, Seed, sample_matrix


@dataclass(frozen=True)
class SequenceCondition:
    """Tail-decay parameters (beta, beta_prime, c) for coordinate sequences."""

    beta: float
    beta_prime: float
    c: float

    def __post_init__(self):
        if not (np.isfinite(self.beta) and self.beta > 1):
            raise InvalidInputError(f"beta must be > 1, got {self.beta}")
        if not (np.isfinite(self.beta_prime) and self.beta_prime > 0):
            raise InvalidInputError(f"beta_prime must be > 0, got {self.beta_prime}")
        if not (np.isfinite(self.c) and self.c > 0):
            raise InvalidInputError(f"c must be > 0, got {self.c}")


@dataclass(frozen=True)
class SingularInterval:
    lower: float
    upper: float


@dataclass(frozen=True)
class RankSelectionConfig:
    """alpha in (0, 1] is the captured-energy fraction; sigma_sq is the known
    entry variance of the noise actually present in the observed matrix."""

    alpha: float
    sigma_sq: float = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.alpha) and 0 < self.alpha <= 1):
            raise InvalidInputError(f"alpha must lie in (0, 1], got {self.alpha}")
        if not (np.isfinite(self.sigma_sq) and self.sigma_sq >= 0):
            raise InvalidInputError(f"sigma_sq must be >= 0, got {self.sigma_sq}")


def singular_interval(lambda1: float, lambda2: float, sigma: float) -> SingularInterval:
    """Asymptotic localization interval for the top singular value of a
    deformed matrix with separated leading singular values:

        [sqrt(lambda1^2 + sigma^2),
         sqrt(lambda1^2 + 4 sigma^2 + 16 sigma^2 lambda1^2/(lambda1^2 - lambda2^2))]
    """
    if not (np.isfinite(lambda1) and np.isfinite(lambda2) and lambda1 > lambda2 >= 0):
        raise InvalidInputError(
            f"need lambda1 > lambda2 >= 0, got {lambda1}, {lambda2}"
        )
    if not (np.isfinite(sigma) and sigma >= 0):
        raise InvalidInputError(f"sigma must be >= 0, got {sigma}")
    gap = lambda1 ** 2 - lambda2 ** 2
    lower = math.sqrt(lambda1 ** 2 + sigma ** 2)
    upper = math.sqrt(lambda1 ** 2 + 4.0 * sigma ** 2 + 16.0 * sigma ** 2 * lambda1 ** 2 / gap)
    return SingularInterval(lower, upper)


def tail_index_B(m: int, beta: float) -> int:
    """B = floor((M^(1/beta) - 1)^beta), clamped to >= 1 since sequence
    indices start at 1 (the raw value is 0 for small M)."""
    if m < 1:
        raise InvalidInputError(f"M must be >= 1, got {m}")
    if not (np.isfinite(beta) and beta > 1):
        raise InvalidInputError(f"beta must be > 1, got {beta}")
    raw = (m ** (1.0 / beta) - 1.0) ** beta if m > 1 else 0.0
    # nudge before floor: m**(1/beta) is inexact for exact roots (e.g. 27^(1/3))
    return max(1, int(math.floor(raw + 1e-9 * max(1.0, raw))))


@dataclass(frozen=True)
class TailVerdict:
    M: int
    B: int
    ratio: float
    bound: float
    holds: bool


def check_tail_condition(u, cond: SequenceCondition) -> list[TailVerdict]:
    """For each prefix length M, does the coordinate-mass ratio
    sum_{i>=B} u_i^2 / sum_{i<=M} u_i^2 stay below c M^(-beta_prime)?"""
    arr = np.asarray(u, dtype=float).ravel()
    if arr.size == 0 or not np.all(np.isfinite(arr)):
        raise InvalidInputError("u must be a non-empty finite sequence")
    sq = arr ** 2
    total = np.cumsum(sq)
    if np.any(total == 0.0):
        raise InvalidInputError("some tested prefix of u is identically zero")
    out = []
    for m in range(1, arr.size + 1):
        b = tail_index_B(m, cond.beta)
        tail = float(np.sum(sq[b - 1 : m]))  # 1-based index B
        ratio = tail / float(total[m - 1])
        bound = cond.c * m ** (-cond.beta_prime)
        out.append(TailVerdict(m, b, ratio, bound, ratio <= bound))
    return out


def covariance_quadratic_form(u, e_norm) -> float:
    """u~.T E E.T u~ with u~ = u/||u|| and E the normalized noise matrix."""
    e = as_matrix(e_norm, square=True, name="E")
    arr = np.asarray(u, dtype=float).ravel()
    if arr.size != e.shape[0]:
        raise InvalidInputError(
            f"u has length {arr.size}, expected {e.shape[0]}"
        )
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError("u contains non-finite values")
    nrm = float(np.linalg.norm(arr))
    if nrm == 0.0:
        raise InvalidInputError("u must not be the zero vector")
    ut = arr / nrm
    w = e.T @ ut
    return float(np.dot(w, w))


def cross_term_statistic(u, v, e_norm) -> float:
    """The interaction statistic u~.T E v~ (vanishes as M grows)."""
    e = as_matrix(e_norm, square=True, name="E")
    uu = np.asarray(u, dtype=float).ravel()
    vv = np.asarray(v, dtype=float).ravel()
    if uu.size != e.shape[0] or vv.size != e.shape[0]:
        raise InvalidInputError("u and v must match the matrix order")
    nu, nv = float(np.linalg.norm(uu)), float(np.linalg.norm(vv))
    if nu == 0.0 or nv == 0.0:
        raise InvalidInputError("u and v must be nonzero")
    return float((uu / nu) @ e @ (vv / nv))


def make_u(rule: str, m: int) -> np.ndarray:
    """Coordinate sequence from a rule string: "ones" | "finite:k" | "file:path"."""
    kind, _, rest = str(rule).strip().partition(":")
    if kind == "ones":
        return np.ones(m)
    if kind == "finite":
        try:
            k = int(rest)
        except ValueError as exc:
            raise InvalidInputError(f"bad finite-support rule {rule!r}") from exc
        if not 1 <= k:
            raise InvalidInputError(f"finite-support size must be >= 1, got {k}")
        out = np.zeros(m)
        out[: min(k, m)] = 1.0
        return out
    if kind == "file":
        arr = load_matrix(rest).ravel()
        if arr.size < m:
            raise InvalidInputError(
                f"u file {rest} has {arr.size} entries, need >= {m}"
            )
        return arr[:m]
    raise InvalidInputError(f"unknown u rule {rule!r}")


def slln_trajectory(
    u_rule: str,
    dist: EntryDistribution,
    m_grid,
    seed: Seed,
) -> list[tuple[int, float]]:
    """One covariance-quadratic-form trajectory along an increasing M grid.

    The grid points are coupled: entries for smaller M are the leading block
    of the largest draw, so the trajectory follows a single realization of
    the doubly indexed entry array (as an almost-sure statement requires).
    """
    grid = [int(m) for m in m_grid]
    if not grid or any(b <= a for a, b in zip(grid, grid[1:])):
        raise InvalidInputError("M grid must be non-empty and strictly increasing")
    if grid[0] < 1:
        raise InvalidInputError("M grid entries must be >= 1")
    raw = sample_matrix(dist, grid[-1], seed, normalization="none")
    out = []
    for m in grid:
        e_norm = raw[:m, :m] / math.sqrt(m)
        out.append((m, covariance_quadratic_form(make_u(u_rule, m), e_norm)))
    return out


def rank_select(spectrum, cfg: RankSelectionConfig) -> int:
    """Smallest r >= 1 whose leading energy fraction reaches alpha."""
    v = np.asarray(spectrum, dtype=float).ravel()
    if v.size == 0 or not np.all(np.isfinite(v)):
        raise InvalidInputError("spectrum must be non-empty and finite")
    energies = np.cumsum(v ** 2)
    total = float(energies[-1])
    if total <= 0.0:
        raise InvalidInputError("spectrum is identically zero")
    for r in range(1, v.size + 1):
        if energies[r - 1] / total >= cfg.alpha:
            return r
    return v.size


def empirical_rank_select(x, cfg: RankSelectionConfig) -> int | None:
    """Rank selection from a noisy observation using bias-corrected energies.

    e_r = max(0, sum_{i<=r} lambda_i(X)^2 - sigma_sq r M) estimates the
    leading signal energy; the denominator is the running peak max_r e_r
    (the corrected energies are not monotone under noise). With sigma_sq = 0
    this reduces exactly to rank_select on the spectrum of X. Returns None
    when every corrected energy is <= 0 (no detectable signal).
    """
    arr = as_matrix(x, square=True, name="X")
    m = arr.shape[0]
    sv = singular_values(arr)
    corrected = np.maximum(
        0.0, np.cumsum(sv ** 2) - cfg.sigma_sq * np.arange(1, m + 1) * m
    )
    peak = float(corrected.max())
    if peak <= 0.0:
        return None
    for r in range(1, m + 1):
        if corrected[r - 1] / peak >= cfg.alpha:
            return r
    return m


# ---------------------------------------------------------------------------
# Experiment drivers (seeded sweeps used by the CLI and the acceptance suite)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IntervalRecord:
    seed_label: int
    observed: float
    contained: bool


def interval_containment_run(
    lambda1: float,
    m: int,
    dist: EntryDistribution,
    n_seeds: int,
    seed: Seed,
    slack: float = 0.2,
) -> tuple[SingularInterval, list[IntervalRecord]]:
    """Top singular values of rank-one C + normalized noise across seeds,
    each checked against the localization interval widened by `slack`."""
    if n_seeds < 1:
        raise InvalidInputError("need at least one seed")
    interval = singular_interval(lambda1, 0.0, math.sqrt(dist.variance()))
    c = np.zeros((m, m))
    c[0, 0] = lambda1
    records = []
    for k in range(n_seeds):
        e = sample_matrix(dist, m, seed.child(k), normalization="inv-sqrt-M")
        observed = float(np.linalg.svd(c + e, compute_uv=False)[0])
        contained = interval.lower - slack <= observed <= interval.upper + slack
        records.append(IntervalRecord(k, observed, contained))
    return interval, records


def spectral_radius_run(
    m: int, dist: EntryDistribution, n_seeds: int, seed: Seed
) -> list[float]:
    """Spectral radii of normalized noise draws (approaches 2 sigma)."""
    out = []
    for k in range(n_seeds):
        e = sample_matrix(dist, m, seed.child(k), normalization="inv-sqrt-M")
        out.append(float(np.linalg.svd(e, compute_uv=False)[0]))
    return out


def cross_term_run(
    u, v, m: int, dist: EntryDistribution, n_seeds: int, seed: Seed
) -> list[float]:
    """Cross-term statistics u~.T E v~ over seeds at one matrix order."""
    out = []
    for k in range(n_seeds):
        e = sample_matrix(dist, m, seed.child(k), normalization="inv-sqrt-M")
        out.append(cross_term_statistic(u, v, e))
    return out
