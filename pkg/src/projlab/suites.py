"""Pathwise verification suites: exact inequalities checked on random inputs.

Each suite draws seeded random configurations, evaluates both sides of an
inequality that must hold for every sample, and tallies violations with a
reproducer (seed root + labels + construction) instead of raising, so a CLI
run can report a count and exit nonzero. Tolerances are the floating-point
slack of the evaluation, never statistical.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import bounds, zprocess
from .errors import InvalidInputError
from .linalg import proj_diff_norms, projected_energy, singular_values, trace_form
from .randgen import EntryDistribution, Seed, sample_matrix, sample_projection

C_FAMILIES = ("zero", "ladder", "equal", "rank1", "dense")


def family_c(name: str, m: int, seed: Seed | None = None) -> np.ndarray:
    """Deterministic signal-matrix families used across the suites:
    zero, a strictly decreasing diagonal ladder, an equal spectrum (ties),
    a rank-one spike, and a dense seeded draw with O(1) spectrum."""
    if name == "zero":
        return np.zeros((m, m))
    if name == "ladder":
        return np.diag(np.linspace(3.0, 3.0 / m, m))
    if name == "equal":
        return 2.0 * np.eye(m)
    if name == "rank1":
        out = np.zeros((m, m))
        out[0, 0] = 3.0
        return out
    if name == "dense":
        if seed is None:
            raise InvalidInputError("dense family needs a seed")
        return seed.rng().standard_normal((m, m)) / np.sqrt(m)
    raise InvalidInputError(f"unknown C family {name!r}")


@dataclass(frozen=True)
class Violation:
    suite: str
    detail: str
    reproducer: dict


@dataclass(frozen=True)
class SuiteResult:
    name: str
    checked: int
    violations: tuple[Violation, ...]

    @property
    def passed(self) -> bool:
        return not self.violations


def _reproducer(suite: str, seed: Seed, **extra) -> dict:
    return {"suite": suite, "seed_root": seed.root, "labels": list(seed.labels), **extra}


def prop1_suite(
    m: int, r: int, dist: EntryDistribution, trials: int, seed: Seed
) -> SuiteResult:
    """sup Z1 <= Y(sigma_1) for every sampled (C, E); zero violations allowed."""
    violations = []
    for t in range(trials):
        fam = C_FAMILIES[t % len(C_FAMILIES)]
        child = seed.child(t)
        c = family_c(fam, m, child.child(10_000))
        e = sample_matrix(dist, m, child)
        z1s = zprocess.z1_sup(c, e, r).value
        y = bounds.prop1_Y(singular_values(c), m, r, float(np.linalg.svd(e, compute_uv=False)[0])).Y
        if z1s > y * (1.0 + 1e-8):
            violations.append(Violation(
                "prop1", f"sup Z1 = {z1s} > Y = {y}",
                _reproducer("prop1", child, M=m, r=r, c_family=fam,
                            dist=dist.spec_string()),
            ))
    return SuiteResult("prop1", trials, tuple(violations))


def lemma1_suite(m: int, r: int, trials: int, seed: Seed) -> SuiteResult:
    """tr(A.T (P2 - P1) B) <= sqrt(2 r_M) ||A|| ||B|| ||P2 - P1||_S2 on random
    tuples, plus exact equality on the extremal construction."""
    violations = []
    checked = 0
    for t in range(trials):
        child = seed.child(t)
        rng = child.rng()
        a = rng.standard_normal((m, m))
        b = rng.standard_normal((m, m))
        p1 = sample_projection(m, r, child.child(1))
        p2 = sample_projection(m, r, child.child(2))
        lhs = trace_form(a, p2.to_matrix() - p1.to_matrix(), b)
        rhs = bounds.lemma1_rhs(a, b, p1, p2)
        checked += 1
        if lhs > rhs + 1e-9 * (1.0 + rhs):
            violations.append(Violation(
                "lemma1", f"trace form {lhs} > bound {rhs}",
                _reproducer("lemma1", child, M=m, r=r),
            ))
    for alpha, mu, nu in ((0.5, 2.0, 3.0), (1.0, 1.0, 1.0), (0.3, 0.7, 2.0)):
        if m < 2 * r:
            break
        a, b, p1, p2 = bounds.lemma1_equality_instance(m, r, alpha, mu, nu)
        lhs = trace_form(a, p1.to_matrix() - p2.to_matrix(), b)
        rhs = bounds.lemma1_rhs(a, b, p1, p2)
        checked += 1
        if abs(lhs - rhs) > 1e-10 * max(1.0, rhs):
            violations.append(Violation(
                "lemma1", f"equality instance off: lhs {lhs}, rhs {rhs}",
                _reproducer("lemma1", seed, M=m, r=r, alpha=alpha, mu=mu, nu=nu),
            ))
    return SuiteResult("lemma1", checked, tuple(violations))


def lemma2_suite(m: int, r: int, trials: int, seed: Seed) -> SuiteResult:
    """Drift bounds at Haar-sampled projections: the gap bound always, the
    gated bound whenever its distance condition holds."""
    violations = []
    checked = 0
    for t in range(trials):
        fam = C_FAMILIES[t % len(C_FAMILIES)]
        child = seed.child(t)
        c = family_c(fam, m, child.child(10_000))
        if not c.any():
            continue  # drift is identically zero; nothing to bound
        spectrum = singular_values(c)
        pi = zprocess.oracle_projection(c, r)
        p = sample_projection(m, r, child)
        dist_s2, _ = proj_diff_norms(pi, p)
        drift = projected_energy(p, c) - projected_energy(pi, c)
        rhs_i, rhs_ii, gate = bounds.lemma2_rhs(spectrum, r, dist_s2)
        slack = 1e-9 * (1.0 + float(np.sum(spectrum ** 2)))
        checked += 1
        if drift > rhs_i + slack:
            violations.append(Violation(
                "lemma2", f"drift {drift} > gap bound {rhs_i}",
                _reproducer("lemma2", child, M=m, r=r, c_family=fam),
            ))
        if gate and drift > rhs_ii + slack:
            violations.append(Violation(
                "lemma2", f"drift {drift} > gated bound {rhs_ii}",
                _reproducer("lemma2", child, M=m, r=r, c_family=fam),
            ))
    return SuiteResult("lemma2", checked, tuple(violations))


def decomposition_suite(
    m: int, r: int, dist: EntryDistribution, trials: int, seed: Seed
) -> SuiteResult:
    """Z = Z1 + Z2 at sampled projections; each supremum dominates its
    sampled values; sup Z <= sup Z1 + sup Z2; all suprema nonnegative."""
    violations = []

    def flag(detail, child, fam):
        violations.append(Violation(
            "decomposition", detail,
            _reproducer("decomposition", child, M=m, r=r, c_family=fam,
                        dist=dist.spec_string()),
        ))

    for t in range(trials):
        fam = C_FAMILIES[t % len(C_FAMILIES)]
        child = seed.child(t)
        c = family_c(fam, m, child.child(10_000))
        e = sample_matrix(dist, m, child)
        p = sample_projection(m, r, child.child(1))
        dec = zprocess.z_at(c, e, p, r)
        if abs(dec.z - (dec.z1 + dec.z2)) > 1e-9 * (1.0 + abs(dec.z)):
            flag(f"z != z1 + z2: {dec.z} vs {dec.z1 + dec.z2}", child, fam)
        zs = zprocess.z_sup(c, e, r).value
        z1s = zprocess.z1_sup(c, e, r).value
        z2s = zprocess.z2_sup(c, e, r).value
        scale = 1.0 + abs(z1s) + abs(z2s)
        for name, sup_value, sample_value in (
            ("z_sup", zs, dec.z), ("z1_sup", z1s, dec.z1), ("z2_sup", z2s, dec.z2),
        ):
            if sup_value < sample_value - 1e-9 * scale:
                flag(f"{name} = {sup_value} below sampled value {sample_value}", child, fam)
            if sup_value < -1e-9 * scale:
                flag(f"{name} = {sup_value} negative", child, fam)
        if zs > z1s + z2s + 1e-9 * scale:
            flag(f"sup Z {zs} > sup Z1 + sup Z2 {z1s + z2s}", child, fam)
    return SuiteResult("decomposition", trials, tuple(violations))


def sandwich_suite(max_m: int = 128) -> SuiteResult:
    """r(M-r) <= r_M M <= 2 r(M-r) exhaustively for all M <= max_m, r < M."""
    violations = []
    checked = 0
    for m in range(2, max_m + 1):
        for r in range(1, m):
            checked += 1
            if not bounds.sandwich_holds(m, r):
                violations.append(Violation(
                    "sandwich", f"sandwich fails at M={m}, r={r}",
                    {"suite": "sandwich", "M": m, "r": r},
                ))
    return SuiteResult("sandwich", checked, tuple(violations))


def run_all(
    m: int, r: int, dist: EntryDistribution, trials: int, seed: Seed
) -> list[SuiteResult]:
    """The full verification battery at one (M, r, dist) configuration."""
    return [
        prop1_suite(m, r, dist, trials, seed.child(1)),
        lemma1_suite(m, r, trials, seed.child(2)),
        lemma2_suite(m, r, trials, seed.child(3)),
        decomposition_suite(m, r, dist, trials, seed.child(4)),
        sandwich_suite(max_m=min(128, max(m, 2))),
    ]
