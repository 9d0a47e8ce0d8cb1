"""The projection-excess process Z, its split Z = Z1 + Z2, and exact suprema.

For a signal matrix C, noise matrix E, X = C + E, and the oracle projection
pi_r maximizing ||P C||_S2, the process over rank-r projections P is

    Z(P)  = ||P X||^2 - ||pi_r X||^2
    Z1(P) = ||P C||^2 - ||pi_r C||^2 + 2 tr(E.T (P - pi_r) C)
    Z2(P) = ||P E||^2 - ||pi_r E||^2

All three suprema over the projection manifold reduce to spectral problems:
Z attains its supremum at the top-r projection of X, Z2 at the top-r
projection of E, and Z1(P) = tr(P S) - tr(pi_r S) for the symmetric matrix
S = C C.T + C E.T + E C.T, so its supremum is the top-r eigenvalue sum of S.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidInputError
from .linalg import (
    OrthoProjection,
    as_matrix,
    best_rank_r_projection,
    projected_energy,
    projected_trace,
    sym_top_r,
)


@dataclass(frozen=True)
class ZDecomposition:
    """Z, Z1, Z2 evaluated at one projection; z = z1 + z2 up to roundoff."""

    z: float
    z1: float
    z2: float
    at: OrthoProjection


@dataclass(frozen=True)
class SupResult:
    """Supremum value and a location attaining it (canonical under ties)."""

    value: float
    maximizer: OrthoProjection


@lru_cache(maxsize=16)  # keys hold C verbatim; keep the footprint modest at large M
def _oracle_basis(buf: bytes, m: int, r: int) -> np.ndarray:
    c = np.frombuffer(buf, dtype=float).reshape(m, m)
    basis = best_rank_r_projection(c, r).basis
    basis.setflags(write=False)
    return basis


def oracle_projection(c, r: int) -> OrthoProjection:
    """Best rank-r projection of C, cached per (C, r).

    Recomputation is bit-identical (deterministic tie-break), and cache writes
    are idempotent, so concurrent readers are safe.
    """
    arr = as_matrix(c, square=True, name="C")
    if not 1 <= r <= arr.shape[0]:
        raise InvalidInputError(f"rank r={r} out of range for M={arr.shape[0]}")
    buf = np.ascontiguousarray(arr).tobytes()
    return OrthoProjection(_oracle_basis(buf, arr.shape[0], r))


def _check_pair(c, e) -> tuple[np.ndarray, np.ndarray]:
    cc = as_matrix(c, square=True, name="C")
    ee = as_matrix(e, square=True, name="E")
    if cc.shape != ee.shape:
        raise InvalidInputError(f"C and E shapes differ: {cc.shape} vs {ee.shape}")
    return cc, ee


def interaction_matrix(c, e) -> np.ndarray:
    """S = C C.T + C E.T + E C.T, built bitwise-symmetric as K + K.T."""
    cc, ee = _check_pair(c, e)
    k = cc @ (0.5 * cc + ee).T
    return k + k.T


def _tr_proj_sym(p: OrthoProjection, s: np.ndarray) -> float:
    """tr(P s) for symmetric s: tr(basis.T s basis)."""
    return float(np.vdot(p.basis, s @ p.basis))


def z_at(c, e, p_tilde: OrthoProjection, r: int) -> ZDecomposition:
    """Evaluate Z, Z1, Z2 at one projection (oracle pi_r computed and cached)."""
    cc, ee = _check_pair(c, e)
    if p_tilde.dim != cc.shape[0] or p_tilde.rank != r:
        raise InvalidInputError("projection does not match (M, r)")
    pi = oracle_projection(cc, r)
    x = cc + ee
    z = projected_energy(p_tilde, x) - projected_energy(pi, x)
    z1 = (
        projected_energy(p_tilde, cc)
        - projected_energy(pi, cc)
        + 2.0 * (projected_trace(p_tilde, ee, cc) - projected_trace(pi, ee, cc))
    )
    z2 = projected_energy(p_tilde, ee) - projected_energy(pi, ee)
    return ZDecomposition(z, z1, z2, p_tilde)


def z_sup(c, e, r: int) -> SupResult:
    """sup Z: attained at the best rank-r projection of X = C + E."""
    cc, ee = _check_pair(c, e)
    pi = oracle_projection(cc, r)
    x = cc + ee
    top = best_rank_r_projection(x, r)
    return SupResult(projected_energy(top, x) - projected_energy(pi, x), top)


def z1_sup(c, e, r: int) -> SupResult:
    """sup Z1 via the exact reduction Z1(P) = tr(P S) - tr(pi_r S)."""
    cc, ee = _check_pair(c, e)
    pi = oracle_projection(cc, r)
    s = interaction_matrix(cc, ee)
    value, maximizer = sym_top_r(s, r)
    return SupResult(value - _tr_proj_sym(pi, s), maximizer)


def z2_sup(c, e, r: int) -> SupResult:
    """sup Z2: attained at the best rank-r projection of E."""
    cc, ee = _check_pair(c, e)
    pi = oracle_projection(cc, r)
    top = best_rank_r_projection(ee, r)
    return SupResult(projected_energy(top, ee) - projected_energy(pi, ee), top)
