"""Dense linear algebra: spectra, Schatten norms, and rank-r projection geometry.

Matrices are real 2-D float64 numpy arrays. Orthogonal rank-r projections are
stored as M x r orthonormal bases (:class:`OrthoProjection`), never as dense
M x M matrices; the dense form exists only for test reconstruction via
:meth:`OrthoProjection.to_matrix`.

Tie-breaking is canonical everywhere: spectral factors are ordered by
(value descending, original column ascending) with a stable sort, and an
exactly-zero input selects the first r standard basis vectors. This makes
every decomposition-backed operation bit-reproducible.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, NumericalFailureError

TAU_ORTH = 1e-9    # absolute orthonormality defect tolerated in a stored basis
TAU_RECON = 1e-10  # relative SVD reconstruction error float64 must achieve
TAU_SYM_REL = 1e-9  # symmetry defect allowed in sym_top_r, relative to the spectral norm


def as_matrix(a, *, square: bool = False, name: str = "matrix") -> np.ndarray:
    """Validate and return a finite 2-D float64 array."""
    arr = np.asarray(a, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidInputError(f"{name} must be a non-empty 2-D array")
    if square and arr.shape[0] != arr.shape[1]:
        raise InvalidInputError(f"{name} must be square, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return arr


@dataclass(frozen=True)
class OrthoProjection:
    """Rank-r orthogonal projection stored as an M x r orthonormal basis.

    The induced matrix P = basis @ basis.T is symmetric and idempotent by
    construction; orthonormality is enforced at creation within TAU_ORTH.
    Instances are immutable and safe to share between workers.
    """

    basis: np.ndarray

    def __post_init__(self):
        b = np.array(self.basis, dtype=float, order="C")  # own copy, never aliased
        if b.ndim != 2:
            raise InvalidInputError("projection basis must be 2-D")
        m, r = b.shape
        if not 1 <= r <= m:
            raise InvalidInputError(f"projection rank must satisfy 1 <= r <= M, got {b.shape}")
        if not np.all(np.isfinite(b)):
            raise InvalidInputError("projection basis contains non-finite entries")
        defect = np.max(np.abs(b.T @ b - np.eye(r)))
        if defect > TAU_ORTH:
            raise InvalidInputError(
                f"basis columns not orthonormal (defect {defect:.3e} > {TAU_ORTH:.0e})"
            )
        b.setflags(write=False)
        object.__setattr__(self, "basis", b)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    def to_matrix(self) -> np.ndarray:
        """Dense M x M form; intended for tests and small-order reconstruction."""
        return self.basis @ self.basis.T


def svd(a) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Full SVD of a square matrix: a = u @ diag(values) @ v.T.

    Values are nonincreasing; ties keep LAPACK's column order (stable sort),
    which fixes a canonical decomposition for reproducibility.
    """
    arr = as_matrix(a, square=True)
    try:
        u, s, vt = np.linalg.svd(arr)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError(f"SVD did not converge: {exc}") from exc
    order = np.argsort(-s, kind="stable")
    return s[order], u[:, order], vt.T[:, order]


def singular_values(a) -> np.ndarray:
    """Nonincreasing singular values of a square matrix."""
    arr = as_matrix(a, square=True)
    try:
        s = np.linalg.svd(arr, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError(f"SVD did not converge: {exc}") from exc
    return s[np.argsort(-s, kind="stable")]


def schatten(a, p) -> float:
    """Schatten norm for p in {2, inf}: Frobenius energy or spectral norm."""
    arr = as_matrix(a)
    if p == 2:
        return float(np.linalg.norm(arr))
    if p == np.inf or p == float("inf"):
        return float(np.linalg.svd(arr, compute_uv=False)[0])
    raise InvalidInputError(f"only p in {{2, inf}} supported, got {p!r}")


def best_rank_r_projection(a, r: int) -> OrthoProjection:
    """Projection onto the span of the top-r left singular vectors of a.

    Maximizes ||P a||_S2 over all rank-r orthogonal projections. An exactly
    zero matrix returns the first r standard basis vectors (tie-break rule).
    """
    arr = as_matrix(a, square=True)
    m = arr.shape[0]
    if not 1 <= r <= m:
        raise InvalidInputError(f"rank r={r} out of range for M={m}")
    if not arr.any():
        return OrthoProjection(np.eye(m)[:, :r])
    _, u, _ = svd(arr)
    return OrthoProjection(u[:, :r])


def projected_energy(p: OrthoProjection, a) -> float:
    """||P a||_S2 squared, computed as ||basis.T @ a||_F^2 (O(M^2 r))."""
    arr = as_matrix(a)
    if arr.shape[0] != p.dim:
        raise InvalidInputError("projection and matrix dimensions differ")
    ba = p.basis.T @ arr
    return float(np.vdot(ba, ba))


def projected_trace(p: OrthoProjection, a, b) -> float:
    """tr(a.T @ P @ b) without forming P (= <basis.T a, basis.T b>)."""
    aa = as_matrix(a)
    bb = as_matrix(b)
    if aa.shape[0] != p.dim or bb.shape[0] != p.dim:
        raise InvalidInputError("projection and matrix dimensions differ")
    return float(np.vdot(p.basis.T @ aa, p.basis.T @ bb))


def proj_diff_norms(p1: OrthoProjection, p2: OrthoProjection) -> tuple[float, float]:
    """(S2, Sinf) norms of P1 - P2 for two rank-r projections.

    Uses principal angles: the nonzero eigenvalues of P1 - P2 are +-sin(theta_i),
    and sin(theta_i) are the singular values of (Id - P1) @ basis2, so
    S2 = sqrt(2) * ||Q||_F and Sinf = ||Q||_2 with Q = b2 - b1 (b1.T b2).
    Always S2 <= sqrt(2 min(r, M-r)) and Sinf <= 1.
    """
    if p1.dim != p2.dim or p1.rank != p2.rank:
        raise InvalidInputError("projections must share dim and rank")
    if np.array_equal(p1.basis, p2.basis):
        return 0.0, 0.0
    q = p2.basis - p1.basis @ (p1.basis.T @ p2.basis)
    s2 = float(np.sqrt(2.0) * np.linalg.norm(q))
    sinf = float(min(1.0, np.linalg.svd(q, compute_uv=False)[0]))
    return s2, sinf


def trace_form(a, d, b) -> float:
    """tr(a.T @ d @ b) for three square matrices of equal order."""
    aa = as_matrix(a, square=True)
    dd = as_matrix(d, square=True)
    bb = as_matrix(b, square=True)
    if not (aa.shape == dd.shape == bb.shape):
        raise InvalidInputError("trace_form requires three matrices of equal shape")
    return float(np.vdot(aa, dd @ bb))


def sym_top_r(s, r: int) -> tuple[float, OrthoProjection]:
    """Sum of the r largest eigenvalues of a symmetric matrix and the
    projection onto a corresponding eigenspace (tr(P s) attains the value)."""
    arr = as_matrix(s, square=True)
    m = arr.shape[0]
    if not 1 <= r <= m:
        raise InvalidInputError(f"rank r={r} out of range for M={m}")
    defect = float(np.max(np.abs(arr - arr.T)))
    sym = 0.5 * (arr + arr.T)
    try:
        w, v = np.linalg.eigh(sym)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError(f"eigh did not converge: {exc}") from exc
    scale = float(np.max(np.abs(w))) if m else 0.0
    if defect > TAU_SYM_REL * max(scale, np.finfo(float).tiny):
        raise InvalidInputError(
            f"matrix asymmetric beyond tolerance (defect {defect:.3e}, scale {scale:.3e})"
        )
    order = np.argsort(-w, kind="stable")
    top = order[:r]
    return float(np.sum(w[top])), OrthoProjection(v[:, top])


def top_r_eigenvalue_sum(s, r: int) -> float:
    """Value-only variant of :func:`sym_top_r` (skips eigenvectors)."""
    arr = as_matrix(s, square=True)
    if not 1 <= r <= arr.shape[0]:
        raise InvalidInputError(f"rank r={r} out of range for M={arr.shape[0]}")
    w = np.linalg.eigvalsh(0.5 * (arr + arr.T))
    return float(np.sum(w[-r:]))


# ---------------------------------------------------------------------------
# Matrix file formats: CSV of rows, and a raw little-endian binary layout
# with an 8-byte header (rows, cols as uint32) followed by row-major float64.
# ---------------------------------------------------------------------------

_RAW_HEADER = struct.Struct("<II")


def save_matrix_csv(path, a) -> None:
    arr = as_matrix(a)
    np.savetxt(path, arr, delimiter=",", fmt="%.17g")


def load_matrix_csv(path) -> np.ndarray:
    arr = np.loadtxt(path, delimiter=",", ndmin=2)
    return as_matrix(arr, name=f"matrix file {path}")


def save_matrix_raw(path, a) -> None:
    arr = as_matrix(a)
    with open(path, "wb") as fh:
        fh.write(_RAW_HEADER.pack(arr.shape[0], arr.shape[1]))
        fh.write(np.ascontiguousarray(arr, dtype="<f8").tobytes())


def load_matrix_raw(path) -> np.ndarray:
    with open(path, "rb") as fh:
        header = fh.read(_RAW_HEADER.size)
        if len(header) != _RAW_HEADER.size:
            raise InvalidInputError(f"matrix file {path}: truncated header")
        rows, cols = _RAW_HEADER.unpack(header)
        data = np.frombuffer(fh.read(), dtype="<f8")
    if data.size != rows * cols:
        raise InvalidInputError(
            f"matrix file {path}: expected {rows * cols} values, found {data.size}"
        )
    return as_matrix(data.reshape(rows, cols).astype(float), name=f"matrix file {path}")


def load_matrix(path) -> np.ndarray:
    """Load a matrix, dispatching on extension (.csv -> CSV, else raw)."""
    if str(path).lower().endswith(".csv"):
        return load_matrix_csv(path)
    return load_matrix_raw(path)
