"""Every closed-form bound on the projection-excess process and its pieces.

Conventions: spectra are nonincreasing singular values lambda_1 >= ... and are
zero-padded beyond their length, so tail quantities are defined even when
2r > M. Effective rank r_M = min(r, M - r); tail energy
delta_r = sum_{i=r+1}^{2r} lambda_i^2. Infinite branch values use IEEE +inf
(min() then ignores them naturally); reports serialize +inf as the string
"inf".

The drift-vs-noise bounds come in two families: the pathwise family
(I', II', III', Y) depends on the realized noise spectral radius sigma_1 and
dominates sup Z1 sample by sample; the expectation family (I, II, III and
r(M-r) min(I, II, III)) depends only on the entry moments (sigma^2, m_4).
Both are evaluated with constant-1 normalization; the universal constants are
bracketed empirically by Monte Carlo calibration, not assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace

import numpy as np

from .errors import InvalidInputError, NumericalFailureError, OutOfHypothesisError
from .linalg import OrthoProjection, as_matrix, proj_diff_norms, schatten

INF = float("inf")


def _spectrum(values) -> np.ndarray:
    v = np.atleast_1d(np.asarray(values, dtype=float))
    if v.ndim != 1 or v.size == 0:
        raise InvalidInputError("spectrum must be a non-empty 1-D sequence")
    if not np.all(np.isfinite(v)):
        raise InvalidInputError("spectrum contains non-finite values")
    scale = max(1.0, float(v[0]))
    if np.any(v < -1e-12 * scale):
        raise InvalidInputError("spectrum has negative values")
    if np.any(np.diff(v) > 1e-12 * scale):
        raise InvalidInputError("spectrum must be nonincreasing")
    return np.maximum(v, 0.0)


def _lam(v: np.ndarray, i: int) -> float:
    """1-based singular value accessor, zero beyond the stored length."""
    return float(v[i - 1]) if i <= v.size else 0.0


def effective_rank(m: int, r: int) -> int:
    """r_M = min(r, M - r), the effective dimension of projection differences."""
    return min(r, m - r)


def tail_energy(values, r: int) -> float:
    """delta_r = sum_{i=r+1}^{2r} lambda_i^2, spectrum zero-padded."""
    v = _spectrum(values)
    return float(sum(_lam(v, i) ** 2 for i in range(r + 1, 2 * r + 1)))


def sandwich_holds(m: int, r: int) -> bool:
    """r(M-r) <= r_M * M <= 2 r(M-r), exact in integers."""
    rm = effective_rank(m, r)
    return r * (m - r) <= rm * m <= 2 * r * (m - r)


@dataclass(frozen=True)
class BoundReport:
    """All bound values for one (spectrum, M, r) configuration.

    Fields are None until the corresponding evaluator fills them; +inf marks
    a formula whose gate condition failed (spectral tie or rank deficiency).
    """

    M: int
    r: int
    r_M: int
    delta_r: float
    I: float | None = None
    II: float | None = None
    III: float | None = None
    thm3_value: float | None = None
    I_prime: float | None = None
    II_prime: float | None = None
    III_prime: float | None = None
    Y: float | None = None
    thm1_gaussian: float | None = None
    latala_rhs: float | None = None

    def merged(self, other: "BoundReport") -> "BoundReport":
        if (self.M, self.r) != (other.M, other.r):
            raise InvalidInputError("cannot merge reports for different (M, r)")
        updates = {
            f.name: getattr(other, f.name)
            for f in fields(other)
            if getattr(other, f.name) is not None
        }
        return replace(self, **updates)

    def to_json_dict(self) -> dict:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None:
                continue
            if isinstance(value, float) and math.isinf(value):
                value = "inf"
            out[f.name] = value
        return out


def _base_report(v: np.ndarray, m: int, r: int) -> BoundReport:
    return BoundReport(M=m, r=r, r_M=effective_rank(m, r), delta_r=tail_energy(v, r))


def _check_mr(m: int, r: int) -> None:
    if m < 2 or not 1 <= r < m:
        raise InvalidInputError(f"need 1 <= r < M, got r={r}, M={m}")


def prop1_Y(spectrum, m: int, r: int, sigma1: float) -> BoundReport:
    """Pathwise bounds I', II', III' on sup Z1 and their minimum Y.

    sigma1 is the realized spectral radius of the noise matrix. The report
    satisfies sup Z1 <= Y for every sample, which tests enforce with zero
    tolerance for violations.
    """
    _check_mr(m, r)
    if not (np.isfinite(sigma1) and sigma1 >= 0):
        raise InvalidInputError(f"sigma1 must be >= 0, got {sigma1}")
    v = _spectrum(spectrum)
    lam1, lam_r, lam_r1 = _lam(v, 1), _lam(v, r), _lam(v, r + 1)
    rm = effective_rank(m, r)
    delta = tail_energy(v, r)

    i_p = 4.0 * rm * lam1 * sigma1
    if lam_r > lam_r1:
        ii_p = 4.0 * rm * lam1 ** 2 * sigma1 ** 2 / (lam_r ** 2 - lam_r1 ** 2)
    else:
        ii_p = INF
    if lam_r > 0:
        iii_p = max(
            4.0 * math.sqrt(rm * delta) * (lam1 / lam_r) * sigma1,
            8.0 * rm * (lam1 ** 2 / lam_r ** 2) * sigma1 ** 2,
        )
    else:
        iii_p = INF
    return replace(
        _base_report(v, m, r),
        I_prime=i_p, II_prime=ii_p, III_prime=iii_p, Y=min(i_p, ii_p, iii_p),
    )


def thm3_bound(spectrum, m: int, r: int, sigma_sq: float, m4: float) -> BoundReport:
    """Moment-only bounds I, II, III and the value r(M-r) min(I, II, III).

    Constant-1 normalization; the universal constant in front is reported
    separately by Monte Carlo calibration.
    """
    _check_mr(m, r)
    _check_moments(sigma_sq, m4)
    v = _spectrum(spectrum)
    lam1, lam_r, lam_r1 = _lam(v, 1), _lam(v, r), _lam(v, r + 1)
    delta = tail_energy(v, r)
    moment2 = sigma_sq + math.sqrt(m4)
    moment1 = math.sqrt(sigma_sq) + m4 ** 0.25

    term_i = moment2 + lam1 / math.sqrt(m) * moment1
    if lam_r > lam_r1:
        term_ii = lam1 ** 2 / (lam_r ** 2 - lam_r1 ** 2) * moment2
    else:
        term_ii = INF
    if lam_r > 0:
        term_iii = (
            lam1 ** 2 / lam_r ** 2 * moment2
            + math.sqrt(lam1 ** 2 * delta / (r * (m - r) * lam_r ** 2)) * moment1
        )
    else:
        term_iii = INF
    return replace(
        _base_report(v, m, r),
        I=term_i, II=term_ii, III=term_iii,
        thm3_value=r * (m - r) * min(term_i, term_ii, term_iii),
    )


def _check_moments(sigma_sq: float, m4: float) -> None:
    if not (np.isfinite(sigma_sq) and sigma_sq > 0):
        raise InvalidInputError(f"sigma_sq must be positive, got {sigma_sq}")
    if not (np.isfinite(m4) and m4 >= sigma_sq ** 2):
        raise InvalidInputError(
            f"fourth moment {m4} violates m4 >= sigma_sq^2 = {sigma_sq ** 2}"
        )


def latala_rhs(m: int, sigma_sq: float, m4: float) -> float:
    """Moment bound M (sigma^2 + sqrt(m4)) on the expected squared noise
    spectral radius (constant-1 normalization)."""
    if m < 1:
        raise InvalidInputError(f"matrix order must be >= 1, got {m}")
    _check_moments(sigma_sq, m4)
    return m * (sigma_sq + math.sqrt(m4))


def _thm1_terms(spectrum, m: int, r: int, sigma: float):
    _check_mr(m, r)
    if not (np.isfinite(sigma) and sigma > 0):
        raise InvalidInputError(f"sigma must be positive, got {sigma}")
    if 2 * r > m:
        raise OutOfHypothesisError(f"gaussian bound requires r <= M/2, got r={r}, M={m}")
    v = _spectrum(spectrum)
    lam1, lam_r, lam_r1 = _lam(v, 1), _lam(v, r), _lam(v, r + 1)
    if lam_r <= 0:
        raise OutOfHypothesisError("gaussian bound requires rank(C) >= r (lambda_r > 0)")
    delta = tail_energy(v, r)
    spectral_ratio = lam1 ** 2 / lam_r ** 2
    noise_ratio = 1.0 + lam1 / (sigma * math.sqrt(m))
    tail_ratio = math.sqrt(delta / (r * lam_r ** 2)) * lam1 / (sigma * math.sqrt(m))
    gap_ratio = lam1 ** 2 / (lam_r ** 2 - lam_r1 ** 2) if lam_r > lam_r1 else INF
    return spectral_ratio, noise_ratio, tail_ratio, gap_ratio


def thm1_gaussian_bound(spectrum, m: int, r: int, sigma: float) -> float:
    """Gaussian-noise bound sigma^2 r M [min(a, b) + min(g, d)] with
    a = lam1^2/lam_r^2, b = 1 + lam1/(sigma sqrt(M)),
    g = sqrt(delta_r/(r lam_r^2)) lam1/(sigma sqrt(M)),
    d = lam1^2/(lam_r^2 - lam_{r+1}^2) (inf on a spectral tie).

    Refuses r > M/2 and lambda_r = 0 rather than extrapolating.
    """
    a, b, g, d = _thm1_terms(spectrum, m, r, sigma)
    return sigma ** 2 * r * m * (min(a, b) + min(g, d))


@dataclass(frozen=True)
class GaussianMinChain:
    """The two groupings of the gaussian bound plus the relaxation steps
    connecting them; every adjacent link is an inequality with factor <= 2."""

    spectral_ratio: float   # a
    noise_ratio: float      # b
    tail_ratio: float       # g
    gap_ratio: float        # d (inf on ties)
    two_min_sum: float      # min(a,b) + min(g,d)
    relaxed_min: float      # min(b+g, a+d, a+g)
    three_way_min: float    # min(b, d, a+g)
    regrouped_min: float    # min(b, a + min(d, g))


def gaussian_min_chain(spectrum, m: int, r: int, sigma: float) -> GaussianMinChain:
    a, b, g, d = _thm1_terms(spectrum, m, r, sigma)
    return GaussianMinChain(
        spectral_ratio=a,
        noise_ratio=b,
        tail_ratio=g,
        gap_ratio=d,
        two_min_sum=min(a, b) + min(g, d),
        relaxed_min=min(b + g, a + d, a + g),
        three_way_min=min(b, d, a + g),
        regrouped_min=min(b, a + min(d, g)),
    )


def min_equiv_witness(spectrum, m: int, r: int, sigma: float) -> tuple[float, float]:
    """(lhs, rhs) = (two-min grouping, three-way-min grouping) of the gaussian
    bound; asserts the sandwich rhs <= lhs <= 2 rhs before returning."""
    chain = gaussian_min_chain(spectrum, m, r, sigma)
    lhs, rhs = chain.two_min_sum, chain.three_way_min
    tau = 1e-12
    if rhs > lhs * (1.0 + tau) or lhs > 2.0 * rhs * (1.0 + tau):
        raise NumericalFailureError(
            f"min-equivalence sandwich violated: lhs={lhs}, rhs={rhs}"
        )
    return lhs, rhs


def lemma1_rhs(a, b, p1: OrthoProjection, p2: OrthoProjection) -> float:
    """sqrt(2 r_M) ||A||_Sinf ||B||_Sinf ||P2 - P1||_S2, the trace-form bound.

    The companion inequality tr(A.T (P2 - P1) B) <= lemma1_rhs(...) is
    enforced by the verification suites on random tuples; the equality
    instance below attains it.
    """
    aa = as_matrix(a, square=True, name="A")
    bb = as_matrix(b, square=True, name="B")
    if p1.dim != p2.dim or p1.rank != p2.rank:
        raise InvalidInputError("projections must share dim and rank")
    if aa.shape != bb.shape or aa.shape[0] != p1.dim:
        raise InvalidInputError("A, B, and projections must share the order M")
    rm = effective_rank(p1.dim, p1.rank)
    dist_s2, _ = proj_diff_norms(p1, p2)
    return math.sqrt(2.0 * rm) * schatten(aa, np.inf) * schatten(bb, np.inf) * dist_s2


def lemma1_equality_instance(
    m: int, r: int, alpha: float, mu: float, nu: float
) -> tuple[np.ndarray, np.ndarray, OrthoProjection, OrthoProjection]:
    """The extremal tuple (A, B, P1, P2) attaining the trace-form bound.

    P1 spans e_1..e_r, P2 spans the rotations sqrt(1-alpha^2) e_i + alpha
    e_{r+i}, A = mu Id, B = nu (P1 - P2). Then ||P1 - P2||_S2 = alpha
    sqrt(2r), ||P1 - P2||_Sinf = alpha, and tr(A.T (P1 - P2) B) =
    2 r mu nu alpha^2 equals the bound exactly. Requires M >= 2r.
    """
    if m < 2 * r:
        raise InvalidInputError(f"equality instance needs M >= 2r, got M={m}, r={r}")
    if not 0.0 <= alpha <= 1.0:
        raise InvalidInputError(f"alpha must lie in [0, 1], got {alpha}")
    if mu <= 0 or nu <= 0:
        raise InvalidInputError("mu and nu must be positive")
    b1 = np.eye(m)[:, :r]
    b2 = np.zeros((m, r))
    root = math.sqrt(1.0 - alpha * alpha)
    for i in range(r):
        b2[i, i] = root
        b2[r + i, i] = alpha
    p1 = OrthoProjection(b1)
    p2 = OrthoProjection(b2)
    a = mu * np.eye(m)
    b = nu * (p1.to_matrix() - p2.to_matrix())
    return a, b, p1, p2


def lemma2_rhs(spectrum, r: int, dist_s2: float) -> tuple[float, float, bool]:
    """Drift bounds at S2 distance d from the oracle projection.

    rhs_i  = -(1/2)(lambda_r^2 - lambda_{r+1}^2) d^2          (always valid)
    rhs_ii = -(1/2) lambda_r^2 d^2 + delta_r   gated on d >= sqrt(2 delta_r)/lambda_r

    Returns (rhs_i, rhs_ii, gate_ii); when lambda_r = 0 the gated bound is
    vacuous and reported as (+inf, gate False).
    """
    if r < 1:
        raise InvalidInputError(f"rank must be >= 1, got {r}")
    if not (np.isfinite(dist_s2) and dist_s2 >= 0):
        raise InvalidInputError(f"dist_s2 must be >= 0, got {dist_s2}")
    v = _spectrum(spectrum)
    lam_r, lam_r1 = _lam(v, r), _lam(v, r + 1)
    delta = tail_energy(v, r)
    rhs_i = -0.5 * (lam_r ** 2 - lam_r1 ** 2) * dist_s2 ** 2
    if lam_r > 0:
        gate = dist_s2 >= math.sqrt(2.0 * delta) / lam_r
        rhs_ii = -0.5 * lam_r ** 2 * dist_s2 ** 2 + delta
    else:
        gate = False
        rhs_ii = INF
    return rhs_i, rhs_ii, gate


def full_report(spectrum, m: int, r: int, sigma_sq: float, m4: float,
                sigma1: float | None = None, gaussian: bool = False) -> BoundReport:
    """Assemble one report: moment bounds, the noise-radius bound, the
    pathwise family at a representative sigma1, and the gaussian bound when
    applicable (gaussian entries, r <= M/2, lambda_r > 0)."""
    report = thm3_bound(spectrum, m, r, sigma_sq, m4)
    report = replace(report, latala_rhs=latala_rhs(m, sigma_sq, m4))
    if sigma1 is not None:
        report = report.merged(prop1_Y(spectrum, m, r, sigma1))
    if gaussian:
        try:
            value = thm1_gaussian_bound(spectrum, m, r, math.sqrt(sigma_sq))
        except OutOfHypothesisError:
            value = None
        if value is not None:
            report = replace(report, thm1_gaussian=value)
    return report
