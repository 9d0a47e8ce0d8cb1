"""Seeded generation of i.i.d.-entry random matrices and Haar random projections.

Every distribution in the catalog is centered by construction and carries
analytically known variance and fourth moment, which the bound evaluators
need as exact constants. Streams are counter-based: a :class:`Seed` is a
64-bit root plus a tuple of labels (experiment id, replication index, ...),
mapped to independent PCG64 generators via SeedSequence spawn keys, so sweep
results never depend on scheduling or worker count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .linalg import OrthoProjection

KINDS = ("gaussian", "rademacher", "uniform-symmetric", "centered-exponential", "student-t")
NORMALIZATIONS = ("none", "inv-sqrt-M")


@dataclass(frozen=True)
class EntryDistribution:
    """A catalog entry for the law of a matrix entry.

    kind: one of KINDS. scale multiplies the unit-variance base draw for all
    kinds except uniform-symmetric, where it is the half-width a of [-a, a].
    Student-t requires nu > 4 (finite fourth moment) and is rescaled to unit
    variance before applying `scale`.
    """

    kind: str
    scale: float = 1.0
    nu: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidInputError(f"unknown distribution kind {self.kind!r}")
        if not (np.isfinite(self.scale) and self.scale > 0):
            raise InvalidInputError(f"scale must be positive, got {self.scale}")
        if self.kind == "student-t":
            if self.nu is None or not np.isfinite(self.nu) or self.nu <= 4:
                raise InvalidInputError(
                    "student-t needs nu > 4 for a finite fourth moment"
                )
        elif self.nu is not None:
            raise InvalidInputError(f"{self.kind} takes no degrees-of-freedom parameter")

    def variance(self) -> float:
        s2 = self.scale * self.scale
        if self.kind == "uniform-symmetric":
            return s2 / 3.0
        return s2

    def fourth_moment(self) -> float:
        s4 = self.scale ** 4
        if self.kind == "gaussian":
            return 3.0 * s4
        if self.kind == "rademacher":
            return s4
        if self.kind == "uniform-symmetric":
            return s4 / 5.0
        if self.kind == "centered-exponential":
            return 9.0 * s4
        nu = float(self.nu)  # student-t, unit-variance scaled
        return 3.0 * (nu - 2.0) / (nu - 4.0) * s4

    def sample(self, rng: np.random.Generator, shape) -> np.ndarray:
        if self.kind == "gaussian":
            return self.scale * rng.standard_normal(shape)
        if self.kind == "rademacher":
            return self.scale * (2.0 * rng.integers(0, 2, size=shape) - 1.0)
        if self.kind == "uniform-symmetric":
            return rng.uniform(-self.scale, self.scale, size=shape)
        if self.kind == "centered-exponential":
            return self.scale * (rng.standard_exponential(shape) - 1.0)
        nu = float(self.nu)
        unit = np.sqrt((nu - 2.0) / nu)  # brings Var(t_nu) = nu/(nu-2) down to 1
        return self.scale * unit * rng.standard_t(nu, size=shape)

    def spec_string(self) -> str:
        if self.kind == "student-t":
            return f"student-t:{self.nu:g}:{self.scale:g}"
        return f"{self.kind}:{self.scale:g}"


def parse_distribution(text: str) -> EntryDistribution:
    """Parse a CLI spec string like "gaussian:1.0" or "student-t:5:1.0"."""
    parts = str(text).strip().split(":")
    kind = parts[0]
    try:
        if kind == "student-t":
            if len(parts) not in (2, 3):
                raise InvalidInputError(f"student-t spec needs nu[:scale], got {text!r}")
            nu = float(parts[1])
            scale = float(parts[2]) if len(parts) == 3 else 1.0
            return EntryDistribution("student-t", scale, nu)
        if len(parts) > 2:
            raise InvalidInputError(f"too many fields in distribution spec {text!r}")
        scale = float(parts[1]) if len(parts) == 2 else 1.0
    except ValueError as exc:
        raise InvalidInputError(f"bad distribution spec {text!r}: {exc}") from exc
    return EntryDistribution(kind, scale)


def catalog(scale: float = 1.0, nu: float = 5.0) -> tuple[EntryDistribution, ...]:
    """All five catalog distributions at a common scale."""
    return (
        EntryDistribution("gaussian", scale),
        EntryDistribution("rademacher", scale),
        EntryDistribution("uniform-symmetric", scale),
        EntryDistribution("centered-exponential", scale),
        EntryDistribution("student-t", scale, nu),
    )


@dataclass(frozen=True)
class Seed:
    """Root seed plus stream labels; distinct (root, labels) are independent."""

    root: int
    labels: tuple[int, ...] = ()

    def __post_init__(self):
        if not 0 <= int(self.root) < 2 ** 64:
            raise InvalidInputError("seed root must be a 64-bit unsigned integer")
        labels = tuple(int(x) for x in self.labels)
        if any(x < 0 for x in labels):
            raise InvalidInputError("seed labels must be nonnegative integers")
        object.__setattr__(self, "root", int(self.root))
        object.__setattr__(self, "labels", labels)

    def child(self, *labels: int) -> "Seed":
        return Seed(self.root, self.labels + tuple(labels))

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(
            np.random.SeedSequence(self.root, spawn_key=self.labels)
        )


def sample_matrix(dist: EntryDistribution, m: int, seed: Seed,
                  normalization: str = "none") -> np.ndarray:
    """M x M matrix of i.i.d. draws; deterministic given (dist, m, seed)."""
    if m < 1:
        raise InvalidInputError(f"matrix order must be >= 1, got {m}")
    if normalization not in NORMALIZATIONS:
        raise InvalidInputError(f"unknown normalization {normalization!r}")
    out = dist.sample(seed.rng(), (m, m))
    if normalization == "inv-sqrt-M":
        out /= np.sqrt(m)
    return out


def sample_projection(m: int, r: int, seed: Seed) -> OrthoProjection:
    """Haar-uniform rank-r projection from the QR of an M x r Gaussian block."""
    if not 1 <= r <= m:
        raise InvalidInputError(f"rank r={r} out of range for M={m}")
    g = seed.rng().standard_normal((m, r))
    q, rr = np.linalg.qr(g)
    signs = np.where(np.diagonal(rr) < 0, -1.0, 1.0)
    return OrthoProjection(q * signs)
