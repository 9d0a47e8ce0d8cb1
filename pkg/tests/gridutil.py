"""Shared oracle helpers for the test suite (kept independent of projlab's
spectral code paths: plain numpy constructions only)."""

import numpy as np


def fibonacci_sphere(n: int) -> np.ndarray:
    """n near-uniform points on the unit 2-sphere (deterministic)."""
    i = np.arange(n)
    z = 1.0 - (2.0 * i + 1.0) / n
    phi = i * np.pi * (3.0 - np.sqrt(5.0))
    rho = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    return np.column_stack([rho * np.cos(phi), rho * np.sin(phi), z])


def random_spectrum(rng: np.random.Generator, m: int) -> np.ndarray:
    """A generic nonincreasing positive spectrum of length m."""
    values = np.sort(np.abs(rng.standard_normal(m)))[::-1] + 1e-3
    return values


def haar_basis(rng: np.random.Generator, m: int, r: int) -> np.ndarray:
    """Orthonormal M x r basis sampled independently of projlab.randgen."""
    q, rr = np.linalg.qr(rng.standard_normal((m, r)))
    return q * np.where(np.diagonal(rr) < 0, -1.0, 1.0)
