"""Input validation helpers shared across the package."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np


def check_square(m, name: str = "matrix") -> np.ndarray:
    """Coerce to a 2-D square float64 array with finite entries."""
    arr = np.asarray(m, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError(f"{name} must be square, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def check_symmetric(m, name: str = "matrix", tol: float = 1e-10) -> np.ndarray:
    """Validate symmetry within an absolute entrywise tolerance."""
    arr = check_square(m, name)
    gap = float(np.max(np.abs(arr - arr.T))) if arr.size else 0.0
    if gap > tol:
        raise ValueError(
            f"{name} is not symmetric: max |M - M^T| = {gap:.3e} exceeds {tol:.0e}"
        )
    return arr


def check_psd(m, name: str = "matrix", tol: float = 1e-8) -> np.ndarray:
    """Validate symmetry and that the smallest eigenvalue is >= -tol."""
    arr = check_symmetric(m, name)
    if arr.size:
        lam_min = float(np.linalg.eigvalsh(arr)[0])
        if lam_min < -tol:
            raise ValueError(
                f"{name} is not positive semidefinite: "
                f"smallest eigenvalue {lam_min:.3e} below -{tol:.0e}"
            )
    return arr


def check_indices(indices: Sequence[int], n: int, name: str = "indices") -> tuple[int, ...]:
    """Validate a sequence of distinct node ids in [0, n)."""
    idx = tuple(int(i) for i in indices)
    for i in idx:
        if not 0 <= i < n:
            raise ValueError(f"{name}: node id {i} out of range [0, {n})")
    if len(set(idx)) != len(idx):
        raise ValueError(f"{name}: node ids must be distinct")
    return idx


def check_positive_int(value, name: str) -> int:
    v = int(value)
    if v < 1:
        raise ValueError(f"{name} must be a positive integer, got {value}")
    return v


def check_nonnegative(value, name: str) -> float:
    v = float(value)
    if not np.isfinite(v) or v < 0:
        raise ValueError(f"{name} must be a finite nonnegative real, got {value}")
    return v


def rng_from(seed, *stream: int) -> np.random.Generator:
    """Deterministic generator for (seed, stream...) without correlated streams.

    Stream tags let one master seed drive many independent draws (per graph,
    per trial, ...) reproducibly.
    """
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, stream)]))
