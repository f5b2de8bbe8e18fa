"""Prior covariance construction, Gaussian feature sampling, and observation noise.

Feature matrices have n rows (one per node) and d columns, each column an
independent zero-mean Gaussian graph signal with a shared covariance: either
the bandlimited projector onto the k lowest Laplacian eigenvectors, the
Laplacian pseudoinverse, or an explicit PSD matrix.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from ._validation import check_nonnegative, check_positive_int, check_psd, rng_from
from .graphs import SpectralBasis


class BandwidthDegeneracyWarning(UserWarning):
    """The requested bandwidth falls inside a (near-)degenerate eigenspace,
    so the bandlimited projector is not unique."""


@dataclass(frozen=True)
class CovarianceSpec:
    """Declarative covariance choice, realized against a spectral basis.

    kind is one of "bandlimited" (needs k), "pseudoinverse", or "explicit"
    (needs a PSD matrix). Use the classmethod constructors.
    """

    kind: str
    k: int | None = None
    matrix: np.ndarray | None = None

    @classmethod
    def bandlimited(cls, k: int) -> "CovarianceSpec":
        return cls(kind="bandlimited", k=check_positive_int(k, "bandwidth"))

    @classmethod
    def laplacian_pseudoinverse(cls) -> "CovarianceSpec":
        return cls(kind="pseudoinverse")

    @classmethod
    def explicit(cls, matrix) -> "CovarianceSpec":
        return cls(kind="explicit", matrix=check_psd(matrix, "covariance"))

    def describe(self) -> str:
        if self.kind == "bandlimited":
            return f"bandlimited(k={self.k})"
        if self.kind == "pseudoinverse":
            return "laplacian-pseudoinverse"
        return "explicit"


def bandlimiting_projector(basis: SpectralBasis, k: int) -> np.ndarray:
    """Orthogonal projector onto the span of the k lowest eigenvectors.

    Warns with BandwidthDegeneracyWarning when eigenvalues k-1 and k nearly
    coincide, in which case the span (and thus the projector) is
    solver-dependent.
    """
    k = check_positive_int(k, "bandwidth")
    if k > basis.n:
        raise ValueError(f"bandwidth {k} exceeds graph size {basis.n}")
    if basis.is_degenerate_at(k):
        warnings.warn(
            f"eigenvalue gap at bandwidth {k} is below 1e-9; "
            "the bandlimited projector is not unique",
            BandwidthDegeneracyWarning,
            stacklevel=2,
        )
    uk = basis.vectors[:, :k]
    return uk @ uk.T


def realize_covariance(spec: CovarianceSpec, basis: SpectralBasis) -> np.ndarray:
    """Turn a CovarianceSpec into an n x n PSD matrix for the given basis."""
    if spec.kind == "bandlimited":
        return bandlimiting_projector(basis, spec.k)
    if spec.kind == "pseudoinverse":
        inv = np.where(basis.values > 1e-9, 1.0 / np.maximum(basis.values, 1e-300), 0.0)
        return (basis.vectors * inv) @ basis.vectors.T
    if spec.kind == "explicit":
        m = check_psd(spec.matrix, "covariance")
        if m.shape[0] != basis.n:
            raise ValueError(
                f"explicit covariance is {m.shape[0]} x {m.shape[0]}, graph has {basis.n} nodes"
            )
        return m.copy()
    raise ValueError(f"unknown covariance kind {spec.kind!r}")


def covariance_factor(sigma: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Square root factor F with F F^T = sigma, via the eigendecomposition.

    Eigenvalues in (-tol, 0) are clamped to zero; anything below -tol means
    the input is not PSD and raises. Roundoff-level positive eigenvalues
    (below 1e-12 of the largest) are zeroed too, so draws from
    rank-deficient covariances stay exactly inside the intended span.
    """
    sigma = np.asarray(sigma, dtype=np.float64)
    vals, vecs = np.linalg.eigh(0.5 * (sigma + sigma.T))
    if vals.size and vals[0] < -tol:
        raise ValueError(f"covariance has eigenvalue {vals[0]:.3e} below -{tol:.0e}")
    vals = np.clip(vals, 0.0, None)
    vals[vals < 1e-12 * vals.max(initial=0.0)] = 0.0
    return vecs * np.sqrt(vals)


@dataclass(frozen=True)
class FeatureMatrix:
    """n x d feature matrix with the provenance of its random draw."""

    values: np.ndarray
    seed: int
    covariance: str

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]


def sample_features(sigma: np.ndarray, d: int, seed: int, covariance: str = "unspecified") -> FeatureMatrix:
    """Draw d i.i.d. columns from N(0, sigma) as sigma^{1/2} z.

    The square root comes from the eigendecomposition (covariance_factor),
    so rank-deficient priors such as bandlimited projectors are fine.
    Deterministic per seed.
    """
    d = check_positive_int(d, "d")
    factor = covariance_factor(sigma)
    rng = rng_from(seed, 2)
    z = rng.standard_normal((factor.shape[1], d))
    return FeatureMatrix(values=factor @ z, seed=int(seed), covariance=covariance)


def load_signal_csv(path) -> np.ndarray:
    """Load empirical graph signals from CSV into an n x m matrix.

    Expected header: `node,sig_0,...,sig_{m-1}`; one row per node id, in any
    order, covering every id 0..n-1 exactly once.
    """
    import csv

    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty signal file") from None
        if not header or header[0].strip() != "node" or len(header) < 2:
            raise ValueError(f"{path}: header must be 'node,sig_0,...', got {header}")
        m = len(header) - 1
        rows: dict[int, list[float]] = {}
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != m + 1:
                raise ValueError(f"{path}:{lineno}: expected {m + 1} fields, got {len(row)}")
            try:
                node = int(row[0])
                values = [float(v) for v in row[1:]]
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from exc
            if node in rows:
                raise ValueError(f"{path}:{lineno}: duplicate node id {node}")
            rows[node] = values
    n = len(rows)
    if sorted(rows) != list(range(n)):
        raise ValueError(f"{path}: node ids must cover 0..{n - 1} exactly once")
    return np.array([rows[i] for i in range(n)], dtype=np.float64)


def observe(x: FeatureMatrix, sample_set, eta2: float, seed: int) -> np.ndarray:
    """Noisy observation of the features on a sample set: X_S + eta * eps.

    eps is i.i.d. standard normal of shape |S| x d and eta = sqrt(eta2).
    Deterministic per seed.
    """
    eta2 = check_nonnegative(eta2, "eta2")
    idx = list(sample_set.indices)
    if not idx:
        raise ValueError("sample set must be nonempty for observation")
    clean = x.values[idx, :]
    if eta2 == 0.0:
        return clean.copy()
    rng = rng_from(seed, 3)
    return clean + np.sqrt(eta2) * rng.standard_normal(clean.shape)
