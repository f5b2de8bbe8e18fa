"""Linear reconstruction of graph signals from (noisy) samples.

Two operators are materialized as explicit n x |S| matrices so downstream
loss evaluation can consume them directly:

- least squares: project the observed rows onto the k lowest eigenvectors,
  R = U_{:,1..k} pinv(U_{S,1..k});
- feature propagation: keep observed values and harmonically extend them to
  the unsampled nodes through the grounded Laplacian solve
  x_{S^c} = -L_{S^c,S^c}^{-1} L_{S^c,S} x_S.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import check_indices, check_positive_int, check_square
from .graphs import SpectralBasis

DEFAULT_RCOND = 1e-12


class NumericalConditioningError(RuntimeError):
    """Raised when the grounded-Laplacian system is numerically singular."""


class ConditioningWarning(UserWarning):
    """The grounded-Laplacian solve is close to ill-conditioned."""


@dataclass(frozen=True)
class SampleSet:
    """Ordered set of distinct sampled node ids in a graph of n nodes."""

    indices: tuple[int, ...]
    n: int

    def __post_init__(self):
        n = check_positive_int(self.n, "n")
        object.__setattr__(self, "indices", check_indices(self.indices, n, "sample set"))
        object.__setattr__(self, "n", n)

    @property
    def size(self) -> int:
        return len(self.indices)

    def complement(self) -> tuple[int, ...]:
        chosen = set(self.indices)
        return tuple(i for i in range(self.n) if i not in chosen)


@dataclass(frozen=True)
class ReconstructionOperator:
    """Materialized linear reconstruction R: observations on S -> signal on all nodes."""

    method: str                      # "ls" or "fp"
    matrix: np.ndarray               # n x |S|
    sample_set: SampleSet
    bandwidth: int | None = None     # ls only
    rank_deficient: bool = False     # ls only: rank(U_{S,K}) < k


def ls_operator(
    basis: SpectralBasis, k: int, s: SampleSet, rcond: float = DEFAULT_RCOND
) -> ReconstructionOperator:
    """Least-squares reconstruction onto the k lowest eigenvectors.

    The pseudoinverse is computed by SVD with singular values below
    rcond * max(|S|, k) * sigma_max treated as zero; `rank_deficient` is set
    when rank(U_{S,1..k}) < k.
    """
    k = check_positive_int(k, "bandwidth")
    if k > basis.n:
        raise ValueError(f"bandwidth {k} exceeds graph size {basis.n}")
    if s.n != basis.n:
        raise ValueError(f"sample set is over {s.n} nodes, basis over {basis.n}")
    if s.size == 0:
        raise ValueError("sample set must be nonempty")
    uk = basis.vectors[:, :k]
    u_sk = uk[list(s.indices), :]
    left, sv, right_t = np.linalg.svd(u_sk, full_matrices=False)
    cutoff = rcond * max(s.size, k) * (float(sv[0]) if sv.size else 0.0)
    keep = sv > cutoff
    rank = int(np.count_nonzero(keep))
    pinv = (right_t[keep].T / sv[keep]) @ left[:, keep].T
    return ReconstructionOperator(
        method="ls",
        matrix=uk @ pinv,
        sample_set=s,
        bandwidth=k,
        rank_deficient=rank < k,
    )


def fp_operator(lap: np.ndarray, s: SampleSet) -> ReconstructionOperator:
    """Feature-propagation reconstruction: exact at samples, harmonic elsewhere.

    Rows at S form the identity, so observed values are preserved exactly.
    Rows at the complement solve the grounded SPD system
    L_{S^c,S^c} x_{S^c} = -L_{S^c,S} x_S via a Cholesky factorization; a
    connected graph with nonempty S guarantees positive definiteness. A
    ConditioningWarning is emitted when the factor's diagonal ratio puts
    the estimated condition number above 1e12.
    """
    lap = check_square(lap, "laplacian")
    if s.n != lap.shape[0]:
        raise ValueError(f"sample set is over {s.n} nodes, laplacian over {lap.shape[0]}")
    if s.size == 0:
        raise ValueError("sample set must be nonempty")
    idx = list(s.indices)
    comp = list(s.complement())
    r = np.zeros((s.n, s.size))
    r[idx, np.arange(s.size)] = 1.0
    if comp:
        grounded = lap[np.ix_(comp, comp)]
        cross = lap[np.ix_(comp, idx)]
        try:
            cho = scipy.linalg.cho_factor(grounded, lower=True, check_finite=False)
        except scipy.linalg.LinAlgError as exc:
            pivot = float(np.min(np.diag(grounded)))
            raise NumericalConditioningError(
                f"grounded Laplacian is numerically singular "
                f"(smallest diagonal pivot {pivot:.3e})"
            ) from exc
        pivots = np.diag(cho[0])
        cond_estimate = float((pivots.max() / pivots.min()) ** 2)
        if cond_estimate > 1e12:
            warnings.warn(
                f"grounded Laplacian condition number is roughly {cond_estimate:.2e}; "
                "harmonic extension may be inaccurate",
                ConditioningWarning,
                stacklevel=2,
            )
        r[comp, :] = -scipy.linalg.cho_solve(cho, cross, check_finite=False)
    return ReconstructionOperator(method="fp", matrix=r, sample_set=s)


def reconstruct(op: ReconstructionOperator, observations) -> np.ndarray:
    """Apply the operator: returns R @ observations (n x d for |S| x d input)."""
    obs = np.asarray(observations, dtype=np.float64)
    if obs.shape[0] != op.sample_set.size:
        raise ValueError(
            f"observations have {obs.shape[0]} rows, sample set has {op.sample_set.size}"
        )
    return op.matrix @ obs


def fp_diffusion(
    lap: np.ndarray, s: SampleSet, x_s: np.ndarray, iterations: int = 10_000
) -> np.ndarray:
    """Iterative oracle for feature propagation.

    Repeatedly diffuses through the normalized adjacency I - L while
    clamping the sampled rows to their observed values; converges to the
    harmonic extension on connected graphs. Kept independent of
    fp_operator so the closed form can be checked against it.
    """
    lap = check_square(lap, "laplacian")
    adj = np.eye(lap.shape[0]) - lap
    idx = list(s.indices)
    x = np.zeros((s.n,) + np.asarray(x_s).shape[1:])
    x[idx] = x_s
    for _ in range(iterations):
        x = adj @ x
        x[idx] = x_s
    return x


class LeastSquaresReconstructor(BaseEstimator, TransformerMixin):
    """Transformer wrapper around the least-squares operator.

    fit(basis, sample_set) materializes the operator; transform maps
    |S| x d observations to n x d reconstructions.
    """

    def __init__(self, bandwidth: int = 1, rcond: float = DEFAULT_RCOND):
        self.bandwidth = bandwidth
        self.rcond = rcond

    def fit(self, basis: SpectralBasis, sample_set: SampleSet):
        self.operator_ = ls_operator(basis, self.bandwidth, sample_set, rcond=self.rcond)
        self.rank_deficient_ = self.operator_.rank_deficient
        return self

    def transform(self, observations) -> np.ndarray:
        if not hasattr(self, "operator_"):
            raise RuntimeError("reconstructor is not fitted")
        return reconstruct(self.operator_, observations)


class FeaturePropagationReconstructor(BaseEstimator, TransformerMixin):
    """Transformer wrapper around the feature-propagation operator."""

    def fit(self, lap: np.ndarray, sample_set: SampleSet):
        self.operator_ = fp_operator(lap, sample_set)
        return self

    def transform(self, observations) -> np.ndarray:
        if not hasattr(self, "operator_"):
            raise RuntimeError("reconstructor is not fitted")
        return reconstruct(self.operator_, observations)
