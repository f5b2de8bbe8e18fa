"""Sample-set selection: random, greedy, and exhaustive.

The greedy scheme optimizes the full downstream loss directly: starting from
the empty set it adds, at every step, the node whose inclusion minimizes the
chosen objective (expected misclassification count, or expected squared
reconstruction error) over all remaining candidates, ties broken by lowest
node index. No surrogate or submodularity bound is used; an exhaustive
minimizer over all subsets of a given size is provided as an oracle for
small instances.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_nonnegative, check_positive_int, check_square, rng_from
from .graphs import SpectralBasis
from .losses import _mismatch_probabilities, node_statistics
from .reconstruction import DEFAULT_RCOND, SampleSet, fp_operator, ls_operator

OBJECTIVE_KINDS = ("classification", "reconstruction")
METHODS = ("ls", "fp")


@dataclass(frozen=True)
class SamplingObjective:
    """Downstream loss to minimize plus everything needed to evaluate it.

    `g` is the classifier matrix (None means the identity), `sigma` the
    realized effective covariance, and eta2 the observation-noise variance
    the sampler should anticipate. Least-squares evaluation needs the
    spectral basis and a bandwidth; feature propagation needs the
    Laplacian. `sigma_factor`, when given, is a low-rank F with
    F F^T = sigma and unlocks a fast evaluation path for least squares.
    """

    kind: str
    sigma: np.ndarray
    method: str
    eta2: float
    g: np.ndarray | None = None
    basis: SpectralBasis | None = None
    bandwidth: int | None = None
    laplacian: np.ndarray | None = None
    sigma_factor: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in OBJECTIVE_KINDS:
            raise ValueError(f"kind must be one of {OBJECTIVE_KINDS}, got {self.kind!r}")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        sigma = check_square(self.sigma, "sigma")
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "eta2", check_nonnegative(self.eta2, "eta2"))
        if self.g is not None:
            g = check_square(self.g, "G")
            if g.shape[0] != sigma.shape[0]:
                raise ValueError("G and sigma dimensions differ")
            object.__setattr__(self, "g", g)
        if self.method == "ls":
            if self.basis is None or self.bandwidth is None:
                raise ValueError("least-squares objective needs basis and bandwidth")
            check_positive_int(self.bandwidth, "bandwidth")
            if self.basis.n != sigma.shape[0]:
                raise ValueError("basis and sigma dimensions differ")
            if self.bandwidth > self.basis.n:
                raise ValueError(f"bandwidth {self.bandwidth} exceeds graph size {self.basis.n}")
        else:
            if self.laplacian is None:
                raise ValueError("feature-propagation objective needs the laplacian")
            lap = check_square(self.laplacian, "laplacian")
            if lap.shape[0] != sigma.shape[0]:
                raise ValueError("laplacian and sigma dimensions differ")
            object.__setattr__(self, "laplacian", lap)
        if self.sigma_factor is not None and self.sigma_factor.shape[0] != sigma.shape[0]:
            raise ValueError("sigma_factor and sigma dimensions differ")

    @property
    def n(self) -> int:
        return self.sigma.shape[0]

    def evaluator(self):
        """Callable mapping an index tuple to the objective loss.

        Dispatches to the low-rank least-squares path when possible; both
        paths share the degenerate-correlation handling of the losses
        module, so tiny sample sets are always well-defined.
        """
        if self.method == "ls" and self.sigma_factor is not None:
            return _LsLowRankEvaluator(self)
        return _GenericEvaluator(self)

    def loss(self, indices) -> float:
        """One-off objective evaluation for a sample set."""
        return self.evaluator()(tuple(indices))


class _GenericEvaluator:
    """Builds the reconstruction operator and reads the loss off its statistics."""

    def __init__(self, objective: SamplingObjective):
        self.obj = objective

    def __call__(self, indices) -> float:
        obj = self.obj
        s = SampleSet(indices=tuple(indices), n=obj.n)
        if obj.method == "ls":
            op = ls_operator(obj.basis, obj.bandwidth, s)
        else:
            op = fp_operator(obj.laplacian, s)
        stats = node_statistics(obj.g, op, obj.sigma, obj.eta2)
        if obj.kind == "classification":
            return stats.classification_loss
        per_node = stats.sigma**2 + stats.nu**2 - 2.0 * stats.c
        return float(per_node.sum())


class _LsLowRankEvaluator:
    """Least-squares loss evaluation through k x k Gram algebra.

    With R = U_k pinv(V) for V = U_k restricted to the sample rows, every
    needed diagonal reduces to row-wise inner products of precomputed n x k
    factors against k x k matrices built from V^T V, so each candidate costs
    O(n k^2) instead of O(n^2 |S|).
    """

    def __init__(self, objective: SamplingObjective, rcond: float = DEFAULT_RCOND):
        k = objective.bandwidth
        self.u = objective.basis.vectors[:, :k]
        self.f = objective.sigma_factor
        m = objective.g
        self.gu = self.u if m is None else m @ self.u
        self.gf = self.f if m is None else m @ self.f
        self.sigma2 = np.einsum("ij,ij->i", self.gf, self.gf)
        self.sigma_std = np.sqrt(np.clip(self.sigma2, 0.0, None))
        self.k = k
        self.eta2 = objective.eta2
        self.kind = objective.kind
        self.rcond = rcond

    def __call__(self, indices) -> float:
        idx = list(indices)
        v = self.u[idx, :]
        lam, q = np.linalg.eigh(v.T @ v)
        # Cutoff in Gram-eigenvalue units. Squaring floors the noise of true
        # zeros near eps * lam_max, so the SVD-level rcond is unreachable
        # here; use the symmetric-pinv convention max(m, k) * eps instead.
        dim = max(len(idx), self.k)
        cutoff = float(lam[-1]) * max((self.rcond * dim) ** 2, dim * np.finfo(np.float64).eps)
        keep = lam > cutoff
        qk = q[:, keep]
        gram_pinv = (qk / lam[keep]) @ qk.T           # (V^T V)^+
        j = gram_pinv @ (v.T @ self.f[idx, :])        # pinv(V) F_S, k x r
        guj = self.gu @ j
        c = np.einsum("ij,ij->i", guj, self.gf)
        nu2 = np.einsum("ij,ij->i", guj, guj)
        if self.eta2 > 0:
            nu2 = nu2 + self.eta2 * np.einsum("ij,ij->i", self.gu @ gram_pinv, self.gu)
        if self.kind == "classification":
            nu = np.sqrt(np.clip(nu2, 0.0, None))
            _, p, _ = _mismatch_probabilities(c, self.sigma_std, nu)
            return float(p.sum())
        return float(np.sum(self.sigma2 + nu2 - 2.0 * c))


@dataclass(frozen=True)
class GreedyTrace:
    """Selection order with the objective value recorded after each addition."""

    chosen: SampleSet
    objective_values: tuple[float, ...]
    candidate_evaluations: tuple[int, ...]

    def __post_init__(self):
        if len(self.objective_values) != self.chosen.size:
            raise ValueError("one objective value per chosen node required")

    def prefix(self, size: int) -> SampleSet:
        """Sample set formed by the first `size` selections."""
        if not 1 <= size <= self.chosen.size:
            raise ValueError(f"prefix size {size} outside 1..{self.chosen.size}")
        return SampleSet(indices=self.chosen.indices[:size], n=self.chosen.n)


def random_sample(n: int, size: int, seed: int) -> SampleSet:
    """Uniform sample of `size` distinct nodes, deterministic per seed."""
    n = check_positive_int(n, "n")
    size = check_positive_int(size, "size")
    if size > n:
        raise ValueError(f"sample size {size} exceeds node count {n}")
    rng = rng_from(seed, 5)
    idx = rng.choice(n, size=size, replace=False)
    return SampleSet(indices=tuple(int(i) for i in idx), n=n)


def greedy_sample(objective: SamplingObjective, target_size: int) -> GreedyTrace:
    """Greedy forward selection minimizing the objective at every step.

    Each step evaluates the loss of S + {v} for every remaining candidate v
    and adds the strict argmin (ties fall to the lowest node index). The
    full trace to target_size is always produced.
    """
    n = objective.n
    target_size = check_positive_int(target_size, "target_size")
    if target_size > n:
        raise ValueError(f"target size {target_size} exceeds node count {n}")
    evaluate = objective.evaluator()
    chosen: list[int] = []
    values: list[float] = []
    eval_counts: list[int] = []
    remaining = list(range(n))
    for _ in range(target_size):
        best_node = -1
        best_loss = np.inf
        count = 0
        for v in remaining:
            try:
                loss = evaluate(tuple(chosen) + (v,))
            except Exception as exc:
                raise RuntimeError(f"objective evaluation failed for candidate node {v}") from exc
            if not np.isfinite(loss):
                raise RuntimeError(f"objective produced non-finite loss for candidate node {v}")
            count += 1
            if loss < best_loss:
                best_loss = loss
                best_node = v
        chosen.append(best_node)
        remaining.remove(best_node)
        values.append(float(best_loss))
        eval_counts.append(count)
    return GreedyTrace(
        chosen=SampleSet(indices=tuple(chosen), n=n),
        objective_values=tuple(values),
        candidate_evaluations=tuple(eval_counts),
    )


def audit_greedy_trace(objective: SamplingObjective, trace: GreedyTrace) -> bool:
    """Re-verify the per-step argmin property of a greedy trace exactly.

    Re-evaluates every candidate at every recorded step with the same
    evaluator greedy selection uses and confirms the chosen node attains the
    minimal loss (lowest index on ties). Raises ValueError at the first
    violated step.
    """
    evaluate = objective.evaluator()
    prefix: list[int] = []
    for step, picked in enumerate(trace.chosen.indices):
        best_node = -1
        best_loss = np.inf
        for v in range(objective.n):
            if v in prefix:
                continue
            loss = evaluate(tuple(prefix) + (v,))
            if loss < best_loss:
                best_loss = loss
                best_node = v
        if best_node != picked:
            raise ValueError(
                f"step {step}: greedy chose node {picked} but argmin is {best_node}"
            )
        if best_loss != trace.objective_values[step]:
            raise ValueError(
                f"step {step}: recorded loss {trace.objective_values[step]} "
                f"differs from re-evaluated {best_loss}"
            )
        prefix.append(picked)
    return True


def exhaustive_sample(
    objective: SamplingObjective, size: int, budget: int = 1_000_000
) -> SampleSet:
    """Global minimizer of the objective over all subsets of the given size.

    Subsets are scanned in lexicographic order and ties keep the first, so
    the result is deterministic. Refuses instances with more than `budget`
    subsets.
    """
    n = objective.n
    size = check_positive_int(size, "size")
    if size > n:
        raise ValueError(f"sample size {size} exceeds node count {n}")
    total = math.comb(n, size)
    if total > budget:
        raise ValueError(
            f"exhaustive search over C({n},{size}) = {total} subsets exceeds budget {budget}"
        )
    evaluate = objective.evaluator()
    best_loss = np.inf
    best: tuple[int, ...] | None = None
    for combo in itertools.combinations(range(n), size):
        loss = evaluate(combo)
        if loss < best_loss:
            best_loss = loss
            best = combo
    return SampleSet(indices=best, n=n)
