"""Analytic and Monte-Carlo losses for reconstruction-then-classify pipelines.

For a linear label model f(X) = G X w with i.i.d. Gaussian feature columns,
the clean output f(X)_i and reconstructed output f(X_hat)_i at each node are
jointly Gaussian and zero-mean, so the per-node misclassification
probability is arccos(rho_i) / pi where rho_i is their correlation. The
second moments reduce to diagonal entries of small matrix products:

    c_i      = (M R C_{S,:} M^T)_{ii}          cross-covariance
    sigma_i^2 = (M C M^T)_{ii}                  clean-output variance
    nu_i^2   = (M R (C_{S,S} + eta2 I) R^T M^T)_{ii}   reconstructed variance

with M = G for classification and M = I for the feature-space
reconstruction loss sum_i (sigma_i^2 + nu_i^2 - 2 c_i), which scales
linearly in the number of feature columns d.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import check_nonnegative, check_positive_int, check_square, check_symmetric
from .classifier import ClassifierModel, sign_labels
from .reconstruction import ReconstructionOperator
from .signals import covariance_factor

# Below this, a clean or reconstructed output is treated as almost surely 0
# and the mismatch probability degenerates to 1/2 (a fixed sign against a
# symmetric zero-mean one).
STD_FLOOR = 1e-12


def sign_mismatch_probability(rho: float) -> float:
    """P(sign(X) != sign(Y)) for standard bivariate normals with correlation rho.

    Accepts |rho| up to 1 + 1e-9 to absorb roundoff and clamps into [-1, 1];
    larger magnitudes raise.
    """
    rho = float(rho)
    if abs(rho) > 1.0 + 1e-9:
        raise ValueError(f"correlation must lie in [-1, 1], got {rho}")
    return float(np.arccos(np.clip(rho, -1.0, 1.0)) / np.pi)


def _mismatch_probabilities(
    c: np.ndarray, sigma: np.ndarray, nu: np.ndarray
) -> tuple[np.ndarray, np.ndarray, int]:
    """Vectorized per-node (rho, p, clamp_count) with degenerate handling.

    Nodes where either standard deviation falls below STD_FLOOR get rho = 0
    and p = 1/2; elsewhere rho = c / (sigma nu) clamped into [-1, 1] with
    clamp events counted.
    """
    degenerate = (sigma <= STD_FLOOR) | (nu <= STD_FLOOR)
    denom = np.where(degenerate, 1.0, sigma * nu)
    raw = np.where(degenerate, 0.0, c / denom)
    clamp_events = int(np.count_nonzero(np.abs(raw) > 1.0))
    rho = np.clip(raw, -1.0, 1.0)
    p = np.arccos(rho) / np.pi
    return rho, p, clamp_events


@dataclass(frozen=True)
class NodeLossReport:
    """Per-node second-moment statistics and misclassification probabilities."""

    c: np.ndarray
    sigma: np.ndarray
    nu: np.ndarray
    rho: np.ndarray
    p_misclass: np.ndarray
    clamp_events: int
    classification_loss: float
    reconstruction_loss: float | None = None

    @property
    def n(self) -> int:
        return self.c.shape[0]


def node_statistics(
    g_matrix: np.ndarray | None,
    op: ReconstructionOperator,
    c_matrix: np.ndarray,
    eta2: float,
) -> NodeLossReport:
    """Per-node c_i, sigma_i, nu_i, rho_i and mismatch probabilities for M = G.

    g_matrix None means M = I. Only diagonals are ever needed, so the
    products are evaluated as row-wise inner products of n x |S| factors
    rather than full triple products. The covariance must be symmetric
    (its transpose is used implicitly for the cross term).
    """
    eta2 = check_nonnegative(eta2, "eta2")
    cov = check_symmetric(c_matrix, "effective covariance", tol=1e-8)
    r = op.matrix
    idx = list(op.sample_set.indices)
    if cov.shape[0] != r.shape[0]:
        raise ValueError(
            f"covariance is {cov.shape[0]} x {cov.shape[0]}, operator has {r.shape[0]} rows"
        )

    if g_matrix is None:
        a = r                                  # M R, n x |S|
        b = cov[:, idx]                        # M C_{:,S}
        sigma2 = np.diag(cov).copy()
    else:
        m = check_square(g_matrix, "G")
        if m.shape[0] != cov.shape[0]:
            raise ValueError(f"G is {m.shape[0]} x {m.shape[0]}, covariance {cov.shape[0]}")
        a = m @ r
        mc = m @ cov
        b = mc[:, idx]
        sigma2 = np.einsum("ij,ij->i", mc, m)

    c = np.einsum("ij,ij->i", a, b)
    noisy = cov[np.ix_(idx, idx)].copy()
    noisy[np.diag_indices_from(noisy)] += eta2
    nu2 = np.einsum("ij,ij->i", a @ noisy, a)

    sigma = np.sqrt(np.clip(sigma2, 0.0, None))
    nu = np.sqrt(np.clip(nu2, 0.0, None))
    rho, p, clamps = _mismatch_probabilities(c, sigma, nu)
    return NodeLossReport(
        c=c,
        sigma=sigma,
        nu=nu,
        rho=rho,
        p_misclass=p,
        clamp_events=clamps,
        classification_loss=float(p.sum()),
    )


def classification_loss(report: NodeLossReport) -> float:
    """Expected number of misclassified nodes, sum_i arccos(rho_i) / pi."""
    return float(report.p_misclass.sum())


def reconstruction_loss(
    op: ReconstructionOperator, sigma: np.ndarray, eta2: float, d: int
) -> float:
    """Expected squared Frobenius reconstruction error E ||X - X_hat||_F^2.

    Evaluated analytically with M = I; i.i.d. columns make the expectation
    additive across the d feature columns.
    """
    d = check_positive_int(d, "d")
    stats = node_statistics(None, op, sigma, eta2)
    per_node = stats.sigma**2 + stats.nu**2 - 2.0 * stats.c
    return d * float(per_node.sum())


@dataclass(frozen=True)
class OutputErrorReport:
    """Per-node expected squared output error and its law-of-cosines residual.

    At each node the clean and reconstructed output standard deviations and
    the angle pi * p_misclass form a triangle whose opposite side squared is
    the normalized output error; `triangle_residual` measures how far the
    computed quantities are from that identity.
    """

    error_out: np.ndarray
    triangle_residual: np.ndarray


def output_error_and_triangle(report: NodeLossReport, d: int) -> OutputErrorReport:
    """Expected squared output error per node and the triangle-identity residual."""
    d = check_positive_int(d, "d")
    sigma2 = report.sigma**2
    nu2 = report.nu**2
    error_out = d * (sigma2 + nu2 - 2.0 * report.c)
    law_of_cosines = sigma2 + nu2 - 2.0 * report.sigma * report.nu * np.cos(
        np.pi * report.p_misclass
    )
    return OutputErrorReport(
        error_out=error_out,
        triangle_residual=np.abs(error_out / d - law_of_cosines),
    )


@dataclass(frozen=True)
class SpectralBoundCheck:
    """Total output error against its spectral-norm bound."""

    lhs: float
    rhs: float
    holds: bool


def spectral_bound_check(
    g_matrix: np.ndarray, report: NodeLossReport, rec_loss: float, d: int
) -> SpectralBoundCheck:
    """Check sum_i error_out_i <= ||G||_2^2 * reconstruction loss.

    `report` must carry the M = G statistics and `rec_loss` the d-scaled
    reconstruction loss for the same operator and noise level. The
    comparison allows 1e-8 relative slack plus a roundoff floor so the
    perfect-reconstruction case (both sides zero to machine precision)
    passes.
    """
    errors = output_error_and_triangle(report, d)
    lhs = float(errors.error_out.sum())
    rhs = float(np.linalg.norm(g_matrix, 2) ** 2 * rec_loss)
    slack = 1e-8 * abs(rhs) + 1e-10 * report.n * d
    return SpectralBoundCheck(lhs=lhs, rhs=rhs, holds=lhs <= rhs + slack)


@dataclass(frozen=True)
class McEstimate:
    """Monte-Carlo mean with its standard error."""

    mean: float
    standard_error: float
    trials: int

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("need at least one trial")
        if self.standard_error < 0:
            raise ValueError("standard error must be nonnegative")


@dataclass(frozen=True)
class McLosses:
    classification: McEstimate
    reconstruction: McEstimate


def monte_carlo_losses(
    model: ClassifierModel,
    sigma: np.ndarray,
    op: ReconstructionOperator,
    eta2: float,
    trials: int,
    seed: int,
) -> McLosses:
    """Paired Monte-Carlo estimates of classification and reconstruction loss.

    Each trial draws one feature matrix and one noise realization, observes
    on the operator's sample set, reconstructs, and records the
    sign-mismatch count between clean and reconstructed outputs (same X on
    both sides) and the squared Frobenius reconstruction error. Trials use
    independently derived seeds, so accumulation is order-independent.
    """
    trials = int(trials)
    if trials < 100:
        raise ValueError(f"need at least 100 trials for stable errors, got {trials}")
    counts, errors = monte_carlo_samples(model, sigma, op, eta2, trials, seed)
    return McLosses(
        classification=mc_estimate(counts),
        reconstruction=mc_estimate(errors),
    )


def mc_estimate(samples: np.ndarray) -> McEstimate:
    """Mean and standard error of a vector of per-trial scalars."""
    samples = np.asarray(samples, dtype=np.float64)
    trials = samples.shape[0]
    se = float(samples.std(ddof=1) / np.sqrt(trials)) if trials > 1 else 0.0
    return McEstimate(mean=float(samples.mean()), standard_error=se, trials=trials)


def monte_carlo_samples(
    model: ClassifierModel,
    sigma: np.ndarray,
    op: ReconstructionOperator,
    eta2: float,
    trials: int,
    seed: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Raw per-trial (mismatch count, squared error) samples behind the estimates."""
    eta2 = check_nonnegative(eta2, "eta2")
    trials = check_positive_int(trials, "trials")
    factor = covariance_factor(sigma)
    idx = list(op.sample_set.indices)
    eta = np.sqrt(eta2)
    d = model.d

    mismatch_counts = np.empty(trials)
    squared_errors = np.empty(trials)
    for trial, child in enumerate(np.random.SeedSequence(int(seed)).spawn(trials)):
        rng = np.random.default_rng(child)
        x = factor @ rng.standard_normal((factor.shape[1], d))
        obs = x[idx, :]
        if eta2 > 0:
            obs = obs + eta * rng.standard_normal(obs.shape)
        x_hat = op.matrix @ obs
        clean = model.g @ (x @ model.w)
        noisy = model.g @ (x_hat @ model.w)
        mismatch_counts[trial] = np.count_nonzero(sign_labels(clean) != sign_labels(noisy))
        squared_errors[trial] = float(np.sum((x - x_hat) ** 2))
    return mismatch_counts, squared_errors
