"""Linear label-generating models of the form f(X) = G X w.

A linearized GCN collapses to a single graph matrix G (a power of the
augmented normalized adjacency) and a weight vector w (the product of its
layer matrices), so labels are sign(G X w). Because feature columns are
i.i.d., the effective covariance Cov(Xw) / ||w||^2 reduces to the prior
covariance itself, independent of w.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import check_positive_int, check_square, rng_from


def sign_labels(values: np.ndarray) -> np.ndarray:
    """Elementwise sign with the fixed convention sign(0) = +1."""
    return np.where(np.asarray(values) >= 0, 1, -1)


@dataclass(frozen=True)
class ClassifierModel:
    """The pair (G, w) defining f(X) = G X w, plus a construction record."""

    g: np.ndarray
    w: np.ndarray
    construction: str = "explicit"

    def __post_init__(self):
        g = check_square(self.g, "G")
        w = np.asarray(self.w, dtype=np.float64).ravel()
        if w.size == 0 or not np.any(np.abs(w) > 0):
            raise ValueError("weight vector w must be nonzero")
        if not np.all(np.isfinite(w)):
            raise ValueError("weight vector w contains non-finite entries")
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "w", w)

    @property
    def n(self) -> int:
        return self.g.shape[0]

    @property
    def d(self) -> int:
        return self.w.shape[0]

    def decision_function(self, x) -> np.ndarray:
        """f(X) = G X w for an n x d feature matrix."""
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.n, self.d):
            raise ValueError(f"features must be {self.n} x {self.d}, got {x.shape}")
        return self.g @ (x @ self.w)

    def predict(self, x) -> np.ndarray:
        """Labels sign(f(X)) in {-1, +1}^n, with sign(0) = +1."""
        return sign_labels(self.decision_function(x))


def glorot_uniform(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    """Glorot-uniform weight matrix: entries uniform on +-sqrt(6/(fan_in+fan_out))."""
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


def build_sgc(adjacency_aug: np.ndarray, r: int, widths, seed: int) -> ClassifierModel:
    """Linearized GCN with r propagation steps and random collapsed weights.

    `widths` lists the layer dimensions, e.g. (64, 32, 1) for
    W1 in R^{64x32}, W2 in R^{32x1}; the final width must be 1. Weight
    matrices are Glorot-uniform and multiplied into a single d-vector, so
    G = adjacency_aug^r and w = W1 W2 ... collapsed. Deterministic per seed.
    """
    adjacency_aug = check_square(adjacency_aug, "augmented adjacency")
    r = check_positive_int(r, "r")
    widths = tuple(check_positive_int(v, "layer width") for v in widths)
    if len(widths) < 2:
        raise ValueError("need at least an input and an output width")
    if widths[-1] != 1:
        raise ValueError(f"final layer width must be 1, got {widths[-1]}")
    rng = rng_from(seed, 4)
    w = np.eye(widths[0])
    for fan_in, fan_out in zip(widths, widths[1:]):
        w = w @ glorot_uniform(rng, fan_in, fan_out)
    return ClassifierModel(
        g=np.linalg.matrix_power(adjacency_aug, r),
        w=w.ravel(),
        construction=f"sgc(r={r}, widths={widths}, seed={int(seed)})",
    )


def polynomial_filter(adjacency_aug: np.ndarray, coefficients) -> np.ndarray:
    """Polynomial of the augmented adjacency, sum_j coeff_j A^j, by Horner."""
    a = check_square(adjacency_aug, "augmented adjacency")
    coeffs = [float(c) for c in coefficients]
    if not coeffs:
        raise ValueError("need at least one coefficient")
    eye = np.eye(a.shape[0])
    g = coeffs[-1] * eye
    for c in reversed(coeffs[:-1]):
        g = g @ a + c * eye
    return g


def polynomial_model(adjacency_aug: np.ndarray, coefficients, d: int = 1) -> ClassifierModel:
    """Classifier with a polynomial filter G and an all-ones weight vector.

    Any nonzero w yields the same analytic losses under i.i.d. columns, so
    ones is the canonical choice.
    """
    return ClassifierModel(
        g=polynomial_filter(adjacency_aug, coefficients),
        w=np.ones(check_positive_int(d, "d")),
        construction=f"polynomial(coefficients={tuple(float(c) for c in coefficients)})",
    )


def centering_model(n: int) -> ClassifierModel:
    """Classifier whose labels are the sign of the mean-subtracted signal.

    G = I - (1/n) 11^T with a single feature column; used for real-signal
    runs where class labels are defined as above/below the signal mean.
    """
    n = check_positive_int(n, "n")
    g = np.eye(n) - np.full((n, n), 1.0 / n)
    return ClassifierModel(g=g, w=np.ones(1), construction="centering")


def effective_covariance(sigma: np.ndarray, w, columns_iid: bool = True) -> np.ndarray:
    """Effective covariance Cov(Xw) / ||w||^2 of the scalar signal Xw.

    Only the i.i.d.-columns feature model is supported, under which the
    result equals sigma exactly for every nonzero w.
    """
    sigma = check_square(sigma, "covariance")
    w = np.asarray(w, dtype=np.float64).ravel()
    if w.size == 0 or not np.any(np.abs(w) > 0):
        raise ValueError("weight vector w must be nonzero")
    if not columns_iid:
        raise ValueError(
            "cross-column-dependent feature models are not supported; "
            "only i.i.d. columns are realized"
        )
    return sigma
