"""Graphs, random-graph generators, and spectral objects derived from them.

Everything downstream consumes a connected undirected weighted graph through
its dense matrices: adjacency A, degree D, the degree-normalized adjacency
(optionally augmented with self-loops of weight gamma), the symmetrically
normalized Laplacian L = I - D^{-1/2} A D^{-1/2}, and the eigendecomposition
of L with a deterministic sign convention.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass, field

import numpy as np

from ._validation import check_nonnegative, check_positive_int, check_symmetric, rng_from


class DisconnectedGraphError(ValueError):
    """Raised when a graph that must be connected is not."""


class EdgeListParseError(ValueError):
    """Raised when an edge-list file cannot be parsed."""


class GraphGenerationError(RuntimeError):
    """Raised when a random-graph generator exhausts its retry budget."""


def _component_count(n: int, edges: Iterable[tuple[int, int, float]]) -> int:
    """Number of connected components via union-find."""
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    count = n
    for i, j, _ in edges:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj
            count -= 1
    return count


@dataclass(frozen=True)
class Graph:
    """Connected undirected weighted graph with 0-based node ids.

    Edges are stored once per undirected pair, canonicalized to i < j.
    Construction validates index ranges, positive weights, absence of
    self-loops, and connectivity.
    """

    n: int
    edges: tuple[tuple[int, int, float], ...]
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        n = check_positive_int(self.n, "node count")
        canonical = []
        for i, j, w in self.edges:
            i, j, w = int(i), int(j), float(w)
            if i == j:
                raise ValueError(f"self-loop on node {i} not allowed")
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"edge ({i},{j}) out of range for n={n}")
            if not (w > 0 and np.isfinite(w)):
                raise ValueError(f"edge ({i},{j}) has non-positive weight {w}")
            canonical.append((min(i, j), max(i, j), w))
        canonical.sort()
        for (a, b, _), (c, d, _) in zip(canonical, canonical[1:]):
            if (a, b) == (c, d):
                raise ValueError(f"duplicate edge ({a},{b})")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "edges", tuple(canonical))
        comps = _component_count(n, canonical)
        if comps != 1:
            raise DisconnectedGraphError(
                f"graph must be connected, found {comps} components"
            )

    @property
    def num_edges(self) -> int:
        return len(self.edges)


def adjacency_matrix(g: Graph) -> np.ndarray:
    """Dense symmetric weighted adjacency matrix A."""
    a = np.zeros((g.n, g.n))
    for i, j, w in g.edges:
        a[i, j] = w
        a[j, i] = w
    return a


def degrees(g: Graph) -> np.ndarray:
    """Weighted degree vector (row sums of A)."""
    return adjacency_matrix(g).sum(axis=1)


def normalized_adjacency(g: Graph, gamma: float = 0.0) -> np.ndarray:
    """Degree-normalized adjacency (D+gI)^{-1/2}(A+gI)(D+gI)^{-1/2}.

    gamma adds a self-loop of weight gamma to every node; gamma=0 gives the
    plain normalized adjacency. Connectivity guarantees all degrees > 0.
    """
    gamma = check_nonnegative(gamma, "gamma")
    a = adjacency_matrix(g)
    d = a.sum(axis=1) + gamma
    a[np.diag_indices_from(a)] += gamma
    d_isqrt = 1.0 / np.sqrt(d)
    m = d_isqrt[:, None] * a * d_isqrt[None, :]
    return 0.5 * (m + m.T)


def laplacian(g: Graph) -> np.ndarray:
    """Symmetrically normalized Laplacian L = I - D^{-1/2} A D^{-1/2}."""
    lap = -normalized_adjacency(g, 0.0)
    lap[np.diag_indices_from(lap)] += 1.0
    return lap


@dataclass(frozen=True)
class SpectralBasis:
    """Eigendecomposition of a normalized Laplacian, ascending eigenvalues.

    Column j of `vectors` pairs with `values[j]`. Orthonormality, the
    [0, 2] spectral range, and the sign convention (first entry of largest
    magnitude in each column is positive) are enforced at construction.
    """

    values: np.ndarray
    vectors: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        vecs = np.asarray(self.vectors, dtype=np.float64)
        n = vals.shape[0]
        if vals.ndim != 1 or vecs.shape != (n, n):
            raise ValueError("eigenvalues must be length-n, eigenvectors n x n")
        if np.any(np.diff(vals) < -1e-10):
            raise ValueError("eigenvalues must be nondecreasing")
        if vals[0] < -1e-10 or vals[-1] > 2.0 + 1e-10:
            raise ValueError(
                f"eigenvalues outside the normalized-Laplacian range [0, 2]: "
                f"[{vals[0]:.3e}, {vals[-1]:.3e}]"
            )
        gram_gap = float(np.linalg.norm(vecs.T @ vecs - np.eye(n)))
        if gram_gap > 1e-10:
            raise ValueError(f"eigenvectors not orthonormal: ||U^T U - I|| = {gram_gap:.3e}")
        lead = np.take_along_axis(
            vecs, np.argmax(np.abs(vecs), axis=0)[None, :], axis=0
        ).ravel()
        if np.any(lead < 0):
            raise ValueError("sign convention violated: leading entries must be positive")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "vectors", vecs)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def is_degenerate_at(self, k: int) -> bool:
        """True when the spectral gap at bandwidth k nearly vanishes.

        The span of the k lowest eigenvectors (hence any bandlimited
        projector) is then solver-dependent.
        """
        if k >= self.n:
            return False
        return abs(self.values[k] - self.values[k - 1]) < 1e-9


def _fix_signs(vecs: np.ndarray) -> np.ndarray:
    """Flip columns so the first entry of largest magnitude is positive."""
    fixed = vecs.copy()
    for j in range(fixed.shape[1]):
        col = fixed[:, j]
        lead = col[np.argmax(np.abs(col))]
        if lead < 0:
            fixed[:, j] = -col
    return fixed


def eigendecompose(lap: np.ndarray) -> SpectralBasis:
    """Full eigendecomposition of a symmetric normalized Laplacian.

    Eigenvalues ascend; eigenvector signs follow the deterministic
    convention of SpectralBasis. Raises on asymmetric input.
    """
    lap = check_symmetric(lap, "laplacian", tol=1e-10)
    vals, vecs = np.linalg.eigh(lap)
    return SpectralBasis(values=vals, vectors=_fix_signs(vecs))


def generate_ba(n: int, m: int, seed: int) -> Graph:
    """Preferential-attachment random graph with unit weights.

    Growth starts from a clique on m+1 nodes; every later node attaches to
    m distinct existing nodes chosen with probability proportional to
    degree, so at least one growth step is required (n >= m + 2).
    Deterministic for a fixed seed.
    """
    n = check_positive_int(n, "n")
    m = check_positive_int(m, "m")
    if n <= m + 1:
        raise ValueError(
            f"preferential attachment needs n > m + 1 "
            f"(clique on m+1 nodes plus at least one growth step), got n={n}, m={m}"
        )
    rng = rng_from(seed, 0)
    edges = [(i, j, 1.0) for i in range(m + 1) for j in range(i + 1, m + 1)]
    # each clique node currently has degree m
    repeated = [v for v in range(m + 1) for _ in range(m)]
    for v in range(m + 1, n):
        targets: set[int] = set()
        while len(targets) < m:
            targets.add(repeated[int(rng.integers(len(repeated)))])
        for t in sorted(targets):
            edges.append((t, v, 1.0))
            repeated.append(t)
        repeated.extend([v] * m)
    return Graph(n=n, edges=tuple(edges), metadata={"model": "ba", "m": m, "seed": int(seed)})


def generate_sbm(
    n: int, num_blocks: int, p_in: float, p_out: float, seed: int, max_retries: int = 100
) -> Graph:
    """Stochastic blockmodel with equal-sized blocks, resampled until connected.

    Blocks get floor(n / num_blocks) nodes with the remainder spread over the
    first blocks. Edges are independent Bernoulli draws: p_in within a block,
    p_out across blocks. Each retry derives a fresh seed; after `max_retries`
    disconnected draws a GraphGenerationError is raised.
    """
    n = check_positive_int(n, "n")
    num_blocks = check_positive_int(num_blocks, "num_blocks")
    if n < num_blocks:
        raise ValueError(f"need n >= num_blocks, got n={n}, num_blocks={num_blocks}")
    if not (0.0 <= p_out <= p_in <= 1.0):
        raise ValueError(f"need 0 <= p_out <= p_in <= 1, got p_in={p_in}, p_out={p_out}")

    base, rem = divmod(n, num_blocks)
    block_sizes = tuple(base + (b < rem) for b in range(num_blocks))
    labels = np.repeat(np.arange(num_blocks), block_sizes)

    for attempt in range(max_retries):
        rng = rng_from(seed, 1, attempt)
        draws = rng.random((n, n))
        same = labels[:, None] == labels[None, :]
        probs = np.where(same, p_in, p_out)
        iu, ju = np.triu_indices(n, k=1)
        present = draws[iu, ju] < probs[iu, ju]
        edges = tuple(
            (int(i), int(j), 1.0) for i, j in zip(iu[present], ju[present])
        )
        if edges and _component_count(n, edges) == 1:
            return Graph(
                n=n,
                edges=edges,
                metadata={
                    "model": "sbm",
                    "blocks": num_blocks,
                    "block_sizes": block_sizes,
                    "p_in": p_in,
                    "p_out": p_out,
                    "seed": int(seed),
                    "attempt": attempt,
                },
            )
    raise GraphGenerationError(
        f"no connected SBM after {max_retries} draws "
        f"(n={n}, blocks={num_blocks}, p_in={p_in}, p_out={p_out}, seed={seed})"
    )


def load_graph(path) -> Graph:
    """Load a graph from an edge-list text file.

    Format: one `i,j,weight` triple per line with 0-based integer ids;
    lines starting with `#` and blank lines are ignored; an undirected edge
    may be listed in either orientation; repeated pairs keep the last
    weight. Raises EdgeListParseError with the offending line number, or
    DisconnectedGraphError with the component count.
    """
    weights: dict[tuple[int, int], float] = {}
    max_node = -1
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise EdgeListParseError(
                    f"{path}:{lineno}: expected 'i,j,weight', got {line!r}"
                )
            try:
                i, j, w = int(parts[0]), int(parts[1]), float(parts[2])
            except ValueError as exc:
                raise EdgeListParseError(f"{path}:{lineno}: {exc}") from exc
            if i == j:
                raise EdgeListParseError(f"{path}:{lineno}: self-loop on node {i}")
            if i < 0 or j < 0:
                raise EdgeListParseError(f"{path}:{lineno}: negative node id")
            if not (w > 0 and np.isfinite(w)):
                raise EdgeListParseError(f"{path}:{lineno}: weight must be positive, got {w}")
            weights[(min(i, j), max(i, j))] = w
            max_node = max(max_node, i, j)
    if max_node < 0:
        raise EdgeListParseError(f"{path}: no edges found")
    edges = tuple((i, j, w) for (i, j), w in weights.items())
    return Graph(n=max_node + 1, edges=edges, metadata={"model": "file", "path": str(path)})
