"""Task-aware sampling and reconstruction of noisy graph signals.

Core pieces: random-graph generation and spectral bases (`graphs`), Gaussian
signal models (`signals`), least-squares and feature-propagation
reconstruction (`reconstruction`), linearized-GCN label models
(`classifier`), analytic and Monte-Carlo losses (`losses`), sample-set
selection (`samplers`), and the experiment sweep CLI (`experiment`, `cli`).
"""

from .classifier import (
    ClassifierModel,
    build_sgc,
    centering_model,
    effective_covariance,
    polynomial_filter,
    polynomial_model,
)
from .graphs import (
    DisconnectedGraphError,
    EdgeListParseError,
    Graph,
    GraphGenerationError,
    SpectralBasis,
    adjacency_matrix,
    eigendecompose,
    generate_ba,
    generate_sbm,
    laplacian,
    load_graph,
    normalized_adjacency,
)
from .losses import (
    McEstimate,
    McLosses,
    NodeLossReport,
    OutputErrorReport,
    SpectralBoundCheck,
    classification_loss,
    monte_carlo_losses,
    node_statistics,
    output_error_and_triangle,
    reconstruction_loss,
    sign_mismatch_probability,
    spectral_bound_check,
)
from .reconstruction import (
    ConditioningWarning,
    FeaturePropagationReconstructor,
    LeastSquaresReconstructor,
    NumericalConditioningError,
    ReconstructionOperator,
    SampleSet,
    fp_operator,
    ls_operator,
    reconstruct,
)
from .samplers import (
    GreedyTrace,
    SamplingObjective,
    audit_greedy_trace,
    exhaustive_sample,
    greedy_sample,
    random_sample,
)
from .signals import (
    BandwidthDegeneracyWarning,
    CovarianceSpec,
    FeatureMatrix,
    bandlimiting_projector,
    load_signal_csv,
    observe,
    realize_covariance,
    sample_features,
)

__version__ = "0.1.0"

__all__ = [
    "BandwidthDegeneracyWarning",
    "ClassifierModel",
    "ConditioningWarning",
    "CovarianceSpec",
    "DisconnectedGraphError",
    "EdgeListParseError",
    "FeatureMatrix",
    "FeaturePropagationReconstructor",
    "Graph",
    "GraphGenerationError",
    "GreedyTrace",
    "LeastSquaresReconstructor",
    "McEstimate",
    "McLosses",
    "NodeLossReport",
    "NumericalConditioningError",
    "OutputErrorReport",
    "SpectralBoundCheck",
    "ReconstructionOperator",
    "SampleSet",
    "SamplingObjective",
    "SpectralBasis",
    "adjacency_matrix",
    "audit_greedy_trace",
    "bandlimiting_projector",
    "build_sgc",
    "centering_model",
    "classification_loss",
    "effective_covariance",
    "eigendecompose",
    "exhaustive_sample",
    "fp_operator",
    "generate_ba",
    "generate_sbm",
    "greedy_sample",
    "laplacian",
    "load_graph",
    "load_signal_csv",
    "ls_operator",
    "monte_carlo_losses",
    "node_statistics",
    "normalized_adjacency",
    "observe",
    "output_error_and_triangle",
    "polynomial_filter",
    "polynomial_model",
    "random_sample",
    "realize_covariance",
    "reconstruct",
    "reconstruction_loss",
    "sample_features",
    "sign_mismatch_probability",
    "spectral_bound_check",
]
