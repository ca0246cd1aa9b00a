"""Disentangled deep generative modeling of dynamic attributed graphs.

The package splits into a data layer (snapshot sequences, padding,
serialization, synthetic generators), a model layer (factor-structured
decoder, factorized/full variational encoders, ELBO training), and an
evaluation layer (temporal-graph statistics compared by MMD, latent-factor
traversal probes).
"""

from .data import (
    DatasetParseError,
    DynamicGraph,
    DynamicGraphDataset,
    GraphSnapshot,
    pad_to,
    read_dataset,
    validate,
    write_dataset,
)
from .synth import (
    FactorLabels,
    TimedEdgeStream,
    attach_synthetic_features,
    discretize,
    generate_dynamic_ba,
    generate_toy_disentangled,
    read_factor_labels,
    toy_graph_from_labels,
    write_factor_labels,
)
from .latent import (
    FACTOR_NAMES,
    GaussianParams,
    LatentState,
    PosteriorSet,
    reparameterize,
    sample_prior,
)
from .decoder import GraphDecoder, binarize
from .encoders import FactorizedEncoder, FullEncoder, SnapshotEncoder, StaticEncoder
from .model import DynamicGraphVAE, ModelConfig, dataset_to_tensors, graphs_to_tensors
from .checkpoint import load_checkpoint, read_metadata, save_checkpoint
from .training import (
    EpochStats,
    TrainConfig,
    TrainReport,
    TrainingDiverged,
    elbo,
    elbo_terms,
    kl_standard_normal,
    parse_train_config,
    read_report,
    reconstruction_auc,
    reconstruction_loss,
    train,
    write_report,
)
from .metrics import (
    EvalReport,
    STATISTIC_NAMES,
    StatisticVector,
    betweenness_stat,
    burstiness_stat,
    communicability_stats,
    evaluate,
    mmd,
    node_attribute_metrics,
    temporal_correlation,
)
from .probes import ProbeResult, ablation_merged_z, ablation_no_f, traverse

__version__ = "0.1.0"
