"""edgeaudit: anonymize social graphs, detect implausible fake edges via
graph-embedding plausibility, quantify the resulting privacy loss, and
harden the anonymizers against that attack."""

__version__ = "0.1.0"

from .anonymize import (
    KdaConfig,
    RealizationError,
    SaladpConfig,
    is_k_anonymous,
    kda_anonymize,
    kda_degree_sequence,
    saladp_anonymize,
    saladp_noise_dk2,
)
from .embedding import (
    Embedding,
    TrainConfig,
    WalkConfig,
    WalkCorpus,
    generate_walks,
    neighborhood_pairs,
    train_skipgram,
)
from .enhance import PlausibilityPrior, enhanced_kda, enhanced_saladp, fit_prior, weighted_pick
from .graphs import (
    DK2Series,
    EdgeDiff,
    Graph,
    GraphFormatError,
    dk2_series,
    edge_diff,
    load_edge_list,
    write_edge_list,
)
from .metrics import (
    PrivacyReport,
    RocResult,
    UtilityReport,
    degree_difference,
    dk2_noise_stats,
    precision_recall,
    roc_auc,
    utility_similarity,
    utility_vectors,
)
from .pipeline import AttackReport, PipelineConfig, hyperparam_sweep, noise_study, run_attack
from .plausibility import (
    EdgeScores,
    bray_curtis,
    cosine,
    euclidean,
    score_edges,
    structural_baselines,
)
from .recover import (
    GmmParams,
    PosteriorTable,
    baseline_random,
    fit_gmm,
    map_classify,
    recover_graph,
)

__all__ = [name for name in dir() if not name.startswith("_")]
