"""Document retrieval over Bayesian and possibilistic term networks.

Three ranking models share one indexed corpus: a probabilistic network
with exact propagation on a learned term forest, a possibilistic model
scoring documents by possibility/necessity pairs, and a hybrid that
propagates possibilities over the learned topology. Every inference
path has a brute-force enumeration counterpart in :mod:`netret.oracle`.
"""

from netret import errors
from netret.bnr import (
    BnrModel,
    Cpt,
    bnr_retrieve,
    bnr_score,
    build_model,
    doc_prob,
    estimate_cpts,
    pearl_propagate,
    root_prior,
    term_cpt_jaccard,
)
from netret.corpus import (
    CorpusIndex,
    Document,
    IndexOptions,
    bnr_weights,
    build_index,
    hybrid_weights,
    tokenize,
)
from netret.hybrid import (
    HybridModel,
    PossPosteriors,
    hybrid_retrieve,
    hybrid_score,
    poss_propagate,
    prob_to_poss,
    translate_model,
)
from netret.network import (
    Dag,
    Variable,
    attach_documents,
    chow_liu_forest,
    learn_structure,
    mutual_information,
    orient_forest,
    validate_polytree,
)
from netret.pir import (
    PossTable,
    ScorePair,
    pir_joint,
    pir_retrieve,
    pir_score,
    pir_tables,
)

__version__ = "0.1.0"

__all__ = [
    "BnrModel",
    "CorpusIndex",
    "Cpt",
    "Dag",
    "Document",
    "HybridModel",
    "IndexOptions",
    "PossPosteriors",
    "PossTable",
    "ScorePair",
    "Variable",
    "attach_documents",
    "bnr_retrieve",
    "bnr_score",
    "bnr_weights",
    "build_index",
    "build_model",
    "chow_liu_forest",
    "doc_prob",
    "errors",
    "estimate_cpts",
    "hybrid_retrieve",
    "hybrid_score",
    "hybrid_weights",
    "learn_structure",
    "mutual_information",
    "orient_forest",
    "pearl_propagate",
    "pir_joint",
    "pir_retrieve",
    "pir_score",
    "pir_tables",
    "poss_propagate",
    "prob_to_poss",
    "root_prior",
    "term_cpt_jaccard",
    "tokenize",
    "translate_model",
    "validate_polytree",
]
