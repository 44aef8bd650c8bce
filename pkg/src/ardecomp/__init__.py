"""Attract-repel decomposition of symmetric networks."""

__version__ = "0.1.0"

from .complete import (
    CompletionResult,
    SvtOptions,
    complete,
    complete_fixed,
    complete_nuclear_min,
    complete_psd_nuclear_min,
    nuclear_norm,
    shift_to_psd,
)
from .metrics import (
    HeterophilyReport,
    embedding_heterophily,
    network_heterophily,
    node_heterophily,
    repel_neighbors,
    sim1,
    sim2,
    substitute_score,
)
from .netcore import (
    ARDecomposition,
    Spectrum,
    SymmetricNetwork,
    load_network,
    log1p_transform,
    save_network,
)
from .rankselect import bcv_select_rank
from .spectral import (
    decompose,
    eigendecompose,
    rank_error_curve,
    reconstruct,
    reconstruction_error,
    split_ar,
)
