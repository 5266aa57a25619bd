"""Audio-visual saliency metrics and signal utilities.

Thin wrapper over the C++ core: saliency metrics (NSS, CC, SIM, AUC-Judd,
shuffled AUC, KL), fixation density maps, one-way ANOVA, and the audio
frontend (resampling, log-mel spectrograms).
"""

from ._core import (
    AUDIO_RATE,
    KL_EPSILON,
    MEL_BANDS,
    AnovaResult,
    AvsalError,
    anova_oneway,
    auc_judd,
    cc,
    density_map,
    kl_div,
    log_mel,
    mep,
    nss,
    read_map,
    resample,
    sauc,
    sim,
    write_map,
)

__all__ = [
    "AUDIO_RATE",
    "KL_EPSILON",
    "MEL_BANDS",
    "AnovaResult",
    "AvsalError",
    "anova_oneway",
    "auc_judd",
    "cc",
    "density_map",
    "kl_div",
    "log_mel",
    "mep",
    "nss",
    "read_map",
    "resample",
    "sauc",
    "sim",
    "write_map",
]
