"""Post-selection dynamic ensemble selection (PS-DES)."""

from ._psdes import (
    Dataset,
    PsDesSystem,
    accuracy,
    f_macro,
    fit_system,
    load_csv,
    majority_vote,
    mcc,
    potential,
    run_experiment,
    stratified_split,
    wilcoxon_signed_rank,
)

__all__ = [
    "Dataset",
    "PsDesSystem",
    "accuracy",
    "f_macro",
    "fit_system",
    "load_csv",
    "majority_vote",
    "mcc",
    "potential",
    "run_experiment",
    "stratified_split",
    "wilcoxon_signed_rank",
]

__version__ = "0.1.0"
