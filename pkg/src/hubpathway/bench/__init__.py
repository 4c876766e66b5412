"""Synthetic benchmark suite and the analyses built on it."""

from .analysis import (
    ABLATION_ARMS,
    ComplexityRow,
    FinetunedSet,
    KSweepPoint,
    OracleTable,
    PathwayRun,
    WeightQuality,
    adapt_hub,
    complexity_table,
    finetune_experts,
    k_sweep,
    oracle_comparison,
    run_ablations,
    run_pathway,
    weight_quality,
)
from .pretrain import (
    DEFAULT_BODIES,
    HubEntry,
    HubSpec,
    PretrainConfig,
    PretrainReport,
    default_hub_spec,
    fit_expert,
    pretrain_hub,
)
from .synth import (
    INPUT_DIM,
    SUITE_NAMES,
    TARGET_CLASSES,
    SyntheticTask,
    alt_target,
    linear_probe_accuracy,
    make_suite,
    read_task_csv,
    write_task_csv,
)

__all__ = [
    "SyntheticTask", "make_suite", "alt_target", "SUITE_NAMES",
    "INPUT_DIM", "TARGET_CLASSES",
    "write_task_csv", "read_task_csv", "linear_probe_accuracy",
    "PretrainConfig", "HubEntry", "HubSpec", "PretrainReport",
    "default_hub_spec", "pretrain_hub", "fit_expert", "DEFAULT_BODIES",
    "adapt_hub", "PathwayRun", "run_pathway", "run_ablations", "ABLATION_ARMS",
    "FinetunedSet", "finetune_experts",
    "WeightQuality", "weight_quality",
    "KSweepPoint", "k_sweep",
    "OracleTable", "oracle_comparison",
    "ComplexityRow", "complexity_table",
]
