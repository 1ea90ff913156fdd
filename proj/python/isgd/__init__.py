"""Inconsistent stochastic gradient descent: training core and batch-size
time model, backed by the C++ extension module."""

from isgd._core import (
    Activation,
    BatchScenario,
    BatchSearchResult,
    Dataset,
    DivergenceError,
    EvalRecord,
    IterationRecord,
    LossAndGrad,
    LossPrediction,
    LrTier,
    NetworkSpec,
    OptimizerConfig,
    ParameterVector,
    SpcWindow,
    SystemModel,
    TrainingReport,
    Variant,
    accuracy,
    arrange_scenario,
    batch_count,
    batch_loss,
    fcpr_index,
    forward_backward,
    init_network,
    iter_time,
    load_mnist_idx,
    loss_after_time,
    lr_from_schedule,
    optimal_batch,
    permute_dataset,
    split_holdout,
    subproblem_gradient,
    synth_gaussian,
    time_for_loss,
    train,
)

__all__ = [
    "Activation",
    "BatchScenario",
    "BatchSearchResult",
    "Dataset",
    "DivergenceError",
    "EvalRecord",
    "IterationRecord",
    "LossAndGrad",
    "LossPrediction",
    "LrTier",
    "NetworkSpec",
    "OptimizerConfig",
    "ParameterVector",
    "SpcWindow",
    "SystemModel",
    "TrainingReport",
    "Variant",
    "accuracy",
    "arrange_scenario",
    "batch_count",
    "batch_loss",
    "fcpr_index",
    "forward_backward",
    "init_network",
    "iter_time",
    "load_mnist_idx",
    "loss_after_time",
    "lr_from_schedule",
    "optimal_batch",
    "permute_dataset",
    "split_holdout",
    "subproblem_gradient",
    "synth_gaussian",
    "time_for_loss",
    "train",
]
