from .config import Ablation, ModelConfig, TrainConfig
from .network import (
    backward_batch,
    encode_course,
    forward_batch,
    init_params,
    loss_and_grads,
    make_batch,
    mse_loss,
    param_shapes,
)
from .optimizer import Adam, learning_rate
from .training import TrainedModel, mae, rmse, train
from .vocab import Vocabulary, build_vocabulary
from .checkpoint import load_checkpoint, save_checkpoint

__all__ = [
    "Ablation",
    "ModelConfig",
    "TrainConfig",
    "Adam",
    "learning_rate",
    "TrainedModel",
    "train",
    "rmse",
    "mae",
    "mse_loss",
    "Vocabulary",
    "build_vocabulary",
    "encode_course",
    "make_batch",
    "forward_batch",
    "backward_batch",
    "loss_and_grads",
    "init_params",
    "param_shapes",
    "load_checkpoint",
    "save_checkpoint",
]
