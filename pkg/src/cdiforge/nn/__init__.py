"""From-scratch 3D encoder / dual-decoder network with manual gradients."""

from cdiforge.nn.functional import (
    conv3d_backward,
    conv3d_forward,
    dropout_backward,
    dropout_forward,
    maxpool2_backward,
    maxpool2_forward,
    relu_backward,
    relu_forward,
    upsample2_backward,
    upsample2_forward,
)
from cdiforge.nn.losses import LossTerms, physics_loss
from cdiforge.nn.network import CdiNetwork, Prediction, forward_pass, parameter_plan, predict
from cdiforge.nn.trainer import STAGES, Batch, TrainResult, split_validation, train, validate

__all__ = [
    "STAGES",
    "Batch",
    "CdiNetwork",
    "LossTerms",
    "Prediction",
    "TrainResult",
    "conv3d_backward",
    "conv3d_forward",
    "dropout_backward",
    "dropout_forward",
    "forward_pass",
    "maxpool2_backward",
    "maxpool2_forward",
    "parameter_plan",
    "physics_loss",
    "predict",
    "relu_backward",
    "relu_forward",
    "split_validation",
    "train",
    "upsample2_backward",
    "upsample2_forward",
    "validate",
]
