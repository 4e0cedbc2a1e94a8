from .loss import Gradient, gradient, loss, loss_and_gradient, regularizer, regularizer_gradient
from .optimizer import OptimizerState, adam_step
from .trainer import TrainResult, train

__all__ = [
    "Gradient",
    "OptimizerState",
    "TrainResult",
    "adam_step",
    "gradient",
    "loss",
    "loss_and_gradient",
    "regularizer",
    "regularizer_gradient",
    "train",
]
