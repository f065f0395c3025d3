from .encoder import (
    EncoderConfig,
    ParameterSet,
    StaleCacheError,
    encoder_backward,
    encoder_forward,
    init_params,
    loss,
    loss_grad,
    param_count,
    param_spec,
)
from .gradcheck import gradient_check
from .ops import ShapeMismatchError, layer_norm, matmul, softmax
from .optim import OptimizerState, optimizer_step
from .serialize import (
    FingerprintMismatchError,
    config_fingerprint,
    load_checkpoint,
    loads_params,
    dumps_params,
    save_checkpoint,
)

__all__ = [
    "EncoderConfig",
    "ParameterSet",
    "StaleCacheError",
    "encoder_backward",
    "encoder_forward",
    "init_params",
    "loss",
    "loss_grad",
    "param_count",
    "param_spec",
    "gradient_check",
    "ShapeMismatchError",
    "layer_norm",
    "matmul",
    "softmax",
    "OptimizerState",
    "optimizer_step",
    "FingerprintMismatchError",
    "config_fingerprint",
    "load_checkpoint",
    "loads_params",
    "dumps_params",
    "save_checkpoint",
]
