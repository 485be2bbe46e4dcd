from . import autodiff
from .adam import AdamState, adam_update, clip_grad_norm
from .autodiff import NonFiniteLossError, Tensor
from .nets import (
    FixedActionPolicy,
    MixturePolicy,
    MlpPolicy,
    RecurrentPolicy,
    UniformPolicy,
    actor_forward,
    build_mlp,
    build_recurrent_ac,
    critic_forward,
    np_log_softmax,
    recurrent_forward,
    recurrent_sequence_values,
    sample_categorical,
)
from .params import ParamSet, backprop, load_checkpoint, orthogonal, save_checkpoint
