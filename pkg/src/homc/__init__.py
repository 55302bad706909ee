"""Higher-order Markov chains on dense transition tensors."""
from .analysis import (
    ClassificationReport,
    EverReachResult,
    MfptResult,
    classify_states,
    ever_reaching,
    fixed_point_residual,
    mfpt_direct,
    mfpt_iterative,
)
from .chain_model import (
    ReachabilityVerdict,
    StationaryResult,
    TransitionTensor,
    check_ergodic,
    check_regular,
    k_step_tensor,
    propagate_distribution,
    reduced_chain_matrix,
    stationary_distribution,
    validate_transition_tensor,
)
from .errors import (
    HomcError,
    InvalidIndexError,
    NonConvergenceError,
    ShapeError,
    SingularSystemError,
    StochasticityError,
)
from .tensor_core import (
    Shape,
    box_power,
    box_product,
    diagonal_part,
    from_linear,
    identity_tensor,
    index_table,
    khatri_rao,
    linear_offset,
    matricize,
    multi_index,
    ones_tensor,
    tensorize,
    to_linear,
)

__version__ = "0.1.0"
