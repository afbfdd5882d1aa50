"""Physics-informed neural network solver for plane-wave acoustics in a uniform duct."""
from .errors import (
    DomainError,
    DuctPinnError,
    InputError,
    NumericError,
    SingularConfigurationError,
    StructuralError,
    UnsupportedAnalysisError,
)
from .network import Architecture, MlpParams, flatten, he_init, unflatten
from .autodiff import DiffOutput, eval_with_input_derivatives
from .physics import DuctProblem, FieldKind, TrialField, make_collocation
from .losses import LossKind, PinnLoss, loss_and_gradient
from .optimizer import LbfgsOptions, OptimResult, Termination, minimize

__version__ = "0.1.0"
