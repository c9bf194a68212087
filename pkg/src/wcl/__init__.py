"""Weighted convolution algebras on discrete groups and checks of their norm inequalities."""

from .algebra import (
    PExponent,
    SparseFunction,
    convolve,
    involution,
    random_sparse,
    scale_and_divide,
    weighted_norm,
    weighted_norm_pow,
)
from .errors import (
    BudgetExceededError,
    GroupMismatchError,
    InvalidElementError,
    InvalidWeightError,
    ParameterError,
    WCLError,
)
from .groups import (
    CyclicGroup,
    FreeGroup,
    IntGroup,
    common_prefix_length,
    enumerate_sphere,
    split_at,
)
from .reports import VerificationReport
from .weights import (
    ConstantWeight,
    EvenPolyWeightZ,
    LengthPolyWeight,
    MaxWeight,
    ReflectedWeight,
    check_condition1,
    check_condition2_Z,
    condition2_witness,
    parse_weight,
    transform_weights,
)

__version__ = "0.1.0"

__all__ = [
    "BudgetExceededError",
    "ConstantWeight",
    "CyclicGroup",
    "EvenPolyWeightZ",
    "FreeGroup",
    "GroupMismatchError",
    "IntGroup",
    "InvalidElementError",
    "InvalidWeightError",
    "LengthPolyWeight",
    "MaxWeight",
    "PExponent",
    "ParameterError",
    "ReflectedWeight",
    "SparseFunction",
    "VerificationReport",
    "WCLError",
    "check_condition1",
    "check_condition2_Z",
    "common_prefix_length",
    "condition2_witness",
    "convolve",
    "enumerate_sphere",
    "involution",
    "parse_weight",
    "random_sparse",
    "scale_and_divide",
    "split_at",
    "transform_weights",
    "weighted_norm",
    "weighted_norm_pow",
]
