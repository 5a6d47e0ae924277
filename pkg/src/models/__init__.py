from .base import Serializable
from .scalars import RingTag, Scalar
from .graded import Element, GeneratorKind, GeneratorSpec, GradedAlgebra, Monomial
from .presented import PresentedAlgebra, RewriteRule, TorsionRule
from .tensor import TensorElement, TensorSquareElement
from .hopf import (
    ActionTable,
    Derivation,
    HopfStructure,
    Operator,
    Primitive,
    PrimitiveBasis,
    SuspensionMap,
)
from .loop import LoopElement, LoopModel
from .model_id import ModelFamily, ModelId

__all__ = [
    "Serializable",
    "RingTag",
    "Scalar",
    "Element",
    "GeneratorKind",
    "GeneratorSpec",
    "GradedAlgebra",
    "Monomial",
    "PresentedAlgebra",
    "RewriteRule",
    "TorsionRule",
    "TensorElement",
    "TensorSquareElement",
    "ActionTable",
    "Derivation",
    "HopfStructure",
    "Operator",
    "Primitive",
    "PrimitiveBasis",
    "SuspensionMap",
    "LoopElement",
    "LoopModel",
    "ModelFamily",
    "ModelId",
]
