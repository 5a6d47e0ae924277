from .algebra_service import AlgebraService
from .hopf_service import HopfService
from .bv_service import BVService
from .verification_service import VerificationService
from .model_service import ModelService

__all__ = ["AlgebraService", "HopfService", "BVService", "VerificationService", "ModelService"]
