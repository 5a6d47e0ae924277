from src.models import LoopModel
from src.repositories import CatalogRepository

ALL_IDS = CatalogRepository().list_ids()
FIELD_IDS = [i for i in ALL_IDS if not i.endswith("_Z")]
SO_IDS = [i for i in ALL_IDS if i.startswith("SO_")]


def pure(model: LoopModel, coeff, left=None, right=None):
    """coeff * (omega monomial (x) base monomial), monomials as {generator: exponent}."""
    key = (model.omega.monomial(left or {}), model.base.monomial(right or {}))
    return model.element({key: model.ring.convert(coeff)})
