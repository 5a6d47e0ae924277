import pytest

from src.app import app
from src.repositories import CatalogRepository, ModelFileRepository
from src.services import AlgebraService, BVService, HopfService, ModelService


@pytest.fixture(scope="session")
def catalog() -> CatalogRepository:
    """Catalog models are immutable, so one cache serves the whole run."""
    return CatalogRepository()


@pytest.fixture(scope="session")
def service(catalog) -> ModelService:
    return ModelService(catalog, ModelFileRepository())


@pytest.fixture(scope="session")
def algebra_service(service) -> AlgebraService:
    return service.algebra


@pytest.fixture(scope="session")
def hopf_service(service) -> HopfService:
    return service.hopf


@pytest.fixture(scope="session")
def bv_service(service) -> BVService:
    return service.bv


@pytest.fixture
def client(service):
    """
    Provide a Flask test client backed by the shared test service.
    We swap the app service and restore it afterwards.
    """
    orig_model_service = app.model_service
    app.model_service = service
    app.config["TESTING"] = True
    try:
        with app.test_client() as client:
            yield client
    finally:
        app.model_service = orig_model_service
