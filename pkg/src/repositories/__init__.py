from .catalog_repository import CatalogRepository
from .model_file_repository import ModelFileRepository

__all__ = ["CatalogRepository", "ModelFileRepository"]
