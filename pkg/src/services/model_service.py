import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import pandas as pd

from src.models import LoopElement, LoopModel, ModelId
from src.parser import parse_loop
from src.repositories import CatalogRepository, ModelFileRepository
from src.repositories.catalog_repository import DEFAULT_RANKS
from src.services.algebra_service import AlgebraService, Window
from src.services.bv_service import BVService
from src.services.hopf_service import HopfService
from src.services.verification_service import VerificationService

logger = logging.getLogger(__name__)


class ModelService:
    """
    Entry point shared by the command line and the HTTP surface.
    """

    def __init__(self, catalog: CatalogRepository, files: ModelFileRepository,
                 algebra_service: Optional[AlgebraService] = None,
                 hopf_service: Optional[HopfService] = None,
                 bv_service: Optional[BVService] = None) -> None:
        self.catalog = catalog
        self.files = files
        self.algebra = algebra_service or AlgebraService()
        self.hopf = hopf_service or HopfService()
        self.bv = bv_service or BVService(self.algebra, self.hopf)
        self.verification = VerificationService(catalog, self.algebra, self.hopf, self.bv)

    # --- Catalog ------------------------------------------------------------

    def get_model(self, model_id: Union[str, LoopModel]) -> LoopModel:
        if isinstance(model_id, LoopModel):
            return model_id
        return self.catalog.get(model_id)

    def list_models(self, ranks: Sequence[int] = DEFAULT_RANKS) -> List[Dict[str, Any]]:
        out = []
        for text in self.catalog.list_ids(ranks):
            key = ModelId.parse(text)
            out.append({"id": text, "family": key.family.value, "rank": key.rank})
        return out

    def show(self, model_id: Union[str, LoopModel]) -> Dict[str, Any]:
        return self.get_model(model_id).describe()

    def export(self, model_id: Union[str, LoopModel]) -> Dict[str, Any]:
        return self.files.model_to_dict(self.get_model(model_id))

    def golden(self, model_id: str) -> Dict[str, Any]:
        model = self.get_model(model_id)
        return self.files.golden_to_dict(model.model_id, self.catalog.golden_delta_table(model.model_id))

    def save_export(self, model_id: str, path: Union[str, Path]) -> Path:
        return self.files.save_model(self.get_model(model_id), path)

    def save_golden(self, model_id: str, path: Union[str, Path]) -> Path:
        return self.files.save_json(self.golden(model_id), path)

    # --- Evaluation ---------------------------------------------------------

    def parse(self, model_id: Union[str, LoopModel], text: str) -> LoopElement:
        return parse_loop(text, self.get_model(model_id))

    def delta(self, model_id: Union[str, LoopModel], text: str, path: str = "eq1") -> Dict[str, Any]:
        model = self.get_model(model_id)
        element = parse_loop(text, model)
        result = self.bv.evaluate_delta(element, path)
        return {
            "model": model.model_id,
            "input": str(element),
            "path": path,
            "result": str(result),
            "terms": result.to_dict()["terms"],
        }

    def mul(self, model_id: Union[str, LoopModel], left: str, right: str) -> Dict[str, Any]:
        model = self.get_model(model_id)
        product = self.bv.loop_product(parse_loop(left, model), parse_loop(right, model))
        return {
            "model": model.model_id,
            "left": left,
            "right": right,
            "result": str(product),
            "terms": product.to_dict()["terms"],
        }

    # --- Tables and suites --------------------------------------------------

    def hilbert(self, model_id: Union[str, LoopModel], side: str, window: Window, oracle: bool = False,
                word_length: Optional[int] = None) -> pd.DataFrame:
        return self.algebra.hilbert_table(self.get_model(model_id), side, window, oracle, word_length)

    def delta_homology(self, model_id: Union[str, LoopModel], window: Window) -> pd.DataFrame:
        return self.bv.delta_homology_table(self.get_model(model_id), window)

    def verify(self, model_id: Union[str, LoopModel], window: Optional[Window] = None,
               word_length: Optional[int] = None, seed: Optional[int] = None,
               cases: Optional[int] = None) -> Dict[str, Any]:
        model = self.get_model(model_id)
        report = self.verification.verify(model, window, word_length, seed, cases)
        if report["failures"]:
            logger.warning("%s: %d verification failures", model.model_id, report["failures"])
        return report
