import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Mapping, Sequence, Tuple, Union

from src.exceptions import ValidationError
from src.models import (
    HopfStructure,
    LoopElement,
    LoopModel,
    Primitive,
    PrimitiveBasis,
    PresentedAlgebra,
    SuspensionMap,
)
from src.models.graded import add_into
from src.models.hopf import operator_from_dict
from src.repositories.base_repository import BaseRepository

logger = logging.getLogger(__name__)


class ModelFileRepository(BaseRepository):
    """
    JSON persistence for loop models and golden Delta tables.

    ``model_from_dict(model_to_dict(m))`` dumps to the identical document.
    """

    # --- Models -----------------------------------------------------------

    def model_to_dict(self, model: LoopModel) -> Dict[str, Any]:
        return model.to_dict()

    def model_from_dict(self, obj: Mapping[str, Any]) -> LoopModel:
        try:
            omega = PresentedAlgebra.from_dict(obj["omega"])
            base = PresentedAlgebra.from_dict(obj["base"])
            hopf_obj = obj["hopf"]
            coproducts = {}
            for name, items in hopf_obj["coproducts"].items():
                terms: Dict = {}
                for item in items:
                    key = (omega.monomial_from_dict(item["left"]), omega.monomial_from_dict(item["right"]))
                    add_into(terms, key, omega.ring.from_json(item["coeff"]))
                coproducts[name] = terms
            counits = {name: omega.ring.from_json(v) for name, v in hopf_obj["counits"].items()}
            hopf = HopfStructure(omega, coproducts, counits)
            primitives = PrimitiveBasis([Primitive.from_dict(p) for p in obj["primitives"]])
            suspension = SuspensionMap(hopf, primitives, {
                name: {p: omega.ring.from_json(c) for p, c in coords.items()}
                for name, coords in obj["suspension"].items()
            })
            actions = {name: operator_from_dict(base, op) for name, op in obj["actions"].items()}
            partials = None
            if "closed_form_partials" in obj:
                partials = {int(i): operator_from_dict(omega, op) for i, op in obj["closed_form_partials"].items()}
            model = LoopModel(str(obj["id"]), omega, hopf, suspension, base, int(obj["dim_g"]),
                              primitives, actions, partials)
        except (KeyError, TypeError, AttributeError) as e:
            raise ValidationError(f"Invalid model document: missing or malformed {e}")
        return model.validate()

    def save_model(self, model: LoopModel, path: Union[str, Path]) -> Path:
        return self.save_text(model.to_json(), path)

    def load_model(self, path: Union[str, Path]) -> LoopModel:
        return self.model_from_dict(self.load_json(path))

    # --- Golden tables ----------------------------------------------------

    def golden_to_dict(self, model_id: str, rows: Sequence[Tuple[LoopElement, LoopElement]]) -> Dict[str, Any]:
        return {
            "model": model_id,
            "rows": [
                {"input": str(src), "expected": str(dst),
                 "input_terms": src.to_dict()["terms"], "expected_terms": dst.to_dict()["terms"]}
                for src, dst in rows
            ],
        }

    # --- Files ------------------------------------------------------------

    def save_json(self, obj: Any, path: Union[str, Path]) -> Path:
        return self.save_text(json.dumps(obj, indent=2), path)

    def save_text(self, text: str, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text + "\n", encoding="utf-8")
        logger.info("Wrote %s", path)
        return path

    def load_json(self, path: Union[str, Path]) -> Any:
        try:
            return json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as e:
            raise ValidationError(f"Cannot read {path}: {e}")
