import re
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from src import config
from src.exceptions import ModelNotFoundError, ValidationError


class ModelFamily(str, Enum):
    CIRCLE_Z = "Circle_Z"
    S3_Z = "S3_Z"
    RP3_Z = "RP3_Z"
    RP3_Q = "RP3_Q"
    SO_ODD_Q = "SO_odd_Q"
    SO_EVEN_Q = "SO_even_Q"
    SO_ODD_F2 = "SO_odd_F2"
    SO_EVEN_F2 = "SO_even_F2"

    @property
    def ranked(self) -> bool:
        return self.value.startswith("SO_")


_RANKED = re.compile(r"^(SO_(?:odd|even)_(?:Q|F2))\((\d+)\)$")


@dataclass(frozen=True)
class ModelId:
    """Catalog key, e.g. ``Circle_Z`` or ``SO_odd_Q(2)``."""

    family: ModelFamily
    rank: Optional[int] = None

    @classmethod
    def parse(cls, text: str) -> "ModelId":
        text = text.strip()
        match = _RANKED.match(text)
        if match:
            family = ModelFamily(match.group(1))
            rank = int(match.group(2))
            limit = config.get_max_rank()
            if rank < 1 or rank > limit:
                raise ValidationError(
                    f"Rank {rank} for {family.value} must lie in 1..{limit} (LOOPALG_MAX_RANK)")
            return cls(family, rank)
        try:
            family = ModelFamily(text)
        except ValueError:
            raise ModelNotFoundError(text)
        if family.ranked:
            raise ValidationError(f"{family.value} needs a rank, e.g. {family.value}(2)")
        return cls(family)

    @property
    def group_dimension_n(self) -> Optional[int]:
        """n of SO(n) for the ranked families."""
        if self.rank is None:
            return None
        if self.family in (ModelFamily.SO_ODD_Q, ModelFamily.SO_ODD_F2):
            return 2 * self.rank + 1
        return 2 * self.rank + 2

    def __str__(self) -> str:
        if self.rank is None:
            return self.family.value
        return f"{self.family.value}({self.rank})"
