import json
from typing import Any, Dict


class Serializable:
    """Mixin for domain objects with a JSON dictionary form."""

    def to_dict(self) -> Dict[str, Any]:
        raise NotImplementedError

    def to_json(self, indent: int = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent)
