from typing import Any, Dict


class BaseRepository:
    """
    Minimal base repository holding an in-memory cache.

    Concrete repositories should extend this for shared cache access.
    """

    def __init__(self) -> None:
        self._cache: Dict[str, Any] = {}
