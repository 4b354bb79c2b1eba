"""Knowledge-graph guided question answering.

    >>> import kgnav
    >>> p = kgnav.Pipeline("fixtures/tencent/replay.json")
    >>> p.answer("Which founder of Tencent ...?")["answer"]
    'Pony Ma'
"""

import json
from os import PathLike
from typing import Any, Mapping, Optional, Union

from ._core import (
    GraphStore,
    KgnavError,
    chunk,
    entity_rank_score,
    exact_match,
    normalize_answer,
)
from . import _core

_Path = Union[str, PathLike]

__all__ = [
    "GraphStore",
    "KgnavError",
    "Pipeline",
    "chunk",
    "entity_rank_score",
    "exact_match",
    "normalize_answer",
]


class Pipeline:
    """Engine built from a JSON config; `overrides` uses the config's engine keys."""

    def __init__(
        self,
        config: _Path,
        overrides: Optional[Mapping[str, Any]] = None,
        *,
        replay: Optional[_Path] = None,
        record: Optional[_Path] = None,
        script: Optional[_Path] = None,
    ) -> None:
        self._impl = _core.Pipeline(
            config,
            json.dumps(dict(overrides)) if overrides else "",
            replay,
            record,
            script,
        )

    def answer(self, question: str) -> dict:
        return json.loads(self._impl.answer(question))

    @property
    def engine_config(self) -> dict:
        return json.loads(self._impl.engine_config())
