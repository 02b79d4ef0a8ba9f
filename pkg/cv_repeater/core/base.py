import logging
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from typing import Any, TypeVar

from pydantic import BaseModel, ValidationError

from cv_repeater.exceptions import ParameterError
from cv_repeater.models.config import Settings
from cv_repeater.utils import validation_message

T = TypeVar("T")
M = TypeVar("M", bound=BaseModel)
R = TypeVar("R")

logger = logging.getLogger(__name__)


def validate_model(model: type[M], **data: Any) -> M:
    """
    Builds a pydantic model, translating validation failures into ParameterError
    so callers only ever see the package's own exception hierarchy.
    """
    try:
        return model(**data)
    except ValidationError as e:
        first = e.errors()[0] if e.errors() else {}
        field = ".".join(str(p) for p in first.get("loc", ())) or None
        raise ParameterError(
            f"Invalid {model.__name__}: {validation_message(e)}",
            field=field,
            value=first.get("input"),
        ) from e


class BaseAPI:
    """
    The fundamental base class for all computation handlers.

    It holds the shared settings and provides helpers for building validated
    parameter models and for evaluating independent grid points in order.
    """

    def __init__(self, settings: Settings):
        self._settings = settings

    @property
    def settings(self) -> Settings:
        return self._settings

    def _validate(self, model: type[M], **data: Any) -> M:
        return validate_model(model, **data)

    def _map_ordered(self, fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
        """
        Evaluates `fn` on every item and returns results in input order.

        With `settings.workers > 1` the points run on a thread pool; the
        assembly order is still the item order.
        """
        points = list(items)
        if self._settings.workers <= 1 or len(points) <= 1:
            return [fn(p) for p in points]
        logger.debug("Evaluating %d grid points on %d workers", len(points), self._settings.workers)
        with ThreadPoolExecutor(max_workers=self._settings.workers) as pool:
            return list(pool.map(fn, points))
