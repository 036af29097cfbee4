"""Custom field types for the benchmark schemas."""

import math
from enum import Enum
from typing import Any, Optional, Type

from marshmallow import fields


class LowerCaseEnum(fields.Enum):
    """Enum field loaded by value that also accepts upper-case spellings (``MGSSP``)."""

    def __init__(self, enum: Type[Enum], **kwargs: Any) -> None:
        kwargs.setdefault("by_value", True)
        super().__init__(enum, **kwargs)

    def _deserialize(self, value: Any, attr: Optional[str], data: Any, **kwargs: Any) -> Enum:
        if isinstance(value, str):
            value = value.strip().lower()
        return super()._deserialize(value, attr, data, **kwargs)


class OptionalFloat(fields.Float):
    """Float that writes None as an empty CSV cell and reads it back."""

    def __init__(self, **kwargs: Any) -> None:
        kwargs.setdefault("allow_none", True)
        super().__init__(**kwargs)

    def _deserialize(self, value: Any, attr: Optional[str], data: Any, **kwargs: Any) -> Optional[float]:
        if value is None or (isinstance(value, str) and not value.strip()):
            return None
        return super()._deserialize(value, attr, data, **kwargs)


class OptionalInteger(fields.Integer):
    """Integer that writes None as an empty CSV cell and reads it back."""

    def __init__(self, **kwargs: Any) -> None:
        kwargs.setdefault("allow_none", True)
        super().__init__(**kwargs)

    def _deserialize(self, value: Any, attr: Optional[str], data: Any, **kwargs: Any) -> Optional[int]:
        if value is None or (isinstance(value, str) and not value.strip()):
            return None
        return super()._deserialize(value, attr, data, **kwargs)


class ScientificFloat(fields.Float):
    """Float written in scientific notation with three significant digits (``9.88e-07``)."""

    def __init__(self, **kwargs: Any) -> None:
        kwargs.setdefault("allow_nan", True)
        super().__init__(**kwargs)

    def _serialize(self, value: Any, attr: Optional[str], obj: Any, **kwargs: Any) -> Optional[str]:
        if value is None:
            return None
        number = float(value)
        if math.isnan(number):
            return "nan"
        return f"{number:.2e}"
