"""Serialization package."""

from core.serialization.base import BaseSchema
from core.serialization.csv_format import CSVSchema, HeaderMap

__all__ = [
    "BaseSchema",
    "CSVSchema",
    "HeaderMap",
]
