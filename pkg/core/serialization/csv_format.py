"""CSV serialization with header mapping support."""

import csv
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, TextIO

from marshmallow import ValidationError

from core.serialization.base import BaseSchema

logger = logging.getLogger(__name__)


@dataclass
class HeaderMap:
    """CSV header mapping configuration."""

    export_name: str
    """The name to use in CSV exports."""

    import_names: List[str]
    """Alternative names to accept during import."""


class CSVSchema(BaseSchema):
    """Schema for CSV serialization with header mapping."""

    # Override in subclasses to define header mappings
    header_mappings: Dict[str, HeaderMap] = {}

    @property
    def headers(self) -> List[str]:
        return [h.export_name for h in self.header_mappings.values()]

    def dump_to_csv(
        self,
        data: List[Any],
        file: TextIO,
        *,
        include_header: bool = True
    ) -> None:
        """Write rows to a CSV file.

        Args:
            data: Objects or dictionaries to serialize, one per row
            file: File-like object to write to
            include_header: Whether to write header row

        Raises:
            ValidationError: If serialization fails
        """
        writer = csv.DictWriter(
            file,
            fieldnames=self.headers,
            dialect="excel",
            lineterminator="\n",
        )

        if include_header:
            writer.writeheader()

        for row in data:
            serialized = self.dump(row, many=False)
            if isinstance(serialized, dict):
                csv_row = {
                    self.header_mappings[field].export_name: value
                    for field, value in serialized.items()
                    if field in self.header_mappings
                }
                writer.writerow(csv_row)
            else:
                raise ValidationError("Expected dictionary for single row serialization")

    def load_from_csv(
        self,
        file: TextIO,
        *,
        skip_header: bool = True
    ) -> List[Any]:
        """Read rows from a CSV file.

        Rows that fail validation are logged and skipped.

        Args:
            file: File-like object to read from
            skip_header: Whether the first row is a header; otherwise the
                export names are assumed in order

        Returns:
            List of deserialized rows
        """
        reader = csv.DictReader(file) if skip_header else csv.DictReader(file, self.headers)

        # Reverse mapping for import
        field_map = {}
        for field, header in self.header_mappings.items():
            for import_name in [header.export_name, *header.import_names]:
                field_map[import_name.lower()] = field

        results = []
        for line, row in enumerate(reader, start=2 if skip_header else 1):
            data = {}
            for csv_field, value in row.items():
                schema_field = field_map.get((csv_field or "").lower())
                if schema_field:
                    data[schema_field] = value

            loaded = self.load_safe(data)
            if loaded is None:
                logger.warning("Skipping CSV line %d", line)
                continue
            results.append(loaded)

        return results
