"""
Result Tables
Plot-ready comma separated output with a provenance header
"""

import io
import logging
import sys
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"
HEADER_PREFIX = "# "


@dataclass
class ResultTable:
    """
    Named columns, rows of values and the provenance printed above them

    Floats are written with 17 significant digits so every value re-parses
    to the same double.
    """

    columns: List[str]
    rows: List[Sequence[Any]]
    provenance: Dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        width = len(self.columns)
        for index, row in enumerate(self.rows):
            if len(row) != width:
                raise ValueError(f"row {index} has {len(row)} values, expected {width}")

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([list(row) for row in self.rows], columns=self.columns)

    def body(self) -> str:
        """Column line and rows, without the provenance header"""
        buffer = io.StringIO()
        self.to_frame().to_csv(buffer, index=False, float_format=FLOAT_FORMAT)
        return buffer.getvalue()

    def header(self) -> str:
        return "".join(f"{HEADER_PREFIX}{key}: {value}\n" for key, value in self.provenance.items())

    def render(self) -> str:
        return self.header() + self.body()

    def write(self, path: Optional[str] = None):
        """
        Write the table to path, or to stdout when path is None or "-"

        Args:
            path: Output file path
        """
        text = self.render()
        if path is None or path == "-":
            sys.stdout.write(text)
            return
        with open(path, 'w') as f:
            f.write(text)
        logger.info("wrote %d rows to %s", len(self.rows), path)


def read_table(path: str) -> ResultTable:
    """
    Parse a table written by ResultTable.write

    Args:
        path: Path of the table file

    Returns:
        ResultTable with the provenance header restored
    """
    provenance = {}
    with open(path, 'r') as f:
        for line in f:
            if not line.startswith(HEADER_PREFIX):
                break
            key, _, value = line[len(HEADER_PREFIX):].rstrip("\n").partition(": ")
            provenance[key] = value
    frame = pd.read_csv(path, comment="#", float_precision="round_trip")
    return ResultTable(
        columns=list(frame.columns),
        rows=[list(row) for row in frame.itertuples(index=False, name=None)],
        provenance=provenance,
    )
