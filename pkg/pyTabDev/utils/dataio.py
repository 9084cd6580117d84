"""Reading numeric CSV inputs and writing CSV tables.

Inputs are rectangular, comma separated, UTF-8, with '.' as the decimal point
and one observation per row. Floats are written with repr so that a table
read back reproduces the written values exactly.
"""

from __future__ import absolute_import

import csv
import logging
import math

import numpy as np

from ..core.tab import SampleMatrix
from ..errors import ParseError

logger = logging.getLogger(__name__)


def _parse_cell(text, line, column):
    try:
        value = float(text)
    except ValueError:
        raise ParseError("non-numeric value {!r} on line {}, column {}"
                         .format(text, line, column), line, column)
    if not math.isfinite(value):
        raise ParseError("non-finite value {!r} on line {}, column {}"
                         .format(text, line, column), line, column)
    return value


def read_rows(path, has_header=False):
    """Read a rectangular numeric CSV file into a list of float rows.

    Args:
      path (str): File to read.
      has_header (bool, optional): Skip the first record. Defaults to False.

    Returns:
      list: The rows, all of equal length.
    """
    rows = []
    width = None
    with open(path, newline="", encoding="utf-8-sig") as f:
        reader = csv.reader(f)
        for record in reader:
            line = reader.line_num
            if has_header and line == 1:
                continue
            if not record or all(not cell.strip() for cell in record):
                continue
            if width is None:
                width = len(record)
            elif len(record) != width:
                raise ParseError("line {} has {} fields, expected {}"
                                 .format(line, len(record), width), line)
            rows.append([_parse_cell(cell.strip(), line, column)
                         for column, cell in enumerate(record, 1)])
    if not rows:
        raise ParseError("{} contains no data rows".format(path))
    return rows


def parse_csv(path, has_header=False):
    """Read a T x n sample from a CSV file. See help(read_rows)."""
    sample = SampleMatrix(np.array(read_rows(path, has_header)))
    logger.debug("read %r from %s", sample, path)
    return sample


def read_vector(path, has_header=False):
    """Read a single-row CSV file as a vector"""
    rows = read_rows(path, has_header)
    if len(rows) != 1:
        raise ParseError("{} must hold exactly one row, found {}"
                         .format(path, len(rows)))
    return np.array(rows[0])


def read_matrix(path, has_header=False):
    """Read a CSV file as a two-dimensional array"""
    return np.array(read_rows(path, has_header))


def write_csv(path, header, rows):
    """Write rows under a header line; floats keep full precision"""
    logger.info("Writing %d rows to %s", len(rows), path)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(value) if isinstance(value, float)
                             else value for value in row])


__all__ = ["read_rows", "parse_csv", "read_vector", "read_matrix",
           "write_csv"]
