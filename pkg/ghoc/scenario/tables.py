"""
CSV reading shared by every loader. Parser, encoding and empty-file
failures come out as :class:`DataError` carrying the file line when it can
be located.
"""

from __future__ import annotations

import os
import re

import pandas as pd

from ..utils import DataError

ENCODING = "utf-8"

_PANDAS_LINE = re.compile(r"\bline (\d+)\b")


def first_undecodable_line(path: str, encoding: str = ENCODING) -> int | None:
    """
    1-based number of the first line that does not decode, ``None`` if all do.

    Examples:
        >>> import tempfile
        >>> with tempfile.NamedTemporaryFile("wb", suffix=".csv", delete=False) as fp:
        ...     _ = fp.write(b"a,b\\n1,2\\n3,\\xff\\n")
        >>> first_undecodable_line(fp.name)
        3
    """
    with open(path, "rb") as fp:
        for number, raw in enumerate(fp, start=1):
            try:
                raw.decode(encoding)
            except UnicodeDecodeError:
                return number
    return None


def read_table(path: str, what: str, **kwargs) -> pd.DataFrame:
    """``pd.read_csv`` for the ``what`` file at ``path``."""
    if not os.path.exists(path):
        raise DataError(f"{what} file {path} does not exist")
    try:
        return pd.read_csv(path, encoding=ENCODING, **kwargs)
    except pd.errors.EmptyDataError as e:
        raise DataError(f"{what} file {path} is empty", line=1) from e
    except pd.errors.ParserError as e:
        match = _PANDAS_LINE.search(str(e))
        line = int(match.group(1)) if match else None
        raise DataError(f"cannot parse {what} file {path}: {e}", line=line) from e
    except UnicodeDecodeError as e:
        raise DataError(
            f"{what} file {path} is not {ENCODING} text: {e.reason}",
            line=first_undecodable_line(path),
        ) from e
