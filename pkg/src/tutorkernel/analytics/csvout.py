"""CSV export for analytics series: header row, RFC 4180 quoting and CRLF."""
from __future__ import annotations

import csv
import io
from typing import Iterable, Sequence


def rows_to_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, quoting=csv.QUOTE_MINIMAL, lineterminator="\r\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)
    return buf.getvalue()
