"""Writes ``OutputRecord``s as JSON Lines or CSV, to a file or stdout.

JSON Lines: one record per line, as produced by ``model_dump_json``; each
line parses back into an equal record. CSV: header
``n,quantity,exact,approx`` followed by the union of metadata keys in the
order they first appear, with ``exact`` as ``num/den``.
"""

import csv
import io
import logging
import sys
from contextlib import contextmanager
from typing import IO, Iterable, Iterator, List, Optional

from models.stoptime import OutputFormat, OutputRecord

logger = logging.getLogger(__name__)

BASE_COLUMNS = ["n", "quantity", "exact", "approx"]


def csv_columns(records: List[OutputRecord]) -> List[str]:
    columns = list(BASE_COLUMNS)
    for record in records:
        for key in record.metadata:
            if key not in columns:
                columns.append(key)
    return columns


def csv_row(record: OutputRecord) -> dict:
    row = {
        "n": record.n,
        "quantity": record.quantity.value,
        "exact": str(record.exact) if record.exact is not None else "",
        "approx": record.approx or "",
    }
    row.update(record.metadata)
    return row


def write_json(records: Iterable[OutputRecord], stream: IO[str]):
    for record in records:
        stream.write(record.model_dump_json())
        stream.write("\n")


def write_csv(records: Iterable[OutputRecord], stream: IO[str]):
    records = list(records)
    writer = csv.DictWriter(stream, fieldnames=csv_columns(records), restval="", lineterminator="\n")
    writer.writeheader()
    for record in records:
        writer.writerow(csv_row(record))


def render(records: Iterable[OutputRecord], fmt: OutputFormat = OutputFormat.JSON) -> str:
    buffer = io.StringIO()
    if fmt == OutputFormat.CSV:
        write_csv(records, buffer)
    else:
        write_json(records, buffer)
    return buffer.getvalue()


@contextmanager
def open_output(path: Optional[str]) -> Iterator[IO[str]]:
    if path is None:
        yield sys.stdout
        return
    with open(path, "w", newline="", encoding="utf-8") as f:
        yield f


def emit(records: Iterable[OutputRecord], fmt: OutputFormat = OutputFormat.JSON,
         path: Optional[str] = None) -> int:
    """Write ``records`` and return how many were written."""
    records = list(records)
    with open_output(path) as stream:
        stream.write(render(records, fmt))
    logger.info("Wrote %d %s records to %s", len(records), fmt.value, path or "stdout")
    return len(records)


def parse_json_lines(text: str) -> List[OutputRecord]:
    return [OutputRecord.model_validate_json(line) for line in text.splitlines() if line.strip()]


def parse_csv(text: str) -> List[OutputRecord]:
    """Read back CSV written by ``write_csv``; empty metadata cells are dropped."""
    records = []
    for row in csv.DictReader(io.StringIO(text)):
        exact = None
        if row["exact"]:
            num, den = row["exact"].split("/")
            exact = {"num": num, "den": den}
        metadata = {k: v for k, v in row.items() if k not in BASE_COLUMNS and v != ""}
        records.append(OutputRecord(
            n=int(row["n"]),
            quantity=row["quantity"],
            exact=exact,
            approx=row["approx"] or None,
            metadata=metadata,
        ))
    return records
