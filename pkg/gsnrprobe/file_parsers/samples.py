"""Parse and write back-to-back Q-over-OSNR sample CSV files."""

import csv
from pathlib import Path
from typing import Sequence

from gsnrprobe.exceptions import DomainError, SchemaError
from gsnrprobe.transponder import QOverOsnrSample

HEADER = ("osnr_db", "q_db")


def parse_samples(file_path: Path) -> list[QOverOsnrSample]:
    """
    Parse a B2B sample CSV with header ``osnr_db,q_db``.

    Args:
        file_path: Path to the CSV file

    Returns:
        Samples in file order

    Raises:
        SchemaError: If the header is wrong or a row is not two finite numbers
    """
    samples: list[QOverOsnrSample] = []
    with open(file_path, encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or tuple(h.strip() for h in header) != HEADER:
            raise SchemaError(
                f"malformed sample file: expected header {','.join(HEADER)}", str(file_path)
            )
        for line_number, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            location = f"{file_path}:{line_number}"
            if len(row) != 2:
                raise SchemaError(f"malformed sample: expected 2 columns, got {len(row)}", location)
            try:
                samples.append(QOverOsnrSample(float(row[0]), float(row[1])))
            except (ValueError, DomainError) as exc:
                raise SchemaError(f"malformed sample: {exc}", location) from exc
    return samples


def write_samples(samples: Sequence[QOverOsnrSample], file_path: Path) -> None:
    with open(file_path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(HEADER)
        for sample in samples:
            writer.writerow([repr(sample.osnr_db), repr(sample.q_db)])
