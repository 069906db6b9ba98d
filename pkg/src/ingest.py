import csv
import io
import logging
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from datetime import date, datetime, time, timedelta
from pathlib import Path
from typing import IO, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import ValidationError

from src.errors import DataContractError, SchemaError
from src.schema import DAY_NAMES, BinnedSeries, Rejection, TransactionRecord

logger = logging.getLogger("hiercast.ingest")

TRANSACTION_COLUMNS = (
    "LocationNumber",
    "SalesDayName",
    "DailyMinutesOpen",
    "DateTimePlaced",
    "SalesAsMinutes",
    "Quantity",
)

_FIELD_FOR_COLUMN = {
    "LocationNumber": "location_number",
    "SalesDayName": "sales_day_name",
    "DailyMinutesOpen": "daily_minutes_open",
    "DateTimePlaced": "date_time_placed",
    "SalesAsMinutes": "sales_as_minutes",
    "Quantity": "quantity",
}

BIN_WIDTH = 15

GroupKey = Tuple[int, date]
Source = Union[str, Path, IO[str], IO[bytes]]


@dataclass
class ParseResult:
    records: List[TransactionRecord] = field(default_factory=list)
    rejections: List[Rejection] = field(default_factory=list)
    rows: List[int] = field(default_factory=list)

    @property
    def n_rows(self) -> int:
        return len(self.records) + len(self.rejections)


def _open_text(source: Source) -> Tuple[IO[str], bool]:
    if isinstance(source, (str, Path)):
        return open(source, mode="r", encoding="utf-8-sig", newline=""), True
    if isinstance(source, io.TextIOBase):
        return source, False
    return io.TextIOWrapper(source, encoding="utf-8-sig", newline=""), False


def _resolve_header(header: Sequence[str], case_insensitive: bool) -> Dict[str, str]:
    present = {h.strip(): h for h in header}
    if case_insensitive:
        present = {h.strip().lower(): h for h in header}

    mapping, missing = {}, []
    for column in TRANSACTION_COLUMNS:
        lookup = column.lower() if case_insensitive else column
        if lookup in present:
            mapping[column] = present[lookup]
        else:
            missing.append(column)
    if missing:
        raise SchemaError(f"Transaction CSV is missing required column(s): {', '.join(missing)}")
    return mapping


def _reason(err: ValidationError) -> str:
    parts = []
    for e in err.errors():
        msg = e["msg"].removeprefix("Value error, ")
        loc = ".".join(str(p) for p in e["loc"])
        parts.append(f"{loc}: {msg}" if loc else msg)
    return "; ".join(parts)


def parse_transactions(source: Source, case_insensitive: bool = False) -> ParseResult:
    """Streams a transaction CSV; every data row becomes a record or a rejection."""
    handle, owned = _open_text(source)
    result = ParseResult()
    try:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None:
            raise SchemaError("Transaction CSV is empty (no header row)")
        mapping = _resolve_header(reader.fieldnames, case_insensitive)

        for row_number, row in enumerate(reader, start=1):
            values = {_FIELD_FOR_COLUMN[col]: (row.get(src) or "").strip() for col, src in mapping.items()}
            try:
                result.records.append(TransactionRecord(**values))
                result.rows.append(row_number)
            except ValidationError as e:
                result.rejections.append(Rejection(row=row_number, reason=_reason(e)))
    finally:
        if owned:
            handle.close()

    logger.info(f"Parsed {result.n_rows} rows: {len(result.records)} accepted, {len(result.rejections)} rejected")
    return result


def bin_day(
    records: Sequence[TransactionRecord],
    *,
    minutes_open: Optional[int] = None,
    location_number: Optional[int] = None,
    calendar_day: Optional[date] = None,
    bin_width: int = BIN_WIDTH,
) -> BinnedSeries:
    if records:
        keys = {(r.location_number, r.calendar_day) for r in records}
        if len(keys) > 1:
            raise DataContractError(f"bin_day received records from {len(keys)} location-days: {sorted(keys)[:3]}...")
        opened = {r.daily_minutes_open for r in records}
        if len(opened) > 1:
            raise DataContractError(f"Inconsistent DailyMinutesOpen {sorted(opened)} for location-day {keys.pop()}")
        location_number, calendar_day = next(iter(keys))
        minutes_open = opened.pop()
    elif minutes_open is None or location_number is None or calendar_day is None:
        raise DataContractError("Binning an empty day needs minutes_open, location_number and calendar_day")

    n_bins = math.ceil(minutes_open / bin_width)
    counts = np.zeros(n_bins, dtype=np.int64)
    if records:
        idx = np.floor(np.array([r.sales_as_minutes for r in records]) / bin_width).astype(int)
        np.add.at(counts, idx, np.array([r.quantity for r in records], dtype=np.int64))

    partial = minutes_open % bin_width != 0
    if partial:
        logger.debug(f"Location {location_number} on {calendar_day}: last bin is {minutes_open % bin_width} minutes")

    return BinnedSeries(
        location_number=location_number,
        calendar_day=calendar_day,
        day_of_week=calendar_day.weekday(),
        bin_width=bin_width,
        daily_minutes_open=minutes_open,
        counts=counts.tolist(),
        n_events=len(records),
        partial_last_bin=partial,
    )


def reconcile_minutes_open(
    records: Sequence[TransactionRecord], rows: Optional[Sequence[int]] = None
) -> Tuple[List[TransactionRecord], List[Rejection]]:
    """Keeps the most common DailyMinutesOpen of each location-day (smallest on ties).

    Rows that disagree become rejections; `rows` gives their source row numbers,
    otherwise positions in `records` counted from 1.
    """
    rows = list(rows) if rows is not None else list(range(1, len(records) + 1))
    votes: Dict[GroupKey, Counter] = defaultdict(Counter)
    for r in records:
        votes[(r.location_number, r.calendar_day)][r.daily_minutes_open] += 1
    chosen = {key: min(c, key=lambda m: (-c[m], m)) for key, c in votes.items()}

    kept, rejected = [], []
    for r, row in zip(records, rows):
        key = (r.location_number, r.calendar_day)
        if r.daily_minutes_open == chosen[key]:
            kept.append(r)
        else:
            rejected.append(
                Rejection(
                    row=row,
                    reason=f"DailyMinutesOpen {r.daily_minutes_open} conflicts with {chosen[key]} "
                    f"for location {key[0]} on {key[1]}",
                )
            )
    if rejected:
        logger.warning(f"Rejected {len(rejected)} rows whose DailyMinutesOpen disagrees with their location-day")
    return kept, rejected


def group_by_location_day(
    records: Iterable[TransactionRecord], bin_width: int = BIN_WIDTH
) -> Dict[GroupKey, BinnedSeries]:
    """Buckets by (location, business day); rows with a minority DailyMinutesOpen are left out."""
    kept, _ = reconcile_minutes_open(list(records))
    buckets: Dict[GroupKey, List[TransactionRecord]] = defaultdict(list)
    for r in kept:
        buckets[(r.location_number, r.calendar_day)].append(r)
    groups = {key: bin_day(buckets[key], bin_width=bin_width) for key in sorted(buckets)}
    logger.info(f"Grouped transactions into {len(groups)} location-days")
    return groups


def filter_usable(
    groups: Dict[GroupKey, BinnedSeries], min_events: int
) -> Tuple[Dict[GroupKey, BinnedSeries], List[GroupKey]]:
    usable = {k: s for k, s in groups.items() if s.n_events >= min_events}
    dropped = [k for k in groups if k not in usable]
    if dropped:
        logger.info(f"Dropped {len(dropped)} location-days with fewer than {min_events} transactions")
    return usable, dropped


def series_to_records(series: BinnedSeries, opening_time: time = time(0, 0)) -> List[TransactionRecord]:
    """One record per nonzero bin at its left edge, carrying the bin's count."""
    opened = datetime.combine(series.calendar_day, opening_time)
    records = []
    for k, count in enumerate(series.counts):
        if count == 0:
            continue
        minute = k * series.bin_width
        placed = opened + timedelta(minutes=minute)
        records.append(
            TransactionRecord(
                location_number=series.location_number,
                sales_day_name=DAY_NAMES[series.calendar_day.weekday()],
                daily_minutes_open=series.daily_minutes_open,
                date_time_placed=placed,
                sales_as_minutes=float(minute),
                quantity=count,
            )
        )
    return records
