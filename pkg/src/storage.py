"""Flat-file persistence for every pipeline artifact plus the run manifest.

Nothing written here carries a timestamp, so a replay with the same
configuration reproduces every file byte for byte.
"""
import csv
import hashlib
import json
import logging
import shutil
from collections import defaultdict
from datetime import date
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel

from src.hier import HierData, PosteriorDraws
from src.errors import SchemaError
from src.ingest import TRANSACTION_COLUMNS
from src.schema import BinnedSeries, CoefficientRecord, FitFailure, Rejection, TransactionRecord

logger = logging.getLogger("hiercast.storage")

PathLike = Union[str, Path]

COEFFICIENT_COLUMNS = ("LocationNumber", "Day", "SalesDayName", "Coefficient0", "Coefficient1", "Coefficient2")
BINNED_COLUMNS = ("location", "day", "day_of_week", "bin_index", "count", "minutes_open", "n_events")
MANIFEST_VERSION = 1


def _num(value: float) -> str:
    value = float(value)
    return str(int(value)) if value.is_integer() else repr(value)


def _writer(path: PathLike):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return open(path, mode="w", newline="", encoding="utf-8")


def _read_rows(path: PathLike) -> List[Dict[str, str]]:
    with open(path, mode="r", encoding="utf-8-sig", newline="") as f:
        return list(csv.DictReader(f))


def write_transactions_csv(path: PathLike, records: Iterable[TransactionRecord]) -> int:
    n = 0
    with _writer(path) as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(TRANSACTION_COLUMNS)
        for r in records:
            writer.writerow(
                [
                    r.location_number,
                    r.sales_day_name,
                    r.daily_minutes_open,
                    r.date_time_placed.strftime("%Y-%m-%d %H:%M"),
                    _num(r.sales_as_minutes),
                    r.quantity,
                ]
            )
            n += 1
    logger.info(f"Wrote {n} transactions to {path}")
    return n


def write_rejections(path: PathLike, rejections: Sequence[Rejection]) -> None:
    with _writer(path) as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["row", "reason"])
        writer.writerows([r.row, r.reason] for r in rejections)


def clear_directory(directory: PathLike) -> Path:
    """Empties a stage-owned output directory so a re-run leaves no stale files behind."""
    directory = Path(directory)
    if directory.exists():
        removed = sum(1 for p in directory.rglob("*") if p.is_file())
        shutil.rmtree(directory)
        if removed:
            logger.info(f"Removed {removed} files from previous run in {directory}")
    directory.mkdir(parents=True)
    return directory


def write_binned(directory: PathLike, groups: Dict[Tuple[int, date], BinnedSeries]) -> List[Path]:
    """One shard per location: binned/location_<id>.csv. Earlier shards are removed first."""
    directory = clear_directory(directory)
    by_location: Dict[int, List[BinnedSeries]] = defaultdict(list)
    for key in sorted(groups):
        by_location[key[0]].append(groups[key])

    paths = []
    for location in sorted(by_location):
        path = directory / f"location_{location}.csv"
        with _writer(path) as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(BINNED_COLUMNS)
            for s in by_location[location]:
                day = s.calendar_day.isoformat()
                for k, count in enumerate(s.counts):
                    writer.writerow([location, day, s.day_of_week, k, count, s.daily_minutes_open, s.n_events])
        paths.append(path)
    logger.info(f"Wrote {len(groups)} binned location-days into {len(paths)} location shards")
    return paths


def binned_shards(directory: PathLike) -> List[Path]:
    return sorted(Path(directory).glob("location_*.csv"), key=lambda p: int(p.stem.split("_", 1)[1]))


def read_binned(directory: PathLike, bin_width: int) -> Dict[Tuple[int, date], BinnedSeries]:
    rows: Dict[Tuple[int, date], List[Dict[str, str]]] = defaultdict(list)
    for shard in binned_shards(directory):
        for row in _read_rows(shard):
            rows[(int(row["location"]), date.fromisoformat(row["day"]))].append(row)

    groups = {}
    for key in sorted(rows):
        day_rows = sorted(rows[key], key=lambda r: int(r["bin_index"]))
        first = day_rows[0]
        minutes_open = int(first["minutes_open"])
        groups[key] = BinnedSeries(
            location_number=key[0],
            calendar_day=key[1],
            day_of_week=int(first["day_of_week"]),
            bin_width=bin_width,
            daily_minutes_open=minutes_open,
            counts=[int(r["count"]) for r in day_rows],
            n_events=int(first["n_events"]),
            partial_last_bin=minutes_open % bin_width != 0,
        )
    return groups


def write_coefficients(path: PathLike, records: Sequence[CoefficientRecord]) -> None:
    with _writer(path) as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(COEFFICIENT_COLUMNS)
        for r in sorted(records, key=lambda r: r.key):
            writer.writerow(
                [r.location_number, r.calendar_day.isoformat(), r.sales_day_name, repr(r.c0), repr(r.c1), repr(r.c2)]
            )
    logger.info(f"Wrote {len(records)} coefficient records to {path}")


def read_coefficients(path: PathLike) -> List[CoefficientRecord]:
    records = []
    for row in _read_rows(path):
        day = date.fromisoformat(row["Day"])
        records.append(
            CoefficientRecord(
                location_number=int(row["LocationNumber"]),
                calendar_day=day,
                day_of_week=day.weekday(),
                c0=float(row["Coefficient0"]),
                c1=float(row["Coefficient1"]),
                c2=float(row["Coefficient2"]),
            )
        )
    return records


def write_fit_failures(path: PathLike, failures: Sequence[FitFailure]) -> None:
    with _writer(path) as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["LocationNumber", "Day", "reason"])
        writer.writerows([x.location_number, x.calendar_day.isoformat(), x.reason] for x in failures)


def write_split(path: PathLike, labels: Dict[Tuple[int, date], str]) -> None:
    with _writer(path) as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["LocationNumber", "Day", "Set"])
        writer.writerows([key[0], key[1].isoformat(), labels[key]] for key in sorted(labels))


def read_split(path: PathLike) -> Dict[Tuple[int, date], str]:
    return {(int(r["LocationNumber"]), date.fromisoformat(r["Day"])): r["Set"] for r in _read_rows(path)}


HIER_DATA_COLUMNS = ("day_index", "location_index", "y")


def write_hier_data(path: PathLike, data: HierData) -> None:
    frame = pd.DataFrame({"day_index": data.day_index, "location_index": data.location_index, "y": data.y})
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, lineterminator="\n")


def read_hier_data(path: PathLike, n_days: int = 7, n_locations: Optional[int] = None) -> HierData:
    frame = pd.read_csv(path)
    missing = [c for c in HIER_DATA_COLUMNS if c not in frame.columns]
    if missing:
        raise SchemaError(f"{path}: HierData CSV is missing column(s) {missing}")
    j = frame["location_index"].to_numpy(dtype=np.int64)
    return HierData(
        day_index=frame["day_index"].to_numpy(dtype=np.int64),
        location_index=j,
        y=frame["y"].to_numpy(dtype=float),
        n_days=n_days,
        n_locations=n_locations if n_locations is not None else int(j.max()) + 1 if len(j) else 1,
    )


def draws_frame(draws: PosteriorDraws) -> pd.DataFrame:
    """One row per retained draw: chain, draw, lp__, then every parameter."""
    chains, n = draws.n_chains, draws.n_draws
    columns: Dict[str, np.ndarray] = {
        "chain": np.repeat(np.arange(chains), n),
        "draw": np.tile(np.arange(n), chains),
        "lp__": draws.lp.reshape(-1),
    }
    for name, values in draws.parameters(include_eta=True).items():
        columns[name] = values.reshape(-1)
    return pd.DataFrame(columns)


def write_draws(path: PathLike, draws: PosteriorDraws) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    draws_frame(draws).to_csv(path, index=False, lineterminator="\n")


def write_frame(path: PathLike, frame: pd.DataFrame) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, lineterminator="\n")


def read_summary(path: PathLike) -> pd.DataFrame:
    frame = pd.read_csv(path, dtype={"label": str})
    frame["label"] = frame["label"].fillna("")
    return frame


def _jsonable(payload: Any) -> Any:
    if isinstance(payload, BaseModel):
        return payload.model_dump(mode="json")
    return payload


def write_json(path: PathLike, payload: Any) -> None:
    with _writer(path) as f:
        json.dump(_jsonable(payload), f, sort_keys=True, indent=2)
        f.write("\n")


def read_json(path: PathLike) -> Any:
    with open(path, mode="r", encoding="utf-8") as f:
        return json.load(f)


def sha256_file(path: PathLike) -> str:
    digest = hashlib.sha256()
    with open(path, mode="rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


class Manifest:
    """manifest.json: config hash, seeds and per-stage input/output digests."""

    FILENAME = "manifest.json"

    def __init__(self, out_dir: PathLike):
        self.out_dir = Path(out_dir)
        self.path = self.out_dir / self.FILENAME
        self.data: Dict[str, Any] = read_json(self.path) if self.path.exists() else {}

    def _digests(self, paths: Iterable[PathLike]) -> Dict[str, str]:
        out = {}
        for p in paths:
            p = Path(p)
            try:
                key = p.resolve().relative_to(self.out_dir.resolve()).as_posix()
            except ValueError:
                key = p.as_posix()
            out[key] = sha256_file(p)
        return dict(sorted(out.items()))

    def record(
        self,
        stage: str,
        config: Dict[str, Any],
        config_hash: str,
        seeds: Dict[str, Any],
        inputs: Iterable[PathLike],
        outputs: Iterable[PathLike],
    ) -> None:
        if self.data.get("config_hash") not in (None, config_hash):
            logger.warning("Configuration changed since earlier stages in this directory; their entries are kept")
        self.data.update(
            {"format_version": MANIFEST_VERSION, "config_hash": config_hash, "config": config, "seeds": seeds}
        )
        stages = self.data.setdefault("stages", {})
        stages[stage] = {"inputs": self._digests(inputs), "outputs": self._digests(outputs)}
        write_json(self.path, self.data)

    def outputs(self) -> List[str]:
        return sorted(p for s in self.data.get("stages", {}).values() for p in s["outputs"])
