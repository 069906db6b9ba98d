import math
from datetime import date, datetime, time, timedelta
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

DAY_NAMES = ("Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday", "Sunday")
COEFFICIENTS = ("c0", "c1", "c2")
GROUPINGS = ("location", "day_of_week")

DayName = Literal["Monday", "Tuesday", "Wednesday", "Thursday", "Friday", "Saturday", "Sunday"]
Coefficient = Literal["c0", "c1", "c2"]
Grouping = Literal["location", "day_of_week"]

_DATETIME_FORMATS = ("%Y-%m-%d %H:%M", "%Y-%m-%d %H:%M:%S", "%Y-%m-%dT%H:%M", "%Y-%m-%dT%H:%M:%S")


class GroundTruth(BaseModel):
    """Generative parameters that downstream inference is expected to recover."""

    mu: float = Field(-1.8, description="Global mean of the c0-scale log-rate per minute")
    day_effects: List[float] = Field(
        default_factory=lambda: [-0.12, -0.08, -0.05, 0.0, 0.07, 0.18, 0.0],
        description="True day-of-week effects, Monday first",
    )
    location_effects: List[float] = Field(default_factory=lambda: [0.0], description="True location effects")
    sigma_d: float = Field(0.12, ge=0)
    sigma_j: float = Field(0.3, ge=0)
    sigma_eps: float = Field(0.25, ge=0)
    trend_scale: float = Field(0.05, description="Magnitude multiplier for the true c1")
    curvature_scale: float = Field(0.02, description="Magnitude multiplier for the true c2")
    minutes_open: int = Field(900, ge=1)
    overdispersion: float = Field(0.0, ge=0, description="Gamma-mixing variance; 0 is pure Poisson")
    mean_quantity: float = Field(1.3, ge=1, description="Mean items per transaction")

    @field_validator("day_effects")
    @classmethod
    def _seven_days(cls, v: List[float]) -> List[float]:
        if len(v) != 7:
            raise ValueError(f"day_effects needs exactly 7 entries, got {len(v)}")
        return v

    @field_validator("location_effects")
    @classmethod
    def _some_locations(cls, v: List[float]) -> List[float]:
        if len(v) < 1:
            raise ValueError("location_effects needs at least one entry")
        return v

    @property
    def n_locations(self) -> int:
        return len(self.location_effects)


class SimConfig(BaseModel):
    n_locations: int = Field(49, ge=1)
    n_days: int = Field(150, ge=1)
    seed: int = Field(20220801, ge=0, lt=2**64)
    missing_day_fraction: float = Field(0.0, ge=0.0, le=1.0)
    start_date: date = Field(date(2021, 1, 4), description="First calendar day simulated")
    opening_time: time = Field(time(6, 0), description="Wall-clock opening time of every store")


class TransactionRecord(BaseModel):
    """One sales event in the transaction schema."""

    model_config = ConfigDict(frozen=True)

    location_number: int
    sales_day_name: DayName
    daily_minutes_open: int
    date_time_placed: datetime
    sales_as_minutes: float
    quantity: int

    @field_validator("date_time_placed", mode="before")
    @classmethod
    def _parse_timestamp(cls, v):
        if isinstance(v, str):
            text = v.strip()
            for fmt in _DATETIME_FORMATS:
                try:
                    return datetime.strptime(text, fmt)
                except ValueError:
                    continue
            raise ValueError(f"malformed timestamp {v!r}")
        return v

    @field_validator("daily_minutes_open")
    @classmethod
    def _positive_minutes(cls, v: int) -> int:
        if v < 1:
            raise ValueError("daily_minutes_open ≥ 1 violated")
        return v

    @field_validator("quantity")
    @classmethod
    def _positive_quantity(cls, v: int) -> int:
        if v < 1:
            raise ValueError("quantity ≥ 1 violated")
        return v

    @model_validator(mode="after")
    def _consistent(self) -> "TransactionRecord":
        if not (0 <= self.sales_as_minutes < self.daily_minutes_open):
            raise ValueError("0 ≤ sales_as_minutes < daily_minutes_open violated")
        expected = DAY_NAMES[self.calendar_day.weekday()]
        if self.sales_day_name != expected:
            raise ValueError(f"sales_day_name {self.sales_day_name} does not match business-day weekday {expected}")
        return self

    @property
    def calendar_day(self) -> date:
        """Date the store opened for this sale; late sales past midnight keep the opening date."""
        return (self.date_time_placed - timedelta(minutes=self.sales_as_minutes)).date()

    @property
    def day_of_week(self) -> int:
        return DAY_NAMES.index(self.sales_day_name)


class BinnedSeries(BaseModel):
    """Fixed-grid item counts for one location-day; zero bins are kept."""

    location_number: int
    calendar_day: date
    day_of_week: int = Field(..., ge=0, le=6)
    bin_width: int = Field(15, ge=1)
    daily_minutes_open: int = Field(..., ge=1)
    counts: List[int]
    n_events: int = Field(0, ge=0, description="Number of transactions binned")
    partial_last_bin: bool = False

    @model_validator(mode="after")
    def _grid_length(self) -> "BinnedSeries":
        expected = math.ceil(self.daily_minutes_open / self.bin_width)
        if len(self.counts) != expected:
            raise ValueError(f"expected {expected} bins, got {len(self.counts)}")
        if any(c < 0 for c in self.counts):
            raise ValueError("counts must be nonnegative")
        return self

    @property
    def key(self) -> Tuple[int, date]:
        return (self.location_number, self.calendar_day)

    @property
    def total(self) -> int:
        return sum(self.counts)


class CoefficientRecord(BaseModel):
    """One row of the upper-level dataset."""

    location_number: int
    calendar_day: date
    day_of_week: int = Field(..., ge=0, le=6)
    c0: float
    c1: float
    c2: float

    @field_validator("c0", "c1", "c2")
    @classmethod
    def _finite(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("coefficient must be finite")
        return v

    @property
    def key(self) -> Tuple[int, date]:
        return (self.location_number, self.calendar_day)

    @property
    def sales_day_name(self) -> str:
        return DAY_NAMES[self.day_of_week]

    def coefficient(self, name: str) -> float:
        return getattr(self, name)

    def group_id(self, grouping: str) -> int:
        return self.location_number if grouping == "location" else self.day_of_week


class Rejection(BaseModel):
    row: int
    reason: str


class FitFailure(BaseModel):
    location_number: int
    calendar_day: date
    reason: str


class SamplerConfig(BaseModel):
    backend: Literal["gibbs", "mwg"] = "gibbs"
    chains: int = Field(4, ge=2)
    iterations: int = Field(4000, ge=2)
    warmup: Optional[int] = Field(None, ge=0, description="Defaults to half of iterations")
    seed: int = Field(20220801, ge=0, lt=2**64)
    sigma_upper: Optional[float] = Field(None, gt=0, description="Upper bound of the flat scale priors")
    workers: int = Field(1, ge=1, description="Threads used to run chains")

    @field_validator("backend", mode="before")
    @classmethod
    def _alias(cls, v):
        if isinstance(v, str) and v.lower() in ("metropolis-within-gibbs", "metropolis_within_gibbs"):
            return "mwg"
        return v.lower() if isinstance(v, str) else v

    @model_validator(mode="after")
    def _warmup_fits(self) -> "SamplerConfig":
        if self.warmup is not None and self.warmup >= self.iterations:
            raise ValueError("warmup must be smaller than iterations")
        return self

    @property
    def n_warmup(self) -> int:
        return self.iterations // 2 if self.warmup is None else self.warmup
