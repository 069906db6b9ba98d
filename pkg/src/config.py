import hashlib
import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, List, Literal, Mapping, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from src.errors import ConfigError
from src.schema import COEFFICIENTS, GroundTruth, SamplerConfig, SimConfig
from src.synthgen import draw_ground_truth, reference_regime

logger = logging.getLogger("hiercast.config")

ENV_PREFIX = "HIERCAST_"
# process-level switches read by main.py, not config fields
_ENV_RESERVED = {"DEV_MODE", "LOG_LEVEL"}


class FitOptions(BaseModel):
    model_config = ConfigDict(extra="forbid")

    epsilon: float = Field(1.0, ge=0, description="Shift added to counts before taking logs")
    centering: Literal["midpoint", "left"] = "midpoint"
    workers: int = Field(1, ge=1)


class EvalOptions(BaseModel):
    model_config = ConfigDict(extra="forbid")

    per_record: bool = Field(False, description="Score each test record instead of test group means")
    daily_fit_examples: int = Field(3, ge=0, description="Location-days written as daily_fit plot data")


class PipelineConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    input_csv: Optional[Path] = Field(None, description="transaction CSV; synthetic mode when unset")
    hier_data_csv: Optional[Path] = Field(
        None, description="HierData CSV (day_index, location_index, y) that `infer` samples instead of the coefficients"
    )
    out_dir: Path = Path("hiercast_out")
    sim: SimConfig = Field(default_factory=SimConfig)
    truth: Optional[GroundTruth] = Field(None, description="Explicit ground truth; drawn from the seed when unset")
    truth_preset: Literal["default", "reference"] = "default"
    bin_width: int = Field(15, ge=1)
    min_events_per_day: int = Field(5, ge=0)
    case_insensitive_header: bool = False
    fit: FitOptions = Field(default_factory=FitOptions)
    sampler: SamplerConfig = Field(default_factory=SamplerConfig)
    sampler_overrides: Dict[str, Dict[str, Any]] = Field(
        default_factory=dict, description="Per-coefficient SamplerConfig fields layered over `sampler`"
    )
    split_seed: int = Field(20220801, ge=0, lt=2**64)
    eval: EvalOptions = Field(default_factory=EvalOptions)

    @field_validator("sampler_overrides")
    @classmethod
    def _known_coefficients(cls, v: Dict[str, Dict[str, Any]]) -> Dict[str, Dict[str, Any]]:
        unknown = sorted(set(v) - set(COEFFICIENTS))
        if unknown:
            raise ValueError(f"unknown coefficient(s) {unknown}; expected {list(COEFFICIENTS)}")
        return v

    @property
    def synthetic(self) -> bool:
        return self.input_csv is None

    def sampler_for(self, coefficient: str) -> SamplerConfig:
        overrides = self.sampler_overrides.get(coefficient)
        if not overrides:
            return self.sampler
        return SamplerConfig.model_validate({**self.sampler.model_dump(), **overrides})

    def ground_truth(self) -> GroundTruth:
        if self.truth is not None:
            return self.truth
        if self.truth_preset == "reference":
            return reference_regime(self.sim.n_locations)
        return draw_ground_truth(self.sim.n_locations, self.sim.seed)

    def canonical(self) -> Dict[str, Any]:
        """JSON-safe dump without the output location, so replays elsewhere hash equal."""
        return self.model_dump(mode="json", exclude={"out_dir"})

    def config_hash(self) -> str:
        payload = json.dumps(self.canonical(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def seeds(self) -> Dict[str, Any]:
        return {
            "sim": self.sim.seed,
            "split": self.split_seed,
            "sampler": {c: self.sampler_for(c).seed for c in COEFFICIENTS},
        }


def _set_path(target: Dict[str, Any], path: List[str], value: Any) -> None:
    for part in path[:-1]:
        node = target.get(part)
        if not isinstance(node, dict):
            node = {}
            target[part] = node
        target = node
    target[path[-1]] = value


def _parse_env_value(raw: str) -> Any:
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        return raw


def env_overrides(environ: Mapping[str, str]) -> Dict[str, Any]:
    """HIERCAST_SIM__N_LOCATIONS=10 becomes {"sim": {"n_locations": 10}}."""
    out: Dict[str, Any] = {}
    for key in sorted(environ):
        if not key.startswith(ENV_PREFIX):
            continue
        name = key[len(ENV_PREFIX):]
        if not name or name in _ENV_RESERVED:
            continue
        _set_path(out, name.lower().split("__"), _parse_env_value(environ[key]))
    return out


def _merge(base: Dict[str, Any], extra: Mapping[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in extra.items():
        if isinstance(value, Mapping) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def cli_overrides(
    seed: Optional[int] = None,
    out: Optional[str] = None,
    backend: Optional[str] = None,
    chains: Optional[int] = None,
    iters: Optional[int] = None,
    input_csv: Optional[str] = None,
    hier_data: Optional[str] = None,
) -> Dict[str, Any]:
    out_cfg: Dict[str, Any] = {}
    if seed is not None:
        out_cfg["split_seed"] = seed
        _set_path(out_cfg, ["sim", "seed"], seed)
        _set_path(out_cfg, ["sampler", "seed"], seed)
    if out is not None:
        out_cfg["out_dir"] = out
    if backend is not None:
        _set_path(out_cfg, ["sampler", "backend"], backend)
    if chains is not None:
        _set_path(out_cfg, ["sampler", "chains"], chains)
    if iters is not None:
        _set_path(out_cfg, ["sampler", "iterations"], iters)
    if input_csv is not None:
        out_cfg["input_csv"] = input_csv
    if hier_data is not None:
        out_cfg["hier_data_csv"] = hier_data
    return out_cfg


def _format_error(err: Dict[str, Any]) -> str:
    loc = ".".join(str(p) for p in err["loc"])
    msg = err["msg"].removeprefix("Value error, ")
    return f"{loc}: {msg}" if loc else msg


def load_config(
    path: Optional[str] = None,
    overrides: Optional[Mapping[str, Any]] = None,
    environ: Optional[Mapping[str, str]] = None,
) -> PipelineConfig:
    """defaults < JSON file < HIERCAST_* environment < explicit overrides.

    Every problem found is reported in a single ConfigError.
    """
    errors: List[str] = []
    data: Dict[str, Any] = {}

    if path:
        try:
            with open(path, mode="r", encoding="utf-8") as f:
                loaded = json.load(f)
            if isinstance(loaded, dict):
                data = loaded
            else:
                errors.append(f"{path}: top-level JSON value must be an object")
        except FileNotFoundError:
            errors.append(f"config file not found: {path}")
        except json.JSONDecodeError as e:
            errors.append(f"{path}: invalid JSON ({e})")

    data = _merge(data, env_overrides(os.environ if environ is None else environ))
    data = _merge(data, overrides or {})

    for key in ("input_csv", "hier_data_csv"):
        given = data.get(key)
        if given and not Path(given).is_file():
            errors.append(f"{key}: file not found: {given}")

    cfg = None
    try:
        cfg = PipelineConfig.model_validate(data)
    except ValidationError as e:
        errors.extend(_format_error(err) for err in e.errors())

    if cfg is not None:
        for coefficient in cfg.sampler_overrides:
            try:
                cfg.sampler_for(coefficient)
            except ValidationError as e:
                errors.extend(f"sampler_overrides.{coefficient}.{_format_error(err)}" for err in e.errors())

    if errors:
        raise ConfigError(errors)

    logger.debug(f"Configuration hash {cfg.config_hash()[:12]}")
    return cfg
