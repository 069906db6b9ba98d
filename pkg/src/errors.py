from typing import Any, Dict, List, Optional, Tuple


class HiercastError(Exception):
    exit_code = 1


class ConfigError(HiercastError):
    exit_code = 2

    def __init__(self, errors: List[str]):
        self.errors = list(errors)
        super().__init__("Invalid configuration:\n" + "\n".join(f"  - {e}" for e in self.errors))


class DataError(HiercastError):
    exit_code = 3


class SchemaError(DataError):
    pass


class DataContractError(DataError):
    pass


class MissingStageInputError(DataError):
    def __init__(self, path: str, producer: str):
        self.path = path
        self.producer = producer
        super().__init__(f"Missing input {path}; run the '{producer}' command first.")


class UnderdeterminedFit(DataError):
    def __init__(self, key: Tuple[int, Any], n_bins: int):
        self.key = key
        self.n_bins = n_bins
        super().__init__(f"Group {key} has {n_bins} usable bins; at least 3 are needed for a quadratic fit.")


class InferenceError(HiercastError):
    exit_code = 4


class SamplingError(InferenceError):
    def __init__(self, message: str, dump: Optional[Dict[str, Any]] = None):
        self.dump = dump or {}
        super().__init__(message)
