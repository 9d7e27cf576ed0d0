"""Utility modules for rough-resonance."""

from rough_resonance.utils.cache import ModelCache, cache_dir, model_cache_key
from rough_resonance.utils.parallel import parallel_map
from rough_resonance.utils.writers import (
    format_csv_float,
    to_jsonable,
    write_csv,
    write_json,
)

__all__ = [
    "ModelCache",
    "cache_dir",
    "format_csv_float",
    "model_cache_key",
    "parallel_map",
    "to_jsonable",
    "write_csv",
    "write_json",
]
