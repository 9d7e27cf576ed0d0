"""Configuration management for rough-resonance runs."""

import os
import sys
from collections.abc import Callable
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any

import yaml

from rough_resonance.geometry import GeometryError, ObstacleSpec, default_m_b, load_bitmap
from rough_resonance.zerofind.rect import LOWER_HALF_PLANE_MESSAGE, Rect, ZeroFindError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

DEFAULT_Q_VALUES: tuple[float, ...] = tuple(round(0.05 * i, 2) for i in range(15)) + (
    0.71,
    0.72,
    0.73,
    0.733,
)
DEFAULT_KOCH_LEVELS: tuple[int, ...] = (2, 3, 4, 5)
DEFAULT_H_VALUES: tuple[float, ...] = (0.08, 0.05, 0.02, 0.01)


class ConfigError(Exception):
    """Raised when a configuration is malformed; ``path`` is the dotted field path."""

    def __init__(self, message: str, path: str | None = None) -> None:
        self.path = path
        location = f"{path}: " if path else ""
        super().__init__(f"{location}{message}")


# =============================================================================
# Value converters
# =============================================================================


def _to_float(value: Any, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"expected a number, got {value!r}", path)
    return float(value)


def _to_int(value: Any, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"expected an integer, got {value!r}", path)
    return value


def _to_bool(value: Any, path: str) -> bool:
    if not isinstance(value, bool):
        raise ConfigError(f"expected true or false, got {value!r}", path)
    return value


def _to_str(value: Any, path: str) -> str:
    if not isinstance(value, str):
        raise ConfigError(f"expected a string, got {value!r}", path)
    return value


def _to_complex(value: Any, path: str) -> complex:
    """Accept [re, im], a real number, or a string such as "-1-1j"."""
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ConfigError(f"complex numbers are written as [re, im], got {value!r}", path)
        return complex(_to_float(value[0], path), _to_float(value[1], path))
    if isinstance(value, str):
        try:
            return complex(value.replace(" ", "").replace("i", "j"))
        except ValueError as e:
            raise ConfigError(f"cannot parse complex number {value!r}", path) from e
    return complex(_to_float(value, path))


def _optional(convert: Callable[[Any, str], Any]) -> Callable[[Any, str], Any]:
    def wrapped(value: Any, path: str) -> Any:
        return None if value is None else convert(value, path)

    return wrapped


def _auto_or_int(value: Any, path: str) -> int | str:
    if value == "auto":
        return "auto"
    number = _to_int(value, path)
    if number < 1:
        raise ConfigError(f"must be 'auto' or a positive integer, got {number}", path)
    return number


def _choice(*options: str) -> Callable[[Any, str], str]:
    def convert(value: Any, path: str) -> str:
        text = _to_str(value, path)
        if text not in options:
            raise ConfigError(f"must be one of {', '.join(options)}; got {text!r}", path)
        return text

    return convert


def _pair(value: Any, path: str) -> tuple[float, float]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ConfigError(f"expected [x, y], got {value!r}", path)
    return (_to_float(value[0], path), _to_float(value[1], path))


def _tuple_of(convert: Callable[[Any, str], Any]) -> Callable[[Any, str], tuple]:
    def wrapped(value: Any, path: str) -> tuple:
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"expected a list, got {value!r}", path)
        return tuple(convert(item, f"{path}[{i}]") for i, item in enumerate(value))

    return wrapped


def _plain(value: Any) -> Any:
    """Dataclass field value -> YAML-safe value."""
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, tuple):
        return [_plain(v) for v in value]
    return value


def _section_from_dict(cls: type, data: Any, path: str, base: Any = None) -> Any:
    """Build a section dataclass from a mapping, rejecting unknown keys."""
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"expected a table, got {type(data).__name__}", path)
    known = {f.name: f for f in fields(cls)}
    for key in data:
        if key not in known:
            raise ConfigError("unknown key", f"{path}.{key}")
    section = base if base is not None else cls()
    values = {f.name: getattr(section, f.name) for f in fields(cls)}
    for key, raw in data.items():
        convert = known[key].metadata["convert"]
        values[key] = convert(raw, f"{path}.{key}")
    return cls(**values)


def _section_to_dict(section: Any) -> dict[str, Any]:
    return {f.name: _plain(getattr(section, f.name)) for f in fields(section)}


def _field(default: Any, convert: Callable[[Any, str], Any]) -> Any:
    if isinstance(default, (list, dict)):
        return field(default_factory=lambda: default.copy(), metadata={"convert": convert})
    return field(default=default, metadata={"convert": convert})


# =============================================================================
# Sections
# =============================================================================


@dataclass(frozen=True)
class ObstacleConfig:
    """Obstacle description (see ObstacleSpec); julia obstacles may give q instead of c."""

    kind: str = _field("disk", _choice("disk", "koch", "julia", "pixel-oracle", "none"))
    radius: float = _field(0.5, _to_float)
    center: tuple[float, float] = _field((0.0, 0.0), _pair)
    level: int = _field(0, _to_int)
    scale: float = _field(0.5, _to_float)
    q: float | None = _field(None, _optional(_to_float))
    c: complex = _field(0j, _to_complex)
    max_iter: int = _field(400, _to_int)
    bailout: float = _field(2.0, _to_float)
    bitmap: str | None = _field(None, _optional(_to_str))
    pixel_size: float = _field(0.01, _to_float)
    origin: tuple[float, float] = _field((0.0, 0.0), _pair)

    @property
    def julia_c(self) -> complex:
        return self.q * complex(-1.0, 0.2) if self.q is not None else self.c

    def to_spec(self, **overrides: Any) -> ObstacleSpec:
        """
        Build the ObstacleSpec; bitmap paths are loaded here.

        Raises:
            GeometryError: If the bitmap cannot be read.
        """
        params: dict[str, Any] = {
            "kind": self.kind,
            "radius": self.radius,
            "center": self.center,
            "level": self.level,
            "scale": self.scale,
            "c": self.julia_c,
            "max_iter": self.max_iter,
            "bailout": self.bailout,
            "pixel_size": self.pixel_size,
            "origin": self.origin,
        }
        if self.kind == "pixel-oracle" and self.bitmap is not None:
            try:
                params["bitmap"] = load_bitmap(self.bitmap)
            except (FileNotFoundError, ValueError) as e:
                raise GeometryError(str(e), "bitmap") from e
        params.update(overrides)
        return ObstacleSpec(**params)


@dataclass(frozen=True)
class GeometryConfig:
    """Interface radius, interface polygon and pixel resolution."""

    X: float = _field(1.0, _to_float)
    m_b: int | str = _field("auto", _auto_or_int)
    pixel_n: int = _field(64, _to_int)
    approximation: str = _field("polygon", _choice("polygon", "pixel"))
    max_cells: int = _field(4_000_000, _to_int)

    def resolved_m_b(self, h_target: float) -> int:
        return default_m_b(self.X, h_target) if self.m_b == "auto" else int(self.m_b)


@dataclass(frozen=True)
class DiscretizationConfig:
    """Mesh size, truncation and corrector parameters."""

    h_target: float = _field(0.05, _to_float)
    N: int | str = _field("auto", _auto_or_int)
    J: int = _field(100, _to_int)
    k0: complex = _field(complex(-1.0, -1.0), _to_complex)
    quality_cap: float = _field(4.0, _to_float)


@dataclass(frozen=True)
class TaskConfig:
    """Parameters of the individual commands."""

    rect: tuple[float, ...] = _field((-2.0, 2.0, -2.0, -0.1), _tuple_of(_to_float))
    resolution: tuple[int, ...] = _field((41, 41), _tuple_of(_to_int))
    seeds: tuple[complex, ...] = _field((), _tuple_of(_to_complex))
    seed_percentile: float = _field(25.0, _to_float)
    stop: float = _field(1.0e-12, _to_float)
    max_iter: int = _field(200, _to_int)
    certify_n: int = _field(4, _to_int)
    certify_function: str = _field("model", _choice("model", "hankel"))
    h_values: tuple[float, ...] = _field(DEFAULT_H_VALUES, _tuple_of(_to_float))
    q_values: tuple[float, ...] = _field(DEFAULT_Q_VALUES, _tuple_of(_to_float))
    koch_levels: tuple[int, ...] = _field(DEFAULT_KOCH_LEVELS, _tuple_of(_to_int))

    @property
    def search_rect(self) -> Rect:
        return Rect.from_list(self.rect)


@dataclass(frozen=True)
class OutputConfig:
    directory: str = _field("results", _to_str)


@dataclass(frozen=True)
class RuntimeConfig:
    """Execution settings; none of them change numerical results."""

    threads: int = _field(1, _to_int)
    cache: bool = _field(True, _to_bool)
    cache_dir: str | None = _field(None, _optional(_to_str))
    log_level: str = _field("INFO", _choice("DEBUG", "INFO", "WARNING", "ERROR"))
    log_to_file: bool = _field(False, _to_bool)


_SECTIONS: dict[str, type] = {
    "obstacle": ObstacleConfig,
    "geometry": GeometryConfig,
    "discretization": DiscretizationConfig,
    "task": TaskConfig,
    "output": OutputConfig,
    "runtime": RuntimeConfig,
}


@dataclass(frozen=True)
class RunConfig:
    """Complete, validated configuration of a run."""

    obstacle: ObstacleConfig = field(default_factory=ObstacleConfig)
    geometry: GeometryConfig = field(default_factory=GeometryConfig)
    discretization: DiscretizationConfig = field(default_factory=DiscretizationConfig)
    task: TaskConfig = field(default_factory=TaskConfig)
    output: OutputConfig = field(default_factory=OutputConfig)
    runtime: RuntimeConfig = field(default_factory=RuntimeConfig)

    @classmethod
    def from_dict(
        cls, data: dict[str, Any] | None, runtime_defaults: RuntimeConfig | None = None
    ) -> "RunConfig":
        """
        Create a RunConfig from a mapping and validate it.

        Args:
            data: Parsed configuration; missing sections and keys take defaults.
            runtime_defaults: Base values for the runtime section (user defaults).

        Raises:
            ConfigError: For unknown keys, wrong types or semantic violations.
        """
        data = data or {}
        if not isinstance(data, dict):
            raise ConfigError("configuration must be a table")
        for key in data:
            if key not in _SECTIONS:
                raise ConfigError("unknown section", key)
        sections = {
            name: _section_from_dict(
                section_cls,
                data.get(name),
                name,
                runtime_defaults if name == "runtime" else None,
            )
            for name, section_cls in _SECTIONS.items()
        }
        config = cls(**sections)
        config.validate()
        return config

    def to_dict(self) -> dict[str, Any]:
        """Convert RunConfig to a dictionary of YAML/TOML-safe values."""
        return {name: _section_to_dict(getattr(self, name)) for name in _SECTIONS}

    def validate(self) -> list[str]:
        """
        Check the cross-field invariants.

        Returns:
            Warnings (an obstacle outside the B_(X-1)(0) margin is permitted).

        Raises:
            ConfigError: With the offending field path.
        """
        d = self.discretization
        if d.k0.imag >= 0:
            raise ConfigError(
                "reference point k0 must lie in the lower half plane", "discretization.k0"
            )
        if d.h_target <= 0:
            raise ConfigError("must be positive", "discretization.h_target")
        if d.J < 1:
            raise ConfigError("must be positive", "discretization.J")
        if self.geometry.X <= 0:
            raise ConfigError("must be positive", "geometry.X")
        if self.geometry.pixel_n < 1:
            raise ConfigError("must be positive", "geometry.pixel_n")

        t = self.task
        try:
            rect = t.search_rect
        except ZeroFindError as e:
            raise ConfigError(str(e), "task.rect") from e
        if not rect.in_lower_half_plane:
            raise ConfigError(LOWER_HALF_PLANE_MESSAGE, "task.rect")
        if len(t.resolution) != 2 or min(t.resolution) < 2:
            raise ConfigError("expected [n_re, n_im] with both >= 2", "task.resolution")
        if not 0 < t.stop < 1:
            raise ConfigError("must lie in (0, 1)", "task.stop")
        if t.certify_n < 1:
            raise ConfigError("must be positive", "task.certify_n")
        for i, seed in enumerate(t.seeds):
            if seed.imag >= 0:
                raise ConfigError("seeds must lie in the lower half plane", f"task.seeds[{i}]")
        if any(h <= 0 for h in t.h_values):
            raise ConfigError("mesh sizes must be positive", "task.h_values")
        if self.runtime.threads < 1:
            raise ConfigError("must be positive", "runtime.threads")

        if self.obstacle.kind == "pixel-oracle" and self.obstacle.bitmap is None:
            raise ConfigError("pixel-oracle obstacles need a bitmap path", "obstacle.bitmap")
        if self.obstacle.kind == "pixel-oracle":
            # Bitmaps are only read when the obstacle is built
            return []
        try:
            return self.obstacle.to_spec().validate(self.geometry.X)
        except GeometryError as e:
            prefix = "geometry" if e.field_name == "X" else "obstacle"
            raise ConfigError(str(e), f"{prefix}.{e.field_name}") from e


# =============================================================================
# Parsing and emission
# =============================================================================


def parse_config(
    text: str, fmt: str = "toml", runtime_defaults: RuntimeConfig | None = None
) -> RunConfig:
    """
    Parse configuration text.

    Args:
        text: TOML or YAML text.
        fmt: "toml" or "yaml".
        runtime_defaults: Base values for the runtime section.

    Raises:
        ConfigError: On syntax errors (with position) or invalid content.
    """
    if fmt == "toml":
        try:
            data = tomllib.loads(text)
        except tomllib.TOMLDecodeError as e:
            raise ConfigError(f"TOML syntax error: {e}") from e
    elif fmt == "yaml":
        try:
            data = yaml.safe_load(text) or {}
        except yaml.YAMLError as e:
            mark = getattr(e, "problem_mark", None)
            where = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
            raise ConfigError(f"YAML syntax error{where}: {e}") from e
    else:
        raise ConfigError(f"Unknown configuration format: {fmt}")
    return RunConfig.from_dict(data, runtime_defaults)


def emit_config(config: RunConfig) -> str:
    """Canonical YAML text; parse_config(emit_config(c), "yaml") == c."""
    return yaml.safe_dump(config.to_dict(), sort_keys=True, default_flow_style=False)


def load_run_config(path: str | Path, runtime_defaults: RuntimeConfig | None = None) -> RunConfig:
    """
    Load a run configuration; the format follows the file suffix.

    Raises:
        ConfigError: If the file is missing or invalid.
    """
    config_path = Path(path).expanduser()
    if not config_path.exists():
        raise ConfigError(f"Configuration file not found: {config_path}")
    fmt = "toml" if config_path.suffix == ".toml" else "yaml"
    return parse_config(config_path.read_text(encoding="utf-8"), fmt, runtime_defaults)


def save_run_config(config: RunConfig, path: str | Path) -> Path:
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(emit_config(config), encoding="utf-8")
    return out


# =============================================================================
# User defaults
# =============================================================================


@dataclass
class Config:
    """User-level defaults read from the XDG config directory."""

    runtime: RuntimeConfig = field(default_factory=RuntimeConfig)

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Config":
        """Create Config from a dictionary."""
        for key in data:
            if key != "runtime":
                raise ConfigError("unknown section", key)
        return cls(runtime=_section_from_dict(RuntimeConfig, data.get("runtime"), "runtime"))

    def to_dict(self) -> dict[str, Any]:
        """Convert Config to a dictionary."""
        return {"runtime": _section_to_dict(self.runtime)}


def get_config_path() -> Path:
    """Get the path to the user configuration file."""
    config_home = os.environ.get("XDG_CONFIG_HOME", os.path.expanduser("~/.config"))
    return Path(config_home) / "rough-resonance" / "config.yaml"


def load_config(config_path: Path | None = None) -> Config:
    """
    Load user defaults from file.

    Args:
        config_path: Optional path to config file. If None, uses default location.

    Returns:
        Config object with loaded or default values.
    """
    if config_path is None:
        config_path = get_config_path()

    if config_path.exists():
        with open(config_path) as f:
            data = yaml.safe_load(f) or {}
        return Config.from_dict(data)

    return Config()


def save_config(config: Config, config_path: Path | None = None) -> None:
    """
    Save user defaults to file.

    Args:
        config: Config object to save.
        config_path: Optional path to config file. If None, uses default location.
    """
    if config_path is None:
        config_path = get_config_path()

    config_path.parent.mkdir(parents=True, exist_ok=True)

    with open(config_path, "w") as f:
        yaml.safe_dump(config.to_dict(), f, default_flow_style=False)


# Global config instance - loaded lazily
_config: Config | None = None


def get_config() -> Config:
    """Get the global configuration instance."""
    global _config
    if _config is None:
        _config = load_config()
    return _config

