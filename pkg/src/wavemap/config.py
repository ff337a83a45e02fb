"""Run configuration: all physical and numerical parameters of one evolution."""
from __future__ import annotations

import dataclasses

from .grid import Domain, Grid2D, build_grid
from .model import InitialDataParams


class ConfigError(ValueError):
    """Malformed or invalid run configuration."""


@dataclasses.dataclass
class RunConfig:
    amplitude: float
    grid_n: int
    r1: float = 0.5
    r2: float = 1.0
    n: int = 4
    domain: str = "full"
    method: str = "rattle"
    cfl: float = 0.2
    t_end: float = 1.6
    tol: float = 1e-12
    max_iter: int = 100
    sample_stride: int = 1
    snapshot_times: tuple[float, ...] = ()
    out: str | None = None
    energy_correction: bool = True
    initial: str = "ring"
    stop_on_flip: bool = False

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.domain not in ("full", "quarter"):
            raise ConfigError(f"domain must be 'full' or 'quarter', got {self.domain!r}")
        if self.method not in ("rk4", "rattle"):
            raise ConfigError(f"method must be 'rk4' or 'rattle', got {self.method!r}")
        if self.initial not in ("ring", "static"):
            raise ConfigError(f"initial must be 'ring' or 'static', got {self.initial!r}")
        if self.grid_n < 9 or self.grid_n % 2 == 0:
            raise ConfigError(f"grid_n must be odd and >= 9, got {self.grid_n}")
        if not (0.0 <= self.r1 < self.r2):
            raise ConfigError(f"need 0 <= r1 < r2, got r1={self.r1}, r2={self.r2}")
        if self.n < 1:
            raise ConfigError(f"n must be >= 1, got {self.n}")
        if self.cfl <= 0.0:
            raise ConfigError(f"cfl must be positive, got {self.cfl}")
        if self.t_end <= 0.0:
            raise ConfigError(f"t_end must be positive, got {self.t_end}")
        if self.tol <= 0.0:
            raise ConfigError(f"tol must be positive, got {self.tol}")
        if self.max_iter < 1:
            raise ConfigError(f"max_iter must be >= 1, got {self.max_iter}")
        if self.sample_stride < 1:
            raise ConfigError(f"sample_stride must be >= 1, got {self.sample_stride}")

    def build_grid(self) -> Grid2D:
        return build_grid(Domain(self.domain), self.grid_n)

    def initial_params(self) -> InitialDataParams:
        return InitialDataParams(self.amplitude, self.r1, self.r2, self.n)


_BOOL_KEYS = {"energy_correction", "stop_on_flip"}
_INT_KEYS = {"grid_n", "n", "max_iter", "sample_stride"}
_FLOAT_KEYS = {"amplitude", "r1", "r2", "cfl", "t_end", "tol"}
_STR_KEYS = {"domain", "method", "out", "initial"}
_LIST_KEYS = {"snapshot_times"}
_ALL_KEYS = _BOOL_KEYS | _INT_KEYS | _FLOAT_KEYS | _STR_KEYS | _LIST_KEYS
_REQUIRED = ("amplitude", "grid_n")


def parse_config(text: str) -> RunConfig:
    """Parse a flat ``key = value`` document into a RunConfig.

    Unknown keys are rejected; omitted keys take defaults; ``amplitude`` and
    ``grid_n`` are required.  '#' starts a comment.
    """
    kwargs: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in _ALL_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in kwargs:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            if key in _BOOL_KEYS:
                if value.lower() not in ("true", "false", "1", "0", "yes", "no"):
                    raise ValueError(value)
                kwargs[key] = value.lower() in ("true", "1", "yes")
            elif key in _INT_KEYS:
                kwargs[key] = int(value)
            elif key in _FLOAT_KEYS:
                kwargs[key] = float(value)
            elif key in _LIST_KEYS:
                kwargs[key] = tuple(float(tok) for tok in value.split(",") if tok.strip())
            else:
                kwargs[key] = value
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {value!r}") from exc
    for key in _REQUIRED:
        if key not in kwargs:
            raise ConfigError(f"missing required key {key!r}")
    try:
        return RunConfig(**kwargs)
    except ConfigError:
        raise


def format_config(config: RunConfig) -> str:
    """Inverse of parse_config (17 significant digits for floats)."""
    lines = []
    for field in dataclasses.fields(RunConfig):
        value = getattr(config, field.name)
        if field.name == "out" and value is None:
            continue
        if field.name in _LIST_KEYS:
            value = ",".join(f"{t:.17g}" for t in value)
            if not value:
                continue
        elif field.name in _FLOAT_KEYS:
            value = f"{value:.17g}"
        elif field.name in _BOOL_KEYS:
            value = "true" if value else "false"
        lines.append(f"{field.name} = {value}")
    return "\n".join(lines) + "\n"
