import sys

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib
from enum import Enum
from pathlib import Path
from typing import Any

from pydantic import BaseModel, Field, ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from src.errors import ConfigError, InvalidGridError, InvalidLayoutError
from src.objectives.models import Thresholds
from src.optim.ddpg import DdpgOptions
from src.optim.mobo import BoOptions
from src.rf.environment import build_antennas
from src.rf.models import LayoutConfig


class Settings(BaseSettings):
    # Parallelism cap for tensor precomputation and the lambda sweep
    threads: int = Field(4, ge=1)
    log_level: str = "INFO"
    output_dir: Path = Path("runs")

    model_config = SettingsConfigDict(
        env_prefix="CCO_", env_file=".env", env_file_encoding="utf-8", extra="ignore"
    )


settings = Settings()


class MethodName(str, Enum):
    RANDOM = "random"
    BO = "bo"
    DDPG = "ddpg"


class RandomOptions(BaseModel):
    budget: int = Field(1012, gt=0)


class MethodSection(BaseModel):
    name: MethodName = MethodName.RANDOM
    seed: int = 0
    random: RandomOptions = Field(default_factory=RandomOptions)
    bo: BoOptions = Field(default_factory=BoOptions)
    ddpg: DdpgOptions = Field(default_factory=DdpgOptions)
    lambda_stride: float = Field(0.1, gt=0, le=1)


class OutputSection(BaseModel):
    """Relative file names resolve against directory."""

    directory: Path = Path("runs")
    environment_file: Path = Path("environment.json")
    tensor_file: Path = Path("coverage.cco")

    def resolve(self, name: Path) -> Path:
        return name if name.is_absolute() else self.directory / name

    @property
    def environment_path(self) -> Path:
        return self.resolve(self.environment_file)

    @property
    def tensor_path(self) -> Path:
        return self.resolve(self.tensor_file)

    def history_path(self, method: MethodName) -> Path:
        return self.directory / f"{method.value}_history.csv"

    def front_path(self, method: MethodName) -> Path:
        return self.directory / f"{method.value}_front.csv"


class ExperimentConfig(BaseModel):
    layout: LayoutConfig = Field(default_factory=LayoutConfig)
    thresholds: Thresholds = Field(default_factory=Thresholds)
    method: MethodSection = Field(default_factory=MethodSection)
    output: OutputSection = Field(default_factory=OutputSection)


SECTIONS: dict[str, type[BaseModel]] = {
    "layout": LayoutConfig,
    "thresholds": Thresholds,
    "method": MethodSection,
    "output": OutputSection,
}


def _first_error(e: ValidationError) -> str:
    err = e.errors()[0]
    where = ".".join(str(p) for p in err["loc"]) or "<section>"
    return f"{where}: {err['msg']} ({e.error_count()} error(s))"


def _check_layout(layout: LayoutConfig) -> None:
    """Grid divisibility and site geometry, checked before any stage runs."""
    try:
        layout.grid.shape
        build_antennas(layout)
    except (InvalidGridError, InvalidLayoutError) as e:
        raise ConfigError(str(e), section="layout") from e


def parse_experiment(data: dict[str, Any]) -> ExperimentConfig:
    """Validate a decoded TOML document section by section."""
    sections: dict[str, BaseModel] = {}
    for name, model in SECTIONS.items():
        if name not in data:
            raise ConfigError(f"missing section '{name}'", section=name)
        if not isinstance(data[name], dict):
            raise ConfigError("expected a table", section=name)
        try:
            sections[name] = model.model_validate(data[name])
        except ValidationError as e:
            raise ConfigError(_first_error(e), section=name) from e
    layout = sections["layout"]
    assert isinstance(layout, LayoutConfig)
    _check_layout(layout)
    unknown = sorted(set(data) - set(SECTIONS))
    if unknown:
        raise ConfigError(f"unknown section(s): {', '.join(unknown)}")
    return ExperimentConfig(**sections)


def load_experiment(path: Path) -> ExperimentConfig:
    """
    Read an experiment TOML file.

    Raises:
        ConfigError: unreadable file, bad TOML, missing section or invalid values
    """
    path = Path(path)
    try:
        data = tomllib.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except OSError as e:
        raise ConfigError(f"cannot read {path}: {e}") from e
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"{path}: invalid TOML: {e}") from e
    return parse_experiment(data)
