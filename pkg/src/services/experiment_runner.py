"""
Experiment runner: environment file -> coverage tensor -> optimizer run ->
history and front CSVs. Every stage is deterministic in (config, seed).
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from src.config import ExperimentConfig, MethodName, OutputSection, Settings, settings as default_settings
from src.errors import ConfigError
from src.optim.ddpg import DdpgOptions, lambda_sweep, sweep_lambdas
from src.optim.mobo import BoOptions, bo_loop
from src.optim.pareto import ParetoFront, non_dominated
from src.optim.random_search import random_search
from src.optim.records import EvaluationRecord, objective_matrix
from src.rf.coverage import CoverageTensor, load_tensor, precompute_coverage, save_tensor, tensor_checksum
from src.rf.environment import EnvironmentDescription, environment_from_description, generate_environment
from src.services.history import write_front, write_history

log = logging.getLogger(__name__)


@dataclass
class RunResult:
    method: MethodName
    seed: int
    records: list[EvaluationRecord]
    front: ParetoFront
    history_path: Path
    front_path: Path


@dataclass(frozen=True)
class TensorSummary:
    path: Path
    shape: tuple[int, ...]
    checksum: str


class ExperimentRunner:
    """Runs the stages of one experiment configuration."""

    def __init__(self, config: ExperimentConfig, settings: Optional[Settings] = None):
        self.config = config
        self.settings = settings or default_settings

    @property
    def output(self) -> OutputSection:
        return self.config.output

    def generate_environment(self, out: Optional[Path] = None, seed: Optional[int] = None) -> Path:
        """Write the environment description; rerunning yields identical bytes."""
        path = out or self.output.environment_path
        env = generate_environment(self.config.layout, seed)
        env.describe().write(path)
        log.info("Environment with %d sectors written to %s", env.n_sectors, path)
        return path

    def precompute(self, env_file: Optional[Path] = None, out: Optional[Path] = None) -> TensorSummary:
        env_path = env_file or self.output.environment_path
        if not env_path.exists():
            raise ConfigError(f"environment file not found: {env_path}")
        description = EnvironmentDescription.read(env_path)
        tensor = precompute_coverage(environment_from_description(description), self.settings.threads)
        path = out or self.output.tensor_path
        save_tensor(tensor, path)
        return TensorSummary(path=path, shape=tuple(tensor.rsrp_dbm.shape), checksum=tensor_checksum(path))

    def load_tensor(self, path: Optional[Path] = None) -> CoverageTensor:
        """
        The tensor file if present. Otherwise it is computed (not saved) from the
        environment file, which keeps any gen-env seed override, or from the layout.
        """
        path = path or self.output.tensor_path
        if path.exists():
            return load_tensor(path)
        env_path = self.output.environment_path
        if env_path.exists():
            log.warning("Tensor %s not found; computing it from %s", path, env_path)
            env = environment_from_description(EnvironmentDescription.read(env_path))
        else:
            log.warning("Tensor %s not found; computing it from the layout", path)
            env = generate_environment(self.config.layout)
        return precompute_coverage(env, self.settings.threads)

    def bo_options(self, budget: Optional[int] = None) -> BoOptions:
        options = self.config.method.bo
        if budget is not None:
            options = options.model_copy(update={"n_iterations": budget})
        return options

    def ddpg_options(self, budget: Optional[int] = None) -> DdpgOptions:
        options = self.config.method.ddpg
        if budget is not None:
            options = options.model_copy(update={"iterations": budget})
        return options

    def planned_evaluations(
        self, method: MethodName, budget: Optional[int] = None, lambda_stride: Optional[float] = None
    ) -> int:
        """
        Black-box calls a run will make. budget overrides the random total,
        the BO iteration count after the design, or the DDPG iterations per lambda.
        """
        _check_budget(budget)
        if method is MethodName.RANDOM:
            return self.config.method.random.budget if budget is None else budget
        if method is MethodName.BO:
            return self.bo_options(budget).total_evaluations
        return len(self.lambdas(lambda_stride)) * self.ddpg_options(budget).iterations

    def lambda_stride(self, lambda_stride: Optional[float] = None) -> float:
        """The explicit stride if given, otherwise the configured one; must lie in (0, 1]."""
        stride = self.config.method.lambda_stride if lambda_stride is None else lambda_stride
        if not 0.0 < stride <= 1.0:
            raise ConfigError(f"lambda stride must lie in (0, 1], got {stride}", section="method")
        return stride

    def lambdas(self, lambda_stride: Optional[float] = None) -> list[float]:
        stride = self.lambda_stride(lambda_stride)
        try:
            return sweep_lambdas(stride)
        except ValueError as e:
            raise ConfigError(str(e), section="method") from e

    def run(
        self,
        method: MethodName,
        seed: Optional[int] = None,
        budget: Optional[int] = None,
        lambda_stride: Optional[float] = None,
        tensor: Optional[CoverageTensor] = None,
        out_dir: Optional[Path] = None,
    ) -> RunResult:
        planned = self.planned_evaluations(method, budget, lambda_stride)
        seed = self.config.method.seed if seed is None else seed
        tensor = self.load_tensor() if tensor is None else tensor
        thresholds = self.config.thresholds
        ref_point = self.config.method.bo.ref_point

        log.info("Running %s with seed %d (%d evaluations)", method.value, seed, planned)
        if method is MethodName.RANDOM:
            records = random_search(tensor, thresholds, planned, seed)
        elif method is MethodName.BO:
            records = bo_loop(tensor, thresholds, self.bo_options(budget), seed).history
        else:
            stride = self.lambda_stride(lambda_stride)
            sweep = lambda_sweep(
                tensor, thresholds, self.ddpg_options(budget), seed, stride, self.settings.threads
            )
            records = sweep.records

        front = non_dominated(objective_matrix(records), [r.config for r in records])
        directory = out_dir or self.output.directory
        history_path = directory / self.output.history_path(method).name
        front_path = directory / self.output.front_path(method).name
        write_history(history_path, records, method.value, ref_point)
        write_front(front_path, front, method.value)
        log.info("%s: %d evaluations, %d front points -> %s", method.value, len(records), len(front), history_path)
        return RunResult(method, seed, records, front, history_path, front_path)


def _check_budget(budget: Optional[int]) -> None:
    if budget is not None and budget <= 0:
        raise ConfigError(f"budget must be positive, got {budget}")
