"""
DDPG over the configuration space.

The state never changes (every sector stays operational), so each
iteration is a single-step episode: the critic regresses the immediate
reward (discount 0) and the actor climbs the critic. One evaluation per
iteration, all of them recorded.
"""

import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Literal, Optional

import numpy as np
import torch
from pydantic import BaseModel, Field
from torch import nn

from src.objectives.coverage import evaluate, scalarize
from src.objectives.models import N_SECTORS, Configuration, ObjectivePair, Thresholds
from src.optim.encoding import decode
from src.optim.records import EvaluationRecord
from src.rf.coverage import CoverageTensor

log = logging.getLogger(__name__)

FINAL_LAYER_INIT = 3e-3
_INIT_LOCK = threading.Lock()


class DdpgOptions(BaseModel):
    iterations: int = Field(30_000, ge=1)
    buffer_capacity: int = Field(5_000, gt=0)
    batch_size: int = Field(64, gt=0)
    hidden: tuple[int, ...] = (64, 64)
    actor_lr: float = Field(1e-4, gt=0)
    critic_lr: float = Field(1e-3, gt=0)
    tau: float = Field(0.005, gt=0, le=1)
    gamma: float = Field(0.0, ge=0, lt=1)
    initial_variance: float = Field(1.0, ge=0)
    variance_decay: float = Field(0.9996, gt=0, le=1)
    variance_floor: float = Field(1e-3, ge=0)
    log_every: int = Field(1_000, gt=0)


class MlpSpec(BaseModel):
    """Rectifier hidden layers; tanh output for the actor, linear for the critic."""

    widths: tuple[int, ...] = Field(min_length=2)
    output_activation: Literal["tanh", "linear"] = "linear"
    seed: int = 0


def build_mlp(spec: MlpSpec) -> nn.Sequential:
    """
    Fan-in uniform init for hidden layers (torch default) and a small uniform
    final layer, drawn from a forked generator so global torch state is untouched.
    """
    with _INIT_LOCK, torch.random.fork_rng(devices=[]):
        torch.manual_seed(spec.seed)
        layers: list[nn.Module] = []
        pairs = list(zip(spec.widths[:-1], spec.widths[1:]))
        for k, (fan_in, fan_out) in enumerate(pairs):
            linear = nn.Linear(fan_in, fan_out)
            if k == len(pairs) - 1:
                nn.init.uniform_(linear.weight, -FINAL_LAYER_INIT, FINAL_LAYER_INIT)
                nn.init.uniform_(linear.bias, -FINAL_LAYER_INIT, FINAL_LAYER_INIT)
                layers.append(linear)
            else:
                layers.extend([linear, nn.ReLU()])
        if spec.output_activation == "tanh":
            layers.append(nn.Tanh())
        return nn.Sequential(*layers)


class ReplayBuffer:
    """Fixed-capacity ring buffer of (state, action, reward); oldest evicted first."""

    def __init__(self, capacity: int, state_dim: int, action_dim: int):
        if capacity <= 0:
            raise ValueError(f"capacity must be positive, got {capacity}")
        self.capacity = capacity
        self.states = np.zeros((capacity, state_dim), dtype=np.float32)
        self.actions = np.zeros((capacity, action_dim), dtype=np.float32)
        self.rewards = np.zeros(capacity, dtype=np.float32)
        self.cursor = 0
        self.size = 0

    def __len__(self) -> int:
        return self.size

    def add(self, state: np.ndarray, action: np.ndarray, reward: float) -> None:
        self.states[self.cursor] = state
        self.actions[self.cursor] = action
        self.rewards[self.cursor] = reward
        self.cursor = (self.cursor + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def sample(self, batch_size: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Uniform batch without replacement."""
        if batch_size > self.size:
            raise ValueError(f"batch of {batch_size} requested from buffer holding {self.size}")
        idx = rng.choice(self.size, size=batch_size, replace=False)
        return self.states[idx], self.actions[idx], self.rewards[idx]


@dataclass(frozen=True)
class ExplorationSchedule:
    initial_variance: float = 1.0
    decay: float = 0.9996
    floor: float = 1e-3

    def variance(self, t: int) -> float:
        if t < 0:
            raise ValueError(f"t must be non-negative, got {t}")
        return max(self.floor, self.initial_variance * self.decay**t)


@dataclass
class DdpgAgent:
    actor: nn.Sequential
    critic: nn.Sequential
    target_actor: nn.Sequential
    target_critic: nn.Sequential
    actor_optimizer: torch.optim.Optimizer
    critic_optimizer: torch.optim.Optimizer
    buffer: ReplayBuffer
    schedule: ExplorationSchedule
    options: DdpgOptions
    rng: np.random.Generator

    @property
    def state_dim(self) -> int:
        return self.buffer.states.shape[1]

    @property
    def action_dim(self) -> int:
        return self.buffer.actions.shape[1]


def make_agent(options: Optional[DdpgOptions] = None, seed: int = 0, n_sectors: int = N_SECTORS) -> DdpgAgent:
    """Fresh agent; targets start as exact copies of the live networks."""
    options = options or DdpgOptions()
    state_dim, action_dim = n_sectors, 2 * n_sectors
    seeds = np.random.SeedSequence(seed).generate_state(3)
    actor = build_mlp(
        MlpSpec(widths=(state_dim, *options.hidden, action_dim), output_activation="tanh", seed=int(seeds[0]))
    )
    critic = build_mlp(MlpSpec(widths=(state_dim + action_dim, *options.hidden, 1), seed=int(seeds[1])))
    target_actor = build_mlp(
        MlpSpec(widths=(state_dim, *options.hidden, action_dim), output_activation="tanh", seed=int(seeds[0]))
    )
    target_critic = build_mlp(MlpSpec(widths=(state_dim + action_dim, *options.hidden, 1), seed=int(seeds[1])))
    target_actor.load_state_dict(actor.state_dict())
    target_critic.load_state_dict(critic.state_dict())
    return DdpgAgent(
        actor=actor,
        critic=critic,
        target_actor=target_actor,
        target_critic=target_critic,
        actor_optimizer=torch.optim.Adam(actor.parameters(), lr=options.actor_lr),
        critic_optimizer=torch.optim.Adam(critic.parameters(), lr=options.critic_lr),
        buffer=ReplayBuffer(options.buffer_capacity, state_dim, action_dim),
        schedule=ExplorationSchedule(options.initial_variance, options.variance_decay, options.variance_floor),
        options=options,
        rng=np.random.default_rng(int(seeds[2])),
    )


def encode_state(n_sectors: int = N_SECTORS) -> np.ndarray:
    """Operational status per sector; all sectors are always up."""
    return np.ones(n_sectors, dtype=np.float32)


def decode_action(action: np.ndarray) -> Configuration:
    """[-1, 1]^(2N) -> configuration via the unit-cube encoding."""
    a = np.clip(np.asarray(action, dtype=float), -1.0, 1.0)
    return decode((a + 1.0) / 2.0)


def _q_values(critic: nn.Module, states: torch.Tensor, actions: torch.Tensor) -> torch.Tensor:
    return critic(torch.cat([states, actions], dim=-1)).squeeze(-1)


def act(
    agent: DdpgAgent,
    state: np.ndarray,
    t: int,
    variance: Optional[float] = None,
    clip: bool = True,
) -> np.ndarray:
    """actor(state) + N(0, variance(t) I), clamped to [-1, 1] unless clip is False."""
    with torch.no_grad():
        mean = agent.actor(torch.as_tensor(state, dtype=torch.float32)[None]).numpy()[0].astype(float)
    var = agent.schedule.variance(t) if variance is None else variance
    if var < 0:
        raise ValueError(f"variance must be non-negative, got {var}")
    action = mean + np.sqrt(var) * agent.rng.standard_normal(mean.shape) if var > 0 else mean
    return np.clip(action, -1.0, 1.0) if clip else action


def reward_from_pair(pair: ObjectivePair, lam: float) -> float:
    return -scalarize(pair, lam) / pair.cell_count


def reward(config: Configuration, tensor: CoverageTensor, thresholds: Thresholds, lam: float) -> float:
    """Negated, cell-normalized scalarization; 0 is the best possible value."""
    return reward_from_pair(evaluate(config, tensor, thresholds), lam)


def soft_update(target: nn.Module, source: nn.Module, tau: float) -> None:
    with torch.no_grad():
        for t_param, s_param in zip(target.parameters(), source.parameters()):
            t_param.mul_(1.0 - tau).add_(s_param, alpha=tau)


def update_critic(
    critic: nn.Module,
    optimizer: torch.optim.Optimizer,
    states: torch.Tensor,
    actions: torch.Tensor,
    targets: torch.Tensor,
) -> float:
    """One Adam step on the mean squared error to fixed targets."""
    loss = nn.functional.mse_loss(_q_values(critic, states, actions), targets)
    optimizer.zero_grad()
    loss.backward()
    optimizer.step()
    return float(loss.item())


def update_actor(
    actor: nn.Module,
    critic: nn.Module,
    optimizer: torch.optim.Optimizer,
    states: torch.Tensor,
) -> float:
    """One Adam step ascending Q(s, actor(s)); only actor parameters move."""
    objective = _q_values(critic, states, actor(states)).mean()
    optimizer.zero_grad()
    (-objective).backward()
    optimizer.step()
    return float(objective.item())


def train_step(agent: DdpgAgent) -> Optional[tuple[float, float]]:
    """
    Critic regression, actor ascent and target soft updates on one replayed batch.
    Returns None while the buffer holds fewer than batch_size entries.
    """
    opts = agent.options
    if len(agent.buffer) < opts.batch_size:
        return None
    s, a, r = (torch.as_tensor(v) for v in agent.buffer.sample(opts.batch_size, agent.rng))

    # Single-step episodes: the next state equals the current one
    with torch.no_grad():
        targets = r
        if opts.gamma > 0:
            targets = r + opts.gamma * _q_values(agent.target_critic, s, agent.target_actor(s))

    critic_loss = update_critic(agent.critic, agent.critic_optimizer, s, a, targets)
    actor_objective = update_actor(agent.actor, agent.critic, agent.actor_optimizer, s)
    soft_update(agent.target_critic, agent.critic, opts.tau)
    soft_update(agent.target_actor, agent.actor, opts.tau)
    return critic_loss, actor_objective


@dataclass
class DdpgRun:
    """One fixed-lambda run: every evaluation in call order plus its reward."""

    lam: float
    seed: int
    records: list[EvaluationRecord] = field(default_factory=list)
    rewards: list[float] = field(default_factory=list)
    critic_losses: list[float] = field(default_factory=list)

    def best(self) -> EvaluationRecord:
        if not self.records:
            raise ValueError("run has no evaluations")
        return self.records[int(np.argmax(self.rewards))]


def ddpg_run(
    tensor: CoverageTensor,
    thresholds: Thresholds,
    lam: float,
    options: Optional[DdpgOptions] = None,
    seed: int = 0,
    on_evaluation: Optional[Callable[[EvaluationRecord], None]] = None,
) -> DdpgRun:
    """act -> decode -> evaluate -> store -> train, options.iterations times."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda must lie in [0, 1], got {lam}")
    options = options or DdpgOptions()
    agent = make_agent(options, seed, tensor.n_sectors)
    state = encode_state(tensor.n_sectors)
    run = DdpgRun(lam=lam, seed=seed)

    for t in range(options.iterations):
        action = act(agent, state, t)
        config = decode_action(action)
        pair = evaluate(config, tensor, thresholds)
        r = reward_from_pair(pair, lam)
        record = EvaluationRecord(config=config, pair=pair, lam=lam)
        run.records.append(record)
        run.rewards.append(r)
        if on_evaluation:
            on_evaluation(record)

        agent.buffer.add(state, action, r)
        losses = train_step(agent)
        if losses is not None:
            run.critic_losses.append(losses[0])
        if (t + 1) % options.log_every == 0:
            log.info(
                "DDPG lambda=%.1f iteration %d/%d: best reward %.4f, variance %.4f",
                lam, t + 1, options.iterations, max(run.rewards), agent.schedule.variance(t),
            )
    return run


def sweep_lambdas(stride: float) -> list[float]:
    """0, stride, ..., 1; stride must divide 1."""
    if not 0.0 < stride <= 1.0:
        raise ValueError(f"lambda stride must lie in (0, 1], got {stride}")
    steps = round(1.0 / stride)
    if not np.isclose(steps * stride, 1.0):
        raise ValueError(f"lambda stride {stride} does not divide 1")
    return [round(k / steps, 10) for k in range(steps + 1)]


@dataclass
class SweepResult:
    runs: list[DdpgRun]

    @property
    def records(self) -> list[EvaluationRecord]:
        return [rec for run in self.runs for rec in run.records]


def lambda_sweep(
    tensor: CoverageTensor,
    thresholds: Thresholds,
    options: Optional[DdpgOptions] = None,
    seed: int = 0,
    stride: float = 0.1,
    max_workers: int = 1,
) -> SweepResult:
    """
    One fresh agent per lambda with independently derived seeds; the result
    does not depend on max_workers. Runs are ordered by lambda.
    """
    options = options or DdpgOptions()
    lambdas = sweep_lambdas(stride)
    seeds = [int(s) for s in np.random.SeedSequence(seed).generate_state(len(lambdas))]

    def one(k: int) -> DdpgRun:
        return ddpg_run(tensor, thresholds, lambdas[k], options, seeds[k])

    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            runs = list(pool.map(one, range(len(lambdas))))
    else:
        runs = [one(k) for k in range(len(lambdas))]
    log.info("DDPG sweep: %d lambdas x %d iterations", len(lambdas), options.iterations)
    return SweepResult(runs=runs)
