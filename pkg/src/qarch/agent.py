"""N-step Double DQN agent with the adaptive target/epsilon scheduler."""

from __future__ import annotations

import io
import json
from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .nn import Adam, Mlp, copy_params, train_step


@dataclass
class Transition:
    state: np.ndarray
    action: int
    reward: float
    next_state: np.ndarray
    done: bool


class ReplayBuffer:
    """Fixed-capacity ring of one-step transitions tagged with episode ids.

    N-step slices are assembled at sample time by walking forward from the
    sampled index; a slice stops at a terminal transition, at an episode
    change, or at the newest stored transition.
    """

    def __init__(self, capacity: int, obs_size: int):
        self.capacity = int(capacity)
        self.states = np.zeros((capacity, obs_size))
        self.next_states = np.zeros((capacity, obs_size))
        self.actions = np.zeros(capacity, dtype=np.int64)
        self.rewards = np.zeros(capacity)
        self.dones = np.zeros(capacity, dtype=bool)
        self.episodes = np.zeros(capacity, dtype=np.int64)
        self.head = 0
        self.size = 0

    def __len__(self) -> int:
        return self.size

    def add(self, t: Transition, episode: int) -> None:
        i = self.head
        self.states[i] = t.state
        self.next_states[i] = t.next_state
        self.actions[i] = t.action
        self.rewards[i] = t.reward
        self.dones[i] = t.done
        self.episodes[i] = episode
        self.head = (i + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def __getitem__(self, i: int) -> Transition:
        return Transition(self.states[i].copy(), int(self.actions[i]), float(self.rewards[i]),
                          self.next_states[i].copy(), bool(self.dones[i]))

    def ordered_indices(self) -> np.ndarray:
        """Storage positions from oldest to newest."""
        start = self.head if self.size == self.capacity else 0
        return (start + np.arange(self.size)) % self.capacity

    def slice_indices(self, i: int, n: int) -> list[int]:
        newest = (self.head - 1) % self.capacity
        out = [i]
        while len(out) < n and not self.dones[out[-1]] and out[-1] != newest:
            j = (out[-1] + 1) % self.capacity
            if self.episodes[j] != self.episodes[i]:
                break
            out.append(j)
        return out

    def slice(self, i: int, n: int) -> list[Transition]:
        return [self[j] for j in self.slice_indices(i, n)]


def _greedy(q: np.ndarray) -> np.ndarray:
    # np.argmax returns the first maximum: ties go to the lowest index
    return np.argmax(q, axis=-1)


def compute_nstep_targets(slices: Sequence[Sequence[Transition]], policy: Mlp, target: Mlp,
                          gamma: float) -> np.ndarray:
    """Discounted slice reward plus the Double-DQN bootstrap from the slice end.

    For a slice of length K the bootstrap is gamma**K * Q_target(s', a*) with
    a* = argmax Q_policy(s'); it is dropped if the slice ends in a terminal
    transition. Both networks are evaluated in inference mode.
    """
    if not slices or any(len(s) == 0 for s in slices):
        raise ValueError("every slice needs at least one transition")
    returns = np.zeros(len(slices))
    boot_scale = np.zeros(len(slices))
    boot_states = []
    for b, sl in enumerate(slices):
        returns[b] = sum(gamma ** k * t.reward for k, t in enumerate(sl))
        boot_scale[b] = 0.0 if sl[-1].done else gamma ** len(sl)
        boot_states.append(sl[-1].next_state)
    return returns + boot_scale * _bootstrap(np.asarray(boot_states), policy, target)


def _bootstrap(states: np.ndarray, policy: Mlp, target: Mlp) -> np.ndarray:
    was_training = policy.training
    policy.eval()
    best = _greedy(policy.forward(states))
    policy.training = was_training
    q_target = target.eval().forward(states)
    return q_target[np.arange(len(states)), best]


def epsilon_schedule(global_step: int, start: float = 1.0, end: float = 0.1,
                     decay_steps: int = 10_000) -> float:
    """Linear decay from ``start`` to ``end`` over ``decay_steps``, then flat."""
    if global_step < 0:
        raise ValueError("global_step must be >= 0")
    frac = min(global_step / decay_steps, 1.0) if decay_steps > 0 else 1.0
    return start + frac * (end - start)


@dataclass
class AdaptiveState:
    """Adaptive learning-target state.

    ``epsilon_scale`` accumulates the 0.95 cuts and multiplies the linear
    schedule; ``epsilon`` is the most recently applied value.
    """

    y_target: float
    epsilon: float = 1.0
    epsilon_scale: float = 1.0
    window: deque = field(default_factory=lambda: deque(maxlen=12))
    test_streak: int = 0
    window_size: int = 12
    window_successes: int = 10
    test_streak_needed: int = 5
    step: float = 0.01
    cap: float = 0.99
    epsilon_cut: float = 0.95

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d["window"] = [bool(x) for x in self.window]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "AdaptiveState":
        d = dict(d)
        window = d.pop("window")
        state = cls(**d)
        state.window = deque(window, maxlen=state.window_size)
        return state


def adaptive_update(state: AdaptiveState, phase: str, success: bool) -> AdaptiveState:
    """Return the scheduler state after one finished episode.

    Training: once ``window_successes`` of the last ``window_size`` episodes
    succeed, raise y_target by ``step`` and clear the window. Testing:
    after ``test_streak_needed`` consecutive successful tests, raise
    y_target and multiply epsilon by ``epsilon_cut``. y_target never
    exceeds ``cap``.
    """
    new = AdaptiveState.from_dict(state.to_dict())
    if phase == "train":
        new.window.append(bool(success))
        if sum(new.window) >= new.window_successes:
            new.y_target = min(new.y_target + new.step, new.cap)
            new.window.clear()
    elif phase == "test":
        new.test_streak = new.test_streak + 1 if success else 0
        if new.test_streak >= new.test_streak_needed:
            new.y_target = min(new.y_target + new.step, new.cap)
            new.epsilon *= new.epsilon_cut
            new.epsilon_scale *= new.epsilon_cut
            new.test_streak = 0
    else:
        raise ValueError(f"phase must be 'train' or 'test', got {phase!r}")
    new.y_target = round(new.y_target, 10)
    return new


@dataclass
class AgentConfig:
    hidden: tuple = (128, 128)
    slope: float = 0.01
    dropout: float = 0.1
    lr: float = 1e-4
    gamma: float = 0.99
    n_step: int = 3
    batch_size: int = 64
    buffer_capacity: int = 16384
    sync_every: int = 512


class DDQNAgent:
    def __init__(self, obs_size: int, n_actions: int, config: AgentConfig | None = None,
                 seed: int = 0):
        self.config = config or AgentConfig()
        c = self.config
        self.rng = np.random.Generator(np.random.PCG64(seed))
        sizes = [obs_size, *c.hidden, n_actions]
        self.policy = Mlp(sizes, c.slope, c.dropout, rng=self.rng)
        self.target = Mlp(sizes, c.slope, c.dropout, rng=self.rng)
        copy_params(self.policy, self.target)
        self.optimizer = Adam(self.policy.params, lr=c.lr)
        self.buffer = ReplayBuffer(c.buffer_capacity, obs_size)
        self.n_actions = n_actions
        self.learn_steps = 0

    def select_action(self, observation, epsilon: float) -> int:
        if not 0.0 <= epsilon <= 1.0:
            raise ValueError("epsilon must be in [0, 1]")
        return select_action(self.policy, observation, epsilon, self.rng)

    def remember(self, t: Transition, episode: int) -> None:
        self.buffer.add(t, episode)

    def learn(self) -> float | None:
        c = self.config
        if len(self.buffer) < c.batch_size:
            return None
        valid = self.buffer.ordered_indices()
        picks = valid[self.rng.integers(0, len(valid), size=c.batch_size)]
        slices = [self.buffer.slice(int(i), c.n_step) for i in picks]
        targets = compute_nstep_targets(slices, self.policy, self.target, c.gamma)
        self.policy.train()
        loss = train_step(self.policy, self.optimizer, self.buffer.states[picks],
                          self.buffer.actions[picks], targets, rng=self.rng)
        self.policy.eval()
        self.learn_steps += 1
        if self.learn_steps % c.sync_every == 0:
            copy_params(self.policy, self.target)
        return loss

    # checkpointing -----------------------------------------------------------

    def checkpoint_bytes(self, extra: dict | None = None) -> bytes:
        """Nets, Adam moments, replay buffer, RNG state and counters in one npz."""
        meta = {
            "version": 1,
            "config": {**self.config.__dict__, "hidden": list(self.config.hidden)},
            "n_actions": self.n_actions,
            "learn_steps": self.learn_steps,
            "adam_t": self.optimizer.t,
            "rng": self.rng.bit_generator.state,
            "buffer_head": self.buffer.head,
            "buffer_size": self.buffer.size,
            "extra": extra or {},
        }
        arrays = {
            "policy": np.frombuffer(self.policy.to_bytes(), dtype=np.uint8),
            "target": np.frombuffer(self.target.to_bytes(), dtype=np.uint8),
        }
        for i, (m, v) in enumerate(zip(self.optimizer.m, self.optimizer.v)):
            arrays[f"adam_m{i}"] = m
            arrays[f"adam_v{i}"] = v
        for name in ("states", "next_states", "actions", "rewards", "dones", "episodes"):
            arrays[f"buf_{name}"] = getattr(self.buffer, name)
        buf = io.BytesIO()
        np.savez_compressed(buf, meta=np.array(json.dumps(meta)), **arrays)
        return buf.getvalue()

    @classmethod
    def from_checkpoint(cls, data: bytes) -> tuple["DDQNAgent", dict]:
        with np.load(io.BytesIO(data)) as archive:
            meta = json.loads(str(archive["meta"]))
            if meta.get("version") != 1:
                raise ValueError(f"unsupported agent checkpoint version {meta.get('version')}")
            cfg = dict(meta["config"])
            cfg["hidden"] = tuple(cfg["hidden"])
            config = AgentConfig(**cfg)
            policy = Mlp.from_bytes(archive["policy"].tobytes())
            agent = cls(policy.sizes[0], meta["n_actions"], config)
            agent.policy = policy
            agent.target = Mlp.from_bytes(archive["target"].tobytes())
            agent.optimizer = Adam(agent.policy.params, lr=config.lr)
            agent.optimizer.t = meta["adam_t"]
            n = len(agent.optimizer.m)
            agent.optimizer.m = [archive[f"adam_m{i}"].copy() for i in range(n)]
            agent.optimizer.v = [archive[f"adam_v{i}"].copy() for i in range(n)]
            for name in ("states", "next_states", "actions", "rewards", "dones", "episodes"):
                setattr(agent.buffer, name, archive[f"buf_{name}"].copy())
        agent.buffer.head = meta["buffer_head"]
        agent.buffer.size = meta["buffer_size"]
        agent.learn_steps = meta["learn_steps"]
        agent.rng.bit_generator.state = meta["rng"]
        return agent, meta["extra"]


def select_action(net: Mlp, observation, epsilon: float, rng: np.random.Generator) -> int:
    """Epsilon-greedy over the network's Q-values (inference mode, lowest index on ties)."""
    n_actions = net.sizes[-1]
    if rng.random() < epsilon:
        return int(rng.integers(0, n_actions))
    was_training = net.training
    net.eval()
    q = net.forward(observation)
    net.training = was_training
    return int(_greedy(q))
