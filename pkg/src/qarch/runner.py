"""Train/test episode loop for one experiment run.

A run directory holds ``config.cfg``, ``episodes.csv``, ``trace.csv``,
``best_circuit.txt``, ``checkpoint.npz``, ``summary.json`` and ``plots/``.
Everything except ``summary.json`` (which records wall time) is a pure
function of the config and seed.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import logging
import time
from pathlib import Path

import numpy as np

from . import kernels
from .agent import (AdaptiveState, AgentConfig, DDQNAgent, Transition, adaptive_update,
                    epsilon_schedule)
from .config import ExperimentConfig, format_config
from .datasets import Dataset, make_classification, make_moons, train_test_split
from .env import QASEnv, TraceWriter, TRACE_HEADER
from .plots import EPISODE_HEADER, emit_plots, read_episodes
from .vqc import EncodedSet, evaluate_accuracy, format_circuit, parse_circuit

log = logging.getLogger(__name__)

REPORT_HEADER = ["method", "dataset", "seed", "accuracy", "parameters", "gates", "source"]


def build_dataset(config: ExperimentConfig) -> Dataset:
    if config.dataset == "classification":
        return make_classification(config.n_samples, config.n_features, config.n_informative,
                                   config.class_sep, config.data_seed)
    return make_moons(config.n_samples, config.noise, config.data_seed)


def split_dataset(config: ExperimentConfig) -> tuple[Dataset, Dataset]:
    return train_test_split(build_dataset(config), config.test_fraction, config.data_seed)


def default_run_dir(config: ExperimentConfig) -> Path:
    return config.output_root() / config.name / f"seed-{config.seed}"


def agent_config(config: ExperimentConfig) -> AgentConfig:
    return AgentConfig(hidden=tuple(config.hidden), slope=config.slope, dropout=config.dropout,
                       lr=config.lr, gamma=config.effective_gamma(), n_step=config.n_step,
                       batch_size=config.batch_size, buffer_capacity=config.buffer_capacity,
                       sync_every=config.sync_every)


def _fmt(x: float) -> str:
    return repr(float(x))


class _Best:
    """Best final circuit seen so far: highest accuracy, then fewest gates, then earliest."""

    def __init__(self, data: dict | None = None):
        self.data = data

    def offer(self, accuracy, gates, episode, phase, circuit):
        if self.data is not None:
            if (accuracy, -gates) <= (self.data["accuracy"], -self.data["gates"]):
                return
        self.data = {"accuracy": accuracy, "gates": gates, "episode": episode, "phase": phase,
                     "circuit": format_circuit(circuit)}


def _append_report(path: Path, row: list) -> None:
    new = not path.exists()
    with open(path, "a", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if new:
            writer.writerow(REPORT_HEADER)
        writer.writerow(row)


def _truncate_csv(path: Path, keep_rows: int) -> None:
    lines = path.read_text().splitlines(keepends=True)
    path.write_text("".join(lines[:1 + keep_rows]))


def run_experiment(config: ExperimentConfig, run_dir=None, resume: bool = False,
                   plots: bool = True) -> Path:
    """Run every training episode (plus periodic greedy test episodes) for ``config``."""
    config.validate()
    run_dir = Path(run_dir) if run_dir is not None else default_run_dir(config)
    run_dir.mkdir(parents=True, exist_ok=True)
    started = time.perf_counter()

    train, test = split_dataset(config)
    env = QASEnv(EncodedSet.from_arrays(train.features, train.labels),
                 EncodedSet.from_arrays(test.features, test.labels),
                 config.n_qubits, config.max_gates, config.y_target, config.max_epochs,
                 readout=config.readout, init_angle=config.init_angle,
                 classifier_lr=config.classifier_lr)

    ckpt_path = run_dir / "checkpoint.npz"
    episodes_path = run_dir / "episodes.csv"
    trace_path = run_dir / "trace.csv"
    if resume and ckpt_path.exists():
        agent, state = DDQNAgent.from_checkpoint(ckpt_path.read_bytes())
        adaptive = AdaptiveState.from_dict(state["adaptive"])
        first_episode = state["episode"] + 1
        env_steps = state["env_steps"]
        best = _Best(state["best"])
        _truncate_csv(episodes_path, state["episode_rows"])
        _truncate_csv(trace_path, state["trace_rows"])
        episode_rows, trace_rows = state["episode_rows"], state["trace_rows"]
        log.info("resuming %s at episode %d", run_dir, first_episode)
    else:
        agent = DDQNAgent(env.observation_size, env.n_actions, agent_config(config), seed=config.seed)
        adaptive = AdaptiveState(
            y_target=config.y_target, epsilon=config.eps_start,
            window_size=config.adaptive_window, window_successes=config.adaptive_successes,
            test_streak_needed=config.adaptive_test_streak, step=config.adaptive_step,
            cap=config.adaptive_cap, epsilon_cut=config.epsilon_cut)
        first_episode, env_steps, best = 1, 0, _Best()
        episode_rows = trace_rows = 0
        (run_dir / "config.cfg").write_text(format_config(config))
        with open(episodes_path, "w", newline="") as fh:
            csv.writer(fh, lineterminator="\n").writerow(EPISODE_HEADER)
        with open(trace_path, "w", newline="") as fh:
            csv.writer(fh, lineterminator="\n").writerow(TRACE_HEADER)

    ep_fh = open(episodes_path, "a", newline="")
    tr_fh = open(trace_path, "a", newline="")
    ep_writer = csv.writer(ep_fh, lineterminator="\n")
    tr_writer = csv.writer(tr_fh, lineterminator="\n")

    def play(episode: int, phase: str):
        nonlocal env_steps, trace_rows
        obs = env.reset(adaptive.y_target)
        total, step, eps = 0.0, 0, 0.0
        while not env.done:
            if phase == "train":
                eps = float(np.clip(epsilon_schedule(env_steps, config.eps_start, config.eps_end,
                                                     config.eps_decay_steps)
                                    * adaptive.epsilon_scale, 0.0, 1.0))
                adaptive.epsilon = eps
            action = agent.select_action(obs, eps)
            result = env.step(action)
            step += 1
            total += result.reward
            if phase == "train":
                agent.remember(Transition(obs, action, result.reward, result.observation,
                                          result.done), episode)
                env_steps += 1
                if len(agent.buffer) >= max(config.warmup, config.batch_size):
                    agent.learn()
            tr_writer.writerow([episode, step, action, _fmt(result.info["accuracy"]),
                                _fmt(result.reward), int(result.done)])
            trace_rows += 1
            obs = result.observation
        record = [episode, phase, _fmt(env.accuracy), env.gate_count, _fmt(total),
                  _fmt(env.y_target), _fmt(eps)]
        best.offer(env.accuracy, env.gate_count, episode, phase, env.circuit)
        return record, env.accuracy >= env.y_target

    try:
        for episode in range(first_episode, config.episodes + 1):
            record, success = play(episode, "train")
            ep_writer.writerow(record)
            episode_rows += 1
            if config.adaptive:
                adaptive = adaptive_update(adaptive, "train", success)
            if episode % config.test_interval == 0:
                record, success = play(episode, "test")
                ep_writer.writerow(record)
                episode_rows += 1
                if config.adaptive:
                    adaptive = adaptive_update(adaptive, "test", success)
            if episode % config.checkpoint_every == 0 or episode == config.episodes:
                ep_fh.flush()
                tr_fh.flush()
                state = {"episode": episode, "env_steps": env_steps, "adaptive": adaptive.to_dict(),
                         "best": best.data, "episode_rows": episode_rows, "trace_rows": trace_rows}
                ckpt_path.write_bytes(agent.checkpoint_bytes(state))
                log.info("episode %d: y_target=%.2f best=%.3f/%d gates", episode,
                         adaptive.y_target, best.data["accuracy"], best.data["gates"])
    finally:
        ep_fh.close()
        tr_fh.close()

    circuit_text = best.data["circuit"]
    comments = [f"episode={best.data['episode']} phase={best.data['phase']} "
                f"test_accuracy={best.data['accuracy']!r} gates={best.data['gates']}"]
    circuit = parse_circuit(circuit_text)
    (run_dir / "best_circuit.txt").write_text(format_circuit(circuit, comments))

    records = read_episodes(episodes_path)
    summary = {
        "config": config.name,
        "seed": config.seed,
        "backend": kernels.BACKEND,
        "best": {k: v for k, v in best.data.items() if k != "circuit"},
        "final_y_target": adaptive.y_target,
        "final_epsilon_scale": adaptive.epsilon_scale,
        "train_episodes": sum(r["phase"] == "train" for r in records),
        "test_episodes": sum(r["phase"] == "test" for r in records),
        "env_steps": env_steps,
        "learn_steps": agent.learn_steps,
        "wall_seconds": round(time.perf_counter() - started, 3),
    }
    (run_dir / "summary.json").write_text(json.dumps(summary, indent=2) + "\n")
    _append_report(run_dir.parent / "report.csv",
                   ["qas-ddqn", config.dataset, config.seed, _fmt(best.data["accuracy"]),
                    circuit.n_rotations, best.data["gates"], str(run_dir)])
    if plots:
        emit_plots(run_dir, config.ma_train, config.ma_test, adaptive=config.adaptive)
    return run_dir


def load_best_circuit(run_dir):
    return parse_circuit((Path(run_dir) / "best_circuit.txt").read_text())


def verify_best_circuit(run_dir, config: ExperimentConfig) -> tuple[float, float]:
    """(logged accuracy, accuracy of the reloaded export on the test split)."""
    summary = json.loads((Path(run_dir) / "summary.json").read_text())
    _, test = split_dataset(config)
    return summary["best"]["accuracy"], evaluate_accuracy(load_best_circuit(run_dir), test)


def run_baseline(config: ExperimentConfig, seeds=None, report_path=None) -> list[dict]:
    """Logistic regression on the config's dataset, one row per data seed."""
    from .baselines import logreg_accuracy, logreg_train

    rows = []
    seeds = list(seeds) if seeds is not None else list(config.seeds)
    report_path = Path(report_path) if report_path else config.output_root() / config.name / "report.csv"
    report_path.parent.mkdir(parents=True, exist_ok=True)
    for seed in seeds:
        cfg = dataclasses.replace(config, data_seed=seed)
        train, test = split_dataset(cfg)
        model = logreg_train(train)
        acc = logreg_accuracy(model, test)
        rows.append({"seed": seed, "accuracy": acc, "parameters": model.n_parameters})
        _append_report(report_path, ["logreg", config.dataset, seed, _fmt(acc),
                                     model.n_parameters, "", f"data_seed={seed}"])
    return rows
