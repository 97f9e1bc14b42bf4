"""Batch experiment harness: seeded episode batches, parameter sweeps over the
benchmark grids, aggregation, and deterministic CSV/JSON emission.

Every output byte is a pure function of the experiment config: episode i uses
instance seed base_seed+i, timing never reaches the files, and the config
snapshot embedded in each file omits invocation plumbing such as the output
directory.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import isrs as isrs_mod
from . import rover as rover_mod
from .episodes import STATUS_GOAL, EpisodeLog, run_episode
from .isrs import IsrsInstance, IsrsMdp, generate_isrs
from .mcts import SolverConfig
from .mdp import RewardConfig, SensingModality
from .policies import MctsPolicy, RasterPolicy, random_policy
from .rover import RoverInstance, RoverMdp, generate_rover

ENVIRONMENTS = ("isrs", "rover")
SOLVERS = ("mcts-dpw", "random", "raster")

DEFAULT_LAMBDA = {"isrs": 1.0, "rover": 0.5}
DEFAULT_BUDGET = {"isrs": isrs_mod.DEFAULT_BUDGET, "rover": rover_mod.DEFAULT_BUDGET}

# Default sweep grids mirroring the benchmark tables: rocks/beacons x p for the
# rock search, budget x spectrometer noise for the rover.
ISRS_SWEEP_CELLS = tuple(
    {"rocks": k, "beacons": b, "p_good": p}
    for (k, b) in ((10, 10), (10, 25), (25, 10), (25, 25))
    for p in (0.5, 0.75, 1.0)
)
ROVER_SWEEP_CELLS = tuple(
    {"budget": bud, "spectrometer_sigma": s}
    for bud in (30.0, 60.0, 100.0)
    for s in (0.1, 0.5, 1.0)
)


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass(frozen=True)
class ExperimentConfig:
    environment: str = "isrs"
    solver: str = "mcts-dpw"
    runs: int = 50
    base_seed: int = 0
    grid_size: int = 10
    rocks: int = 10
    beacons: int = 10
    p_good: float = 0.5
    beta: int = 10
    spectrometer_sigma: float = 0.1
    budget: float | None = None
    information_weight: float | None = None
    solver_config: SolverConfig = field(default_factory=SolverConfig)

    def validate(self):
        if self.environment not in ENVIRONMENTS:
            raise ConfigError(f"unknown environment {self.environment!r}")
        if self.solver not in SOLVERS:
            raise ConfigError(f"unknown solver {self.solver!r}")
        if self.solver == "raster" and self.environment != "rover":
            raise ConfigError("the raster policy applies only to the rover environment")
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")
        if self.grid_size < 2:
            raise ConfigError("grid size must be >= 2")
        if not 0.0 <= self.p_good <= 1.0:
            raise ConfigError("p must lie in [0, 1]")
        if self.beta < 2:
            raise ConfigError("beta must be >= 2")
        if self.budget is not None and self.budget < 0:
            raise ConfigError("budget must be non-negative")

    def resolved_budget(self) -> float:
        return DEFAULT_BUDGET[self.environment] if self.budget is None else float(self.budget)

    def resolved_information_weight(self) -> float:
        if self.information_weight is None:
            return DEFAULT_LAMBDA[self.environment]
        return float(self.information_weight)

    def to_dict(self) -> dict:
        d = {
            "environment": self.environment,
            "solver": self.solver,
            "runs": self.runs,
            "base_seed": self.base_seed,
            "grid_size": self.grid_size,
            "budget": self.resolved_budget(),
            "information_weight": self.resolved_information_weight(),
            "solver_config": {
                "iterations": self.solver_config.iterations,
                "max_depth": self.solver_config.max_depth,
                "exploration": self.solver_config.exploration,
                "k_action": self.solver_config.k_action,
                "alpha_action": self.solver_config.alpha_action,
                "k_state": self.solver_config.k_state,
                "alpha_state": self.solver_config.alpha_state,
                "discount": self.solver_config.discount,
                "seed": self.solver_config.seed,
            },
        }
        if self.environment == "isrs":
            d.update(rocks=self.rocks, beacons=self.beacons, p_good=self.p_good)
        else:
            d.update(beta=self.beta, spectrometer_sigma=self.spectrometer_sigma)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        data = dict(data)
        solver_dict = data.pop("solver_config", {})
        known = {f for f in cls.__dataclass_fields__ if f != "solver_config"}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            solver_config = SolverConfig(**solver_dict)
            cfg = cls(solver_config=solver_config, **data)
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        cfg.validate()
        return cfg


# ----------------------------------------------------------------------
# instance / policy construction

def build_instance(cfg: ExperimentConfig, seed: int):
    if cfg.environment == "isrs":
        return generate_isrs(cfg.grid_size, cfg.rocks, cfg.beacons, cfg.p_good, seed,
                             budget=cfg.resolved_budget())
    return generate_rover(cfg.grid_size, cfg.beta, cfg.spectrometer_sigma, seed,
                          budget=cfg.resolved_budget())


def build_mdp(cfg: ExperimentConfig, inst):
    lam = cfg.resolved_information_weight()
    if cfg.environment == "isrs":
        return IsrsMdp(inst, RewardConfig(lam, isrs_mod.ROCK_REWARD))
    return RoverMdp(inst, RewardConfig(lam, rover_mod.DRILL_REWARD))


def build_policy(cfg: ExperimentConfig, inst):
    if cfg.solver == "mcts-dpw":
        return MctsPolicy(cfg.solver_config)
    if cfg.solver == "random":
        return random_policy
    return RasterPolicy(inst)


# ----------------------------------------------------------------------
# batches and aggregation

@dataclass(frozen=True)
class AggregateResult:
    """Summary of one seeded batch.

    ``mean_reward`` averages sentinel-carrying episode rewards over every run
    (failures contribute the sentinel); ``mean_reward_success`` averages the
    true reward over successful episodes only and is what the sweep tables
    report next to the failure count. Timing stays in memory only.
    """

    config: dict
    episode_rewards: tuple[float, ...]
    statuses: tuple[str, ...]
    mean_reward: float
    std_reward: float
    failures: int
    mean_reward_success: float | None
    mean_final_rmse: float
    mean_final_trace: float
    steps: np.ndarray
    trace_mean: np.ndarray
    trace_std: np.ndarray
    rmse_mean: np.ndarray
    rmse_std: np.ndarray
    seconds_per_episode: float
    logs: tuple[EpisodeLog, ...]


def _padded(series_list, fallbacks, length):
    out = np.empty((len(series_list), length))
    for i, (series, fb) in enumerate(zip(series_list, fallbacks)):
        k = len(series)
        out[i, :k] = series
        out[i, k:] = series[-1] if k else fb
    return out


def curve_stats(logs):
    """Per-step mean and stddev of Tr(Sigma) and RMSE across episodes.

    Shorter episodes are padded with their final values out to the longest
    episode; an empty episode is padded with its initial belief values.
    """
    length = max((len(log.records) for log in logs), default=0)
    steps = np.arange(1, length + 1)
    if length == 0:
        z = np.zeros(0)
        return steps, z, z, z, z
    traces = _padded([log.trace_series() for log in logs],
                     [log.initial_trace for log in logs], length)
    rmses = _padded([log.rmse_series() for log in logs],
                    [log.initial_rmse for log in logs], length)
    return (steps, traces.mean(axis=0), traces.std(axis=0),
            rmses.mean(axis=0), rmses.std(axis=0))


def run_batch(cfg: ExperimentConfig) -> AggregateResult:
    """Run ``cfg.runs`` episodes on seeds base_seed+i and aggregate them."""
    cfg.validate()
    snapshot = cfg.to_dict()
    logs = []
    t0 = time.perf_counter()
    for i in range(cfg.runs):
        seed = cfg.base_seed + i
        inst = build_instance(cfg, seed)
        mdp = build_mdp(cfg, inst)
        policy = build_policy(cfg, inst)
        logs.append(run_episode(mdp, policy, seed, config=snapshot))
    seconds = (time.perf_counter() - t0) / cfg.runs
    rewards = np.array([log.reward for log in logs])
    statuses = tuple(log.status for log in logs)
    success = [log.true_reward_sum for log in logs if log.status == STATUS_GOAL]
    steps, trace_mean, trace_std, rmse_mean, rmse_std = curve_stats(logs)
    return AggregateResult(
        config=snapshot,
        episode_rewards=tuple(float(r) for r in rewards),
        statuses=statuses,
        mean_reward=float(rewards.mean()),
        std_reward=float(rewards.std()),
        failures=sum(s != STATUS_GOAL for s in statuses),
        mean_reward_success=float(np.mean(success)) if success else None,
        mean_final_rmse=float(np.mean([log.final_rmse for log in logs])),
        mean_final_trace=float(np.mean([log.final_trace for log in logs])),
        steps=steps,
        trace_mean=trace_mean,
        trace_std=trace_std,
        rmse_mean=rmse_mean,
        rmse_std=rmse_std,
        seconds_per_episode=seconds,
        logs=tuple(logs),
    )


# ----------------------------------------------------------------------
# serialization

def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _json_safe(obj):
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return None if not math.isfinite(x) else x
    if isinstance(obj, np.ndarray):
        return _json_safe(obj.tolist())
    return obj


def _dump_json(obj, path: Path):
    path.write_text(json.dumps(_json_safe(obj), sort_keys=True, indent=2) + "\n")


def belief_to_dict(gp) -> dict:
    """JSON form of a GP belief: prior, kernel, and the raw measurement lists."""
    return {
        "prior_mean": gp.prior_mean,
        "kernel": {
            "kind": gp.kernel.kind,
            "signal_variance": gp.kernel.signal_variance,
            "lengthscale": gp.kernel.lengthscale,
        },
        "measured_locations": gp.measured_locations.tolist(),
        "measurements": gp.measurements.tolist(),
        "noise_variances": gp.noise_variances.tolist(),
    }


def instance_to_dict(inst) -> dict:
    """JSON form of an environment instance; enough to re-run any episode."""
    if isinstance(inst, IsrsInstance):
        return {
            "environment": "isrs",
            "grid_size": inst.grid_size,
            "rocks": [{"node": n, "good": n in inst.good_rocks} for n in inst.rock_nodes],
            "beacons": sorted(inst.beacons),
            "modalities": [
                {"name": m.name, "cost": m.cost, "noise_stddev": m.noise_stddev,
                 "reveals_truth": m.reveals_truth}
                for m in inst.modalities
            ],
            "movement_cost": inst.movement_cost,
            "budget": inst.budget,
            "start": inst.start,
            "goal": inst.goal,
            "sensing_radius": inst.sensing_radius,
            "fidelity_doubling": inst.fidelity_doubling,
            "seed": inst.seed,
        }
    if isinstance(inst, RoverInstance):
        return {
            "environment": "rover",
            "grid_size": inst.grid_size,
            "true_map": inst.true_map.tolist(),
            "beta": inst.beta,
            "spectrometer_sigma": inst.spectrometer_sigma,
            "drill_cost": inst.drill_cost,
            "step_cost": inst.step_cost,
            "budget": inst.budget,
            "start": inst.start,
            "goal": inst.goal,
            "seed": inst.seed,
        }
    raise TypeError(f"unknown instance type {type(inst).__name__}")


def instance_from_dict(data: dict):
    kind = data.get("environment")
    if kind == "isrs":
        return IsrsInstance(
            grid_size=data["grid_size"],
            rock_nodes=tuple(r["node"] for r in data["rocks"]),
            good_rocks=frozenset(r["node"] for r in data["rocks"] if r["good"]),
            beacons=frozenset(data["beacons"]),
            modalities=tuple(SensingModality(**m) for m in data["modalities"]),
            movement_cost=data["movement_cost"],
            budget=data["budget"],
            start=data["start"],
            goal=data["goal"],
            sensing_radius=data["sensing_radius"],
            fidelity_doubling=data["fidelity_doubling"],
            seed=data.get("seed"),
        )
    if kind == "rover":
        return RoverInstance(
            grid_size=data["grid_size"],
            true_map=np.array(data["true_map"]),
            beta=data["beta"],
            spectrometer_sigma=data["spectrometer_sigma"],
            drill_cost=data["drill_cost"],
            step_cost=data["step_cost"],
            budget=data["budget"],
            start=data["start"],
            goal=data["goal"],
            seed=data.get("seed"),
        )
    raise ConfigError(f"unknown instance environment {kind!r}")


# ----------------------------------------------------------------------
# file emission

def _config_header(snapshot: dict) -> str:
    return "# config " + json.dumps(_json_safe(snapshot), sort_keys=True) + "\n"


def write_curves_csv(logs, path: Path, snapshot: dict):
    steps, tm, ts, rm, rs = curve_stats(logs)
    lines = [_config_header(snapshot), "step,trace_mean,trace_std,rmse_mean,rmse_std\n"]
    for i in range(len(steps)):
        lines.append(",".join([
            str(int(steps[i])), _fmt(float(tm[i])), _fmt(float(ts[i])),
            _fmt(float(rm[i])), _fmt(float(rs[i]))]) + "\n")
    path.write_text("".join(lines))


def emit_curves(logs, out_dir, snapshot=None) -> Path:
    """Write the per-step mean/stddev curves of a batch of logs to curves.csv."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "curves.csv"
    write_curves_csv(logs, path, snapshot or {})
    return path


def write_run_outputs(result: AggregateResult, out_dir) -> list[Path]:
    """Emit config.json, episodes.csv, steps.csv, curves.csv and episodes.json."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    snapshot = result.config
    paths = []

    p = out_dir / "config.json"
    _dump_json(snapshot, p)
    paths.append(p)

    p = out_dir / "episodes.csv"
    lines = [_config_header(snapshot),
             "episode,seed,status,steps,reward,true_reward_sum,final_trace,final_rmse\n"]
    for i, log in enumerate(result.logs):
        lines.append(",".join([
            str(i), str(log.seed), log.status, str(len(log.records)),
            _fmt(log.reward), _fmt(log.true_reward_sum),
            _fmt(log.final_trace), _fmt(log.final_rmse)]) + "\n")
    p.write_text("".join(lines))
    paths.append(p)

    p = out_dir / "steps.csv"
    lines = [_config_header(snapshot),
             "episode,step,loc_x,loc_y,action,budget,reward,trace,rmse\n"]
    for i, log in enumerate(result.logs):
        for r in log.records:
            lines.append(",".join([
                str(i), str(r.step), _fmt(r.x), _fmt(r.y), r.action,
                _fmt(r.remaining_budget), _fmt(r.true_reward),
                _fmt(r.trace_of_variance), _fmt(r.rmse)]) + "\n")
    p.write_text("".join(lines))
    paths.append(p)

    paths.append(emit_curves(result.logs, out_dir, snapshot))

    p = out_dir / "episodes.json"
    _dump_json({
        "config": snapshot,
        "episodes": [
            {
                "seed": log.seed,
                "status": log.status,
                "reward": log.reward,
                "true_reward_sum": log.true_reward_sum,
                "records": [
                    {
                        "step": r.step, "loc_x": r.x, "loc_y": r.y, "action": r.action,
                        "budget": r.remaining_budget, "reward": r.true_reward,
                        "trace": r.trace_of_variance, "rmse": r.rmse,
                    }
                    for r in log.records
                ],
                "final_belief": belief_to_dict(log.final_belief),
            }
            for log in result.logs
        ],
    }, p)
    paths.append(p)
    return paths


# ----------------------------------------------------------------------
# sweeps

def default_sweep(environment: str):
    if environment == "isrs":
        return ISRS_SWEEP_CELLS, ("mcts-dpw", "random")
    if environment == "rover":
        return ROVER_SWEEP_CELLS, ("mcts-dpw", "random", "raster")
    raise ConfigError(f"unknown environment {environment!r}")


def run_sweep(base_cfg: ExperimentConfig, cells=None, solvers=None):
    """One aggregate per (cell, solver); a failing cell is recorded in-row and
    the sweep continues. Returns (rows, cell_keys, solvers)."""
    default_cells, default_solvers = default_sweep(base_cfg.environment)
    cells = list(cells) if cells is not None else list(default_cells)
    solvers = tuple(solvers) if solvers is not None else default_solvers
    if not cells:
        raise ConfigError("sweep grid must be non-empty")
    cell_keys = sorted({k for cell in cells for k in cell})
    rows = []
    for cell in cells:
        row = {"cell": dict(cell), "results": {}}
        for solver in solvers:
            cfg = replace(base_cfg, solver=solver, **cell)
            try:
                row["results"][solver] = run_batch(cfg)
            except Exception as exc:  # keep sweeping; the row records the failure
                row["results"][solver] = f"error: {exc}"
        rows.append(row)
    return rows, cell_keys, solvers


def write_sweep_csv(rows, cell_keys, solvers, out_dir, snapshot) -> Path:
    """Table layout: one row per parameter cell, one column group per solver."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "sweep.csv"
    header = list(cell_keys)
    for solver in solvers:
        header += [f"{solver}_mean", f"{solver}_std", f"{solver}_failures"]
    lines = [_config_header(snapshot), ",".join(header) + "\n"]
    for row in rows:
        fields = [_fmt(row["cell"].get(k, "")) for k in cell_keys]
        for solver in solvers:
            res = row["results"][solver]
            if isinstance(res, AggregateResult):
                mean = res.mean_reward_success
                succ = [r for r, s in zip(res.episode_rewards, res.statuses) if s == STATUS_GOAL]
                std = float(np.std(succ)) if succ else None
                fields += ["" if mean is None else _fmt(mean),
                           "" if std is None else _fmt(std),
                           str(res.failures)]
            else:
                fields += [res, "", ""]
        lines.append(",".join(fields) + "\n")
    path.write_text("".join(lines))
    return path
