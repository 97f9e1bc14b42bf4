"""Rover head-to-head: tree search vs random vs raster, at desk scale.

Runs a few seeded missions per policy, prints the reward / uncertainty
summary, and leaves the full CSV/JSON artifacts in demos_output/rover/.
"""

from infopath.bench import ExperimentConfig, run_batch, write_run_outputs
from infopath.mcts import SolverConfig

RUNS = 5
SOLVER = SolverConfig(iterations=120, max_depth=12, seed=0)

print(f"{RUNS} missions each, budget 100, spectrometer sigma 0.1\n")
print(f"{'policy':>10} {'mean reward':>12} {'failures':>9} {'final RMSE':>11} {'final Tr':>9}")
for solver in ("mcts-dpw", "random", "raster"):
    cfg = ExperimentConfig(environment="rover", solver=solver, runs=RUNS, base_seed=0,
                           spectrometer_sigma=0.1, budget=100.0, solver_config=SOLVER)
    result = run_batch(cfg)
    mean = "--" if result.mean_reward_success is None else f"{result.mean_reward_success:12.2f}"
    print(f"{solver:>10} {mean:>12} {result.failures:>9d} "
          f"{result.mean_final_rmse:>11.4f} {result.mean_final_trace:>9.2f}")
    if solver == "mcts-dpw":
        write_run_outputs(result, "demos_output/rover")

print("\nwrote full logs and curves for the tree search to demos_output/rover/")
print("(curves.csv holds the per-step mean Tr and RMSE for plotting)")
