"""A complete rock-search mission, drawn in ASCII.

The planner senses at beacons to figure out which rocks are worth the trip,
collects the good ones, and makes it home before the budget dies. Rocks are
G/B (good/bad), beacons are *, and the trail is dotted.
"""

from infopath import IsrsMdp, MctsPolicy, SolverConfig, generate_isrs, run_episode

inst = generate_isrs(10, 10, 10, 0.5, seed=6, budget=40.0)
mdp = IsrsMdp(inst)
policy = MctsPolicy(SolverConfig(iterations=300, max_depth=15, seed=0))

log = run_episode(mdp, policy, seed=6)

n = inst.grid_size
visited = {r.node for r in log.records}
canvas = [["." if (x + n * y) in visited else " " for x in range(n)] for y in range(n)]
for rock in inst.rock_nodes:
    canvas[rock // n][rock % n] = "G" if rock in inst.good_rocks else "B"
for beacon in inst.beacons:
    if canvas[beacon // n][beacon % n] in (" ", "."):
        canvas[beacon // n][beacon % n] = "*"
canvas[0][0] = "S"

print(f"status: {log.status}   total reward: {log.true_reward_sum:+.0f}   "
      f"steps: {len(log.records)}")
print(f"good rocks collected: "
      f"{sum(1 for r in log.records if r.true_reward > 0)} of {len(inst.good_rocks)}\n")
for row in reversed(canvas):  # y grows upward
    print("  " + " ".join(row))

print("\nbudget / belief variance along the way:")
marks = [0, len(log.records) // 2, len(log.records) - 1]
for i in marks:
    r = log.records[i]
    print(f"  step {r.step:3d}: at ({r.x:.0f},{r.y:.0f})  budget={r.remaining_budget:5.1f}  "
          f"Tr(cov)={r.trace_of_variance:6.2f}  action={r.action}")
