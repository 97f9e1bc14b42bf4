"""Inside the tree search: progressive widening and root values.

Plans one step of a rock-search mission and prints the root action statistics,
then shows how the widening caps keep the tree narrow.
"""

from infopath import IsrsMdp, SolverConfig, generate_isrs
from infopath.mcts import iter_belief_nodes, search
from infopath.mdp import action_label

inst = generate_isrs(8, 6, 5, 0.5, seed=4, budget=24.0)
mdp = IsrsMdp(inst)
belief = mdp.initial_belief()
config = SolverConfig(iterations=400, max_depth=12, seed=0)

root = search(belief, mdp, config)

print(f"{config.iterations} simulations from the start belief\n")
print("root action values:")
for an in sorted(root.children, key=lambda a: -a.q):
    print(f"  {action_label(an.action):>14}  N={an.visits:4d}  Q={an.q:8.3f}")

nodes = list(iter_belief_nodes(root))
print(f"\ntree size: {len(nodes)} belief nodes")
widest = max(nodes, key=lambda n: len(n.children))
cap = config.k_action * widest.visits ** config.alpha_action
print(f"widest belief node: {len(widest.children)} actions after {widest.visits} visits "
      f"(cap k*N^alpha = {cap:.1f})")

depth_counts = {}
for an in root.children:
    for child, _ in an.children:
        depth_counts[action_label(an.action)] = depth_counts.get(action_label(an.action), 0) + 1
print("sampled successors per root action:", depth_counts)
