"""Monte Carlo tree search with double progressive widening over belief states.

The tree alternates belief nodes and action nodes. Action selection uses UCB
with unvisited actions taking infinite priority; both the number of actions
tried at a belief node and the number of sampled successors kept under an
action node are capped at k*N^alpha, so the search stays deep even though
every Gaussian-process successor belief is unique. New actions are drawn
uniformly from the feasibility-pruned action set, so the tree never contains
an action that could strand the agent. Leaf values come from uniform-random
feasible rollouts through the generative model.

The planner owns nothing between calls: every plan builds a fresh tree from
the root belief and a seeded generator, so results are reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SolverConfig:
    """Search hyperparameters.

    iterations   number of simulations per plan call
    max_depth    simulation horizon (actions), counted down to 0
    exploration  UCB exploration weight c
    k_action, alpha_action   action-widening cap |C(b)| <= k*N(b)^alpha
    k_state, alpha_state     successor-widening cap |C(ba)| <= k*N(ba)^alpha
    discount     per-step discount (1.0: undiscounted, budget bounds the horizon)
    seed         generator seed used when no external RNG is supplied
    """

    iterations: int = 1000
    max_depth: int = 30
    exploration: float = 3.0
    k_action: float = 3.0
    alpha_action: float = 0.5
    k_state: float = 2.0
    alpha_state: float = 0.25
    discount: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.iterations < 1 or self.max_depth < 1:
            raise ValueError("iterations and max_depth must be positive")
        if self.exploration < 0 or self.k_action <= 0 or self.k_state <= 0:
            raise ValueError("exploration and widening k parameters must be positive")
        if not (0.0 <= self.alpha_action < 1.0 and 0.0 <= self.alpha_state < 1.0):
            raise ValueError("widening alpha parameters must lie in [0, 1)")
        if not 0.0 < self.discount <= 1.0:
            raise ValueError("discount must lie in (0, 1]")


class BeliefNode:
    """A belief in the tree: visit count and the widened action children."""

    __slots__ = ("belief", "visits", "children", "tried", "feasible", "exhausted")

    def __init__(self, belief):
        self.belief = belief
        self.visits = 0
        self.children: list[ActionNode] = []
        self.tried: set = set()
        self.feasible = None  # lazily computed feasible action list
        self.exhausted = False


class ActionNode:
    """An action under a belief: running-mean value and sampled successors."""

    __slots__ = ("action", "visits", "q", "children")

    def __init__(self, action):
        self.action = action
        self.visits = 0
        self.q = 0.0
        self.children: list[tuple[BeliefNode, float]] = []


def iter_belief_nodes(root: BeliefNode):
    """Yield every belief node reachable from ``root`` (depth first)."""
    stack = [root]
    while stack:
        node = stack.pop()
        yield node
        for an in node.children:
            stack.extend(child for child, _ in an.children)


def _node_feasible(node: BeliefNode, mdp):
    if node.feasible is None:
        node.feasible = mdp.feasible_actions(node.belief)
    return node.feasible


def action_prog_widen(node: BeliefNode, mdp, config: SolverConfig, rng) -> ActionNode:
    """Grow the action set if the widening cap allows, then pick by UCB.

    A new action is drawn uniformly from the feasible actions not yet tried
    at this node; when all are tried, selection falls through to pure UCB.
    Unvisited actions have infinite priority.
    """
    if not node.exhausted and len(node.children) <= config.k_action * node.visits ** config.alpha_action:
        untried = [a for a in _node_feasible(node, mdp) if a not in node.tried]
        if untried:
            action = untried[rng.integers(len(untried))]
            node.tried.add(action)
            node.children.append(ActionNode(action))
        else:
            node.exhausted = True
    log_n = math.log(node.visits) if node.visits > 0 else 0.0
    best = None
    best_score = -math.inf
    for an in node.children:
        if an.visits == 0:
            return an
        score = an.q + config.exploration * math.sqrt(log_n / an.visits)
        if score > best_score:
            best_score = score
            best = an
    return best


def rollout(belief, depth, mdp, config: SolverConfig, rng) -> float:
    """Discounted return of a uniform-random feasible rollout of ``depth`` steps."""
    total = 0.0
    discount = 1.0
    for _ in range(depth):
        if mdp.is_terminal(belief):
            break
        actions = mdp.feasible_actions(belief)
        if not actions:
            break
        action = actions[rng.integers(len(actions))]
        belief, reward = mdp.generative_sample(belief, action, rng)
        total += discount * reward
        discount *= config.discount
    return total


def simulate(node: BeliefNode, depth, mdp, config: SolverConfig, rng) -> float:
    """One tree simulation; returns the sampled return and updates statistics."""
    if depth == 0:
        return 0.0
    if mdp.is_terminal(node.belief) or not _node_feasible(node, mdp):
        return 0.0
    an = action_prog_widen(node, mdp, config, rng)
    if len(an.children) <= config.k_state * an.visits ** config.alpha_state:
        next_belief, reward = mdp.generative_sample(node.belief, an.action, rng)
        child = BeliefNode(next_belief)
        an.children.append((child, reward))
        q = reward + config.discount * rollout(next_belief, depth - 1, mdp, config, rng)
    else:
        child, reward = an.children[rng.integers(len(an.children))]
        q = reward + config.discount * simulate(child, depth - 1, mdp, config, rng)
    node.visits += 1
    an.visits += 1
    an.q += (q - an.q) / an.visits
    return q


def search(belief, mdp, config: SolverConfig, rng=None) -> BeliefNode:
    """Run the configured number of simulations from a fresh root; returns it."""
    if rng is None:
        rng = np.random.default_rng(config.seed)
    if mdp.is_terminal(belief):
        raise ValueError("cannot plan from a terminal belief")
    root = BeliefNode(belief)
    for _ in range(config.iterations):
        simulate(root, config.max_depth, mdp, config, rng)
    return root


def plan(belief, mdp, config: SolverConfig, rng=None):
    """Best root action by estimated value; ties break to the lowest ordinal
    in the feasible-action ordering (moves by target id, then sensing)."""
    root = search(belief, mdp, config, rng)
    if not root.children:
        raise ValueError("no feasible actions at the planning root")
    order = {a: i for i, a in enumerate(mdp.feasible_actions(belief))}
    best = min(root.children, key=lambda an: (-an.q, order[an.action]))
    return best.action
