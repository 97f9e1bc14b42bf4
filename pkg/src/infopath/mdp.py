"""Belief MDP over a location graph: budgeted actions, GP belief updates,
belief-dependent rewards, and feasibility pruning.

A belief state bundles the agent location, the remaining cost budget, the GP
belief over the world, and a small discrete memory (visited rocks, collected
sample types). Transitions are deterministic in location and budget; sensing
appends measurements to the GP. The reward adds the expected interaction
reward under the current belief to a weighted total-variance drop, and a
large negative sentinel replaces it when a transition strands the agent off
the goal with no affordable action left.

``BeliefMdp`` carries the machinery shared by every environment; subclasses
supply what differs: which sensing actions exist where, what each action
measures, the expected interaction reward, and how the memory evolves.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .gp import JITTER_REL, GaussianProcessBelief, SquaredExponential
from .graph import LocationGraph

# Numeric stand-in for the minus-infinity mission-failure reward; episode logs
# record the failure flag separately so averages stay interpretable.
MISSION_FAILURE_REWARD = -1e9


@dataclass(frozen=True)
class SensingModality:
    """A named sensor with a budget cost and a noise level.

    ``reveals_truth`` marks drill-like sensors whose measurements pin the
    belief at the sensed cell (noise variance floored at the solver jitter).
    """

    name: str
    cost: float
    noise_stddev: float
    reveals_truth: bool = False

    def __post_init__(self):
        if self.cost <= 0:
            raise ValueError("sensing cost must be positive")
        if self.noise_stddev < 0:
            raise ValueError("noise_stddev must be non-negative")


@dataclass(frozen=True)
class Move:
    """Movement to an adjacent graph node."""

    target: int


@dataclass(frozen=True)
class Sense:
    """A sensing action using the named modality."""

    modality: str


Action = Move | Sense


def action_label(action: Action) -> str:
    if isinstance(action, Move):
        return f"move:{action.target}"
    return f"sense:{action.modality}"


@dataclass(frozen=True)
class Measurement:
    """One scalar observation at a graph node, with its noise variance."""

    node: int
    value: float
    noise_variance: float


Observation = tuple[Measurement, ...]


@dataclass(frozen=True, eq=False)
class BeliefState:
    """Agent location, remaining budget, world belief, and discrete memory."""

    location: int
    remaining_budget: float
    gp: GaussianProcessBelief
    memory: frozenset = frozenset()
    step: int = 0


@dataclass(frozen=True)
class RewardConfig:
    """Weights of the belief-dependent reward.

    ``information_weight`` scales the total-variance drop; ``interaction_reward``
    is the magnitude of the environment interaction payoff (10 for rock visits,
    1 for drills).
    """

    information_weight: float = 1.0
    interaction_reward: float = 10.0

    def __post_init__(self):
        if self.information_weight < 0:
            raise ValueError("information_weight must be non-negative")


class BeliefMdp:
    """Shared belief-MDP mechanics over a location graph.

    Subclasses override the four environment hooks (``sense_actions``,
    ``measurement_sites``, ``expected_state_reward``, ``updated_memory``) for
    planning, and the two ground-truth hooks (``true_reward``,
    ``true_observation``) for episode execution.
    """

    def __init__(self, graph: LocationGraph, modalities, reward_config=None, *,
                 budget, prior_mean=0.5, kernel=None):
        self.graph = graph
        self.kernel = kernel if kernel is not None else SquaredExponential()
        self.reward_config = reward_config if reward_config is not None else RewardConfig()
        if budget < 0:
            raise ValueError("budget must be non-negative")
        self.initial_budget = float(budget)
        self.jitter_floor = JITTER_REL * self.kernel.signal_variance

        self.modalities: dict[str, SensingModality] = {}
        for mod in modalities:
            if mod.name in self.modalities:
                raise ValueError(f"duplicate modality name {mod.name!r}")
            self.modalities[mod.name] = mod
        # more accurate sensing must not be cheaper than less accurate sensing
        by_noise = sorted(self.modalities.values(), key=lambda m: m.noise_stddev)
        for better, worse in zip(by_noise, by_noise[1:]):
            if better.noise_stddev < worse.noise_stddev and better.cost < worse.cost:
                raise ValueError("modality costs must not decrease as accuracy increases")

        self.goal_costs = graph.costs_from(graph.goal)
        self._move_actions = tuple(
            tuple((Move(w), cost) for w, cost in graph.neighbors(v))
            for v in range(graph.n_nodes)
        )
        self._move_cost = tuple(dict(graph.neighbors(v)) for v in range(graph.n_nodes))
        self._empty_gp = GaussianProcessBelief(prior_mean, self.kernel, graph.coords)

    # ------------------------------------------------------------------
    # environment hooks (planning side)

    def sense_actions(self, belief: BeliefState) -> tuple[Sense, ...]:
        """Sensing actions available at the belief's location."""
        return ()

    def measurement_sites(self, belief: BeliefState, action: Action):
        """(node, noise_variance) pairs the action will measure."""
        return ()

    def expected_state_reward(self, belief: BeliefState, action: Action) -> float:
        """Expected environment-interaction reward under the current belief."""
        return 0.0

    def updated_memory(self, belief: BeliefState, action: Action, observation: Observation):
        return belief.memory

    # ------------------------------------------------------------------
    # ground-truth hooks (episode side)

    def true_reward(self, belief: BeliefState, action: Action) -> float:
        raise NotImplementedError

    def true_observation(self, belief: BeliefState, action: Action, rng) -> Observation:
        raise NotImplementedError

    def belief_rmse(self, belief: BeliefState) -> float:
        """Root-mean-square error of the belief mean against ground truth."""
        return float("nan")

    # ------------------------------------------------------------------
    # shared mechanics

    def initial_belief(self, budget=None) -> BeliefState:
        b = self.initial_budget if budget is None else float(budget)
        return BeliefState(self.graph.start, b, self._empty_gp)

    def actions(self, belief: BeliefState) -> list[Action]:
        """Full action space at the belief: neighbor moves plus sensing."""
        out = [a for a, _ in self._move_actions[belief.location]]
        out.extend(self.sense_actions(belief))
        return out

    def action_cost(self, belief: BeliefState, action: Action) -> float:
        """Budget cost of an applicable action; raises on inapplicable ones."""
        if isinstance(action, Move):
            cost = self._move_cost[belief.location].get(action.target)
            if cost is None:
                raise ValueError(f"node {action.target} is not adjacent to {belief.location}")
            return cost
        if action not in self.sense_actions(belief):
            raise ValueError(f"{action_label(action)} is not available at node {belief.location}")
        return self.modalities[action.modality].cost

    def action_target(self, belief: BeliefState, action: Action) -> int:
        return action.target if isinstance(action, Move) else belief.location

    def min_action_cost(self, belief: BeliefState) -> float:
        costs = [cost for _, cost in self._move_actions[belief.location]]
        costs.extend(self.modalities[s.modality].cost for s in self.sense_actions(belief))
        return min(costs)

    def is_terminal(self, belief: BeliefState) -> bool:
        """True iff the remaining budget cannot pay for any action."""
        return belief.remaining_budget < self.min_action_cost(belief)

    def feasible_actions(self, belief: BeliefState) -> list[Action]:
        """Actions after which the goal stays reachable within the budget.

        Raises if called on a terminal belief. The result can be empty at rare
        boundary states (at the goal with just enough budget to act but not to
        leave and return); callers treat that as the end of the episode.
        """
        if self.is_terminal(belief):
            raise ValueError("feasible_actions called on a terminal belief")
        budget = belief.remaining_budget
        gc = self.goal_costs
        out = [a for a, cost in self._move_actions[belief.location]
               if budget - cost >= gc[a.target]]
        here = gc[belief.location]
        out.extend(s for s in self.sense_actions(belief)
                   if budget - self.modalities[s.modality].cost >= here)
        return out

    def transition(self, belief: BeliefState, action: Action,
                   observation: Observation = ()) -> BeliefState:
        """Apply an action deterministically; never mutates the input belief."""
        cost = self.action_cost(belief, action)
        if cost > belief.remaining_budget:
            raise ValueError(
                f"{action_label(action)} costs {cost} but only "
                f"{belief.remaining_budget} budget remains")
        gp = belief.gp
        if observation:
            gp = gp.add_measurements(
                [(self.graph.coord(m.node), m.value, m.noise_variance) for m in observation])
        return BeliefState(
            location=self.action_target(belief, action),
            remaining_budget=belief.remaining_budget - cost,
            gp=gp,
            memory=self.updated_memory(belief, action, observation),
            step=belief.step + 1,
        )

    def belief_reward(self, belief: BeliefState, action: Action,
                      next_belief: BeliefState) -> float:
        """Expected interaction reward plus the weighted total-variance drop.

        Returns the mission-failure sentinel when the successor is terminal
        away from the goal.
        """
        if next_belief.location != self.graph.goal and self.is_terminal(next_belief):
            return MISSION_FAILURE_REWARD
        info = belief.gp.trace_of_variance() - next_belief.gp.trace_of_variance()
        return (self.expected_state_reward(belief, action)
                + self.reward_config.information_weight * info)

    def generative_sample(self, belief: BeliefState, action: Action, rng):
        """Sample (next belief, reward) for the tree search.

        Observation values are drawn from the *current* belief (planning never
        touches ground truth): y ~ Normal(posterior mean, posterior variance +
        measurement noise variance), independently per measured site.
        """
        sites = self.measurement_sites(belief, action)
        if sites:
            mean_q = belief.gp.query_mean
            var_q = belief.gp.query_variance
            observation = tuple(
                Measurement(node, rng.normal(mean_q[node], math.sqrt(max(var_q[node], 0.0) + nu)), nu)
                for node, nu in sites)
        else:
            observation = ()
        next_belief = self.transition(belief, action, observation)
        return next_belief, self.belief_reward(belief, action, next_belief)
