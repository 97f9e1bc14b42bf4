"""Comparison policies: uniform-random over feasible actions, the tree-search
planner wrapped as a policy, and the deterministic raster sweep for the rover.

A policy is a callable (belief, mdp, rng) -> Action | None; None means the
policy has nothing left to do and the episode ends where it stands.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import mcts
from .mdp import Action, Move, Sense
from .rover import DRILL, RoverInstance


def random_policy(belief, mdp, rng):
    """Uniform draw from the feasibility-pruned action set."""
    if mdp.is_terminal(belief):
        raise ValueError("random_policy called on a terminal belief")
    actions = mdp.feasible_actions(belief)
    if not actions:
        return None
    return actions[rng.integers(len(actions))]


class MctsPolicy:
    """Replans from scratch with a fresh tree at every step."""

    def __init__(self, config: mcts.SolverConfig):
        self.config = config

    def __call__(self, belief, mdp, rng):
        if mdp.is_terminal(belief) or not mdp.feasible_actions(belief):
            return None
        return mcts.plan(belief, mdp, self.config, rng)


@dataclass(frozen=True)
class RasterPlan:
    """A boustrophedon sweep with a drill schedule spread along it."""

    actions: tuple[Action, ...]
    drill_cells: frozenset[int]
    sweep_order: tuple[int, ...]


def _serpentine(n: int) -> list[int]:
    order = []
    for y in range(n):
        xs = range(n) if y % 2 == 0 else range(n - 1, -1, -1)
        order.extend(x + n * y for x in xs)
    return order


def raster_policy(inst: RoverInstance) -> RasterPlan:
    """Fixed sweep plan for a rover instance.

    The sweep walks the grid row by row (first row toward increasing x) and
    ends on the goal corner. Whatever budget is left over after the sweep's
    movement cost is spent on drills at evenly spaced sweep indices. If the
    budget cannot even cover the sweep, the plan is emitted anyway and the
    episode runs out of budget mid-sweep (a mission failure).
    """
    n = inst.grid_size
    order = _serpentine(n)
    if order[0] != inst.start:
        raise ValueError("raster sweep expects the rover to start at the origin")
    sweep_cost = (len(order) - 1) * inst.step_cost
    spare = inst.budget - sweep_cost
    drills = int(spare // inst.drill_cost) if spare >= 0 else 0
    drills = min(drills, len(order))
    drill_idx: set[int] = set()
    if drills > 0:
        positions = np.linspace(0, len(order) - 1, drills + 2)[1:-1]
        drill_idx = {int(round(p)) for p in positions}
    actions: list[Action] = []
    if 0 in drill_idx:
        actions.append(Sense(DRILL))
    for i in range(1, len(order)):
        actions.append(Move(order[i]))
        if i in drill_idx:
            actions.append(Sense(DRILL))
    return RasterPlan(
        actions=tuple(actions),
        drill_cells=frozenset(order[i] for i in drill_idx),
        sweep_order=tuple(order),
    )


class RasterPolicy:
    """Plays a RasterPlan; stops (returns None) once the next planned action
    is unaffordable or the plan is exhausted. One instance per episode."""

    def __init__(self, inst: RoverInstance):
        self.plan = raster_policy(inst)
        self._next = 0

    def __call__(self, belief, mdp, rng):
        if self._next >= len(self.plan.actions):
            return None
        action = self.plan.actions[self._next]
        if mdp.action_cost(belief, action) > belief.remaining_budget:
            return None
        self._next += 1
        return action
