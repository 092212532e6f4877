"""Path search from a rejected state to a causally consistent counterfactual.

The outer loop follows the classic shape: keep a trail of visited
``(state, actions)`` entries, call :func:`intervene` until the last state is a
counterfactual, then drop the causally inconsistent entries. Each
intervention is one application of the transition function: a direct
action followed, if needed, by a depth-first chain of repair moves that ends
at the first causally consistent state.
"""

from __future__ import annotations

import logging
import time
from collections.abc import Iterator
from dataclasses import dataclass, field

from .actions import Action, ActionSpace
from .inference import GoalCondition, goal_conditions, is_causally_consistent, is_counterfactual
from .rules import RuleSet
from .schema import State, validate_state

logger = logging.getLogger(__name__)


class PlanningError(Exception):
    pass


class NoSolution(PlanningError):
    """No counterfactual is reachable within the path-length bound."""


class BudgetExhausted(PlanningError):
    """The expansion budget ran out before the search finished."""


class TransitionFailed(PlanningError):
    pass


@dataclass(frozen=True)
class VisitedEntry:
    state: State
    actions_taken: tuple[Action, ...] = ()


@dataclass(frozen=True)
class PlanStats:
    expansions: int = 0
    elapsed_ms: float = 0.0


@dataclass(frozen=True)
class CandidatePath:
    entries: tuple[VisitedEntry, ...]
    stats: PlanStats | None = field(default=None, compare=False)
    # the raw search trail, inconsistent intermediates included
    trail: tuple[VisitedEntry, ...] | None = field(default=None, compare=False, repr=False)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def states(self) -> list[State]:
        return [e.state for e in self.entries]

    @property
    def initial(self) -> State:
        return self.entries[0].state

    @property
    def goal(self) -> State:
        return self.entries[-1].state

    def actions(self) -> list[Action]:
        return [a for e in self.entries for a in e.actions_taken]


@dataclass(frozen=True)
class PlanConfig:
    max_path_len: int = 10
    minimal: bool = False
    max_expansions: int = 1_000_000
    seed: int = 0  # reserved; the search is deterministic

    def __post_init__(self):
        if self.max_path_len < 1:
            raise ValueError("max_path_len must be >= 1")
        if self.max_expansions < 1:
            raise ValueError("max_expansions must be >= 1")


class _Budget:
    def __init__(self, limit: int):
        self.limit = limit
        self.count = 0

    def tick(self):
        self.count += 1
        if self.count > self.limit:
            raise BudgetExhausted(f"expansion budget of {self.limit} exhausted")


def _repair_chains(s: State, a: Action, C: RuleSet, A: ActionSpace, blocked, budget: _Budget
                   ) -> Iterator[list[VisitedEntry]]:
    """Yield ``[entries...]`` from applying ``a`` to ``s`` up to each distinct
    causally consistent state the repair search reaches, in DFS order."""
    x0 = A.apply(s, a)
    budget.tick()
    if x0 in blocked:
        return
    first = VisitedEntry(x0, (a,))
    if is_causally_consistent(C, x0):
        yield [first]
        return
    seen = {x0}
    chain = [first]
    stack = [iter(A.repair_options(x0))]
    while stack:
        b = next(stack[-1], None)
        if b is None:
            stack.pop()
            chain.pop()
            continue
        x = chain[-1].state
        y = A.apply(x, b, checked=False)
        budget.tick()
        if y in seen or y in blocked:
            continue
        seen.add(y)
        entry = VisitedEntry(y, (b,))
        if is_causally_consistent(C, y):
            yield chain + [entry]
        else:
            chain.append(entry)
            stack.append(iter(A.repair_options(y)))


def _goal_condition(Q: RuleSet) -> GoalCondition | None:
    try:
        return goal_conditions(Q)
    except ValueError:
        return None


def _ranked(actions: list[Action], s: State, cond: GoalCondition | None) -> list[Action]:
    """Stable partition: actions that satisfy a currently failing conjunct of
    the goal condition come first."""
    if cond is None:
        return actions
    failing = [k for k in range(len(cond.conjuncts)) if not cond.conjunct_holds(k, s)]
    if not failing:
        return actions
    helpful, rest = [], []
    for a in actions:
        s2 = s.set(a.feature, a.value)
        (helpful if any(cond.conjunct_holds(k, s2) for k in failing) else rest).append(a)
    return helpful + rest


def transition(s: State, a: Action, C: RuleSet, A: ActionSpace, visited=frozenset()
               ) -> tuple[State, list[Action]]:
    """First causally consistent state reached from ``s`` via ``a`` and repairs."""
    budget = _Budget(10**9)
    for chain in _repair_chains(s, a, C, A, set(visited), budget):
        return chain[-1].state, [e.actions_taken[0] for e in chain]
    raise TransitionFailed(f"no causally consistent state reachable from {s} via {a}")


def drop_inconsistent(visited: list[VisitedEntry], C: RuleSet) -> list[VisitedEntry]:
    """Remove causally inconsistent entries, folding their actions into the
    next kept entry so every kept entry records the full step from its
    predecessor."""
    out: list[VisitedEntry] = []
    pending: list[Action] = []
    for e in visited:
        if is_causally_consistent(C, e.state):
            out.append(VisitedEntry(e.state, tuple(pending) + e.actions_taken))
            pending = []
        else:
            pending.extend(e.actions_taken)
    return out


def intervene(visited: list[VisitedEntry], C: RuleSet, Q: RuleSet, A: ActionSpace,
              failed: set | None = None) -> list[VisitedEntry]:
    """One step of the search over an explicit trail.

    Appends the entries of the first transition from the last state that
    avoids every state already on the trail or in ``failed``. At a dead end
    the last consistent state is added to ``failed`` and the trail is cut
    back to the previous consistent state.
    """
    if not visited:
        raise ValueError("visited must be non-empty")
    last = visited[-1].state
    if not is_causally_consistent(C, last):
        raise ValueError("last visited state is not causally consistent")
    if is_counterfactual(last, C, Q):
        raise ValueError("last visited state is already a counterfactual")
    failed = set() if failed is None else failed
    blocked = {e.state for e in visited} | failed
    budget = _Budget(10**9)
    for a in _ranked(A.direct_actions(last), last, _goal_condition(Q)):
        for chain in _repair_chains(last, a, C, A, blocked, budget):
            return list(visited) + chain
    failed.add(last)
    for k in range(len(visited) - 2, -1, -1):
        if is_causally_consistent(C, visited[k].state):
            return list(visited[:k + 1])
    raise NoSolution("backtracked past the initial state")


class _Search:
    """Depth-bounded DFS over consistent states, driven one intervention at a time."""

    def __init__(self, i: State, C: RuleSet, Q: RuleSet, A: ActionSpace, bound: int,
                 budget: _Budget, memo: bool = True):
        self.C, self.Q, self.A = C, Q, A
        self.bound = bound
        self.budget = budget
        self.memo = memo
        self.cond = _goal_condition(Q)
        self.dead: dict[State, int] = {}
        self.visited = [VisitedEntry(i, ())]
        # one frame per consistent state on the trail: (trail index, successor stream)
        self.frames = [(0, self._successors(i, 1))]

    def _successors(self, s: State, depth: int) -> Iterator[list[VisitedEntry]]:
        remaining = self.bound - depth - 1
        if remaining < 0:
            return
        blocked = frozenset(e.state for e in self.visited)
        for a in _ranked(self.A.direct_actions(s), s, self.cond):
            for chain in _repair_chains(s, a, self.C, self.A, blocked, self.budget):
                y = chain[-1].state
                if not is_counterfactual(y, self.C, self.Q):
                    if remaining == 0 or self.dead.get(y, -1) >= remaining:
                        continue
                yield chain

    @property
    def exhausted(self) -> bool:
        return not self.frames

    def last_is_goal(self) -> bool:
        return bool(self.visited) and is_counterfactual(self.visited[-1].state, self.C, self.Q)

    def intervene(self) -> list[VisitedEntry]:
        idx, stream = self.frames[-1]
        chain = next(stream, None)
        if chain is None:
            self.frames.pop()
            depth = len(self.frames) + 1
            if self.memo:
                s = self.visited[idx].state
                self.dead[s] = max(self.dead.get(s, -1), self.bound - depth)
            keep = self.frames[-1][0] + 1 if self.frames else 0
            del self.visited[keep:]
            return self.visited
        self.visited.extend(chain)
        if not is_counterfactual(chain[-1].state, self.C, self.Q):
            self.frames.append((len(self.visited) - 1, self._successors(chain[-1].state, len(self.frames) + 1)))
        return self.visited

    def run(self) -> list[VisitedEntry] | None:
        while not self.last_is_goal():
            if self.exhausted:
                return None
            self.intervene()
        return self.visited


class Planner:
    """Path finder over one action space and rule program."""

    def __init__(self, C: RuleSet, Q: RuleSet, A: ActionSpace):
        self.C, self.Q, self.A = C, Q, A

    def _check_initial(self, i: State):
        problems = validate_state(self.A.schema, i)
        if problems:
            raise ValueError("invalid initial state: " + "; ".join(problems))
        if not is_causally_consistent(self.C, i):
            raise ValueError("initial state is not causally consistent")

    def _bounds(self, cfg: PlanConfig):
        return range(1, cfg.max_path_len + 1) if cfg.minimal else [cfg.max_path_len]

    def find_path(self, i: State, cfg: PlanConfig = PlanConfig()) -> CandidatePath:
        self._check_initial(i)
        start = time.perf_counter()
        budget = _Budget(cfg.max_expansions)
        for bound in self._bounds(cfg):
            trail = _Search(i, self.C, self.Q, self.A, bound, budget).run()
            if trail is not None:
                stats = PlanStats(budget.count, (time.perf_counter() - start) * 1000)
                logger.debug("path found with bound %d after %d expansions", bound, budget.count)
                return CandidatePath(tuple(drop_inconsistent(trail, self.C)), stats, tuple(trail))
        raise NoSolution(f"no counterfactual within path length {cfg.max_path_len}")

    def enumerate_paths(self, i: State, cfg: PlanConfig, k: int) -> list[CandidatePath]:
        """Up to ``k`` distinct paths, continuing the backtracking search past
        each success; with ``cfg.minimal`` only the shortest ones are kept."""
        if k < 1:
            raise ValueError("k must be positive")
        self._check_initial(i)
        budget = _Budget(cfg.max_expansions)
        if is_counterfactual(i, self.C, self.Q):
            return [CandidatePath((VisitedEntry(i, ()),))]
        search = _Search(i, self.C, self.Q, self.A, cfg.max_path_len, budget, memo=False)
        found: dict[tuple, CandidatePath] = {}
        limit = None if cfg.minimal else k
        while not search.exhausted:
            search.intervene()
            if search.last_is_goal():
                path = CandidatePath(tuple(drop_inconsistent(search.visited, self.C)), trail=tuple(search.visited))
                found.setdefault(tuple(path.states), path)
                if limit is not None and len(found) >= limit:
                    break
                # treat the goal as a leaf and keep searching
                keep = search.frames[-1][0] + 1
                del search.visited[keep:]
        if not found:
            raise NoSolution(f"no counterfactual within path length {cfg.max_path_len}")
        paths = list(found.values())
        if cfg.minimal:
            shortest = min(len(p) for p in paths)
            paths = [p for p in paths if len(p) == shortest]
        return paths[:k]


def find_path(i: State, C: RuleSet, Q: RuleSet, A: ActionSpace, cfg: PlanConfig = PlanConfig()) -> CandidatePath:
    return Planner(C, Q, A).find_path(i, cfg)


def enumerate_paths(i: State, C: RuleSet, Q: RuleSet, A: ActionSpace, cfg: PlanConfig, k: int) -> list[CandidatePath]:
    return Planner(C, Q, A).enumerate_paths(i, cfg, k)
