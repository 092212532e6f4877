"""Brute-force ground truth on small, enumerable state spaces.

Shares the rule evaluators and the action space with the planner, but none
of its search code: successors are computed by breadth-first closure and
paths by plain BFS.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass

from .actions import CAUSAL, DIRECT, ActionError, ActionSpace
from .inference import is_causally_consistent, is_counterfactual
from .planner import CandidatePath, VisitedEntry
from .rules import RuleSet
from .schema import CategoricalDomain, Mutability, Schema, State

DEFAULT_CAP = 10**6


class OracleCapExceeded(ValueError):
    pass


def _grids(schema: Schema, rules: RuleSet, extra_states) -> list[list]:
    A = ActionSpace(schema, rules)
    grids = []
    for f in schema:
        if isinstance(f.domain, CategoricalDomain):
            grids.append(list(f.domain.values))
        else:
            vals = set(A.candidate_values(f.name))
            vals.update(s[f.name] for s in extra_states)
            grids.append(sorted(vals))
    return grids


def space_size(schema: Schema, rules: RuleSet, extra_states=()) -> int:
    size = 1
    for g in _grids(schema, rules, extra_states):
        size *= len(g)
    return size


def enumerate_space(schema: Schema, rules: RuleSet, cap: int = DEFAULT_CAP, extra_states=()) -> list[State]:
    """Every state of the discretized space: categorical domains times the
    numeric candidate grids (plus the values of ``extra_states``)."""
    grids = _grids(schema, rules, extra_states)
    size = 1
    for g in grids:
        size *= len(g)
    if size > cap:
        raise OracleCapExceeded(f"state space has {size} states, cap is {cap}")
    names = schema.names
    return [State(zip(names, combo)) for combo in itertools.product(*grids)]


def brute_force_counterfactuals(schema: Schema, C: RuleSet, Q: RuleSet, cap: int = DEFAULT_CAP,
                                extra_states=()) -> set[State]:
    rules = Q.merge(C)
    return {s for s in enumerate_space(schema, rules, cap, extra_states) if is_counterfactual(s, C, Q)}


def _closure(s: State, a, C: RuleSet, A: ActionSpace) -> dict[State, list]:
    """Consistent states reachable by ``a`` then any chain of repair moves
    through inconsistent states, each with one shortest action chain."""
    x0 = A.apply(s, a)
    if is_causally_consistent(C, x0):
        return {x0: [(x0, a)]}
    parent = {x0: None}
    via = {x0: a}
    queue = deque([x0])
    found = {}
    while queue:
        x = queue.popleft()
        for b in A.repair_options(x):
            y = A.apply(x, b, checked=False)
            if y in parent:
                continue
            parent[y] = x
            via[y] = b
            if is_causally_consistent(C, y):
                found[y] = None
            else:
                queue.append(y)
    out = {}
    for y in found:
        steps, z = [], y
        while z is not None:
            steps.append((z, via[z]))
            z = parent[z]
        out[y] = steps[::-1]
    return out


def successors(s: State, C: RuleSet, A: ActionSpace) -> dict[State, list]:
    """All consistent one-step successors of ``s`` with a witnessing chain."""
    out = {}
    for a in A.enumerate(s):
        if a.kind != DIRECT:
            continue
        for y, chain in _closure(s, a, C, A).items():
            out.setdefault(y, chain)
    return out


def _as_path(states_and_chains) -> CandidatePath:
    entries = []
    for state, chain in states_and_chains:
        entries.append(VisitedEntry(state, tuple(a for _, a in chain)))
    return CandidatePath(tuple(entries))


def bfs_shortest_path(i: State, C: RuleSet, Q: RuleSet, A: ActionSpace, max_len: int,
                      cap: int = DEFAULT_CAP) -> CandidatePath | None:
    """Shortest solution path (length counted in states), or None."""
    size = space_size(A.schema, A.rules, [i])
    if size > cap:
        raise OracleCapExceeded(f"state space has {size} states, cap is {cap}")
    if is_counterfactual(i, C, Q):
        return _as_path([(i, [])])
    parent = {i: None}
    depth = {i: 1}
    queue = deque([i])
    while queue:
        s = queue.popleft()
        if depth[s] >= max_len:
            continue
        for y, chain in successors(s, C, A).items():
            if y in parent:
                continue
            parent[y] = (s, chain)
            depth[y] = depth[s] + 1
            if is_counterfactual(y, C, Q):
                seq, z = [], y
                while parent[z] is not None:
                    prev, ch = parent[z]
                    seq.append((z, ch))
                    z = prev
                seq.append((i, []))
                return _as_path(seq[::-1])
            queue.append(y)
    return None


def enumerate_solution_paths(i: State, C: RuleSet, Q: RuleSet, A: ActionSpace, max_len: int,
                             cap: int = DEFAULT_CAP) -> set[tuple[State, ...]]:
    """State sequences of every solution path with at most ``max_len`` states."""
    size = space_size(A.schema, A.rules, [i])
    if size > cap:
        raise OracleCapExceeded(f"state space has {size} states, cap is {cap}")
    if is_counterfactual(i, C, Q):
        return {(i,)}
    out = set()

    def extend(path):
        for y in successors(path[-1], C, A):
            if y in path:
                continue
            if is_counterfactual(y, C, Q):
                out.add(path + (y,))
            elif len(path) + 1 < max_len:
                extend(path + (y,))

    extend((i,))
    return out


@dataclass(frozen=True)
class Violation:
    code: str  # empty_path, bad_start, bad_end, interior_goal, inconsistent_state, broken_transition
    index: int
    message: str

    def __str__(self) -> str:
        return f"{self.code} at {self.index}: {self.message}"


def _replays(s: State, target: State, actions, C: RuleSet, A: ActionSpace) -> str | None:
    """Why ``actions`` do not carry ``s`` to ``target`` through one transition, or None."""
    if not actions:
        return "no actions recorded"
    x = s
    seen = {s}
    for k, a in enumerate(actions):
        if k == 0:
            legal = [b for b in A.enumerate(x) if b.kind == DIRECT]
        else:
            if is_causally_consistent(C, x):
                return f"step {k}: repair continued past a consistent state"
            legal = A.repair_options(x)
        if a not in legal:
            return f"step {k}: {a} is not available in {x}"
        try:
            x = A.apply(x, a, checked=a.kind == CAUSAL or k == 0)
        except ActionError as exc:
            return f"step {k}: {exc}"
        if x in seen:
            return f"step {k}: revisits {x}"
        seen.add(x)
    if not is_causally_consistent(C, x):
        return f"chain ends in inconsistent state {x}"
    if x != target:
        return f"replay reaches {x}, recorded {target}"
    return None


def verify_path(path: CandidatePath, i: State, C: RuleSet, Q: RuleSet, A: ActionSpace) -> list[Violation]:
    """Check a path against the solution-path conditions; [] means sound."""
    states = [e.state for e in path.entries]
    if not states:
        return [Violation("empty_path", 0, "path has no states")]
    out = []
    if states[0] != i:
        out.append(Violation("bad_start", 0, f"path starts at {states[0]}, expected {i}"))
    for k, s in enumerate(states):
        if not is_causally_consistent(C, s):
            out.append(Violation("inconsistent_state", k, f"{s} violates a causal rule"))
    if not is_counterfactual(states[-1], C, Q):
        out.append(Violation("bad_end", len(states) - 1, f"{states[-1]} is not a counterfactual"))
    for k, s in enumerate(states[:-1]):
        if is_counterfactual(s, C, Q):
            out.append(Violation("interior_goal", k, f"{s} is already a counterfactual"))
    for k in range(len(states) - 1):
        why = _replays(states[k], states[k + 1], path.entries[k + 1].actions_taken, C, A)
        if why:
            out.append(Violation("broken_transition", k + 1, why))
    return out


def plausibility_violations(path: CandidatePath, schema: Schema) -> list[str]:
    """Immutable features constant, monotone features monotone, causal-only
    features changed only by causal repairs, along the full replayed path."""
    out = []
    states = path.states[:1]
    for e in path.entries[1:]:
        x = states[-1]
        for a in e.actions_taken:
            f = schema[a.feature]
            if a.kind == DIRECT and not f.mutability.directly_actionable:
                out.append(f"{a}: direct action on {f.mutability.value} feature")
            x = x.set(a.feature, a.value)
            states.append(x)
        if x != e.state:
            states.append(e.state)
    for f in schema:
        vals = [f.domain.order(s[f.name]) for s in states]
        if f.mutability is Mutability.IMMUTABLE and len(set(vals)) > 1:
            out.append(f"{f.name}: immutable feature changed")
        if f.mutability is Mutability.MONOTONE_INCREASING and any(b < a for a, b in zip(vals, vals[1:])):
            out.append(f"{f.name}: monotone_increasing feature decreased")
        if f.mutability is Mutability.MONOTONE_DECREASING and any(b > a for a, b in zip(vals, vals[1:])):
            out.append(f"{f.name}: monotone_decreasing feature increased")
    return out
