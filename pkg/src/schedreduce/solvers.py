"""Exact desk-scale solvers and list-scheduling heuristics.

The exact solvers all follow the same plan: enumerate machine
assignments (trivial for fixed-home jobs, set partitions when machines
are interchangeable, labeled assignments when speeds differ), then for
each assignment enumerate per-machine processing orders consistent with
the precedence projection, score each combination by the earliest-start
longest path through the combined order graph, and keep the first
strictly best result, so ties resolve to the lexicographically earliest
combination.  Sound pruning (admissible lower bounds, forced
co-location under huge delays, and a completed-set dynamic program for
unit lengths) keeps desk-scale runs fast without changing any optimum.

Every solver degrades gracefully: when a state budget or time budget is
hit it returns the best schedule found so far with
``proven_optimal=False`` instead of raising.
"""

from __future__ import annotations

import itertools
import math
import time
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .errors import BudgetExceeded
from .model import (
    CommDelayInstance,
    KPartiteInstance,
    RelatedInstance,
    Schedule,
    UmpsInstance,
    makespan,
    topological_order,
    trivial_serial_schedule,
)


@dataclass(frozen=True)
class SolveLimits:
    max_jobs: int = 10
    max_states: int = 2_000_000
    time_budget: float = 600.0  # seconds


@dataclass(frozen=True)
class SolveResult:
    optimum: Fraction
    schedule: Schedule
    proven_optimal: bool
    states_explored: int


class _Abort(Exception):
    """Internal: a budget tripped; unwind and report best-so-far."""


class _Search:
    """Shared bookkeeping: best-so-far, state counter, budget checks."""

    def __init__(self, lim: SolveLimits):
        self.lim = lim
        self.t0 = time.monotonic()
        self.states = 0
        self.best_ms = None
        self.best_payload = None

    def tick(self, count: int = 1):
        self.states += count
        if self.states > self.lim.max_states:
            raise _Abort
        if self.states % 4096 == 0 and time.monotonic() - self.t0 > self.lim.time_budget:
            raise _Abort

    def offer(self, ms, payload):
        if self.best_ms is None or ms < self.best_ms:
            self.best_ms = ms
            self.best_payload = payload


def _earliest_starts(n_nodes: int, edges):
    """Earliest-start longest path over nodes 1..n_nodes.

    ``edges`` is an iterable of (u, v, weight): v starts at least
    ``weight`` after u starts.  Returns the start list (index 0 unused)
    or None if the graph has a cycle.
    """
    indeg = [0] * (n_nodes + 1)
    adj = [[] for _ in range(n_nodes + 1)]
    for u, v, w in edges:
        adj[u].append((v, w))
        indeg[v] += 1
    start = [Fraction(0)] * (n_nodes + 1)
    queue = deque(v for v in range(1, n_nodes + 1) if indeg[v] == 0)
    done = 0
    while queue:
        u = queue.popleft()
        done += 1
        for v, w in adj[u]:
            if start[u] + w > start[v]:
                start[v] = start[u] + w
            indeg[v] -= 1
            if indeg[v] == 0:
                queue.append(v)
    return start if done == n_nodes else None


def _extensions(jobs, pred_sets):
    """Yield the linear extensions of a tiny poset in lexicographic order."""
    jobs = sorted(jobs)
    acc = []
    placed = set()

    def rec():
        if len(acc) == len(jobs):
            yield tuple(acc)
            return
        for j in jobs:
            if j not in placed and pred_sets[j] <= placed:
                placed.add(j)
                acc.append(j)
                yield from rec()
                acc.pop()
                placed.remove(j)

    yield from rec()


def _projected_preds(jobs, reach):
    jobs_set = set(jobs)
    return {
        v: {u for u in jobs_set if u != v and v in reach[u]}
        for v in jobs_set
    }


def _orders_dfs(search, groups, n_nodes, base_edges, succ_weight, finish_weight, reach):
    """Enumerate per-group orders with incremental lower-bound pruning.

    ``groups`` is a list of (label, sorted jobs).  At every level the
    current succession edges plus ``base_edges`` give an admissible
    relaxation; a cycle in it rules out every completion, and a bound at
    or above the incumbent prunes.  At the leaves the earliest-start
    makespan is offered to ``search`` together with the group labels.
    """
    labels = {}
    for label, jobs in groups:
        for j in jobs:
            labels[j] = label
    pred_sets = [
        _projected_preds(jobs, reach) for _, jobs in groups
    ]
    succ_edges = []

    def level(k):
        search.tick()
        starts = _earliest_starts(n_nodes, itertools.chain(base_edges, succ_edges))
        if starts is None:
            return
        bound = max(starts[j] + finish_weight(j) for j in range(1, n_nodes + 1))
        if search.best_ms is not None and bound >= search.best_ms:
            return
        if k == len(groups):
            search.offer(bound, (dict(labels), list(starts)))
            return
        for order in _extensions(groups[k][1], pred_sets[k]):
            added = [
                (order[a], order[a + 1], succ_weight(order[a]))
                for a in range(len(order) - 1)
            ]
            succ_edges.extend(added)
            level(k + 1)
            del succ_edges[len(succ_edges) - len(added):]

    level(0)


# ---------------------------------------------------------------------------
# fixed-home jobs


def greedy_umps(inst: UmpsInstance, priority=None) -> Schedule:
    """List scheduling on home machines in ``priority`` (default: the
    lowest-index topological order)."""
    if priority is None:
        priority = topological_order(inst.dag)
    _require_topological(priority, inst.n, inst.dag.edges)
    preds = inst.dag.predecessors()
    free = {i: Fraction(0) for i in range(1, inst.m + 1)}
    entries = {}
    for j in priority:
        est = free[inst.home[j]]
        for u in preds[j]:
            est = max(est, entries[u][2])
        entries[j] = (inst.home[j], est, est + inst.lengths[j])
        free[inst.home[j]] = est + inst.lengths[j]
    return Schedule(entries=entries)


def solve_umps_exact(inst: UmpsInstance, lim: SolveLimits = None) -> SolveResult:
    """Exact optimum for fixed-home scheduling.

    Unit-length instances use a breadth-first dynamic program over
    completed job sets (rounds process one available job per machine;
    filling an idle machine never hurts, so maximal rounds suffice).
    General lengths enumerate per-machine orders as described in the
    module docstring.  Both paths return the same optima; the tests
    cross-check them against a time-indexed brute-force oracle.
    """
    lim = lim or SolveLimits()
    if inst.n > lim.max_jobs:
        sched = greedy_umps(inst)
        return SolveResult(makespan(sched), sched, proven_optimal=False, states_explored=0)
    if inst.unit_lengths:
        result = _solve_umps_unit(inst, lim)
        if result is not None:
            return result
        sched = greedy_umps(inst)
        return SolveResult(makespan(sched), sched, proven_optimal=False, states_explored=0)
    return _solve_umps_orders(inst, lim)


def _solve_umps_unit(inst: UmpsInstance, lim: SolveLimits):
    n = inst.n
    full = (1 << n) - 1
    pred_mask = [0] * (n + 1)
    for u, v in inst.dag.edges:
        pred_mask[v] |= 1 << (u - 1)
    homes = [sorted(inst.jobs_on(i)) for i in range(1, inst.m + 1)]
    t0 = time.monotonic()

    dist = {0: 0}
    parent = {0: None}
    queue = deque([0])
    while queue:
        mask = queue.popleft()
        if mask == full:
            break
        options = []
        for jobs_i in homes:
            avail = [
                j for j in jobs_i
                if not mask & (1 << (j - 1)) and pred_mask[j] & mask == pred_mask[j]
            ]
            if avail:
                options.append(avail)
        for choice in itertools.product(*options):
            new = mask
            for j in choice:
                new |= 1 << (j - 1)
            if new not in dist:
                dist[new] = dist[mask] + 1
                parent[new] = (mask, choice)
                queue.append(new)
        if len(dist) > lim.max_states or time.monotonic() - t0 > lim.time_budget:
            return None

    entries = {}
    mask = full
    while parent[mask] is not None:
        prev, choice = parent[mask]
        r = dist[prev]
        for j in choice:
            entries[j] = (inst.home[j], Fraction(r), Fraction(r + 1))
        mask = prev
    sched = Schedule(entries=entries)
    return SolveResult(
        optimum=Fraction(dist[full]),
        schedule=sched,
        proven_optimal=True,
        states_explored=len(dist),
    )


def _solve_umps_orders(inst: UmpsInstance, lim: SolveLimits) -> SolveResult:
    search = _Search(lim)
    seed = trivial_serial_schedule(inst)
    search.offer(makespan(seed), None)
    seed_sched = seed

    reach = inst.dag.reachable()
    groups = [(i, sorted(inst.jobs_on(i))) for i in range(1, inst.m + 1) if inst.jobs_on(i)]
    base_edges = [(u, v, Fraction(inst.lengths[u])) for u, v in inst.dag.edges]
    proven = True
    try:
        _orders_dfs(
            search,
            groups,
            inst.n,
            base_edges,
            succ_weight=lambda u: Fraction(inst.lengths[u]),
            finish_weight=lambda u: Fraction(inst.lengths[u]),
            reach=reach,
        )
    except _Abort:
        proven = False
    if search.best_payload is None:
        return SolveResult(makespan(seed_sched), seed_sched, proven, search.states)
    _, starts = search.best_payload
    entries = {
        j: (inst.home[j], starts[j], starts[j] + inst.lengths[j]) for j in range(1, inst.n + 1)
    }
    sched = Schedule(entries=entries)
    return SolveResult(search.best_ms, sched, proven, search.states)


# ---------------------------------------------------------------------------
# communication delays


def _serial_commdelay_schedule(inst: CommDelayInstance) -> Schedule:
    """Everything on machine 1 in topological order: no delay is ever paid."""
    entries = {}
    cursor = Fraction(0)
    for j in topological_order(inst.dag):
        entries[j] = (1, cursor, cursor + inst.lengths[j])
        cursor += inst.lengths[j]
    return Schedule(entries=entries)


def solve_commdelay_exact(inst: CommDelayInstance, lim: SolveLimits = None) -> SolveResult:
    """Exact optimum with communication delays.

    Machines are interchangeable, so assignments are enumerated as set
    partitions of the jobs (capped at the machine count when bounded).
    Before searching, any edge whose delay is too large to ever pay in a
    schedule better than the serial one forces its endpoints into the
    same part; the forced parts collapse huge-delay instances to a
    handful of partitions.  Each surviving full assignment runs the
    per-machine order enumeration with delay-aware edge weights.
    """
    lim = lim or SolveLimits()
    n = inst.n_total
    serial = _serial_commdelay_schedule(inst)
    if n > lim.max_jobs:
        return SolveResult(makespan(serial), serial, proven_optimal=False, states_explored=0)

    search = _Search(lim)
    search.offer(makespan(serial), "serial")
    serial_ms = makespan(serial)

    # union-find over forced co-location pairs
    root = list(range(n + 1))

    def find(a):
        while root[a] != a:
            root[a] = root[root[a]]
            a = root[a]
        return a

    for (u, v), c in inst.delays.items():
        if inst.lengths[u] + c + inst.lengths[v] >= serial_ms:
            root[find(u)] = find(v)
    units = {}
    for j in range(1, n + 1):
        units.setdefault(find(j), []).append(j)
    unit_list = sorted(units.values())  # each sorted, ordered by first member
    cap = inst.machines if inst.machines is not None else n

    reach = inst.dag.reachable()
    lengths = inst.lengths
    group_of = {}
    loads = []
    proven = True

    def lower_bound():
        edges = []
        for (u, v), c in inst.delays.items():
            w = Fraction(lengths[u])
            gu, gv = group_of.get(u), group_of.get(v)
            if gu is not None and gv is not None and gu != gv:
                w += c
            edges.append((u, v, w))
        starts = _earliest_starts(n, edges)
        path = max(starts[j] + lengths[j] for j in range(1, n + 1))
        return max(path, max(loads, default=Fraction(0)))

    def assign(k):
        search.tick()
        if lower_bound() >= search.best_ms:
            return
        if k == len(unit_list):
            _commdelay_orders(search, inst, group_of, reach)
            return
        unit = unit_list[k]
        used = len(loads)
        unit_load = sum(lengths[j] for j in unit)
        for g in range(min(used + 1, cap)):
            if g == used:
                loads.append(Fraction(0))
            loads[g] += unit_load
            for j in unit:
                group_of[j] = g
            assign(k + 1)
            for j in unit:
                del group_of[j]
            loads[g] -= unit_load
            if g == used:
                loads.pop()

    try:
        assign(0)
    except _Abort:
        proven = False

    if search.best_payload == "serial":
        return SolveResult(serial_ms, serial, proven, search.states)
    labels, starts = search.best_payload
    entries = {
        j: (labels[j] + 1, starts[j], starts[j] + lengths[j]) for j in range(1, n + 1)
    }
    sched = Schedule(entries=entries)
    return SolveResult(search.best_ms, sched, proven, search.states)


def _commdelay_orders(search, inst, group_of, reach):
    by_group = {}
    for j, g in group_of.items():
        by_group.setdefault(g, []).append(j)
    groups = [(g, sorted(jobs)) for g, jobs in sorted(by_group.items())]
    base_edges = [
        (
            u,
            v,
            Fraction(inst.lengths[u]) + (c if group_of[u] != group_of[v] else 0),
        )
        for (u, v), c in inst.delays.items()
    ]
    _orders_dfs(
        search,
        groups,
        inst.n_total,
        base_edges,
        succ_weight=lambda u: Fraction(inst.lengths[u]),
        finish_weight=lambda u: Fraction(inst.lengths[u]),
        reach=reach,
    )


def _require_topological(priority, n, edges):
    if sorted(priority) != list(range(1, n + 1)):
        raise ValueError("priority must be a permutation of all jobs")
    pos = {j: k for k, j in enumerate(priority)}
    for u, v in edges:
        if pos[u] >= pos[v]:
            raise ValueError(f"priority is not topological: {u} -> {v}")


def list_schedule_commdelay(inst: CommDelayInstance, m: int, priority) -> Schedule:
    """List scheduling with communication delays.

    Jobs are taken in ``priority`` (a topological order, so each job's
    predecessors are already placed when it is reached) and assigned to
    the machine where they can start earliest, counting the edge delay
    when a predecessor sits on a different machine.  Ties go to the
    lowest machine index.
    """
    if m < 1:
        raise ValueError("need at least one machine")
    if inst.machines is not None and m > inst.machines:
        raise ValueError(f"instance allows {inst.machines} machines, asked for {m}")
    _require_topological(priority, inst.n_total, inst.dag.edges)
    preds = inst.dag.predecessors()
    free = {i: Fraction(0) for i in range(1, m + 1)}
    entries = {}
    for j in priority:
        best = None
        for i in range(1, m + 1):
            est = free[i]
            for u in preds[j]:
                mu, _, eu = entries[u]
                lag = inst.delays[(u, j)] if mu != i else 0
                est = max(est, eu + lag)
            if best is None or est < best[1]:
                best = (i, est)
        i, est = best
        entries[j] = (i, est, est + inst.lengths[j])
        free[i] = est + inst.lengths[j]
    return Schedule(entries=entries)


# ---------------------------------------------------------------------------
# related machines


def solve_related_exact(inst: RelatedInstance, lim: SolveLimits = None) -> SolveResult:
    """Exact optimum on related machines by labeled machine assignment
    (speeds break the symmetry) plus per-machine order enumeration."""
    lim = lim or SolveLimits()
    n, m = inst.n, inst.m
    fastest = max(range(1, m + 1), key=lambda i: (inst.machines[i - 1], -i))
    serial_entries = {}
    cursor = Fraction(0)
    for j in topological_order(inst.dag):
        d = inst.duration(j, fastest)
        serial_entries[j] = (fastest, cursor, cursor + d)
        cursor += d
    serial = Schedule(entries=serial_entries)
    if n > lim.max_jobs:
        return SolveResult(makespan(serial), serial, proven_optimal=False, states_explored=0)

    search = _Search(lim)
    search.offer(makespan(serial), "serial")
    reach = inst.dag.reachable()
    s_max = max(inst.machines)
    machine_of = {}
    loads = [Fraction(0)] * (m + 1)
    proven = True

    def duration_or_best(j):
        if j in machine_of:
            return inst.duration(j, machine_of[j])
        return Fraction(inst.jobs[j - 1], s_max)

    def lower_bound():
        edges = [(u, v, duration_or_best(u)) for u, v in inst.dag.edges]
        starts = _earliest_starts(n, edges)
        path = max(starts[j] + duration_or_best(j) for j in range(1, n + 1))
        return max(path, max(loads))

    def assign(j):
        search.tick()
        if lower_bound() >= search.best_ms:
            return
        if j > n:
            _related_orders(search, inst, dict(machine_of), reach)
            return
        for i in range(1, m + 1):
            machine_of[j] = i
            loads[i] += inst.duration(j, i)
            assign(j + 1)
            loads[i] -= inst.duration(j, i)
            del machine_of[j]

    try:
        assign(1)
    except _Abort:
        proven = False

    if search.best_payload == "serial":
        return SolveResult(makespan(serial), serial, proven, search.states)
    labels, starts = search.best_payload
    entries = {
        j: (labels[j], starts[j], starts[j] + inst.duration(j, labels[j]))
        for j in range(1, n + 1)
    }
    sched = Schedule(entries=entries)
    return SolveResult(search.best_ms, sched, proven, search.states)


def _related_orders(search, inst, machine_of, reach):
    by_machine = {}
    for j, i in machine_of.items():
        by_machine.setdefault(i, []).append(j)
    groups = [(i, sorted(jobs)) for i, jobs in sorted(by_machine.items())]
    dur = {j: inst.duration(j, machine_of[j]) for j in machine_of}
    base_edges = [(u, v, dur[u]) for u, v in inst.dag.edges]
    _orders_dfs(
        search,
        groups,
        inst.n,
        base_edges,
        succ_weight=lambda u: dur[u],
        finish_weight=lambda u: dur[u],
        reach=reach,
    )


# ---------------------------------------------------------------------------
# layered-graph spread check


def verify_no_property(g: KPartiteInstance, max_pairs: int = 5_000_000) -> bool:
    """Exhaustively check the dense-instance condition: between every two
    consecutive layers, all pairs of ceil(delta*n)-size vertex sets are
    joined by at least one edge.  Returns False on the first missing
    pair; raises :class:`BudgetExceeded` past ``max_pairs`` checks.
    """
    size = math.ceil(g.delta * g.n)
    if size == 0:
        return True
    if size > g.n:
        return False
    checked = 0
    for i in range(1, g.k):
        lo = g.layers[i - 1]
        hi = g.layers[i]
        pos = {v: b for b, v in enumerate(hi)}
        nb = {u: 0 for u in lo}
        for u, v in g.edges[i - 1]:
            nb[u] |= 1 << pos[v]
        hi_masks = []
        for combo in itertools.combinations(hi, size):
            mask = 0
            for v in combo:
                mask |= 1 << pos[v]
            hi_masks.append(mask)
        for combo in itertools.combinations(lo, size):
            reach_mask = 0
            for u in combo:
                reach_mask |= nb[u]
            for mask in hi_masks:
                checked += 1
                if checked > max_pairs:
                    raise BudgetExceeded(f"more than {max_pairs} set pairs")
                if reach_mask & mask == 0:
                    return False
    return True
