"""Problem instances, schedules, and feasibility validators.

Conventions used throughout the package:

* jobs, machines, layers and slots are 1-based dense integer indices;
* all times are exact ``fractions.Fraction`` values (integer data stays
  integral along every arithmetic path, so there are no tolerances);
* job intervals are half-open ``[start, end)``, so touching intervals do
  not overlap and a successor may start exactly when its predecessor ends;
* instances and schedules are frozen dataclasses, treated as immutable
  values after construction.

Validators never raise on an infeasible schedule; they return a
:class:`ValidationReport` listing every violation found.  Structural
problems (wrong job set, machine index out of range) raise instead,
because no report could be interpreted for them.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .errors import (
    CycleDetected,
    EmptySchedule,
    JobSetMismatch,
    MachineOutOfRange,
)

Rational = Union[int, Fraction]


def as_fraction(value: Rational) -> Fraction:
    return value if isinstance(value, Fraction) else Fraction(value)


# ---------------------------------------------------------------------------
# precedence graphs


@dataclass(frozen=True)
class PrecedenceDag:
    """Precedence constraints over nodes 1..node_count; (u, v) means u before v.

    Construction rejects out-of-range endpoints, self-loops, duplicate
    edges and cycles, so a live instance is always a DAG.
    """

    node_count: int
    edges: tuple = ()

    def __post_init__(self):
        # stored sorted so equal edge sets compare (and serialize) equal
        object.__setattr__(
            self, "edges", tuple(sorted((int(u), int(v)) for u, v in self.edges))
        )
        if self.node_count < 0:
            raise ValueError(f"node_count must be >= 0, got {self.node_count}")
        seen = set()
        for u, v in self.edges:
            if not (1 <= u <= self.node_count and 1 <= v <= self.node_count):
                raise ValueError(f"edge ({u}, {v}) out of range 1..{self.node_count}")
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            if (u, v) in seen:
                raise ValueError(f"duplicate edge ({u}, {v})")
            seen.add((u, v))
        topological_order(self)  # raises CycleDetected on a cycle

    def successors(self) -> dict:
        out = {u: [] for u in range(1, self.node_count + 1)}
        for u, v in self.edges:
            out[u].append(v)
        return out

    def predecessors(self) -> dict:
        out = {u: [] for u in range(1, self.node_count + 1)}
        for u, v in self.edges:
            out[v].append(u)
        return out

    def reachable(self) -> dict:
        """Map node -> set of nodes strictly after it (transitive closure)."""
        succ = self.successors()
        reach = {u: set() for u in range(1, self.node_count + 1)}
        for u in reversed(topological_order(self)):
            acc = set()
            for v in succ[u]:
                acc.add(v)
                acc |= reach[v]
            reach[u] = acc
        return reach


def topological_order(dag: PrecedenceDag) -> list:
    """Kahn's algorithm with a min-heap, so ties go to the lowest index."""
    indeg = {u: 0 for u in range(1, dag.node_count + 1)}
    succ = {u: [] for u in range(1, dag.node_count + 1)}
    for u, v in dag.edges:
        indeg[v] += 1
        succ[u].append(v)
    ready = [u for u in indeg if indeg[u] == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        u = heapq.heappop(ready)
        order.append(u)
        for v in succ[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                heapq.heappush(ready, v)
    if len(order) != dag.node_count:
        remaining = {u for u in indeg if indeg[u] > 0}
        witness = _find_cycle(remaining, succ)
        raise CycleDetected(witness)
    return order


def _find_cycle(remaining, succ):
    start = min(remaining)
    path, seen = [], {}
    node = start
    while node not in seen:
        seen[node] = len(path)
        path.append(node)
        node = min(v for v in succ[node] if v in remaining)
    return path[seen[node]:] + [node]


# ---------------------------------------------------------------------------
# instances


@dataclass(frozen=True)
class UmpsInstance:
    """Jobs with fixed home machines and precedence constraints.

    ``lengths`` and ``home`` map each job 1..n to its processing time and
    its unique machine in 1..m.  The machine sets J(i) are derived.
    """

    n: int
    m: int
    lengths: dict
    home: dict
    dag: PrecedenceDag

    def __post_init__(self):
        if self.n < 1 or self.m < 1:
            raise ValueError("need at least one job and one machine")
        jobs = set(range(1, self.n + 1))
        if set(self.lengths) != jobs or set(self.home) != jobs:
            raise ValueError("lengths and home must cover exactly jobs 1..n")
        for l, p in self.lengths.items():
            if int(p) != p or p < 1:
                raise ValueError(f"job {l}: length {p} must be a positive integer")
        for l, i in self.home.items():
            if not 1 <= i <= self.m:
                raise ValueError(f"job {l}: home machine {i} outside 1..{self.m}")
        if self.dag.node_count != self.n:
            raise ValueError("dag node count must equal the job count")

    def jobs_on(self, machine: int) -> list:
        return [l for l in range(1, self.n + 1) if self.home[l] == machine]

    def total_length(self) -> int:
        return sum(self.lengths.values())

    @property
    def unit_lengths(self) -> bool:
        return all(p == 1 for p in self.lengths.values())


@dataclass(frozen=True)
class JobShopInstance:
    """Chains of operations; each operation is a (machine, duration) pair."""

    jobs: tuple

    def __post_init__(self):
        object.__setattr__(
            self,
            "jobs",
            tuple(tuple((int(mi), int(p)) for mi, p in chain) for chain in self.jobs),
        )
        if not self.jobs or any(not chain for chain in self.jobs):
            raise ValueError("need at least one job, each with at least one operation")
        for chain in self.jobs:
            for mi, p in chain:
                if mi < 1 or p < 1:
                    raise ValueError(f"operation ({mi}, {p}) must have machine, duration >= 1")

    @property
    def machine_count(self) -> int:
        return max(mi for chain in self.jobs for mi, _ in chain)

    @property
    def operation_count(self) -> int:
        return sum(len(chain) for chain in self.jobs)


@dataclass(frozen=True)
class CommDelayInstance:
    """Identical machines, per-edge communication delays.

    ``machines`` is the machine count, or ``None`` for unlimited machines.
    ``delays`` maps each dag edge (u, v) to a nonnegative integer delay:
    if u and v run on different machines, v starts at least ``delay`` after
    u ends; co-located jobs only obey plain precedence.
    """

    n_total: int
    lengths: dict
    delays: dict
    dag: PrecedenceDag
    machines: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(
            self, "delays", {(int(u), int(v)): int(c) for (u, v), c in self.delays.items()}
        )
        jobs = set(range(1, self.n_total + 1))
        if set(self.lengths) != jobs:
            raise ValueError("lengths must cover exactly jobs 1..n_total")
        for l, p in self.lengths.items():
            if int(p) != p or p < 1:
                raise ValueError(f"job {l}: length {p} must be a positive integer")
        if self.dag.node_count != self.n_total:
            raise ValueError("dag node count must equal n_total")
        if set(self.delays) != set(self.dag.edges):
            raise ValueError("delays must cover exactly the dag edges")
        if any(c < 0 for c in self.delays.values()):
            raise ValueError("delays must be nonnegative")
        if self.machines is not None and self.machines < 1:
            raise ValueError("machine count must be >= 1 (or None for unlimited)")

    def total_length(self) -> int:
        return sum(self.lengths.values())


@dataclass(frozen=True)
class RelatedInstance:
    """Uniformly related machines: job j on machine i takes jobs[j]/machines[i]."""

    machines: tuple  # speeds s_i >= 1
    jobs: tuple      # lengths p_j >= 1
    dag: PrecedenceDag

    def __post_init__(self):
        object.__setattr__(self, "machines", tuple(int(s) for s in self.machines))
        object.__setattr__(self, "jobs", tuple(int(p) for p in self.jobs))
        if not self.machines or not self.jobs:
            raise ValueError("need at least one machine and one job")
        if any(s < 1 for s in self.machines) or any(p < 1 for p in self.jobs):
            raise ValueError("speeds and lengths must be >= 1")
        if self.dag.node_count != len(self.jobs):
            raise ValueError("dag node count must equal the job count")

    @property
    def n(self) -> int:
        return len(self.jobs)

    @property
    def m(self) -> int:
        return len(self.machines)

    def duration(self, job: int, machine: int) -> Fraction:
        return Fraction(self.jobs[job - 1], self.machines[machine - 1])


@dataclass(frozen=True)
class JobGroup:
    """``multiplicity`` copies of a length-``length`` job, from ``origin_job``."""

    multiplicity: int
    length: int
    origin_job: int

    def __post_init__(self):
        if self.multiplicity < 1 or self.length < 1:
            raise ValueError("multiplicity and length must be >= 1")


@dataclass(frozen=True)
class MachineGroup:
    multiplicity: int
    speed: int

    def __post_init__(self):
        if self.multiplicity < 1 or self.speed < 1:
            raise ValueError("multiplicity and speed must be >= 1")


@dataclass(frozen=True)
class GroupedRelatedInstance:
    """Related-machines instance kept in grouped (unexpanded) form.

    A group edge (g, h) in ``group_dag`` means every member of group g
    precedes every member of group h.  Because expansion duplicates nodes
    without creating new paths, the expanded job-level graph is acyclic
    exactly when ``group_dag`` is, which the constructor enforces.
    """

    job_groups: tuple
    machine_groups: tuple
    group_dag: PrecedenceDag

    def __post_init__(self):
        object.__setattr__(self, "job_groups", tuple(self.job_groups))
        object.__setattr__(self, "machine_groups", tuple(self.machine_groups))
        if not self.job_groups or not self.machine_groups:
            raise ValueError("need at least one job group and one machine group")
        if self.group_dag.node_count != len(self.job_groups):
            raise ValueError("group_dag node count must equal the job-group count")

    def total_jobs(self) -> int:
        return sum(g.multiplicity for g in self.job_groups)

    def total_machines(self) -> int:
        return sum(g.multiplicity for g in self.machine_groups)


@dataclass(frozen=True)
class KPartiteInstance:
    """k layers of n vertices with edges only between consecutive layers.

    Vertices are global ids 1..n*k; layer i holds ids (i-1)*n+1 .. i*n.
    ``edges[i-1]`` is the edge set between layer i and layer i+1.
    ``Q``, ``eps`` and ``delta`` are the partition-hypothesis parameters
    recorded with the instance.
    """

    k: int
    n: int
    layers: tuple
    edges: tuple
    Q: int
    eps: Fraction
    delta: Fraction

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(tuple(layer) for layer in self.layers))
        # per-layer edge sets stored sorted so equal sets compare equal
        object.__setattr__(
            self, "edges", tuple(tuple(sorted(tuple(e) for e in es)) for es in self.edges)
        )
        object.__setattr__(self, "eps", as_fraction(self.eps))
        object.__setattr__(self, "delta", as_fraction(self.delta))
        if self.k < 1 or self.n < 1 or self.Q < 1:
            raise ValueError("k, n and Q must be >= 1")
        expected = tuple(
            tuple(range((i - 1) * self.n + 1, i * self.n + 1)) for i in range(1, self.k + 1)
        )
        if self.layers != expected:
            raise ValueError("layers must list global ids (i-1)*n+1 .. i*n in order")
        if len(self.edges) != self.k - 1:
            raise ValueError("need exactly k-1 inter-layer edge sets")
        for i, es in enumerate(self.edges, start=1):
            lo, hi = set(self.layers[i - 1]), set(self.layers[i])
            for u, v in es:
                if u not in lo or v not in hi:
                    raise ValueError(f"edge ({u}, {v}) does not go from layer {i} to {i + 1}")
            if len(set(es)) != len(es):
                raise ValueError(f"duplicate edge between layers {i} and {i + 1}")
        if not (0 < self.eps < 1 and 0 < self.delta < 1):
            raise ValueError("eps and delta must lie strictly between 0 and 1")

    def layer_of(self, vertex: int) -> int:
        return (vertex - 1) // self.n + 1

    def vertex_count(self) -> int:
        return self.n * self.k


# ---------------------------------------------------------------------------
# schedules


@dataclass(frozen=True)
class Schedule:
    """Job -> (machine, start, end); ``horizon`` is the largest end time."""

    entries: dict
    horizon: Fraction = None

    def __post_init__(self):
        norm = {}
        for job, (machine, start, end) in self.entries.items():
            norm[int(job)] = (int(machine), as_fraction(start), as_fraction(end))
        object.__setattr__(self, "entries", norm)
        computed = max((e for _, _, e in norm.values()), default=Fraction(0))
        if self.horizon is not None and as_fraction(self.horizon) != computed:
            raise ValueError(f"horizon {self.horizon} != max end {computed}")
        object.__setattr__(self, "horizon", computed)


def makespan(sched: Schedule) -> Fraction:
    if not sched.entries:
        raise EmptySchedule("schedule has no entries")
    return sched.horizon


@dataclass(frozen=True)
class GroupedPlacement:
    """``count`` members of job group ``group`` run on machines of
    ``machine_group`` during [start, end)."""

    group: int
    machine_group: int
    start: Fraction
    end: Fraction
    count: int

    def __post_init__(self):
        object.__setattr__(self, "start", as_fraction(self.start))
        object.__setattr__(self, "end", as_fraction(self.end))
        if self.count < 1:
            raise ValueError("placement count must be >= 1")


@dataclass(frozen=True)
class GroupedSchedule:
    placements: tuple

    def __post_init__(self):
        object.__setattr__(self, "placements", tuple(self.placements))

    def makespan(self) -> Fraction:
        if not self.placements:
            raise EmptySchedule("grouped schedule has no placements")
        return max(pl.end for pl in self.placements)


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class Violation:
    kind: str  # overlap | precedence | delay | wrong_machine | negative_time | duration | count
    witness: tuple

    def __post_init__(self):
        object.__setattr__(self, "witness", tuple(self.witness))


@dataclass(frozen=True)
class ValidationReport:
    feasible: bool
    violations: tuple

    def __post_init__(self):
        object.__setattr__(self, "violations", tuple(self.violations))


def _report(violations) -> ValidationReport:
    return ValidationReport(feasible=not violations, violations=tuple(violations))


def _check_job_set(sched: Schedule, count: int):
    expected = set(range(1, count + 1))
    if set(sched.entries) != expected:
        missing = sorted(expected - set(sched.entries))
        extra = sorted(set(sched.entries) - expected)
        raise JobSetMismatch(f"missing jobs {missing}, unexpected jobs {extra}")


def _overlaps(sched: Schedule):
    """Same-machine pairs of jobs whose half-open intervals intersect."""
    by_machine = {}
    for job, (machine, start, end) in sorted(sched.entries.items()):
        by_machine.setdefault(machine, []).append((start, end, job))
    out = []
    for machine in sorted(by_machine):
        placed = sorted(by_machine[machine])
        for a in range(len(placed)):
            s1, e1, j1 = placed[a]
            for b in range(a + 1, len(placed)):
                s2, e2, j2 = placed[b]
                if s2 >= e1:
                    break  # sorted by start, nothing later can overlap j1
                out.append(Violation("overlap", (machine, min(j1, j2), max(j1, j2))))
    return out


def validate_umps(inst: UmpsInstance, sched: Schedule) -> ValidationReport:
    """Feasibility for fixed-home scheduling: home machines, durations,
    no same-machine overlap, and precedence end <= start per edge."""
    _check_job_set(sched, inst.n)
    violations = []
    for job in range(1, inst.n + 1):
        machine, start, end = sched.entries[job]
        if machine != inst.home[job]:
            violations.append(Violation("wrong_machine", (job, machine)))
        if start < 0:
            violations.append(Violation("negative_time", (job,)))
        if end - start != inst.lengths[job]:
            violations.append(Violation("duration", (job,)))
    violations.extend(_overlaps(sched))
    for u, v in inst.dag.edges:
        if sched.entries[u][2] > sched.entries[v][1]:
            violations.append(Violation("precedence", (u, v)))
    return _report(violations)


def validate_commdelay(inst: CommDelayInstance, sched: Schedule) -> ValidationReport:
    """Feasibility with communication delays: cross-machine successors wait
    the edge delay after the predecessor ends; co-located ones do not."""
    _check_job_set(sched, inst.n_total)
    violations = []
    for job in range(1, inst.n_total + 1):
        machine, start, end = sched.entries[job]
        if inst.machines is not None and not 1 <= machine <= inst.machines:
            raise MachineOutOfRange(f"job {job} on machine {machine}, have {inst.machines}")
        if machine < 1:
            raise MachineOutOfRange(f"job {job} on machine {machine}")
        if start < 0:
            violations.append(Violation("negative_time", (job,)))
        if end - start != inst.lengths[job]:
            violations.append(Violation("duration", (job,)))
    violations.extend(_overlaps(sched))
    for u, v in inst.dag.edges:
        mu, _, eu = sched.entries[u]
        mv, sv, _ = sched.entries[v]
        if sv < eu:
            violations.append(Violation("precedence", (u, v)))
        elif mu != mv and sv < eu + inst.delays[(u, v)]:
            violations.append(Violation("delay", (u, v)))
    return _report(violations)


def validate_related(inst: RelatedInstance, sched: Schedule) -> ValidationReport:
    """Feasibility on related machines: any machine is allowed, but the
    interval must equal the job's speed-scaled duration there."""
    _check_job_set(sched, inst.n)
    violations = []
    for job in range(1, inst.n + 1):
        machine, start, end = sched.entries[job]
        if not 1 <= machine <= inst.m:
            raise MachineOutOfRange(f"job {job} on machine {machine}, have {inst.m}")
        if start < 0:
            violations.append(Violation("negative_time", (job,)))
        if end - start != inst.duration(job, machine):
            violations.append(Violation("duration", (job,)))
    violations.extend(_overlaps(sched))
    for u, v in inst.dag.edges:
        if sched.entries[u][2] > sched.entries[v][1]:
            violations.append(Violation("precedence", (u, v)))
    return _report(violations)


def validate_grouped(
    inst: GroupedRelatedInstance, gs: GroupedSchedule, require_complete: bool = True
) -> ValidationReport:
    """Group-level feasibility without expanding members.

    Checks per-placement durations, machine-group capacity at every time
    (total active count <= group multiplicity), all-pairs precedence
    between groups joined by a group edge, and -- when
    ``require_complete`` -- that every member of every group is placed
    exactly once.
    """
    violations = []
    per_group_count = {g: 0 for g in range(1, len(inst.job_groups) + 1)}
    for idx, pl in enumerate(gs.placements):
        if not 1 <= pl.group <= len(inst.job_groups):
            raise JobSetMismatch(f"placement {idx}: unknown job group {pl.group}")
        if not 1 <= pl.machine_group <= len(inst.machine_groups):
            raise MachineOutOfRange(f"placement {idx}: unknown machine group {pl.machine_group}")
        jg = inst.job_groups[pl.group - 1]
        mg = inst.machine_groups[pl.machine_group - 1]
        if pl.start < 0:
            violations.append(Violation("negative_time", (pl.group,)))
        if pl.end - pl.start != Fraction(jg.length, mg.speed):
            violations.append(Violation("duration", (pl.group, pl.machine_group)))
        per_group_count[pl.group] += pl.count

    for g, total in sorted(per_group_count.items()):
        mult = inst.job_groups[g - 1].multiplicity
        if total > mult or (require_complete and total != mult):
            violations.append(Violation("count", (g, total, mult)))

    # capacity sweep: ends before starts at equal times (half-open intervals)
    for mg_idx in range(1, len(inst.machine_groups) + 1):
        events = []
        for pl in gs.placements:
            if pl.machine_group == mg_idx:
                events.append((pl.start, 1, pl.count))
                events.append((pl.end, 0, -pl.count))
        events.sort()
        active = 0
        cap = inst.machine_groups[mg_idx - 1].multiplicity
        flagged = False
        for _, _, delta in events:
            active += delta
            if active > cap and not flagged:
                violations.append(Violation("overlap", (mg_idx, active, cap)))
                flagged = True
    for gu, gv in inst.group_dag.edges:
        ends = [pl.end for pl in gs.placements if pl.group == gu]
        starts = [pl.start for pl in gs.placements if pl.group == gv]
        if ends and starts and max(ends) > min(starts):
            violations.append(Violation("precedence", (gu, gv)))
    return _report(violations)


# ---------------------------------------------------------------------------
# canonical simple schedules


def trivial_serial_schedule(inst: UmpsInstance) -> Schedule:
    """All jobs back-to-back in topological order on their home machines.

    Always feasible; makespan equals the total processing time, which is
    the easy upper bound every solver starts from.
    """
    entries = {}
    cursor = Fraction(0)
    for job in topological_order(inst.dag):
        p = inst.lengths[job]
        entries[job] = (inst.home[job], cursor, cursor + p)
        cursor += p
    return Schedule(entries=entries)
