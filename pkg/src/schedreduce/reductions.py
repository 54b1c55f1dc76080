"""Makespan-preserving reductions between the scheduling models.

Each reduction returns an artifact holding the output instance together
with the origin bookkeeping needed to translate schedules in both
directions, so a backward map never has to re-derive anything.

The two headline constructions:

* fixed-home jobs -> communication delays: one output job per input job
  plus one unit "anchor" job per machine; a huge delay from every job to
  its machine's anchor forces each machine's jobs onto one physical
  machine in any short schedule, and the anchors add exactly one extra
  time unit on top of an optimal input schedule.

* unit fixed-home jobs -> related machines: job l becomes a group of
  kappa^{2(m - M(l))} copies of length kappa^{M(l)-1}; machine i becomes
  kappa^{2(m-i)} machines of speed kappa^{i-1}.  A job group exactly
  fills its home machine group for one time unit, and the speed ladder
  is too steep for other groups to absorb more than a sliver of it.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    CoLocationViolated,
    DegenerateInstance,
    InfeasibleInput,
    InvalidCertificate,
    MakespanTooLarge,
    MaterializationTooLarge,
    NonUnitLengths,
)
from .model import (
    CommDelayInstance,
    GroupedPlacement,
    GroupedRelatedInstance,
    GroupedSchedule,
    JobGroup,
    JobShopInstance,
    KPartiteInstance,
    MachineGroup,
    PrecedenceDag,
    RelatedInstance,
    Schedule,
    UmpsInstance,
    as_fraction,
    makespan,
    validate_commdelay,
    validate_umps,
)

MATERIALIZE_JOB_CAP = 10**6


# ---------------------------------------------------------------------------
# fixed-home jobs -> communication delays


@dataclass(frozen=True)
class CommDelayReductionArtifact:
    """Output instance plus the bookkeeping for both schedule maps.

    ``origin`` maps every non-anchor output job to its input job (here the
    identity on 1..n); ``dummy_ids`` lists the anchor job of each machine
    in machine order.
    """

    output: CommDelayInstance
    c_infinity: int
    dummy_ids: tuple
    origin: dict
    source: UmpsInstance


def umps_to_commdelay(inst: UmpsInstance) -> CommDelayReductionArtifact:
    """Build the delay instance: job edges keep delay 0, and every job
    points at its machine's unit anchor with delay n * sum(lengths)."""
    if inst.n < 2:
        raise DegenerateInstance("need at least 2 jobs for the delay threshold to separate")
    c_inf = inst.n * inst.total_length()
    n_total = inst.n + inst.m
    lengths = {l: inst.lengths[l] for l in range(1, inst.n + 1)}
    dummy_ids = tuple(inst.n + i for i in range(1, inst.m + 1))
    for d in dummy_ids:
        lengths[d] = 1
    edges = list(inst.dag.edges)
    delays = {(u, v): 0 for u, v in edges}
    for l in range(1, inst.n + 1):
        e = (l, inst.n + inst.home[l])
        edges.append(e)
        delays[e] = c_inf
    output = CommDelayInstance(
        n_total=n_total,
        lengths=lengths,
        delays=delays,
        dag=PrecedenceDag(node_count=n_total, edges=tuple(edges)),
        machines=None,
    )
    return CommDelayReductionArtifact(
        output=output,
        c_infinity=c_inf,
        dummy_ids=dummy_ids,
        origin={l: l for l in range(1, inst.n + 1)},
        source=inst,
    )


def forward_map_commdelay(art: CommDelayReductionArtifact, sched: Schedule) -> Schedule:
    """Feasible input schedule (makespan L) -> delay schedule of makespan L+1.

    Jobs keep their intervals, machine i's anchor runs in [L, L+1) on
    machine i, so every anchor is co-located with its whole machine set
    and no large delay is ever paid.
    """
    report = validate_umps(art.source, sched)
    if not report.feasible:
        raise InfeasibleInput(f"input schedule infeasible: {report.violations[0]}")
    ln = makespan(sched)
    entries = {l: sched.entries[l] for l in range(1, art.source.n + 1)}
    for i, d in enumerate(art.dummy_ids, start=1):
        entries[d] = (i, ln, ln + 1)
    return Schedule(entries=entries)


def backward_map_commdelay(art: CommDelayReductionArtifact, sched: Schedule) -> Schedule:
    """Short delay schedule -> input schedule of no larger makespan.

    Requires makespan < c_infinity, which forces each machine's jobs and
    its anchor onto one shared physical machine; dropping the anchors and
    renaming each shared machine back to its home index is then feasible.
    """
    report = validate_commdelay(art.output, sched)
    if not report.feasible:
        raise InfeasibleInput(f"delay schedule infeasible: {report.violations[0]}")
    ln = makespan(sched)
    if ln >= art.c_infinity:
        raise MakespanTooLarge(f"makespan {ln} >= delay threshold {art.c_infinity}")
    for i, d in enumerate(art.dummy_ids, start=1):
        anchor_machine = sched.entries[d][0]
        for l in range(1, art.source.n + 1):
            if art.source.home[l] == i and sched.entries[l][0] != anchor_machine:
                raise CoLocationViolated(i, (l, d))
    entries = {}
    for l in range(1, art.source.n + 1):
        _, start, end = sched.entries[l]
        entries[l] = (art.source.home[l], start, end)
    return Schedule(entries=entries)


# ---------------------------------------------------------------------------
# job shop -> fixed-home jobs


def jobshop_to_umps(js: JobShopInstance):
    """One job per operation, chained per input job.

    Returns ``(instance, origin)`` where ``origin`` maps each new job to
    its (job index, operation index), both 1-based.  The precedence graph
    is a disjoint union of chains: every node has in- and out-degree at
    most 1.
    """
    lengths, home, edges, origin = {}, {}, [], {}
    idx = 0
    for j, chain in enumerate(js.jobs, start=1):
        prev = None
        for o, (machine, dur) in enumerate(chain, start=1):
            idx += 1
            lengths[idx] = dur
            home[idx] = machine
            origin[idx] = (j, o)
            if prev is not None:
                edges.append((prev, idx))
            prev = idx
    inst = UmpsInstance(
        n=idx,
        m=js.machine_count,
        lengths=lengths,
        home=home,
        dag=PrecedenceDag(node_count=idx, edges=tuple(edges)),
    )
    return inst, origin


# ---------------------------------------------------------------------------
# unit fixed-home jobs -> related machines


@dataclass(frozen=True)
class RelatedReductionArtifact:
    """Grouped output plus the kappa bookkeeping.

    ``kappa_meets_bound`` records whether kappa >= 10 n^3 m, the
    precondition of the misplaced-fraction argument; overriding kappa
    below that keeps the construction well-defined but voids the bound.
    """

    output: GroupedRelatedInstance
    kappa: int
    origin: dict             # job group -> input job
    machine_group_of: dict   # input machine -> machine group
    kappa_meets_bound: bool
    source: UmpsInstance


def umps_to_related(inst: UmpsInstance, kappa_override: int = None) -> RelatedReductionArtifact:
    """Group construction with kappa = 10 n^3 m (or the override, >= 2).

    Identities baked into the exponents: a job group has exactly as many
    members as its home machine group has machines, and member length
    over home speed is exactly 1, so one group fills its home group for
    one unit of time.
    """
    if not inst.unit_lengths:
        raise NonUnitLengths("the related-machines construction needs unit job lengths")
    default_kappa = 10 * inst.n**3 * inst.m
    kappa = default_kappa if kappa_override is None else int(kappa_override)
    if kappa < 2:
        raise ValueError(f"kappa must be >= 2, got {kappa}")
    job_groups = tuple(
        JobGroup(
            multiplicity=kappa ** (2 * (inst.m - inst.home[l])),
            length=kappa ** (inst.home[l] - 1),
            origin_job=l,
        )
        for l in range(1, inst.n + 1)
    )
    machine_groups = tuple(
        MachineGroup(multiplicity=kappa ** (2 * (inst.m - i)), speed=kappa ** (i - 1))
        for i in range(1, inst.m + 1)
    )
    output = GroupedRelatedInstance(
        job_groups=job_groups,
        machine_groups=machine_groups,
        group_dag=PrecedenceDag(node_count=inst.n, edges=inst.dag.edges),
    )
    return RelatedReductionArtifact(
        output=output,
        kappa=kappa,
        origin={l: l for l in range(1, inst.n + 1)},
        machine_group_of={i: i for i in range(1, inst.m + 1)},
        kappa_meets_bound=kappa >= default_kappa,
        source=inst,
    )


def forward_map_related(art: RelatedReductionArtifact, sched: Schedule) -> GroupedSchedule:
    """Unit-slot input schedule -> grouped schedule of the same makespan:
    each whole job group occupies its home machine group during the
    job's slot."""
    report = validate_umps(art.source, sched)
    if not report.feasible:
        raise InfeasibleInput(f"input schedule infeasible: {report.violations[0]}")
    placements = []
    for l in range(1, art.source.n + 1):
        _, start, end = sched.entries[l]
        jg = art.output.job_groups[l - 1]
        placements.append(
            GroupedPlacement(
                group=l,
                machine_group=art.machine_group_of[art.source.home[l]],
                start=start,
                end=end,
                count=jg.multiplicity,
            )
        )
    return GroupedSchedule(placements=tuple(placements))


def materialize_related(ginst: GroupedRelatedInstance, job_cap: int = MATERIALIZE_JOB_CAP):
    """Expand groups into a flat related-machines instance.

    Only sensible for small kappa; refuses when the expanded job count
    exceeds ``job_cap``.  Returns ``(instance, job_base, machine_base)``
    where members of job group g are jobs job_base[g]+1 .. job_base[g+1]
    and likewise for machines.
    """
    total = ginst.total_jobs()
    if total > job_cap:
        raise MaterializationTooLarge(f"{total} expanded jobs exceed the cap {job_cap}")
    job_base = [0]
    for jg in ginst.job_groups:
        job_base.append(job_base[-1] + jg.multiplicity)
    machine_base = [0]
    for mg in ginst.machine_groups:
        machine_base.append(machine_base[-1] + mg.multiplicity)
    jobs, speeds = [], []
    for jg in ginst.job_groups:
        jobs.extend([jg.length] * jg.multiplicity)
    for mg in ginst.machine_groups:
        speeds.extend([mg.speed] * mg.multiplicity)
    edges = []
    for gu, gv in ginst.group_dag.edges:
        for u in range(job_base[gu - 1] + 1, job_base[gu] + 1):
            for v in range(job_base[gv - 1] + 1, job_base[gv] + 1):
                edges.append((u, v))
    inst = RelatedInstance(
        machines=tuple(speeds),
        jobs=tuple(jobs),
        dag=PrecedenceDag(node_count=len(jobs), edges=tuple(edges)),
    )
    return inst, tuple(job_base), tuple(machine_base)


def materialize_grouped_schedule(
    ginst: GroupedRelatedInstance, gs: GroupedSchedule, job_cap: int = MATERIALIZE_JOB_CAP
) -> Schedule:
    """Expand a grouped schedule over the materialized instance: the k-th
    placed member of a group lands on the k-th machine used of its
    placement's machine group."""
    _, job_base, machine_base = materialize_related(ginst, job_cap=job_cap)
    next_member = [job_base[g] for g in range(len(ginst.job_groups) + 1)]
    entries = {}
    # per machine group, hand out machine indices placement by placement;
    # placements of one group never overlap in time with each other only if
    # the grouped schedule says so, so reuse machines greedily per interval.
    busy_until = {}  # machine index -> end time of its last placement
    for pl in sorted(gs.placements, key=lambda p: (p.start, p.group)):
        base = machine_base[pl.machine_group - 1]
        cap = machine_base[pl.machine_group] - base
        assigned = 0
        for k in range(1, cap + 1):
            if assigned == pl.count:
                break
            machine = base + k
            if busy_until.get(machine, Fraction(0)) <= pl.start:
                job = next_member[pl.group - 1] + 1
                if job > job_base[pl.group]:
                    raise InfeasibleInput(
                        f"job group {pl.group} places more members than its multiplicity"
                    )
                next_member[pl.group - 1] = job
                entries[job] = (machine, pl.start, pl.end)
                busy_until[machine] = pl.end
                assigned += 1
        if assigned < pl.count:
            raise InfeasibleInput(
                f"machine group {pl.machine_group} cannot host {pl.count} members at {pl.start}"
            )
    return Schedule(entries=entries)


# ---------------------------------------------------------------------------
# k-partite graphs -> fixed-home jobs


def kpartite_to_umps(g: KPartiteInstance) -> UmpsInstance:
    """One unit job per vertex, homed on its layer's machine; graph edges
    become precedence edges."""
    n_jobs = g.vertex_count()
    lengths = {v: 1 for v in range(1, n_jobs + 1)}
    home = {v: g.layer_of(v) for v in range(1, n_jobs + 1)}
    edges = tuple(e for es in g.edges for e in es)
    return UmpsInstance(
        n=n_jobs,
        m=g.k,
        lengths=lengths,
        home=home,
        dag=PrecedenceDag(node_count=n_jobs, edges=edges),
    )


@dataclass(frozen=True)
class KPartiteYesCertificate:
    """Per layer, an ordered list of Q cells partitioning that layer."""

    partition: tuple  # partition[i-1][j] = tuple of vertex ids in cell j of layer i

    def __post_init__(self):
        object.__setattr__(
            self,
            "partition",
            tuple(tuple(tuple(cell) for cell in layer) for layer in self.partition),
        )


def validate_certificate(g: KPartiteInstance, cert: KPartiteYesCertificate) -> None:
    """Raise unless the cells partition each layer, are large enough, and
    no edge goes from a later cell to an earlier one in the next layer."""
    if len(cert.partition) != g.k:
        raise InvalidCertificate(f"expected {g.k} layers, got {len(cert.partition)}")
    min_size = (1 - g.eps) * Fraction(g.n, g.Q)
    cell_of = {}
    for i, layer_cells in enumerate(cert.partition, start=1):
        if len(layer_cells) != g.Q:
            raise InvalidCertificate(f"layer {i}: expected {g.Q} cells, got {len(layer_cells)}")
        covered = [v for cell in layer_cells for v in cell]
        if sorted(covered) != list(g.layers[i - 1]):
            raise InvalidCertificate(f"layer {i}: cells do not partition the layer")
        for j, cell in enumerate(layer_cells):
            if len(cell) < min_size:
                raise InvalidCertificate(
                    f"layer {i}, cell {j}: size {len(cell)} below {min_size}", witness=(i, j)
                )
            for v in cell:
                cell_of[v] = j
    for i, es in enumerate(g.edges, start=1):
        for u, v in es:
            if cell_of[u] > cell_of[v]:
                raise InvalidCertificate(
                    f"edge ({u}, {v}) goes from cell {cell_of[u]} to earlier cell {cell_of[v]}",
                    witness=(u, v),
                )


def yes_schedule_offsets(g: KPartiteInstance):
    """Start offset t_i = (i-1) * n * (eps + 1/Q) of each layer's machine."""
    step = g.n * (g.eps + Fraction(1, g.Q))
    return {i: (i - 1) * step for i in range(1, g.k + 1)}


def kpartite_yes_schedule(g: KPartiteInstance, cert: KPartiteYesCertificate) -> Schedule:
    """Staircase schedule from a cell partition.

    Machine i runs its cells back to back starting at t_i; the stagger
    between consecutive layers covers one full cell plus the slack eps*n,
    so each cell finishes before any successor cell with an edge into it
    begins.  Makespan is at most t_k + n <= 3n.
    """
    validate_certificate(g, cert)
    offsets = yes_schedule_offsets(g)
    entries = {}
    for i in range(1, g.k + 1):
        cursor = offsets[i]
        for cell in cert.partition[i - 1]:
            for v in sorted(cell):
                entries[v] = (i, cursor, cursor + 1)
                cursor += 1
    return Schedule(entries=entries)
