"""Optimizer-style post-processing: local exact minimization and
sample persistence.

``builtin_opt_pp`` mimics the cleanup pass a hardware optimizer applies to
its own output: the problem graph is cut into low-treewidth subgraphs, and
each run is improved by exactly minimizing every subgraph conditioned on
the spins outside it. The exact step is min-sum variable elimination along
the order that certified the subgraph's width, so its cost is bounded by
2^(width+1) table entries per step.

Sample persistence instead freezes vertices on which a sample set agrees
strongly, folds their couplings into the remaining linear terms, and
re-samples the smaller problem.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .core import IsingProblem, SpinConfiguration
from .errors import InputError, ParameterError, WidthError
from .rng import derive_seed
from .samplers import Provenance, RunSet, SamplerParams

DEFAULT_WIDTH_CAP = 4
DEFAULT_PERSISTENCE_THRESHOLD = 0.9
DEFAULT_PERSISTENCE_ROUNDS = 3


@dataclass(frozen=True, slots=True)
class Subgraph:
    """A vertex set plus the elimination order certifying its width."""

    vertices: tuple
    elimination_order: tuple
    width: int

    def __post_init__(self):
        if sorted(self.elimination_order) != sorted(self.vertices):
            raise InputError("elimination_order must permute the subgraph's vertices")
        object.__setattr__(self, "vertices", tuple(sorted(self.vertices)))

    def __len__(self):
        return len(self.vertices)


def min_degree_elimination(vertices, edges):
    """Min-degree elimination order and induced width of a vertex set.

    ``edges`` is any edge list; only edges inside ``vertices`` matter.
    Ties break toward the lowest vertex id. Eliminating a vertex connects
    its remaining neighbors; the width is the largest neighbor count seen
    at an elimination step.
    """
    verts = sorted(set(vertices))
    vset = set(verts)
    adj = {v: set() for v in verts}
    for a, b in edges:
        if a in vset and b in vset and a != b:
            adj[a].add(b)
            adj[b].add(a)
    order = []
    width = 0
    remaining = set(verts)
    while remaining:
        v = min(remaining, key=lambda x: (len(adj[x]), x))
        nbrs = adj[v]
        width = max(width, len(nbrs))
        for a in nbrs:
            for b in nbrs:
                if a < b:
                    adj[a].add(b)
                    adj[b].add(a)
        for a in nbrs:
            adj[a].discard(v)
        order.append(v)
        remaining.discard(v)
        del adj[v]
    return order, width


def decompose_low_treewidth(problem: IsingProblem,
                            width_cap: int = DEFAULT_WIDTH_CAP):
    """Cover the vertex set with connected subgraphs of certified width.

    Regions are grown greedily: start at the lowest unassigned vertex,
    then repeatedly add the lowest-numbered unassigned neighbor whose
    addition keeps the min-degree elimination width within the cap. When
    no neighbor fits, the region is closed and a new one starts. The
    result is a partition of the vertices, deterministic for a given
    problem and cap.
    """
    if width_cap < 1:
        raise ParameterError(f"width_cap must be at least 1, got {width_cap}")
    edges = problem.edge_list
    unassigned = set(range(problem.vertex_count))
    subgraphs = []
    while unassigned:
        region = [min(unassigned)]
        unassigned.discard(region[0])
        order, width = [region[0]], 0
        while True:
            candidates = sorted(
                w for v in region for w in problem.neighbors(v).tolist()
                if w in unassigned
            )
            grown = False
            for cand in candidates:
                trial = region + [cand]
                trial_order, trial_width = min_degree_elimination(trial, edges)
                if trial_width <= width_cap:
                    region.append(cand)
                    unassigned.discard(cand)
                    order, width = trial_order, trial_width
                    grown = True
                    break
            if not grown:
                break
        subgraphs.append(Subgraph(tuple(region), tuple(order), width))
    return subgraphs


def _expand(table, scope, target_scope):
    """Reshape a factor table for broadcasting over a superset scope.

    Both scopes are sorted, so axis order is preserved and padding with
    size-1 axes suffices.
    """
    members = set(scope)
    shape = [2 if v in members else 1 for v in target_scope]
    return table.reshape(shape)


def optimize_subgraph(problem: IsingProblem, config: SpinConfiguration,
                      sub: Subgraph, width_cap: int | None = None) -> SpinConfiguration:
    """Exactly minimize a subgraph's spins with the rest held fixed.

    Runs min-sum variable elimination along ``sub.elimination_order``;
    table sizes stay within 2^(width+1). If the incoming assignment is
    already conditionally optimal the configuration is returned unchanged
    (fresh energy), so the operation is idempotent and never increases
    the energy.
    """
    if width_cap is not None and sub.width > width_cap:
        raise WidthError(
            f"subgraph width {sub.width} exceeds cap {width_cap}; re-decompose"
        )
    spins = np.asarray(config.spins)
    if spins.shape[0] != problem.vertex_count:
        raise InputError(
            f"configuration of length {spins.shape[0]} does not fit the problem"
        )
    inside = set(sub.vertices)
    for v in sub.vertices:
        if not (0 <= v < problem.vertex_count):
            raise IndexError(f"subgraph vertex {v} out of range")

    # Factors: scope is a sorted tuple of variables, table axis k indexes
    # scope[k] with 0 -> spin -1, 1 -> spin +1.
    factors = []
    for v in sub.vertices:
        unary = problem._h_vec[v]
        for b, w in zip(problem._nbr[v].tolist(), problem._nbr_w[v].tolist()):
            if b not in inside:
                unary += w * float(spins[b])
        if unary != 0.0:
            factors.append(((v,), np.array([-unary, unary])))
    for (a, b), w in problem.J.items():
        if a in inside and b in inside:
            # s_a * s_b is +1 on the diagonal, -1 off it.
            factors.append(((a, b), np.array([[w, -w], [-w, w]])))

    eliminations = []
    for v in sub.elimination_order:
        touching = [f for f in factors if v in f[0]]
        factors = [f for f in factors if v not in f[0]]
        union = tuple(sorted(set().union(*(f[0] for f in touching)) if touching else {v}))
        joint = np.zeros([2] * len(union))
        for scope, table in touching:
            joint = joint + _expand(table, scope, union)
        axis = union.index(v)
        down = np.take(joint, 0, axis=axis)
        up = np.take(joint, 1, axis=axis)
        # Ties resolve to +1, which also fixes the zero-field convention.
        choice = (up <= down).astype(np.intp)
        value = np.minimum(down, up)
        rest = tuple(u for u in union if u != v)
        eliminations.append((v, rest, choice))
        if rest:
            factors.append((rest, value))
        # A scalar remainder is a constant; it cannot influence the argmin.

    assignment = {}
    for v, rest, choice in reversed(eliminations):
        idx = tuple(assignment[u] for u in rest)
        assignment[v] = int(choice[idx])

    new_spins = spins.copy()
    for v, bit in assignment.items():
        new_spins[v] = 2 * bit - 1
    return problem.configuration(new_spins)


def builtin_opt_pp(problem: IsingProblem, runset: RunSet,
                   width_cap: int = DEFAULT_WIDTH_CAP,
                   repeat_until_stable: bool = False) -> RunSet:
    """Improve every run by exact subgraph minimization.

    Subgraphs come from ``decompose_low_treewidth`` and are processed in
    order; later subgraphs see the updates of earlier ones. Runs are
    processed independently. By default each run gets a single pass;
    ``repeat_until_stable`` keeps sweeping a run until a full pass stops
    lowering its energy.
    """
    subgraphs = decompose_low_treewidth(problem, width_cap)
    out = []
    for run in runset:
        config = run
        while True:
            before = config.energy
            for sub in subgraphs:
                config = optimize_subgraph(problem, config, sub, width_cap)
            if not repeat_until_stable or config.energy >= before:
                break
        out.append(config)
    prov = runset.provenance
    return RunSet(
        runs=tuple(out),
        problem_id=runset.problem_id,
        provenance=Provenance(
            sampler="builtin_opt_pp",
            params={"width_cap": width_cap, "source": {
                "sampler": prov.sampler, "params": prov.params, "seed": prov.seed,
            }},
            seed=prov.seed,
        ),
    )


@dataclass(frozen=True, slots=True)
class FixedAssignment:
    """Result of freezing high-agreement vertices.

    ``assignments`` maps frozen vertices (original ids) to spins;
    ``free_vertices`` lists the remaining ids in ascending order, and
    index i of ``reduced_problem`` corresponds to ``free_vertices[i]``.
    ``offset`` is the energy carried by the frozen part, so for any spin
    vector s on the free vertices:
    full_energy(assemble(s)) = reduced_energy(s) + offset.
    """

    assignments: dict
    free_vertices: tuple
    reduced_problem: IsingProblem
    offset: float

    def assemble(self, reduced_spins) -> np.ndarray:
        n = len(self.assignments) + len(self.free_vertices)
        full = np.zeros(n, dtype=np.int8)
        for v, s in self.assignments.items():
            full[v] = s
        for i, v in enumerate(self.free_vertices):
            full[v] = reduced_spins[i]
        return full


def persistence_fix(problem: IsingProblem, runset: RunSet,
                    threshold: float = DEFAULT_PERSISTENCE_THRESHOLD) -> FixedAssignment:
    """Freeze every vertex on which at least ``threshold`` of runs agree.

    The threshold must exceed 0.5 (so at most one value can qualify) and
    be at most 1. Frozen couplings fold into the free vertices' linear
    terms: h'[a] = h[a] + sum over frozen neighbors b of J[a,b] * s[b].
    """
    if not (0.5 < threshold <= 1.0):
        raise ParameterError(
            f"threshold must lie in (0.5, 1], got {threshold}"
        )
    if len(runset) < 2:
        raise InputError("persistence_fix needs at least two runs")
    spins = runset.spins_matrix()
    if spins.shape[1] != problem.vertex_count:
        raise InputError("runs do not fit the problem")
    num = spins.shape[0]
    plus = np.count_nonzero(spins == 1, axis=0)
    frac_plus = plus / num
    fix_plus = frac_plus >= threshold
    fix_minus = (1.0 - frac_plus) >= threshold

    assignments = {}
    for v in np.nonzero(fix_plus)[0].tolist():
        assignments[v] = 1
    for v in np.nonzero(fix_minus)[0].tolist():
        assignments[v] = -1
    free = tuple(v for v in range(problem.vertex_count) if v not in assignments)
    index_of = {v: i for i, v in enumerate(free)}

    h_reduced = {}
    for i, v in enumerate(free):
        hv = problem._h_vec[v]
        for b, w in zip(problem._nbr[v].tolist(), problem._nbr_w[v].tolist()):
            if b in assignments:
                hv += w * assignments[b]
        if hv != 0.0:
            h_reduced[i] = float(hv)
    j_reduced = {}
    offset = 0.0
    for (a, b), w in sorted(problem.J.items()):
        if a in assignments and b in assignments:
            offset += w * assignments[a] * assignments[b]
        elif a in index_of and b in index_of:
            j_reduced[(index_of[a], index_of[b])] = w
    for v, s in assignments.items():
        offset += problem._h_vec[v] * s

    reduced = IsingProblem(len(free), h_reduced, j_reduced)
    return FixedAssignment(assignments, free, reduced, float(offset))


def sample_persistence(problem: IsingProblem, sampler, params: SamplerParams,
                       threshold: float = DEFAULT_PERSISTENCE_THRESHOLD,
                       rounds: int = DEFAULT_PERSISTENCE_ROUNDS,
                       initial_runs: RunSet | None = None) -> SpinConfiguration:
    """Iterate {sample, freeze, reduce} and return the assembled best run.

    ``sampler`` is any callable of (problem, params) -> RunSet. Round r
    re-seeds it with a sub-seed derived from (params.seed, r); when
    ``initial_runs`` is given it serves as round 0's sample. Freezing
    happens between rounds; the final round's best run fills the
    remaining free vertices. Once every vertex is frozen the remaining
    rounds change nothing.
    """
    if rounds < 1:
        raise ParameterError(f"rounds must be positive, got {rounds}")
    fixed = {}
    free_map = list(range(problem.vertex_count))
    current = problem
    best_free = None
    for r in range(rounds):
        if not free_map:
            break
        if r == 0 and initial_runs is not None:
            runset = initial_runs
            if len(runset[0]) != current.vertex_count:
                raise InputError("initial_runs do not fit the problem")
        else:
            round_params = replace(params, seed=derive_seed(params.seed, "persistence", r))
            runset = sampler(current, round_params)
        if r == rounds - 1:
            best_free = runset.best()
            break
        fa = persistence_fix(current, runset, threshold)
        for v, s in fa.assignments.items():
            fixed[free_map[v]] = s
        free_map = [free_map[v] for v in fa.free_vertices]
        current = fa.reduced_problem

    full = np.zeros(problem.vertex_count, dtype=np.int8)
    for v, s in fixed.items():
        full[v] = s
    for i, v in enumerate(free_map):
        full[v] = best_free.spins[i]
    return problem.configuration(full)
