"""Multilevel driver: coarsening by cluster contraction, initial
partitioning, and refinement during uncoarsening, with optional
iterated V-cycles."""

import math
import time
from dataclasses import asdict, dataclass, field

from . import ensemble as _ensemble
from . import lpa
from .graph import Partition, contract, edge_cut, max_imbalance, project

# a clustering pass must shrink the node count by at least this
# fraction, otherwise coarsening stops
STAGNATION_FRACTION = 0.05


def _ceil_snapped(x):
    # (1 + eps) * total / k can land a hair above an exact integer in
    # floats; snap before ceiling so bounds stay exact
    r = round(x)
    if abs(x - r) < 1e-9:
        return int(r)
    return math.ceil(x)


_MASK64 = (1 << 64) - 1


def _mix64(h):
    # splitmix64 finalizer; full avalanche so nearby inputs do not
    # produce related outputs
    h &= _MASK64
    h ^= h >> 30
    h = (h * 0xBF58476D1CE4E5B9) & _MASK64
    h ^= h >> 27
    h = (h * 0x94D049BB133111EB) & _MASK64
    h ^= h >> 31
    return h


def derive_seed(seed, *salts):
    """Stable child seed from a master seed and integer salts.

    Each component is avalanched before the next is folded in, so distinct
    (seed, salts) tuples land in unrelated streams; a plain xor/multiply
    chain made seed 1 level 0 collide with seed 0 level 1.
    """
    h = _mix64(seed ^ 0x9E3779B97F4A7C15)
    for s in salts:
        h = _mix64(h + 0x9E3779B97F4A7C15 + (s & _MASK64))
    return h


def compute_lmax(g, k, epsilon):
    """Block weight bound: ceil((1 + epsilon) c(V) / k) + max node
    weight. The additive term keeps single-node blocks feasible for
    any weight distribution."""
    ideal = (1.0 + epsilon) * g.total_node_weight / k
    return _ceil_snapped(ideal) + g.max_node_weight


def compute_cluster_bound(l_max, cluster_factor, g):
    """Cluster size cap during coarsening: l_max / cluster_factor,
    floored, but never below the heaviest node."""
    return max(g.max_node_weight, int(l_max // cluster_factor))


def coarsening_threshold(n, k):
    """Coarsening continues while the level has at least
    max(60 k, n / (60 k)) nodes, n the input node count."""
    return max(60 * k, n // (60 * k))


def level_imbalance(delta, q, level):
    """Extra imbalance allowed while refining level `level` of a
    q-level hierarchy during the first V-cycle: delta / (q - level + 1),
    and exactly zero at the finest level."""
    if not 1 <= level <= q:
        raise ValueError(f"level {level} outside 1..{q}")
    if level == 1:
        return 0.0
    return delta / (q - level + 1)


class Hierarchy:
    """Coarsening result: levels[0] is the input graph, mappings[i]
    sends nodes of levels[i] to nodes of levels[i + 1]."""

    __slots__ = ("levels", "mappings")

    def __init__(self, levels, mappings):
        self.levels = levels
        self.mappings = mappings

    @property
    def num_levels(self):
        return len(self.levels)

    @property
    def coarsest(self):
        return self.levels[-1]

    def __repr__(self):
        sizes = "->".join(str(g.num_nodes) for g in self.levels)
        return f"Hierarchy({sizes})"


@dataclass
class PartitionConfig:
    """Settings for one partitioning run.

    lpa_rounds caps refinement rounds per level; coarsen_rounds caps
    clustering rounds and falls back to lpa_rounds when None. delta is
    the total extra imbalance spent across the coarse levels of the
    first V-cycle (0 disables it). active_coarsening switches the
    coarsening clustering to the active-node queue; refinement always
    uses it.
    """
    k: int
    epsilon: float = 0.03
    lpa_rounds: int = 10
    coarsen_rounds: int | None = None
    cluster_factor: int = 18
    delta: float = 0.0
    vcycles: int = 1
    ensemble: bool = False
    active_coarsening: bool = False
    ordering: str = "degree"
    tie_breaking: str = "random"
    convergence_fraction: float = 0.05
    seed: int = 0
    preset: str | None = None

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be at least 1")
        if self.epsilon < 0:
            raise ValueError("epsilon must be nonnegative")
        if self.cluster_factor < 1:
            raise ValueError("cluster_factor must be at least 1")
        if self.vcycles < 1:
            raise ValueError("vcycles must be at least 1")
        if self.delta < 0:
            raise ValueError("delta must be nonnegative")
        if self.ordering == "degree_increasing":
            self.ordering = "degree"
        if self.ordering not in lpa.ORDERINGS:
            raise ValueError(f"unknown ordering {self.ordering!r}")
        if self.tie_breaking not in lpa.TIE_MODES:
            raise ValueError(f"unknown tie mode {self.tie_breaking!r}")

    @property
    def effective_coarsen_rounds(self):
        return (self.lpa_rounds if self.coarsen_rounds is None
                else self.coarsen_rounds)


@dataclass
class CycleStats:
    cut: int
    imbalance: float
    feasible: bool
    coarsen_seconds: float
    initial_seconds: float
    uncoarsen_seconds: float
    level_nodes: list
    level_edges: list


@dataclass
class PartitionReport:
    k: int
    epsilon: float
    l_max: int
    seed: int
    cut: int = 0
    imbalance: float = 0.0
    feasible: bool = False
    block_weights: list = field(default_factory=list)
    cycles: list = field(default_factory=list)
    total_seconds: float = 0.0
    config: dict = field(default_factory=dict)

    def to_dict(self):
        return asdict(self)


def _clustering_params(cfg, bound, cons, seed):
    return lpa.LpaParams(
        size_bound=bound,
        max_rounds=cfg.effective_coarsen_rounds,
        ordering=cfg.ordering,
        tie_breaking=cfg.tie_breaking,
        active_nodes=cfg.active_coarsening,
        constraint_partition=cons,
        convergence_fraction=cfg.convergence_fraction,
        seed=seed)


def coarsen(g, cfg, constraint=None):
    """Cluster and contract until the level drops below the size
    threshold or clustering stagnates.

    With a constraint partition every cluster stays inside one block,
    so cut edges are never contracted; the returned constraint labels
    then describe the same partition on the coarsest graph. Returns
    (hierarchy, coarse constraint labels or None).
    """
    l_max = compute_lmax(g, cfg.k, cfg.epsilon)
    threshold = coarsening_threshold(g.num_nodes, cfg.k)
    levels = [g]
    mappings = []
    cons = list(constraint) if constraint is not None else None
    base_runs = _ensemble.ensemble_size(cfg.k) if cfg.ensemble else 1
    level_idx = 0
    while levels[-1].num_nodes >= threshold:
        cur = levels[-1]
        bound = compute_cluster_bound(l_max, cfg.cluster_factor, cur)
        if cfg.ensemble:
            runs = []
            for j in range(base_runs):
                params = _clustering_params(
                    cfg, bound, cons, derive_seed(cfg.seed, 11, level_idx, j))
                runs.append(lpa.cluster(cur, params))
            clu = _ensemble.overlay(cur, runs)
        else:
            params = _clustering_params(
                cfg, bound, cons, derive_seed(cfg.seed, 11, level_idx, 0))
            clu = lpa.cluster(cur, params)
        shrink = cur.num_nodes - clu.num_clusters
        if shrink < STAGNATION_FRACTION * cur.num_nodes:
            break
        coarse, mapping = contract(cur, clu)
        levels.append(coarse)
        mappings.append(mapping)
        if cons is not None:
            coarse_cons = [0] * coarse.num_nodes
            for v, c in enumerate(mapping):
                coarse_cons[c] = cons[v]
            cons = coarse_cons
        level_idx += 1
    return Hierarchy(levels, mappings), cons


def _refine_params(cfg, bound, seed):
    return lpa.LpaParams(
        size_bound=bound,
        max_rounds=cfg.lpa_rounds,
        ordering=cfg.ordering,
        tie_breaking=cfg.tie_breaking,
        active_nodes=True,
        convergence_fraction=cfg.convergence_fraction,
        seed=seed)


def uncoarsen(h, coarse_partition, cfg, first_cycle=True, cycle=0):
    """Project the coarsest partition down level by level, refining at
    each level; the finest level enforces the unrelaxed bound and is
    repaired if refinement alone cannot reach it."""
    g0 = h.levels[0]
    l_max = compute_lmax(g0, cfg.k, cfg.epsilon)
    q = h.num_levels
    delta = cfg.delta if first_cycle else 0.0
    p = coarse_partition
    if q == 1:
        p = Partition(list(p.labels), p.k, l_max, list(p.block_weights))
        p = lpa.refine(g0, p, _refine_params(
            cfg, l_max, derive_seed(cfg.seed, 13, cycle, 0)))
    else:
        for fi in range(q - 2, -1, -1):
            p = project(p, h.mappings[fi])
            level = fi + 1  # 1-based, finest is 1
            eps_hat = level_imbalance(delta, q, level)
            bound = (compute_lmax(g0, cfg.k, cfg.epsilon + eps_hat)
                     if eps_hat > 0 else l_max)
            p = Partition(p.labels, p.k, bound, p.block_weights)
            p = lpa.refine(h.levels[fi], p, _refine_params(
                cfg, bound, derive_seed(cfg.seed, 13, cycle, level)))
    p = Partition(p.labels, p.k, l_max, p.block_weights)
    if not p.is_feasible():
        p = lpa.rebalance(g0, p)
    return p


def partition(g, cfg):
    """Partition g into cfg.k blocks. Returns (partition, report).

    Runs cfg.vcycles V-cycles; cycles after the first coarsen inside
    the blocks of the previous result and can only keep or lower the
    cut. The best feasible result wins, ties by lower imbalance.
    """
    if g.num_nodes == 0:
        raise ValueError("cannot partition the empty graph")
    from .initpart import initial_partition

    l_max = compute_lmax(g, cfg.k, cfg.epsilon)
    report = PartitionReport(k=cfg.k, epsilon=cfg.epsilon, l_max=l_max,
                             seed=cfg.seed, config=asdict(cfg))
    best = None
    best_key = None
    current = None
    t_run = time.perf_counter()
    for ci in range(cfg.vcycles):
        t0 = time.perf_counter()
        constraint = current.labels if current is not None else None
        h, coarse_cons = coarsen(g, cfg, constraint)
        t1 = time.perf_counter()
        if ci == 0:
            eps_hat = level_imbalance(cfg.delta, h.num_levels, h.num_levels)
            bound = (compute_lmax(g, cfg.k, cfg.epsilon + eps_hat)
                     if eps_hat > 0 else l_max)
            coarse_p = initial_partition(h.coarsest, cfg.k, bound, cfg)
        else:
            coarse_p = Partition.from_labels(
                h.coarsest, coarse_cons, cfg.k, l_max)
        t2 = time.perf_counter()
        p = uncoarsen(h, coarse_p, cfg, first_cycle=(ci == 0), cycle=ci)
        t3 = time.perf_counter()
        cut = edge_cut(g, p)
        report.cycles.append(CycleStats(
            cut=cut,
            imbalance=max_imbalance(g, p, cfg.k),
            feasible=p.is_feasible(),
            coarsen_seconds=t1 - t0,
            initial_seconds=t2 - t1,
            uncoarsen_seconds=t3 - t2,
            level_nodes=[lv.num_nodes for lv in h.levels],
            level_edges=[lv.num_edges for lv in h.levels]))
        current = p
        key = (not p.is_feasible(), cut, max_imbalance(g, p, cfg.k))
        if best_key is None or key < best_key:
            best = p
            best_key = key
    report.cut = edge_cut(g, best)
    report.block_weights = list(best.block_weights)
    report.imbalance = max_imbalance(g, best, cfg.k)
    report.feasible = best.is_feasible()
    report.total_seconds = time.perf_counter() - t_run
    return best, report
