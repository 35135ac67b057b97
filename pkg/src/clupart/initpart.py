"""Initial partitioning of the coarsest graph.

k-way splits come from recursive bisection: each level halves the
block count (the heavier side takes the extra block when k is odd)
with proportional weight targets. One bisection runs its own small
multilevel: cluster-contract the subgraph, grow a greedy bipartition
on its coarsest level, then refine back up under per-side caps.
"""

import heapq
import random
from dataclasses import dataclass

from . import lpa
from .graph import Graph, Partition, edge_cut, project
from .multilevel import (STAGNATION_FRACTION, _ceil_snapped, contract,
                         derive_seed)


@dataclass
class BisectionTask:
    """One pending split: the subgraph, its nodes' original ids, how
    many blocks it still owes, and the first output block id."""
    graph: Graph
    back_map: list
    block_count: int
    first_block: int
    seed: int


def extract_subgraph(g, nodes):
    """Induced subgraph on `nodes`; new ids follow their order."""
    local = [-1] * g.num_nodes
    for i, v in enumerate(nodes):
        local[v] = i
    edges = []
    adjacency, eweights = g.adjacency, g.edge_weights
    for i, v in enumerate(nodes):
        for j in range(g.offsets[v], g.offsets[v + 1]):
            u = adjacency[j]
            lu = local[u]
            if lu > i:
                edges.append((i, lu, eweights[j]))
    weights = [g.node_weights[v] for v in nodes]
    return Graph.from_edges(len(nodes), edges, weights), list(nodes)


def greedy_bipartition(g, weight_target, size_cap, seed, restarts=4,
                       grow_cap=None):
    """Region growing: block 0 starts at one node and repeatedly
    absorbs the frontier node with the strongest connection to it until
    its weight reaches weight_target, skipping nodes that would push it
    past grow_cap; everything else is block 1. When the frontier
    empties early the growth reseeds at an unassigned node. Restarts
    from distinct start nodes keep the best result by (cut, heavier
    side weight)."""
    n = g.num_nodes
    rng = random.Random(seed)
    order = list(range(n))
    rng.shuffle(order)
    total = g.total_node_weight
    if grow_cap is None:
        grow_cap = size_cap
    best_key = None
    best_labels = None
    for s in order[:min(restarts, n)]:
        labels = _grow_region(g, s, weight_target, grow_cap, order)
        w0 = sum(g.node_weights[v] for v in range(n) if labels[v] == 0)
        key = (edge_cut(g, labels), max(w0, total - w0))
        if best_key is None or key < best_key:
            best_key = key
            best_labels = labels
    return Partition.from_labels(g, best_labels, 2, size_cap)


def _grow_region(g, start, target, cap, reseed_order):
    n = g.num_nodes
    nw = g.node_weights
    offsets, adjacency, eweights = g.offsets, g.adjacency, g.edge_weights
    labels = [1] * n
    conn = [0] * n
    heap = []
    grown = 0
    taken = 0

    def take(v):
        nonlocal grown, taken
        labels[v] = 0
        grown += nw[v]
        taken += 1
        for i in range(offsets[v], offsets[v + 1]):
            u = adjacency[i]
            if labels[u]:
                conn[u] += eweights[i]
                heapq.heappush(heap, (-conn[u], u))

    take(start)
    reseed_at = 0
    while grown < target and taken < n:
        v = -1
        while heap:
            c, u = heapq.heappop(heap)
            # grown only rises, so a node skipped for weight never
            # fits later and its stale entries can be dropped
            if labels[u] and -c == conn[u] and grown + nw[u] <= cap:
                v = u
                break
        if v < 0:
            # frontier exhausted (or nothing in it fits); continue
            # growing elsewhere
            while reseed_at < n and (not labels[reseed_order[reseed_at]]
                                     or grown + nw[reseed_order[reseed_at]] > cap):
                reseed_at += 1
            if reseed_at == n:
                break
            v = reseed_order[reseed_at]
        take(v)
    return labels


def _mini_coarsen(g, cap_budget, cfg, seed):
    """Coarsening loop for one bisection: no ensembles, fixed small
    threshold, cluster bound tied to the tighter side cap."""
    levels = [g]
    mappings = []
    threshold = max(120, g.num_nodes // 120)
    li = 0
    while levels[-1].num_nodes >= threshold:
        cur = levels[-1]
        bound = max(cur.max_node_weight,
                    int(cap_budget // cfg.cluster_factor))
        params = lpa.LpaParams(
            size_bound=bound,
            max_rounds=cfg.effective_coarsen_rounds,
            ordering=cfg.ordering,
            tie_breaking=cfg.tie_breaking,
            convergence_fraction=cfg.convergence_fraction,
            seed=derive_seed(seed, li))
        clu = lpa.cluster(cur, params)
        if cur.num_nodes - clu.num_clusters < STAGNATION_FRACTION * cur.num_nodes:
            break
        coarse, mapping = contract(cur, clu)
        levels.append(coarse)
        mappings.append(mapping)
        li += 1
    return levels, mappings


def _refine_two_blocks(g, p, bounds, cfg, seed):
    # deterministic ties here: stay-preference keeps balanced splits
    # from eroding through zero-gain moves
    params = lpa.LpaParams(
        size_bound=max(bounds),
        max_rounds=cfg.lpa_rounds,
        ordering=cfg.ordering,
        tie_breaking="lowest_block_id",
        active_nodes=True,
        convergence_fraction=cfg.convergence_fraction,
        seed=seed)
    engine = lpa.LabelPropagation.for_refinement(
        g, p, params, block_bounds=bounds)
    engine.run()
    return Partition(engine.labels, 2, max(bounds), engine.cluster_weights)


def _split_once(task, l_max, cfg):
    """Bisect the task's subgraph; returns the two node id lists."""
    sub = task.graph
    k1 = (task.block_count + 1) // 2
    k2 = task.block_count - k1
    total = sub.total_node_weight
    target1 = total * k1 / task.block_count
    max_c = sub.max_node_weight
    cap1 = min(k1 * l_max,
               _ceil_snapped((1.0 + cfg.epsilon) * target1) + max_c)
    cap2 = min(k2 * l_max,
               _ceil_snapped((1.0 + cfg.epsilon) * (total - target1)) + max_c)
    bounds = [cap1, cap2]

    levels, mappings = _mini_coarsen(sub, min(cap1, cap2), cfg,
                                     derive_seed(task.seed, 5))
    p = greedy_bipartition(levels[-1], target1, max(bounds),
                           derive_seed(task.seed, 7), grow_cap=cap1)
    p = _refine_two_blocks(levels[-1], p, bounds, cfg,
                           derive_seed(task.seed, 9, len(levels)))
    for fi in range(len(levels) - 2, -1, -1):
        p = project(p, mappings[fi])
        p = _refine_two_blocks(levels[fi], p, bounds, cfg,
                               derive_seed(task.seed, 9, fi))
    # best effort only: coarse node granularity can make the caps
    # unattainable here; the finest-level repair owns the guarantee
    labels, _ = lpa.rebalance_with_bounds(
        sub, list(p.labels), 2, bounds, list(p.block_weights),
        strict=False)
    side0 = [v for v in range(sub.num_nodes) if labels[v] == 0]
    side1 = [v for v in range(sub.num_nodes) if labels[v] == 1]
    return side0, side1


def initial_partition(g, k, l_max, cfg):
    """Partition the (coarsest) graph into k blocks under l_max by
    recursive bisection. Block ids are assigned so that the first
    ceil(k/2) blocks cover one side of the top split."""
    labels = [0] * g.num_nodes
    tasks = [BisectionTask(g, list(range(g.num_nodes)), k, 0,
                           derive_seed(cfg.seed, 17))]
    while tasks:
        task = tasks.pop()
        if task.block_count == 1 or task.graph.num_nodes == 0:
            for v in task.back_map:
                labels[v] = task.first_block
            continue
        side0, side1 = _split_once(task, l_max, cfg)
        k1 = (task.block_count + 1) // 2
        k2 = task.block_count - k1
        sub0, back0 = extract_subgraph(task.graph, side0)
        sub1, back1 = extract_subgraph(task.graph, side1)
        orig0 = [task.back_map[v] for v in back0]
        orig1 = [task.back_map[v] for v in back1]
        tasks.append(BisectionTask(sub0, orig0, k1, task.first_block,
                                   derive_seed(task.seed, 2)))
        tasks.append(BisectionTask(sub1, orig1, k2,
                                   task.first_block + k1,
                                   derive_seed(task.seed, 3)))
    return Partition.from_labels(g, labels, k, l_max)
