"""Size-constrained label propagation.

One engine drives both uses of the algorithm: clustering (nodes start
as singletons and merge under a cluster size bound) and refinement
(nodes move between the k blocks of an existing partition under the
block weight bound). A visited node joins the eligible cluster with
the strongest total edge weight to it; its current cluster always
competes at its current strength.
"""

import random
from collections import deque
from dataclasses import dataclass

from .graph import Clustering, InfeasibleError, Partition

ORDERINGS = ("random", "degree")
TIE_MODES = ("random", "lowest_block_id")


def order_nodes(g, mode, seed=0):
    """Visit order: fresh permutation, or stable sort by increasing
    degree with ties by node id."""
    if mode == "random":
        order = list(range(g.num_nodes))
        random.Random(seed).shuffle(order)
        return order
    if mode in ("degree", "degree_increasing"):
        offsets = g.offsets
        return sorted(range(g.num_nodes),
                      key=lambda v: offsets[v + 1] - offsets[v])
    raise ValueError(f"unknown ordering {mode!r}")


@dataclass
class LpaParams:
    """Knobs for one label propagation run.

    size_bound is the hard cap on cluster weight (block weight in
    refinement mode); float('inf') disables it. constraint_partition
    restricts moves to clusters inside the node's own block, which
    keeps every cluster within one block of that partition.
    """
    size_bound: int | float
    max_rounds: int = 10
    ordering: str = "random"
    tie_breaking: str = "random"
    active_nodes: bool = False
    constraint_partition: object = None
    convergence_fraction: float = 0.05
    seed: int = 0

    def __post_init__(self):
        if self.max_rounds < 0:
            raise ValueError("max_rounds must be >= 0")
        if self.ordering == "degree_increasing":
            self.ordering = "degree"
        if self.ordering not in ORDERINGS:
            raise ValueError(f"unknown ordering {self.ordering!r}")
        if self.tie_breaking not in TIE_MODES:
            raise ValueError(f"unknown tie mode {self.tie_breaking!r}")
        if not 0.0 <= self.convergence_fraction <= 1.0:
            raise ValueError("convergence_fraction must be in [0, 1]")


@dataclass
class RoundStats:
    """Work accounting for one round."""
    moves: int
    visited: int
    scanned: int          # adjacency entries read while deciding
    popped_degree: int    # degree sum of the nodes taken off the queue


class ActiveQueue:
    """Two FIFO queues with membership bits.

    current is drained this round; neighbors of movers land in next.
    After a round the roles swap.
    """

    __slots__ = ("current", "next", "in_current", "in_next")

    def __init__(self, n):
        self.current = deque()
        self.next = deque()
        self.in_current = bytearray(n)
        self.in_next = bytearray(n)

    def seed_current(self, nodes):
        push = self.current.append
        bits = self.in_current
        for v in nodes:
            if not bits[v]:
                bits[v] = 1
                push(v)

    def push_next(self, v):
        if not self.in_next[v]:
            self.in_next[v] = 1
            self.next.append(v)

    def pop_current(self):
        v = self.current.popleft()
        self.in_current[v] = 0
        return v

    def swap(self):
        self.current, self.next = self.next, self.current
        self.in_current, self.in_next = self.in_next, self.in_current


class LabelPropagation:
    """Round-based propagation engine.

    Exposes run_round and decide so tests can drive rounds one at a
    time and audit the move rule on arbitrary nodes; decide never
    mutates state.
    """

    def __init__(self, g, params, labels, weights, bounds, refine_mode):
        self.g = g
        self.params = params
        self.labels = labels
        self.cluster_weights = weights
        self._bounds = bounds
        self._refine = refine_mode
        cp = params.constraint_partition
        self._constraint = getattr(cp, "labels", cp)
        self._det = params.tie_breaking == "lowest_block_id"
        self.rng = random.Random(params.seed)
        self._conn = [0] * len(bounds)
        self._touched = []
        self._order = list(range(g.num_nodes))
        self._shuffle_each_round = params.ordering == "random"
        if params.ordering == "degree":
            self._order = order_nodes(g, "degree")
            self._shuffle_each_round = False
        self.queue = None
        if params.active_nodes:
            if self._shuffle_each_round:
                self.rng.shuffle(self._order)
            self.queue = ActiveQueue(g.num_nodes)
            self.queue.seed_current(self._order)
        self.round_stats = []
        self.on_move = None

    @classmethod
    def for_clustering(cls, g, params):
        """Singleton start: cluster ids are node ids, so every label
        stays below num_nodes for the whole run."""
        if params.size_bound < g.max_node_weight:
            raise ValueError("size_bound below the heaviest node")
        labels = list(range(g.num_nodes))
        weights = list(g.node_weights)
        bounds = [params.size_bound] * g.num_nodes
        return cls(g, params, labels, weights, bounds, refine_mode=False)

    @classmethod
    def for_refinement(cls, g, partition, params, block_bounds=None):
        if block_bounds is None:
            block_bounds = [params.size_bound] * partition.k
        elif len(block_bounds) != partition.k:
            raise ValueError("one bound per block required")
        labels = list(partition.labels)
        weights = list(partition.block_weights)
        return cls(g, params, labels, weights, block_bounds,
                   refine_mode=True)

    def decide(self, v):
        """Apply the move rule to v. Returns (target, gain, scanned):
        the chosen cluster (possibly the current one), the connection
        delta target minus current, and the adjacency entries read."""
        g = self.g
        labels = self.labels
        conn = self._conn
        touched = self._touched
        adjacency = g.adjacency
        eweights = g.edge_weights
        start = g.offsets[v]
        end = g.offsets[v + 1]
        cons = self._constraint
        if cons is None:
            for i in range(start, end):
                l = labels[adjacency[i]]
                if conn[l] == 0:
                    touched.append(l)
                conn[l] += eweights[i]
        else:
            cv = cons[v]
            for i in range(start, end):
                u = adjacency[i]
                if cons[u] != cv:
                    continue
                l = labels[u]
                if conn[l] == 0:
                    touched.append(l)
                conn[l] += eweights[i]
        own = labels[v]
        own_conn = conn[own]
        nwv = g.node_weights[v]
        weights = self.cluster_weights
        bounds = self._bounds

        if self._refine and weights[own] > bounds[own]:
            # overloaded block: strongest eligible block other than the
            # own one, even when that raises the cut; stay if none fits
            best = own
            best_conn = own_conn
            cand = -1
            cand_conn = -1
            if self._det:
                for l in touched:
                    if l == own or weights[l] + nwv > bounds[l]:
                        continue
                    cl = conn[l]
                    if cl > cand_conn or (cl == cand_conn and l < cand):
                        cand = l
                        cand_conn = cl
            else:
                rnd = self.rng.random
                ties = 1
                for l in touched:
                    if l == own or weights[l] + nwv > bounds[l]:
                        continue
                    cl = conn[l]
                    if cl > cand_conn:
                        cand = l
                        cand_conn = cl
                        ties = 1
                    elif cl == cand_conn:
                        ties += 1
                        if rnd() * ties < 1.0:
                            cand = l
            if cand >= 0:
                best = cand
                best_conn = cand_conn
        elif self._det:
            best = own
            best_conn = own_conn
            for l in touched:
                if l == own:
                    continue
                cl = conn[l]
                if cl < best_conn or weights[l] + nwv > bounds[l]:
                    continue
                if cl > best_conn:
                    best = l
                    best_conn = cl
                elif best != own and l < best:
                    best = l
        else:
            best = own
            best_conn = own_conn
            rnd = self.rng.random
            ties = 1
            for l in touched:
                if l == own:
                    continue
                cl = conn[l]
                if cl < best_conn or weights[l] + nwv > bounds[l]:
                    continue
                if cl > best_conn:
                    best = l
                    best_conn = cl
                    ties = 1
                else:
                    ties += 1
                    if rnd() * ties < 1.0:
                        best = l
        for l in touched:
            conn[l] = 0
        touched.clear()
        return best, best_conn - own_conn, end - start

    def _apply_move(self, v, target, gain):
        labels = self.labels
        own = labels[v]
        nwv = self.g.node_weights[v]
        weights = self.cluster_weights
        weights[own] -= nwv
        weights[target] += nwv
        labels[v] = target
        q = self.queue
        if q is not None:
            g = self.g
            adjacency = g.adjacency
            in_next = q.in_next
            nxt = q.next
            for i in range(g.offsets[v], g.offsets[v + 1]):
                u = adjacency[i]
                if not in_next[u]:
                    in_next[u] = 1
                    nxt.append(u)
        if self.on_move is not None:
            self.on_move(v, own, target, gain)

    def run_round(self):
        """One full pass; returns its RoundStats."""
        if self.queue is not None:
            stats = self._round_over_queue()
        else:
            stats = self._round_over_order()
        self.round_stats.append(stats)
        return stats

    def _round_over_order(self):
        if self._shuffle_each_round:
            self.rng.shuffle(self._order)
        labels = self.labels
        offsets = self.g.offsets
        decide = self.decide
        moves = scanned = popped = 0
        for v in self._order:
            target, gain, sc = decide(v)
            scanned += sc
            popped += offsets[v + 1] - offsets[v]
            if target != labels[v]:
                self._apply_move(v, target, gain)
                moves += 1
        return RoundStats(moves, len(self._order), scanned, popped)

    def _round_over_queue(self):
        q = self.queue
        cur = q.current
        in_cur = q.in_current
        labels = self.labels
        offsets = self.g.offsets
        decide = self.decide
        moves = scanned = popped = visited = 0
        while cur:
            v = cur.popleft()
            in_cur[v] = 0
            visited += 1
            popped += offsets[v + 1] - offsets[v]
            target, gain, sc = decide(v)
            scanned += sc
            if target != labels[v]:
                self._apply_move(v, target, gain)
                moves += 1
        q.swap()
        return RoundStats(moves, visited, scanned, popped)

    def run(self):
        """Rounds until the limit, convergence (moves strictly below
        convergence_fraction of the node count), or an empty queue."""
        threshold = self.params.convergence_fraction * self.g.num_nodes
        for _ in range(self.params.max_rounds):
            stats = self.run_round()
            if stats.moves < threshold:
                break
            if self.queue is not None and not self.queue.current:
                break
        return self


def cluster(g, params, on_move=None):
    """Cluster g from singletons under params.size_bound.

    No cluster ever exceeds the bound; nodes that fit nowhere stay
    singletons. Identical inputs and seed give identical output.
    """
    engine = LabelPropagation.for_clustering(g, params)
    engine.on_move = on_move
    engine.run()
    labels = engine.labels
    weights = {}
    nw = g.node_weights
    for v, l in enumerate(labels):
        weights[l] = weights.get(l, 0) + nw[v]
    return Clustering(labels, weights)


def refine(g, p, params, on_move=None):
    """Move nodes between the k blocks of p under params.size_bound.

    The block count never grows; emptied blocks are allowed. Nodes in
    blocks over the bound move to their strongest eligible other block
    even at a cut increase; all other moves never increase the cut.
    """
    if params.size_bound != p.l_max:
        raise ValueError("size_bound must equal the partition's l_max")
    engine = LabelPropagation.for_refinement(g, p, params)
    engine.on_move = on_move
    engine.run()
    return Partition(engine.labels, p.k, p.l_max, engine.cluster_weights)


def rebalance(g, p):
    """Repair an infeasible partition by greedy single-node moves.

    While some block exceeds the bound, the member with the smallest
    cut increase moves to the lightest adjacent block that can take it,
    falling back to the globally lightest such block. Raises
    InfeasibleError when no repairing move exists.
    """
    labels, weights = rebalance_with_bounds(
        g, list(p.labels), p.k, [p.l_max] * p.k, list(p.block_weights))
    return Partition(labels, p.k, p.l_max, weights)


def rebalance_with_bounds(g, labels, k, bounds, weights=None, strict=True):
    """In-place repair against per-block bounds; returns (labels, weights).

    strict=False turns a dead end into a best-effort stop instead of an
    InfeasibleError: blocks whose excess cannot be shed are left as they
    are (coarse node weights can make exact bounds unreachable)."""
    nw = g.node_weights
    if weights is None:
        weights = [0] * k
        for v, b in enumerate(labels):
            weights[b] += nw[v]
    if all(weights[b] <= bounds[b] for b in range(k)):
        return labels, weights

    offsets, adjacency, eweights = g.offsets, g.adjacency, g.edge_weights
    block_nodes = [[] for _ in range(k)]
    for v, b in enumerate(labels):
        block_nodes[b].append(v)

    stuck = set()
    while True:
        live = [b for b in range(k) if b not in stuck]
        if not live:
            return labels, weights
        over = max(live, key=lambda b: (weights[b] - bounds[b], -b))
        if weights[over] <= bounds[over]:
            return labels, weights
        # drop members that moved away in earlier iterations
        block_nodes[over] = [v for v in block_nodes[over]
                             if labels[v] == over]
        best = None  # (cut increase, node, target)
        for v in block_nodes[over]:
            nwv = nw[v]
            if nwv == 0:
                continue  # moving weightless nodes repairs nothing
            conn = {}
            for i in range(offsets[v], offsets[v + 1]):
                l = labels[adjacency[i]]
                conn[l] = conn.get(l, 0) + eweights[i]
            target = None
            t_key = None
            for l in conn:
                if l == over or weights[l] + nwv > bounds[l]:
                    continue
                key = (weights[l], l)
                if t_key is None or key < t_key:
                    target = l
                    t_key = key
            if target is None:
                for l in range(k):
                    if l == over or weights[l] + nwv > bounds[l]:
                        continue
                    key = (weights[l], l)
                    if t_key is None or key < t_key:
                        target = l
                        t_key = key
            if target is None:
                continue
            increase = conn.get(over, 0) - conn.get(target, 0)
            if best is None or (increase, v) < best[:2]:
                best = (increase, v, target)
        if best is None:
            if strict:
                raise InfeasibleError(
                    f"block {over} exceeds its bound and no move fits")
            stuck.add(over)
            continue
        _, v, target = best
        labels[v] = target
        weights[over] -= nw[v]
        weights[target] += nw[v]
        block_nodes[target].append(v)
        # a shed block frees target headroom, so retry stuck ones
        stuck.clear()
