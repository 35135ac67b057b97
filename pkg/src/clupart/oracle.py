"""Exhaustive minimum cut partitioning for tiny instances.

The search enumerates canonical assignments only (node 0 in block 0,
each new block id at most one above the largest used so far), so block
relabelings are never visited twice. Within equal cut the first hit in
enumeration order wins, which is the lexicographically smallest
canonical label vector.
"""

from .graph import InfeasibleError, Partition
from .multilevel import compute_lmax

MAX_NODES = 12
MAX_BLOCKS = 4


def brute_force_min_cut(g, k, epsilon):
    """Optimal feasible partition by exhaustive search.

    Returns (partition, cut). Instances beyond 12 nodes or 4 blocks
    are refused; raises InfeasibleError when no assignment satisfies
    the weight bound.
    """
    n = g.num_nodes
    if n > MAX_NODES or k > MAX_BLOCKS:
        raise ValueError(
            f"instance too large for exhaustive search "
            f"(n <= {MAX_NODES}, k <= {MAX_BLOCKS})")
    if k < 1:
        raise ValueError("k must be positive")
    l_max = compute_lmax(g, k, epsilon)
    nw = g.node_weights
    offsets, adjacency, eweights = g.offsets, g.adjacency, g.edge_weights

    labels = [0] * n
    weights = [0] * k
    best_labels = None
    best_cut = None

    def place(v, used, cut):
        nonlocal best_labels, best_cut
        if best_cut is not None and cut >= best_cut:
            return
        if v == n:
            best_labels = list(labels)
            best_cut = cut
            return
        nwv = nw[v]
        # cut contribution of v toward already placed neighbors
        added = [0] * min(used + 1, k)
        total_back = 0
        for i in range(offsets[v], offsets[v + 1]):
            u = adjacency[i]
            if u < v:
                total_back += eweights[i]
                added[labels[u]] += eweights[i]
        for b in range(min(used + 1, k)):
            if weights[b] + nwv > l_max:
                continue
            labels[v] = b
            weights[b] += nwv
            place(v + 1, max(used, b + 1), cut + total_back - added[b])
            weights[b] -= nwv
        labels[v] = 0

    place(0, 0, 0)
    if best_labels is None:
        raise InfeasibleError("no feasible assignment exists")
    return Partition.from_labels(g, best_labels, k, l_max), best_cut
