"""Overlay of several clusterings for ensemble coarsening.

Two nodes share an overlay cluster iff they share a cluster in every
input clustering. Built one clustering at a time: each pass maps the
pair (accumulated id, next clustering's id) of every node to a fresh
consecutive id through a hash table, in node id order.
"""

from .graph import Clustering


def overlay(g, clusterings):
    """Intersect an ordered list of clusterings over g's nodes."""
    if not clusterings:
        raise ValueError("need at least one clustering")
    n = g.num_nodes
    out = [0] * n
    for c in clusterings:
        labels = c.labels if hasattr(c, "labels") else c
        if len(labels) != n:
            raise ValueError("clustering size does not match graph")
        counter = 0
        pair_ids = {}
        for v in range(n):
            pair = (out[v], labels[v])
            mapped = pair_ids.get(pair)
            if mapped is None:
                mapped = counter
                pair_ids[pair] = mapped
                counter += 1
            out[v] = mapped
    return Clustering.from_labels(g, out)


def ensemble_size(k):
    """Number of base clusterings to overlay for a k-way partition."""
    if k < 16:
        return 18
    if k <= 32:
        return 7
    return 3
