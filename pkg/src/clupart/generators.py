"""Deterministic graph generators for tests and benchmarks."""

import random
from dataclasses import dataclass

from .graph import Graph

MODELS = ("path", "cycle", "disjoint_cliques", "preferential_attachment")


@dataclass
class GenSpec:
    """Recipe for one generated graph.

    n is the node count (path, cycle, preferential_attachment);
    cliques/clique_size describe the disjoint_cliques model; degree is
    the attachment count per new node.
    """
    model: str
    n: int = 0
    cliques: int = 0
    clique_size: int = 0
    degree: int = 0
    seed: int = 0


def path_graph(n):
    return Graph.from_edges(n, [(v, v + 1) for v in range(n - 1)])


def cycle_graph(n):
    if n < 3:
        raise ValueError("cycle needs at least 3 nodes")
    edges = [(v, v + 1) for v in range(n - 1)] + [(n - 1, 0)]
    return Graph.from_edges(n, edges)


def disjoint_cliques(cliques, clique_size):
    """cliques blocks of clique_size pairwise adjacent nodes, no edges
    between blocks; nodes of clique i are consecutive ids."""
    edges = []
    for c in range(cliques):
        base = c * clique_size
        for a in range(clique_size):
            for b in range(a + 1, clique_size):
                edges.append((base + a, base + b))
    return Graph.from_edges(cliques * clique_size, edges)


def preferential_attachment(n, degree, seed=0):
    """Barabasi-Albert style graph: a degree-clique seed, then every
    new node attaches to `degree` distinct nodes drawn proportionally
    to current degree. Connected, heavy-tailed, deterministic per seed.
    """
    if degree < 1 or n <= degree:
        raise ValueError("need n > degree >= 1")
    rng = random.Random(seed)
    edges = []
    # one list entry per edge endpoint makes uniform draws
    # degree-proportional
    endpoints = []
    for a in range(degree):
        for b in range(a + 1, degree):
            edges.append((a, b))
            endpoints.append(a)
            endpoints.append(b)
    for v in range(degree, n):
        targets = set()
        while len(targets) < degree:
            if endpoints:
                targets.add(endpoints[rng.randrange(len(endpoints))])
            else:
                targets.add(rng.randrange(v))  # degree 1: bare seed node
        for u in sorted(targets):
            edges.append((u, v))
            endpoints.append(u)
            endpoints.append(v)
    return Graph.from_edges(n, edges)


def generate(spec):
    """Build the graph described by a GenSpec."""
    if spec.model == "path":
        return path_graph(spec.n)
    if spec.model == "cycle":
        return cycle_graph(spec.n)
    if spec.model == "disjoint_cliques":
        return disjoint_cliques(spec.cliques, spec.clique_size)
    if spec.model == "preferential_attachment":
        return preferential_attachment(spec.n, spec.degree, spec.seed)
    raise ValueError(f"unknown model {spec.model!r}")
