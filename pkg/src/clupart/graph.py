"""Graph core: compressed adjacency storage, METIS I/O, contraction, metrics.

All weights are nonnegative integers. Edge weights are strictly positive.
A Graph is treated as immutable once constructed; every operation that
changes structure returns a new Graph.
"""


class MetisFormatError(ValueError):
    """Raised for malformed or unsupported METIS graph files."""


class InfeasibleError(RuntimeError):
    """Raised when no assignment can satisfy the block weight bound."""


class Graph:
    """Undirected weighted graph in compressed adjacency form.

    offsets[v]:offsets[v+1] indexes the flat adjacency / edge_weights
    arrays. Every undirected edge is stored twice, once per direction,
    with identical weight. Neighbor lists are sorted by node id, so two
    graphs are equal iff their arrays are equal.
    """

    __slots__ = ("num_nodes", "num_edges", "offsets", "adjacency",
                 "edge_weights", "node_weights", "total_node_weight",
                 "max_node_weight")

    def __init__(self, offsets, adjacency, edge_weights, node_weights):
        self.num_nodes = len(node_weights)
        self.num_edges = len(adjacency) // 2
        self.offsets = offsets
        self.adjacency = adjacency
        self.edge_weights = edge_weights
        self.node_weights = node_weights
        self.total_node_weight = sum(node_weights)
        self.max_node_weight = max(node_weights, default=0)

    @classmethod
    def from_edges(cls, num_nodes, edges, node_weights=None):
        """Build a graph from (u, v) or (u, v, weight) tuples.

        Each undirected edge appears once in `edges`. Self loops and
        parallel edges are rejected.
        """
        if node_weights is None:
            node_weights = [1] * num_nodes
        elif len(node_weights) != num_nodes:
            raise ValueError("node_weights length does not match num_nodes")
        deg = [0] * num_nodes
        norm = []
        for e in edges:
            if len(e) == 2:
                u, v = e
                w = 1
            else:
                u, v, w = e
            if u == v:
                raise ValueError(f"self loop at node {u}")
            if not (0 <= u < num_nodes and 0 <= v < num_nodes):
                raise ValueError(f"edge ({u}, {v}) out of range")
            if w <= 0:
                raise ValueError(f"edge ({u}, {v}) has non-positive weight")
            norm.append((u, v, w))
            deg[u] += 1
            deg[v] += 1
        offsets = [0] * (num_nodes + 1)
        for v in range(num_nodes):
            offsets[v + 1] = offsets[v] + deg[v]
        pos = list(offsets[:num_nodes])
        adjacency = [0] * (2 * len(norm))
        weights = [0] * (2 * len(norm))
        for u, v, w in norm:
            adjacency[pos[u]] = v
            weights[pos[u]] = w
            pos[u] += 1
            adjacency[pos[v]] = u
            weights[pos[v]] = w
            pos[v] += 1
        _sort_neighbor_lists(offsets, adjacency, weights)
        for v in range(num_nodes):
            for i in range(offsets[v] + 1, offsets[v + 1]):
                if adjacency[i] == adjacency[i - 1]:
                    raise ValueError(
                        f"parallel edge ({v}, {adjacency[i]})")
        return cls(offsets, adjacency, weights, node_weights)

    def degree(self, v):
        return self.offsets[v + 1] - self.offsets[v]

    def neighbors(self, v):
        """Yield (neighbor, edge weight) pairs of v."""
        lo, hi = self.offsets[v], self.offsets[v + 1]
        return zip(self.adjacency[lo:hi], self.edge_weights[lo:hi])

    def total_edge_weight(self):
        return sum(self.edge_weights) // 2

    def validate(self):
        """Check structural invariants; raises ValueError on violation."""
        n = self.num_nodes
        if len(self.offsets) != n + 1 or self.offsets[0] != 0:
            raise ValueError("bad offsets array")
        if self.offsets[-1] != len(self.adjacency):
            raise ValueError("offsets do not cover adjacency")
        if len(self.edge_weights) != len(self.adjacency):
            raise ValueError("edge weight array length mismatch")
        if any(w < 0 for w in self.node_weights):
            raise ValueError("negative node weight")
        reverse = {}
        for v in range(n):
            prev = -1
            for i in range(self.offsets[v], self.offsets[v + 1]):
                u = self.adjacency[i]
                w = self.edge_weights[i]
                if u == v:
                    raise ValueError(f"self loop at {v}")
                if not 0 <= u < n:
                    raise ValueError(f"neighbor {u} out of range")
                if u <= prev:
                    raise ValueError(f"unsorted or duplicate neighbor at {v}")
                if w <= 0:
                    raise ValueError(f"non-positive edge weight at ({v}, {u})")
                prev = u
                reverse[(v, u)] = w
        for (v, u), w in reverse.items():
            if reverse.get((u, v)) != w:
                raise ValueError(f"asymmetric edge ({v}, {u})")

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.node_weights == other.node_weights
                and self.offsets == other.offsets
                and self.adjacency == other.adjacency
                and self.edge_weights == other.edge_weights)

    __hash__ = None  # mutable payload; not hashable

    def __repr__(self):
        return f"Graph(n={self.num_nodes}, m={self.num_edges})"


def _sort_neighbor_lists(offsets, adjacency, weights):
    # keeps (neighbor, weight) pairs together; per-node lists are short
    for v in range(len(offsets) - 1):
        lo, hi = offsets[v], offsets[v + 1]
        if hi - lo > 1:
            pairs = sorted(zip(adjacency[lo:hi], weights[lo:hi]))
            for j, (u, w) in enumerate(pairs):
                adjacency[lo + j] = u
                weights[lo + j] = w


class Clustering:
    """Assignment of nodes to clusters with per-cluster weight totals.

    Cluster ids may be sparse. block_weights maps cluster id to the sum
    of member node weights; only nonempty clusters appear.
    """

    __slots__ = ("labels", "block_weights")

    def __init__(self, labels, block_weights):
        self.labels = labels
        self.block_weights = block_weights

    @classmethod
    def from_labels(cls, g, labels):
        if len(labels) != g.num_nodes:
            raise ValueError("label array length does not match graph")
        weights = {}
        nw = g.node_weights
        for v, l in enumerate(labels):
            weights[l] = weights.get(l, 0) + nw[v]
        return cls(list(labels), weights)

    @property
    def num_clusters(self):
        return len(self.block_weights)

    def __repr__(self):
        return f"Clustering(n={len(self.labels)}, clusters={self.num_clusters})"


class Partition:
    """Assignment of nodes to blocks 0..k-1 under a weight bound l_max.

    block_weights is a dense list of length k; empty blocks carry
    weight 0. A partition is feasible iff every block weight is at
    most l_max.
    """

    __slots__ = ("labels", "k", "l_max", "block_weights")

    def __init__(self, labels, k, l_max, block_weights):
        self.labels = labels
        self.k = k
        self.l_max = l_max
        self.block_weights = block_weights

    @classmethod
    def from_labels(cls, g, labels, k, l_max):
        if len(labels) != g.num_nodes:
            raise ValueError("label array length does not match graph")
        weights = [0] * k
        nw = g.node_weights
        for v, b in enumerate(labels):
            if not 0 <= b < k:
                raise ValueError(f"block id {b} out of range for k={k}")
            weights[b] += nw[v]
        return cls(list(labels), k, l_max, weights)

    def is_feasible(self):
        return all(w <= self.l_max for w in self.block_weights)

    def copy(self):
        return Partition(list(self.labels), self.k, self.l_max,
                         list(self.block_weights))

    def __repr__(self):
        return (f"Partition(n={len(self.labels)}, k={self.k}, "
                f"l_max={self.l_max})")


def _labels_of(p):
    return p.labels if hasattr(p, "labels") else p


def edge_cut(g, p):
    """Total weight of edges between different blocks."""
    labels = _labels_of(p)
    offsets, adjacency, weights = g.offsets, g.adjacency, g.edge_weights
    cut2 = 0
    for v in range(g.num_nodes):
        lv = labels[v]
        for i in range(offsets[v], offsets[v + 1]):
            if labels[adjacency[i]] != lv:
                cut2 += weights[i]
    return cut2 // 2


def block_weights(g, p, k=None):
    """Per-block node weight totals as a dense list of length k."""
    labels = _labels_of(p)
    if k is None:
        k = max(labels) + 1 if labels else 0
    out = [0] * k
    nw = g.node_weights
    for v, b in enumerate(labels):
        out[b] += nw[v]
    return out


def max_imbalance(g, p, k=None):
    """max_i weight(V_i) * k / c(V) - 1; zero for a perfectly even split."""
    labels = _labels_of(p)
    if k is None:
        k = getattr(p, "k", None) or (max(labels) + 1)
    heaviest = max(block_weights(g, labels, k))
    return heaviest * k / g.total_node_weight - 1.0


def contract(g, clustering):
    """Collapse each cluster into one node.

    Returns (coarse graph, mapping) where mapping[v] is the coarse node
    of fine node v. Coarse ids are consecutive, numbered by first
    appearance in node id order. Intra-cluster edges vanish; multi-edges
    between two clusters merge into one edge carrying the weight sum.
    """
    labels = _labels_of(clustering)
    n = g.num_nodes
    coarse_id = {}
    mapping = [0] * n
    for v in range(n):
        l = labels[v]
        c = coarse_id.get(l)
        if c is None:
            c = len(coarse_id)
            coarse_id[l] = c
        mapping[v] = c
    nc = len(coarse_id)

    coarse_nw = [0] * nc
    nw = g.node_weights
    for v in range(n):
        coarse_nw[mapping[v]] += nw[v]

    # bucket fine nodes by coarse id (counting sort, keeps id order)
    counts = [0] * (nc + 1)
    for c in mapping:
        counts[c + 1] += 1
    for c in range(nc):
        counts[c + 1] += counts[c]
    bucket = [0] * n
    fill = list(counts[:nc])
    for v in range(n):
        c = mapping[v]
        bucket[fill[c]] = v
        fill[c] += 1

    offsets = g.offsets
    adjacency = g.adjacency
    eweights = g.edge_weights
    # accumulate neighbor weights per coarse node through a dense
    # scratch array, cleared via the touched list; linear in fine edges
    scratch = [0] * nc
    touched = []
    c_offsets = [0] * (nc + 1)
    c_adj = []
    c_w = []
    for c in range(nc):
        for j in range(counts[c], counts[c + 1]):
            v = bucket[j]
            for i in range(offsets[v], offsets[v + 1]):
                d = mapping[adjacency[i]]
                if d != c:
                    if scratch[d] == 0:
                        touched.append(d)
                    scratch[d] += eweights[i]
        touched.sort()
        for d in touched:
            c_adj.append(d)
            c_w.append(scratch[d])
            scratch[d] = 0
        touched.clear()
        c_offsets[c + 1] = len(c_adj)
    return Graph(c_offsets, c_adj, c_w, coarse_nw), mapping


def project(coarse_partition, mapping):
    """Pull a coarse partition back to the finer level via mapping."""
    cl = coarse_partition.labels
    labels = [cl[c] for c in mapping]
    return Partition(labels, coarse_partition.k, coarse_partition.l_max,
                     list(coarse_partition.block_weights))


# ---------------------------------------------------------------------------
# METIS graph format
#
# Header line: "n m [fmt]". fmt is up to three digits read right to
# left: 1 = edges carry weights, 10 = nodes carry weights, 100 = nodes
# carry vertex sizes (unsupported here). Then n lines follow, line i
# listing the neighbors of node i as 1-based indices, prefixed by the
# node weight when declared, each neighbor followed by the edge weight
# when declared. '%' lines are comments. m counts undirected edges.
# ---------------------------------------------------------------------------

def _data_lines(text):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        s = raw.strip()
        if s.startswith("%"):
            continue
        yield lineno, s


def _int_tokens(s, lineno):
    try:
        return [int(t) for t in s.split()]
    except ValueError:
        raise MetisFormatError(f"line {lineno}: non-integer token") from None


def load_metis(path):
    """Parse a METIS graph file; validates symmetry and rejects
    self loops and parallel edges."""
    with open(path, "r", encoding="ascii") as fh:
        text = fh.read()
    lines = _data_lines(text)
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise MetisFormatError("empty file") from None
    head = _int_tokens(header, lineno)
    if len(head) not in (2, 3):
        raise MetisFormatError(f"line {lineno}: header needs 2 or 3 tokens")
    n, m = head[0], head[1]
    fmt = head[2] if len(head) == 3 else 0
    if n < 0 or m < 0 or fmt < 0:
        raise MetisFormatError(f"line {lineno}: negative header value")
    if (fmt // 100) % 10:
        raise MetisFormatError("vertex sizes (fmt 1xx) are not supported")
    has_nw = bool((fmt // 10) % 10)
    has_ew = bool(fmt % 10)

    node_weights = [1] * n
    adj = []
    for v in range(n):
        try:
            lineno, s = next(lines)
        except StopIteration:
            raise MetisFormatError(
                f"expected {n} node lines, found {v}") from None
        tok = _int_tokens(s, lineno)
        pos = 0
        if has_nw:
            if not tok:
                raise MetisFormatError(f"line {lineno}: missing node weight")
            if tok[0] < 0:
                raise MetisFormatError(f"line {lineno}: negative node weight")
            node_weights[v] = tok[0]
            pos = 1
        rest = tok[pos:]
        seen = {}
        if has_ew:
            if len(rest) % 2:
                raise MetisFormatError(
                    f"line {lineno}: odd neighbor/weight token count")
            pairs = [(rest[i], rest[i + 1]) for i in range(0, len(rest), 2)]
        else:
            pairs = [(u, 1) for u in rest]
        for u1, w in pairs:
            if not 1 <= u1 <= n:
                raise MetisFormatError(
                    f"line {lineno}: neighbor {u1} out of range")
            u = u1 - 1
            if u == v:
                raise MetisFormatError(f"line {lineno}: self loop at node {v + 1}")
            if u in seen:
                raise MetisFormatError(
                    f"line {lineno}: parallel edge to node {u1}")
            if w <= 0:
                raise MetisFormatError(
                    f"line {lineno}: non-positive edge weight")
            seen[u] = w
        adj.append(seen)
    for lineno, s in lines:
        if s:
            raise MetisFormatError(f"line {lineno}: trailing content")

    for v in range(n):
        for u, w in adj[v].items():
            if adj[u].get(v) != w:
                raise MetisFormatError(
                    f"asymmetric edge between nodes {v + 1} and {u + 1}")
    total = sum(len(a) for a in adj)
    if total != 2 * m:
        raise MetisFormatError(
            f"header declares {m} edges, found {total // 2}")

    offsets = [0] * (n + 1)
    adjacency = []
    weights = []
    for v in range(n):
        for u in sorted(adj[v]):
            adjacency.append(u)
            weights.append(adj[v][u])
        offsets[v + 1] = len(adjacency)
    return Graph(offsets, adjacency, weights, node_weights)


def write_metis(g, path):
    """Write g in METIS format. Weight sections are emitted only when
    some weight differs from 1, so unit graphs stay plain."""
    has_nw = any(w != 1 for w in g.node_weights)
    has_ew = any(w != 1 for w in g.edge_weights)
    with open(path, "w", encoding="ascii") as fh:
        if has_nw or has_ew:
            fmt = f"0{int(has_nw)}{int(has_ew)}"
            fh.write(f"{g.num_nodes} {g.num_edges} {fmt}\n")
        else:
            fh.write(f"{g.num_nodes} {g.num_edges}\n")
        for v in range(g.num_nodes):
            parts = []
            if has_nw:
                parts.append(str(g.node_weights[v]))
            for i in range(g.offsets[v], g.offsets[v + 1]):
                parts.append(str(g.adjacency[i] + 1))
                if has_ew:
                    parts.append(str(g.edge_weights[i]))
            fh.write(" ".join(parts) + "\n")


def write_partition(labels, path):
    """Partition file: one 0-based block id per line, node id order."""
    with open(path, "w", encoding="ascii") as fh:
        fh.writelines(f"{b}\n" for b in labels)


def read_partition(path):
    labels = []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, raw in enumerate(fh, start=1):
            s = raw.strip()
            if not s:
                continue
            try:
                labels.append(int(s))
            except ValueError:
                raise MetisFormatError(
                    f"line {lineno}: bad block id {s!r}") from None
    return labels
