"""Command line front end: partition, evaluate, generate."""

import argparse
import json
import sys
from dataclasses import replace

from .generators import GenSpec, generate
from .graph import (InfeasibleError, MetisFormatError, load_metis,
                    read_partition, write_metis, write_partition)
from .multilevel import PartitionConfig, compute_lmax, partition

BASE_PRESETS = {
    # ordering, vcycles, ensemble, active coarsening, delta
    "fast": ("degree", 1, False, False, 0.0),
    "fastv": ("degree", 3, False, False, 0.0),
}

SUFFIXES = {
    "b": "coarse imbalance budget (delta 0.12)",
    "e": "ensemble clusterings",
    "a": "active nodes during coarsening",
    "r": "random node ordering",
}


def expand_preset(name):
    """Resolve a preset name to config fields.

    Base names fast (one cycle) and fastv (three V-cycles) compose
    with suffix letters, e.g. fast-b, fastv-e-a. eco-equivalent-off is
    the plain LPA-refinement configuration, an alias of fast.
    """
    if name == "eco-equivalent-off":
        name = "fast"
    parts = name.split("-")
    if parts[0] not in BASE_PRESETS:
        raise ValueError(f"unknown preset {name!r}")
    ordering, vcycles, ensemble, active, delta = BASE_PRESETS[parts[0]]
    for suffix in parts[1:]:
        if suffix == "b":
            delta = 0.12
        elif suffix == "e":
            ensemble = True
        elif suffix == "a":
            active = True
        elif suffix == "r":
            ordering = "random"
        else:
            raise ValueError(f"unknown preset suffix {suffix!r} in {name!r}")
    return {
        "ordering": ordering,
        "vcycles": vcycles,
        "ensemble": ensemble,
        "active_coarsening": active,
        "delta": delta,
    }


def config_from_args(args):
    fields = expand_preset(args.preset)
    if args.vcycles is not None:
        fields["vcycles"] = args.vcycles
    if args.ensemble:
        fields["ensemble"] = True
    if args.active:
        fields["active_coarsening"] = True
    if args.ordering is not None:
        fields["ordering"] = args.ordering
    if args.delta is not None:
        fields["delta"] = args.delta
    cfg = PartitionConfig(
        k=args.k,
        epsilon=args.imbalance,
        seed=args.seed,
        preset=args.preset,
        **fields)
    if args.lpa_iters is not None:
        cfg = replace(cfg, lpa_rounds=args.lpa_iters)
    if args.cluster_factor is not None:
        cfg = replace(cfg, cluster_factor=args.cluster_factor)
    if args.coarsen_iters is not None:
        cfg = replace(cfg, coarsen_rounds=args.coarsen_iters)
    return cfg


def cmd_partition(args):
    g = load_metis(args.graph)
    cfg = config_from_args(args)
    out_path = args.output or f"{args.graph}.part.{args.k}"
    runs = []
    best = None
    best_key = None
    for i in range(args.repeat):
        p, rep = partition(g, replace(cfg, seed=args.seed + i))
        runs.append(rep)
        key = (not p.is_feasible(), rep.cut, rep.imbalance)
        if best_key is None or key < best_key:
            best = p
            best_key = key
    write_partition(best.labels, out_path)

    print(f"graph {args.graph}: n={g.num_nodes} m={g.num_edges}")
    print(f"k={cfg.k} epsilon={cfg.epsilon} l_max={runs[0].l_max} "
          f"preset={args.preset} seed={args.seed} repeat={args.repeat}")
    for i, rep in enumerate(runs):
        print(f"run {i}: cut={rep.cut} imbalance={rep.imbalance:.4f} "
              f"feasible={'yes' if rep.feasible else 'no'} "
              f"time={rep.total_seconds:.2f}s")
    avg_cut = sum(r.cut for r in runs) / len(runs)
    avg_time = sum(r.total_seconds for r in runs) / len(runs)
    print(f"best cut {min(r.cut for r in runs)}  average cut {avg_cut:.1f}  "
          f"average time {avg_time:.2f}s")
    print(f"partition written to {out_path}")
    if args.json_out:
        payload = {
            "graph": args.graph,
            "output": out_path,
            "best_cut": min(r.cut for r in runs),
            "average_cut": avg_cut,
            "average_seconds": avg_time,
            "runs": [r.to_dict() for r in runs],
        }
        with open(args.json_out, "w", encoding="ascii") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0 if best.is_feasible() else 1


def _independent_cut(g, labels):
    # deliberately not graph.edge_cut: count each undirected edge once
    cut = 0
    adjacency, eweights = g.adjacency, g.edge_weights
    for v in range(g.num_nodes):
        lv = labels[v]
        for i in range(g.offsets[v], g.offsets[v + 1]):
            u = adjacency[i]
            if u > v and labels[u] != lv:
                cut += eweights[i]
    return cut


def cmd_evaluate(args):
    g = load_metis(args.graph)
    labels = read_partition(args.partition)
    if len(labels) != g.num_nodes:
        raise ValueError(
            f"partition file has {len(labels)} entries, graph has "
            f"{g.num_nodes} nodes")
    k = args.k if args.k is not None else max(labels) + 1
    for v, b in enumerate(labels):
        if not 0 <= b < k:
            raise ValueError(f"node {v}: block id {b} outside 0..{k - 1}")
    weights = [0] * k
    for v, b in enumerate(labels):
        weights[b] += g.node_weights[v]
    l_max = compute_lmax(g, k, args.imbalance)
    heaviest = max(weights)
    imbalance = heaviest * k / g.total_node_weight - 1.0
    feasible = heaviest <= l_max
    cut = _independent_cut(g, labels)
    print(f"graph {args.graph}: n={g.num_nodes} m={g.num_edges}")
    print(f"k={k} epsilon={args.imbalance} l_max={l_max}")
    print(f"cut {cut}")
    print(f"block weights {weights}")
    print(f"imbalance {imbalance:.4f}")
    print(f"feasible {'yes' if feasible else 'no'}")
    if args.json_out:
        payload = {
            "graph": args.graph,
            "partition": args.partition,
            "k": k,
            "epsilon": args.imbalance,
            "l_max": l_max,
            "cut": cut,
            "block_weights": weights,
            "imbalance": imbalance,
            "feasible": feasible,
        }
        with open(args.json_out, "w", encoding="ascii") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0


def cmd_generate(args):
    model = {"pa": "preferential_attachment"}.get(args.model, args.model)
    spec = GenSpec(model=model, n=args.n, cliques=args.cliques,
                   clique_size=args.size, degree=args.deg, seed=args.seed)
    g = generate(spec)
    write_metis(g, args.output)
    print(f"wrote {args.output}: n={g.num_nodes} m={g.num_edges}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="clupart",
        description="Balanced k-way graph partitioning by contracting "
                    "size-constrained clusterings")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("partition", help="partition a METIS graph file")
    p.add_argument("graph", help="input graph (METIS format)")
    p.add_argument("--k", type=int, required=True, help="number of blocks")
    p.add_argument("--imbalance", type=float, default=0.03,
                   help="allowed imbalance epsilon (default 0.03)")
    p.add_argument("--preset", default="fast",
                   help="fast, fastv, or either with suffixes -b -e -a -r "
                        "(default fast)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeat", type=int, default=1,
                   help="independent runs; the best partition is written")
    p.add_argument("--vcycles", type=int, default=None)
    p.add_argument("--ensemble", action="store_true",
                   help="overlay several clusterings per level")
    p.add_argument("--active", action="store_true",
                   help="active-node queue during coarsening")
    p.add_argument("--ordering", choices=("degree", "random"), default=None)
    p.add_argument("--delta", type=float, default=None,
                   help="coarse-level imbalance budget")
    p.add_argument("--cluster-factor", type=int, default=None)
    p.add_argument("--lpa-iters", type=int, default=None,
                   help="refinement rounds per level")
    p.add_argument("--coarsen-iters", type=int, default=None,
                   help="clustering rounds during coarsening")
    p.add_argument("--output", default=None,
                   help="partition file (default GRAPH.part.K)")
    p.add_argument("--json-out", default=None,
                   help="also write a JSON report to this path")
    p.set_defaults(func=cmd_partition)

    e = sub.add_parser("evaluate", help="recompute metrics of a partition")
    e.add_argument("graph")
    e.add_argument("partition")
    e.add_argument("--k", type=int, default=None,
                   help="block count (default: 1 + largest id in file)")
    e.add_argument("--imbalance", type=float, default=0.03)
    e.add_argument("--json-out", default=None)
    e.set_defaults(func=cmd_evaluate)

    gen = sub.add_parser("generate", help="write a generated METIS file")
    gen.add_argument("--model", required=True,
                     choices=("path", "cycle", "disjoint_cliques",
                              "preferential_attachment", "pa"))
    gen.add_argument("--n", type=int, default=0)
    gen.add_argument("--cliques", type=int, default=0)
    gen.add_argument("--size", type=int, default=0,
                     help="clique size for disjoint_cliques")
    gen.add_argument("--deg", type=int, default=0,
                     help="attachment degree for preferential_attachment")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--output", required=True)
    gen.set_defaults(func=cmd_generate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (MetisFormatError, InfeasibleError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
