"""End-to-end acceptance suite.

One test per shipped guarantee. Each prints a single PASS line with the
measured margin (run pytest with -s to see them); a failed assertion is
the corresponding FAIL. Thresholds are pinned in the tests.
"""

import json
import random
import subprocess
import sys
import time

from clupart import (Clustering, Graph, GenSpec, LabelPropagation, LpaParams,
                     Partition, PartitionConfig, block_weights,
                     brute_force_min_cut, cluster, coarsen, compute_lmax,
                     contract, edge_cut, generate, overlay, partition, refine)
from clupart.cli import expand_preset


def random_graph(rng, n, p=0.03, max_w=1):
    edges = [(u, v, rng.randint(1, max(1, max_w)))
             for u in range(n) for v in range(u + 1, n)
             if rng.random() < p]
    weights = [rng.randint(1, max(1, max_w)) for _ in range(n)]
    return Graph.from_edges(n, edges, node_weights=weights)


def connected_graph(rng, n):
    edges = set()
    nodes = list(range(n))
    rng.shuffle(nodes)
    for i in range(1, n):
        u = nodes[rng.randrange(i)]
        edges.add((min(u, nodes[i]), max(u, nodes[i])))
    for _ in range(rng.randrange(0, n)):
        u, v = rng.randrange(n), rng.randrange(n)
        if u != v:
            edges.add((min(u, v), max(u, v)))
    return Graph.from_edges(n, sorted(edges))


def config(preset, **kw):
    fields = expand_preset(preset)
    return PartitionConfig(preset=preset, **fields, **kw)


def test_criterion_01_contraction_cut_equivalence():
    budget_s = 10.0
    rng = random.Random(101)
    start = time.monotonic()
    for i in range(200):
        kind = i % 3
        if kind == 0:
            g = random_graph(rng, rng.randint(20, 500), p=0.02, max_w=4)
        elif kind == 1:
            g = generate(GenSpec(model="preferential_attachment",
                                 n=rng.randint(50, 500), degree=2,
                                 seed=rng.randrange(999)))
        else:
            g = generate(GenSpec(model="disjoint_cliques",
                                 cliques=rng.randint(3, 40),
                                 clique_size=rng.randint(2, 6)))
        n = g.num_nodes
        clu = Clustering.from_labels(
            g, [rng.randrange(max(1, n // 3)) for _ in range(n)])
        coarse, mapping = contract(g, clu)
        k = rng.randint(2, 4)
        coarse_labels = [rng.randrange(k) for _ in range(coarse.num_nodes)]
        fine_labels = [coarse_labels[mapping[v]] for v in range(n)]
        assert edge_cut(g, fine_labels) == edge_cut(coarse, coarse_labels)
        assert block_weights(g, fine_labels, k) == \
            block_weights(coarse, coarse_labels, k)
    elapsed = time.monotonic() - start
    assert elapsed < budget_s
    print(f"criterion 1 (contraction cut-equivalence): PASS - "
          f"200/200 exact in {elapsed:.1f}s")


def test_criterion_02_feasibility_across_presets():
    presets = ["fast", "fastv", "fast-b", "fast-e", "fast-a", "fast-r",
               "fastv-b", "fastv-e", "fastv-a", "fastv-r"]
    ks = [2, 4, 8, 16]
    graphs = [generate(GenSpec(model="preferential_attachment", n=n,
                               degree=3, seed=50 + j))
              for j, n in enumerate((1000, 2000, 3000, 5000, 10000))]
    combos = [(p, k, g) for p in presets for k in ks for g in graphs]
    rng = random.Random(9)
    violations = 0
    runs = rng.sample(combos, 100)
    for i, (preset, k, g) in enumerate(runs):
        cfg = config(preset, k=k, epsilon=0.03, seed=i)
        p, rep = partition(g, cfg)
        l_max = compute_lmax(g, k, 0.03)
        if max(p.block_weights) > l_max or not rep.feasible:
            violations += 1
    assert violations == 0
    print(f"criterion 2 (feasibility): PASS - 0 violations in 100 runs "
          f"over {len(presets)} presets, k in {ks}")


def test_criterion_03_oracle_proximity():
    budget_s = 30.0
    rng = random.Random(77)
    within = 0
    below = 0
    start = time.monotonic()
    for _ in range(50):
        g = connected_graph(rng, rng.randint(5, 10))
        _, opt = brute_force_min_cut(g, 2, 0.0)
        best = None
        for s in range(10):
            p, rep = partition(g, PartitionConfig(k=2, epsilon=0.0, seed=s))
            if rep.feasible and (best is None or rep.cut < best):
                best = rep.cut
        assert best is not None
        assert best >= opt
        if best < opt:
            below += 1
        if best <= opt + 1:
            within += 1
    elapsed = time.monotonic() - start
    assert within >= 45
    assert below == 0
    assert elapsed < budget_s
    print(f"criterion 3 (oracle proximity): PASS - {within}/50 within "
          f"optimum+1, none below, {elapsed:.1f}s")


def test_criterion_04_cluster_size_never_exceeded():
    rng = random.Random(13)
    checked = 0
    for _ in range(20):
        g = random_graph(rng, rng.randint(40, 200), p=0.05, max_w=5)
        bound = max(g.max_node_weight,
                    g.total_node_weight // rng.randint(2, 12))
        shadow = {v: g.node_weights[v] for v in range(g.num_nodes)}
        moves = []

        def audit(v, own, target, gain):
            shadow[own] -= g.node_weights[v]
            shadow[target] = shadow.get(target, 0) + g.node_weights[v]
            assert shadow[target] <= bound
            moves.append(v)

        clu = cluster(g, LpaParams(size_bound=bound,
                                   seed=rng.randrange(999)), on_move=audit)
        assert all(w <= bound for w in clu.block_weights.values())
        checked += len(moves)
    print(f"criterion 4 (size-constraint safety): PASS - {checked} moves "
          f"audited over 20 instances, none over the bound")


def test_criterion_05_monotone_refinement():
    rng = random.Random(23)
    feasible_runs = 0
    audited = 0
    for _ in range(20):
        g = random_graph(rng, rng.randint(40, 120), p=0.08)
        k = rng.randint(2, 4)
        l_max = compute_lmax(g, k, 0.03)
        labels = [rng.randrange(k) for _ in range(g.num_nodes)]
        p = Partition.from_labels(g, labels, k, l_max)
        start_cut = edge_cut(g, p)
        started_feasible = p.is_feasible()
        shadow = list(p.block_weights)
        gains = []

        def audit(v, own, target, gain):
            # an overloaded block may shed at a cut increase; everything
            # else must never lose ground
            if shadow[own] <= l_max:
                assert gain >= 0
            shadow[own] -= g.node_weights[v]
            shadow[target] += g.node_weights[v]
            gains.append(gain)

        out = refine(g, p, LpaParams(size_bound=l_max,
                                     tie_breaking="lowest_block_id",
                                     seed=rng.randrange(999)),
                     on_move=audit)
        assert edge_cut(g, out) == start_cut - sum(gains)
        if started_feasible:
            feasible_runs += 1
            assert all(gain >= 0 for gain in gains)
        audited += len(gains)
    assert feasible_runs >= 5
    print(f"criterion 5 (monotone refinement): PASS - {audited} moves "
          f"audited, cut trace non-increasing in {feasible_runs} "
          f"feasible runs")


def test_criterion_06_overlay_matches_tuple_grouping():
    rng = random.Random(31)
    for _ in range(100):
        n = rng.randint(5, 200)
        g = Graph.from_edges(n, [],
                             node_weights=[rng.randint(1, 4)
                                           for _ in range(n)])
        t = rng.randint(1, 5)
        inputs = [[rng.randrange(rng.randint(1, max(2, n // 4)))
                   for _ in range(n)] for _ in range(t)]
        result = overlay(g, [Clustering.from_labels(g, lab)
                             for lab in inputs])

        by_tuple = {}
        for v in range(n):
            by_tuple.setdefault(tuple(lab[v] for lab in inputs),
                                []).append(v)
        expected_groups = sorted(sorted(m) for m in by_tuple.values())
        got = {}
        for v, l in enumerate(result.labels):
            got.setdefault(l, []).append(v)
        assert sorted(sorted(m) for m in got.values()) == expected_groups

        assert result.num_clusters >= max(
            len(set(lab)) for lab in inputs)
        for lab in inputs:
            in_w = {}
            for v, l in enumerate(lab):
                in_w[l] = in_w.get(l, 0) + g.node_weights[v]
            for v in range(n):
                assert result.block_weights[result.labels[v]] <= \
                    in_w[lab[v]]
    print("criterion 6 (overlay correctness): PASS - 100/100 tuples "
          "match brute-force grouping with weight inheritance")


def test_criterion_07_active_node_accounting():
    rng = random.Random(43)
    rounds_checked = 0
    inactive_checked = 0
    for _ in range(20):
        g = random_graph(rng, rng.randint(30, 150), p=0.06)
        engine = LabelPropagation.for_clustering(
            g, LpaParams(size_bound=3 * g.max_node_weight,
                         active_nodes=True, seed=rng.randrange(999)))
        engine.run()
        for stats in engine.round_stats:
            assert stats.scanned == stats.popped_degree
            rounds_checked += 1

        probe = LabelPropagation.for_clustering(
            g, LpaParams(size_bound=float("inf"), active_nodes=True,
                         tie_breaking="lowest_block_id",
                         seed=rng.randrange(999)))
        probe.run_round()
        for v in range(g.num_nodes):
            if not probe.queue.in_current[v]:
                target, gain, _ = probe.decide(v)
                assert target == probe.labels[v]
                assert gain == 0
                inactive_checked += 1
    print(f"criterion 7 (active-node accounting): PASS - scanned == "
          f"popped degree in {rounds_checked} rounds; {inactive_checked} "
          f"inactive nodes all at fixpoints")


def test_criterion_08_vcycle_monotonicity():
    rng = random.Random(59)
    for i in range(30):
        g = generate(GenSpec(model="preferential_attachment",
                             n=1500 + 500 * (i % 5), degree=3,
                             seed=80 + i))
        preset = "fastv" if i % 2 == 0 else "fastv-b"
        cfg = config(preset, k=(2, 4, 8)[i % 3], seed=i)
        p, rep = partition(g, cfg)
        cuts = [c.cut for c in rep.cycles]
        assert len(cuts) == 3
        assert all(cuts[j] >= cuts[j + 1] for j in range(len(cuts) - 1))
        assert rep.feasible
    print("criterion 8 (V-cycle monotonicity): PASS - per-cycle cuts "
          "non-increasing in 30/30 runs")


def test_criterion_09_degree_ordering_beats_random():
    # Refinement equalizes both orderings on these structureless graphs,
    # so the comparison pins the stage where ordering acts: the
    # clustering used for contraction. With refinement rounds at zero
    # the pipeline still emits complete feasible partitions (bisection
    # plus finest-level repair), making the ordering effect visible in
    # the final cut.
    wins_needed = 14
    wins = 0
    per_graph = []
    for gseed in range(300, 320):
        g = generate(GenSpec(model="preferential_attachment", n=20000,
                             degree=2, seed=gseed))
        means = {}
        for ordering in ("degree", "random"):
            cuts = []
            for seed in range(10):
                p, rep = partition(g, PartitionConfig(
                    k=8, seed=seed, ordering=ordering,
                    lpa_rounds=0, coarsen_rounds=10))
                assert rep.feasible
                cuts.append(rep.cut)
            means[ordering] = sum(cuts) / len(cuts)
        won = means["degree"] <= means["random"]
        wins += won
        per_graph.append((gseed, means["degree"], means["random"]))
    assert wins >= wins_needed, per_graph
    print(f"criterion 9 (degree ordering direction): PASS - degree "
          f"ordering won on {wins}/20 graphs (needed {wins_needed})")


def test_criterion_10_coarsening_effectiveness():
    g = generate(GenSpec(model="disjoint_cliques", cliques=200,
                         clique_size=3))
    assert (g.num_nodes, g.num_edges) == (600, 600)
    h, _ = coarsen(g, PartitionConfig(k=2, seed=0))
    assert len(h.levels) == 2
    assert h.levels[1].num_nodes == 200
    assert h.levels[1].num_edges == 0
    assert h.levels[1].node_weights == [3] * 200

    pa = generate(GenSpec(model="preferential_attachment", n=50000,
                          degree=4, seed=10))
    hp, _ = coarsen(pa, PartitionConfig(k=8, seed=0))
    ratio = hp.levels[0].num_nodes / hp.levels[1].num_nodes
    assert ratio >= 5.0
    print(f"criterion 10 (coarsening effectiveness): PASS - triangles "
          f"600/600 -> 200/0 exactly; scale-free first level shrinks "
          f"{ratio:.1f}x (needed 5x)")


def test_criterion_11_throughput_one_million_edges():
    budget_s = 60.0
    g = generate(GenSpec(model="preferential_attachment", n=125000,
                         degree=8, seed=42))
    assert 900_000 < g.num_edges < 1_100_000
    start = time.monotonic()
    p, rep = partition(g, config("fast", k=16, seed=0))
    elapsed = time.monotonic() - start
    assert rep.feasible
    assert elapsed < budget_s
    print(f"criterion 11 (throughput): PASS - {g.num_edges} edges, k=16, "
          f"cut {rep.cut} in {elapsed:.1f}s (budget {budget_s:.0f}s)")


def test_criterion_12_cli_determinism(tmp_path):
    def run(*args):
        r = subprocess.run([sys.executable, "-m", "clupart", *args],
                           capture_output=True, text=True)
        assert r.returncode == 0, r.stderr
        return r

    graph = tmp_path / "det.graph"
    run("generate", "--model", "pa", "--n", "2000", "--deg", "3",
        "--seed", "5", "--output", str(graph))
    out_a = tmp_path / "a.part"
    out_b = tmp_path / "b.part"
    for out in (out_a, out_b):
        run("partition", str(graph), "--k", "8", "--seed", "3",
            "--output", str(out))
    assert out_a.read_bytes() == out_b.read_bytes()
    print("criterion 12 (determinism): PASS - identical invocations "
          "wrote byte-identical partition files")
