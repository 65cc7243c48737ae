"""Smoke test for the slicemod_py extension module.

Build and install first:  pip install ./crates/py --no-build-isolation
"""

import math

import slicemod_py as sm

BOWTIE = "0 1\n1 2\n0 2\n3 4\n4 5\n3 5\n2 3\n"


def close(a, b, tol=1e-9):
    return math.isclose(a, b, rel_tol=0.0, abs_tol=tol)


def main():
    g = sm.Graph.from_edge_list(BOWTIE)
    assert g.node_count == 6 and g.edge_count == 7
    assert g.strengths() == [2.0, 2.0, 3.0, 3.0, 2.0, 2.0]
    assert close(sm.modularity_single(g, [0, 0, 0, 1, 1, 1]), 5 / 14)

    single = sm.MultisliceNetwork(g, [1.0], 0.0)
    result = sm.optimize(single, seed=3, restarts=4)
    assert close(result.quality, 5 / 14), result.quality
    labels = result.partition.labels
    assert labels[0] == labels[1] == labels[2] != labels[3] == labels[4] == labels[5]

    best, q = sm.brute_force_optimum(single)
    assert close(q, 5 / 14)

    triangle = sm.Graph(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)])
    ms = sm.MultisliceNetwork(triangle, [1.0, 1.0], 0.3)
    together = sm.Partition(ms, [0] * 6)
    assert close(sm.modularity_multislice(ms, together), 1.8 / 13.8)
    assert close(sm.modularity_multislice(ms, together, "paper"), 3.6 / 13.8)

    p = sm.Partition.singletons(ms)
    before = sm.modularity_multislice(ms, p)
    dq = sm.delta_move(ms, p, 1, 0, 0)
    p.move_node(ms, 1, 0, 0)
    assert close(sm.modularity_multislice(ms, p) - before, dq)

    pixels = [0.1] * 32 + [0.9] * 32
    img_graph = sm.build_affinity_graph(8, 8, 1, pixels, tau_rank=5, knn=6, window="all")
    assert img_graph.node_count == 64
    gammas = sm.linear_gamma_schedule(0.5, 0.25, 3)
    seg = sm.optimize(sm.MultisliceNetwork(img_graph, gammas, 0.3), seed=1)
    diag = sm.slice_diagnostics(seg.partition, seg.quality)
    assert len(diag["community_counts"]) == 3
    assert diag["csv"].startswith("slice,n_communities")
    assert 0.0 <= sm.persistence(seg.partition) <= 1.0

    try:
        sm.Graph(2, [(0, 5, 1.0)])
    except ValueError:
        pass
    else:
        raise AssertionError("out-of-range node accepted")

    print("python smoke test passed:", diag["community_counts"])


if __name__ == "__main__":
    main()
