"""The planar bridge: medial graphs tie edge-direction counting to
deletion-contraction.

Every plane graph has a 4-regular medial graph (one vertex per edge,
one edge per corner).  At the weight point (1, 1, 2) the medial total
weight lines up with the deletion-contraction invariant at (3, 3); the
ratio pinned by brute force on the golden suite is exactly 2 for every
connected plane graph tried, which this script reproduces and extends
with a custom instance.
"""

from icehouse import (
    PlaneGraph,
    golden_suite,
    medial_graph,
    spanning_tree_count,
    tutte_crosscheck,
    tutte_eval,
)

print(f"{'graph':>14s} {'Z_medial(1,1,2)':>16s} {'T(3,3)':>9s} {'ratio':>7s}")
for name, pg in golden_suite():
    row = tutte_crosscheck(pg, name)
    print(f"{name:>14s} {row.z_medial:16.1f} {row.tutte_33:9.1f} {row.ratio:7.3f}")

# spanning trees as a self-check of the deletion-contraction recursion
k4 = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
print("\nK4 spanning trees, two routes:",
      tutte_eval(k4, 1, 1), "and", spanning_tree_count(k4))

# a custom embedded instance: the bowtie (two triangles sharing a vertex)
bowtie = PlaneGraph(
    [[0, 5], [1, 2], [3, 4, 6, 11], [7, 8], [9, 10]],
    [(0, 1), (2, 3), (4, 5), (6, 7), (8, 9), (10, 11)],
)
row = tutte_crosscheck(bowtie, "bowtie")
m = medial_graph(bowtie)
print(f"\nbowtie medial: {m.vertex_count} vertices, {m.num_edges} edges")
print(f"bowtie ratio: {row.z_medial:.1f} / {row.tutte_33:.1f} = {row.ratio}")
