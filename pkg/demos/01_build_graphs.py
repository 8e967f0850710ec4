"""Sample a Poisson process and build both spanning graphs on it."""
import numpy as np

from rstclt import build_dsf, build_rst, eval_rst_functional, sample_poisson, unit_box, ROOT, NONE

w = unit_box(2)
sample = sample_poisson(w, 500, seed=7)
print(len(sample), "points")

# every point hangs off an earlier (smaller-norm) point or the origin
tree = build_rst(sample)
print("edges to the origin:", np.count_nonzero(tree.parent == ROOT))
print("total edge length:", eval_rst_functional(tree, 1).value)

# the grid search is only a speed-up; brute force gives the same parents
assert np.array_equal(tree.parent, build_rst(sample, method="brute").parent)

# directed forest: nearest point in the half-plane behind, here "to the left"
forest = build_dsf(sample, [1.0, 0.0])
print("points without a parent:", np.count_nonzero(forest.parent == NONE))
print("mean directed edge:", forest.edge_length[forest.parent != NONE].mean())
