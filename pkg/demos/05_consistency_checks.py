"""Mecke identity, edge-length law and difference operators."""
from rstclt import unit_box
from rstclt.estimators import (alpha_probe, combined_z, diff2_decay_check, ell_e_law_check,
                               mecke_check)

w = unit_box(2)

lhs, rhs = mecke_check(w, 500, 1.0, replicates=300, seed=1)
print(f"Mecke: {lhs.mean:.3f} vs {rhs.mean:.3f} ({combined_z(lhs, rhs):.2f} se apart)")

law = ell_e_law_check(2, 5000, seed=2)
print("directed edge law, KS:", round(law["ks"], 4))

params = alpha_probe(w, grid_points=8, mc_per_cell=4000, seed=3)
print("alpha probe (not certified):", round(params.alpha_W, 4), "at", params.argmin)

rep = diff2_decay_check(w, 1000, 1.0, [1e-9, 0.02, 0.04, 0.08], 500, 4, params.alpha_W)
for row in rep["rows"]:
    print(f"sep={row['separation']:.2f}  P(D2 != 0)={row['frequency']:.3f}  curve={row['bound']:.3f}")
