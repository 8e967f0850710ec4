"""Scaled mean of the total edge length against its closed-form limit."""
from rstclt import unit_box
from rstclt.estimators import estimate_rst_mean, expectation_limit

w = unit_box(2)
limit = expectation_limit(1, 2, 1.0)
print("limit", limit)

for t in (250, 1000, 2000):
    s = estimate_rst_mean(w, t, 1.0, replicates=200, seed=3)
    print(f"t={t:5d}  t^(-1/2) L = {s.mean:.4f} +- {s.std_error_mean:.4f}")

# a = 0 counts vertices, so the scaled mean is the window volume
print("a=0:", estimate_rst_mean(w, 500, 0.0, 200, seed=4).mean)
