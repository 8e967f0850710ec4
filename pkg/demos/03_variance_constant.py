"""Two routes to the limiting variance constant v_a.

The ball estimator has an O(1/r) finite-size bias (it shrinks as r grows);
the covariance integral has no such bias but is noisier per sample.
"""
from rstclt import unit_box
from rstclt.estimators import estimate_rst_variance, estimate_va_ball, estimate_va_integral

for r in (4, 8, 16):
    v = estimate_va_ball(r, 1.0, 2, replicates=1000, seed=10 + r)
    print(f"ball r={r:2d}: {v.value:.4f} +- {v.std_error:.4f}")

v = estimate_va_integral(None, 1.0, 2, z_samples=50_000, seed=2)
print(f"integral (R={v.radius:.2f}): {v.value:.4f} +- {v.std_error:.4f}")

s = estimate_rst_variance(unit_box(2), 1000, 1.0, 1000, seed=3)
print(f"radial tree, t=1000: {s.variance:.4f} +- {s.std_error_variance:.4f}")

# counting (a = 0) gives exactly 1 through the integral
print("v_0 =", estimate_va_integral(None, 0.0, 2, z_samples=10, seed=1).value)
