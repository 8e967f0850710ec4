"""Closed forms, Monte Carlo estimators and consistency checks."""

from .asymptotics import (BALL_VARIANCE, COVARIANCE_INTEGRAL, VaEstimate, default_truncation,
                          estimate_rst_mean, estimate_rst_variance, estimate_va_ball,
                          estimate_va_integral, probe_integrand, truncation_radius)
from .checks import (alpha_probe, combined_z, diff2_decay_check, diff_moment_check,
                     ell_e_law_check, mecke_check, rst_tail_check, volume_ratio)
from .closed_form import (TailBoundParams, covariance_envelope, diff2_bound, ell_e_cdf,
                          ell_e_moment_closed_form, ell_e_tail, expectation_limit,
                          rst_tail_bound)
from .clt import CltResult, clt_experiment, count_inversions
from .stats import (SummaryStats, erf, erfc, jackknife_variance_error, kolmogorov_distance,
                    kolmogorov_quantile, ks_distance, normal_cdf, summarize)
