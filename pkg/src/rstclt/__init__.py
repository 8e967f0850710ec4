"""Radial spanning trees and directed spanning forests over Poisson processes."""

__version__ = "0.1.0"

from .geom import (Window, ball, box, unit_box, dilate, gamma_function, unit_ball_volume,
                   window_volume, window_contains, halfspace_contains)
from .pointprocess import (PointSample, sample_poisson, sample_poisson_dilated,
                           derive_replicate_seed, default_margin, from_points)
from .spanning import (ROOT, NONE, RadialTree, DirectedForest, GridIndex, radial_parent,
                       directed_parent, build_rst, build_dsf, grid_build, grid_shell_candidates)
from .functionals import (FunctionalSpec, FunctionalValue, eval_rst_functional,
                          eval_dsf_functional, diff_first, diff_second)
