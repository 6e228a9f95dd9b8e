#pragma once

#include "rearr/grid.hpp"

namespace rearr::fixtures {

/// Deterministic sampled inputs used by the bundled verification battery.

Domain unit_square(double h);
Domain unit_disk(double h);
Domain unit_ball3(double h);

/// C^1 bump profile: (1 - rho^2)^2 for rho < 1, else 0.
double bump(double rho);

/// Radial nonincreasing bump on the disk, support radius 0.8 (equality-case
/// input for the global estimate).
GridFunction radial_bump_disk(double h);
/// Two separated bumps on the unit square, compact support (strict-case
/// input).
GridFunction two_bump_square(double h);
/// Bump supported inside one quadrant of the unit square.
GridFunction quadrant_bump_square(double h);
/// Bump centered in the unit square with the given support radius.
GridFunction center_bump_square(double h, double support_radius);
/// cos(pi x1) on the unit square (sign-changing).
GridFunction cosine_square(double h);
/// 1 - |x| on the unit disk (Lipschitz cone).
GridFunction cone_disk(double h);
/// Strictly positive smooth wave on the unit square (perturbation direction
/// for the approximation sequence).
GridFunction wave_positive_square(double h);
/// sin(pi x1) sin(pi x2) on the unit square (smooth base function).
GridFunction sine_base_square(double h);
/// max(x1, 0) * (1 - |x|^2) on the unit ball in 3-D: vanishes on a half ball
/// and on the equatorial disk.
GridFunction half_ball_bump3(double h);
/// x1 on the unit square (vanishes on the left edge).
GridFunction ramp_square(double h);
/// |sin(pi x2)| * bump envelope on the disk: vanishes on a diameter segment.
GridFunction diameter_pinned_disk(double h);

/// Fixed-seed random grid on a small square (values in [-1, 1]).
GridFunction random_square(int cells_per_side, unsigned seed);

}  // namespace rearr::fixtures
