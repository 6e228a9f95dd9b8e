#pragma once

#include <string>
#include <vector>

#include "rearr/grid.hpp"

namespace rearr {

enum class ProfileForm { Step, PiecewiseLinear };

/// Monotone one-variable function on [0, |Omega|]. Step form: values_[i]
/// holds on [breakpoints_[i], breakpoints_[i+1]), right-continuous.
/// Piecewise-linear form: values_[i] is the node value at breakpoints_[i].
class StepProfile {
public:
    static StepProfile step(std::vector<double> breakpoints, std::vector<double> values);
    static StepProfile piecewise_linear(std::vector<double> breakpoints,
                                        std::vector<double> node_values);

    ProfileForm form() const { return form_; }
    double total_measure() const { return breakpoints_.back(); }
    std::size_t interval_count() const { return breakpoints_.size() - 1; }
    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<double>& values() const { return values_; }

    /// Right-continuous evaluation for the step form (the value on the
    /// interval whose left endpoint is <= s), linear interpolation for the
    /// piecewise-linear form. Arguments are clamped to [0, |Omega|].
    double value_at(double s) const;

    bool nonincreasing() const;

    /// Profile minus a constant (breakpoints unchanged).
    StepProfile offset(double c) const;

    /// L^p norm over [0, |Omega|] of the step form.
    double lp_norm(double p) const;

private:
    StepProfile(ProfileForm form, std::vector<double> breakpoints, std::vector<double> values);

    ProfileForm form_;
    std::vector<double> breakpoints_;
    std::vector<double> values_;
};

/// Ball with the same measure as a source domain; radius satisfies
/// c_n * r^n = |Omega| with c_n the unit-ball volume.
struct BallDomain {
    int dimension = 0;
    double radius = 0.0;
    double unit_volume = 0.0;  // c_n
    double measure = 0.0;      // copied from the source domain, exact

    static BallDomain with_measure(int dimension, double measure);
    /// Volume coordinate of a point at distance r from the center.
    double volume_coordinate(double r) const;
};

/// Radial, radially nonincreasing function on a ball, stored as a profile
/// in the volume coordinate s = c_n |x|^n.
struct RadialFunction {
    BallDomain ball;
    StepProfile profile;

    double value_at_radius(double r) const { return profile.value_at(ball.volume_coordinate(r)); }
};

/// Measure of the super-level set {u > t}: h^n times the cell count.
double distribution(const GridFunction& u, double t);
/// Same for a profile (sum of interval lengths with value > t).
double distribution(const StepProfile& p, double t);

/// Cell values sorted nonincreasing on equal-length intervals; ties keep
/// cell order (stable). Satisfies the inf-characterization exactly on the
/// discrete model and preserves every L^p norm.
StepProfile decreasing_rearrangement(const GridFunction& u);

/// Rearrangement transplanted onto the measure-matched ball.
RadialFunction schwarz_symmetrization(const GridFunction& u);

/// max(p, 0) intervalwise.
StepProfile positive_part(const StepProfile& p);
/// s -> max(-p(|Omega| - s), 0);  equals the decreasing rearrangement of the
/// negative part (intervals are reflected, not endpoint-evaluated).
StepProfile negative_part_reflected(const StepProfile& p);

/// Profile value at s = |Omega|/2 (the interval containing it, left-endpoint
/// convention at a breakpoint). Splitting at this level keeps both parts
/// supported on measure <= |Omega|/2.
double median_level(const StepProfile& p);

/// Radial knot spacing used by the verifiers when differentiating a
/// grid-derived profile, in units of the grid spacing h.
inline constexpr double kProfileViewSpacingCells = 2.0;

/// Piecewise-linear view for differentiation. Knots sit at the volume
/// coordinates of radius multiples of `radial_spacing`: differences of the
/// rearrangement below the shell scale only see lattice quantization, not
/// the function. Node values are window means of the step profile (windows
/// split at knot midpoints). A profile already in PL form is returned
/// unchanged.
StepProfile piecewise_linear_view(const StepProfile& p, const BallDomain& ball,
                                  double radial_spacing);

/// Samples a radial function back onto a voxel ball grid with spacing h.
GridFunction resample_on_ball(const RadialFunction& f, double h);

/// RPROF v1 text format; step form only.
void write_profile(const StepProfile& p, const std::string& path);
StepProfile read_profile(const std::string& path);

}  // namespace rearr
