#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rearr/geometry.hpp"
#include "rearr/grid.hpp"
#include "rearr/rearrange.hpp"

namespace rearr {

enum class Verdict { Holds, Violated, Vacuous };

std::string to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

/// One verified estimate: left side, right side, the multiplicative constant
/// entering the right side, margin = rhs - lhs, and a verdict. `holds` iff
/// lhs <= rhs; `vacuous` iff the right side is infinite or a hypothesis of
/// the estimate could not be verified (meta["reason"] says why).
struct InequalityReport {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double constant = 0.0;
    double margin = 0.0;
    Verdict verdict = Verdict::Vacuous;
    std::map<std::string, std::string> meta;
};

std::string report_to_text(const InequalityReport& r);
InequalityReport report_from_text(const std::string& text);
void write_report(const InequalityReport& r, const std::string& path);
InequalityReport read_report(const std::string& path);

/// Energy of the symmetrized arrangement of u over the volume-coordinate
/// range [s_lo, s_hi], computed from the piecewise-linear profile view at
/// the grid's own radial resolution.
double symmetrized_profile_energy(const GridFunction& u, double s_lo, double s_hi);

/// Measure of the zero set {u <= 0} (u is expected nonnegative).
double zero_set_measure(const GridFunction& u);

/// Global estimate: symmetrized energy <= (n c_n^{1/n} / gamma)^2 * energy,
/// conditional on the certified lower perimeter bound. The certificate's
/// hypothesis is re-validated on the grid; failures yield a vacuous verdict.
InequalityReport verify_thm_1_1(const GridFunction& u, const GammaCertificate& cert);

/// Constant of the small-support estimate: L = Q n c_n^{1/n} / alpha^{1-1/n},
/// alpha = eps/(|Omega|-eps) for eps <= |Omega|/2 and 1 otherwise.
double thm_1_2_constant(int dimension, double measure, double Q, double eps);
InequalityReport verify_thm_1_2(const GridFunction& u, double Q);

using RegionPredicate = std::function<bool(const std::vector<double>&)>;

/// Estimate for functions vanishing on a boundary portion of trace measure
/// eps; the declared region is checked against near-zero boundary values.
InequalityReport verify_thm_1_3(const GridFunction& u, double Q, double C,
                                const RegionPredicate& boundary_region, double eps);
/// Estimate for functions vanishing on an internal set whose projection on a
/// hyperplane has measure eps.
InequalityReport verify_thm_1_4(const GridFunction& u, double Q, double C,
                                const RegionPredicate& zero_region, double eps);

/// Local estimate for sign-changing functions: energy over the concentric
/// ball of measure |Omega|-eps vs c(eps) (Q n c_n^{1/n})^2 times the source
/// energy, with c(eps) = ((|Omega|-eps)/eps)^{2-2/n} for eps <= |Omega|/2
/// and 1 otherwise. Replays the median-split decomposition internally.
double local_estimate_factor(int dimension, double measure, double eps);
InequalityReport verify_thm_2_1(const GridFunction& u, double Q, double eps);

/// Uniform comparison of two rearrangements on (eps, |Omega|-eps) against
/// the assembled three-term bound.
InequalityReport verify_cor_2_2(const GridFunction& u, const GridFunction& v, double Q,
                                double eps);

/// Embedding estimate ||u||_{2n/(n-2)} <= const * L * ||Du||_2 (n >= 3); the
/// ball embedding constant is the sharp literature value, recorded in
/// metadata.
double sobolev_sharp_constant(int dimension);
InequalityReport verify_cor_1_6(const GridFunction& u, double constant_L);

/// Difference-quotient bound for the rearrangement of a Lipschitz function:
/// -du*/ds <= (L/gamma) s^{-1+1/n} within `slack`, tested for
/// s >= s_floor_fraction * |Omega|.
InequalityReport verify_lipschitz_bound(const GridFunction& u, const GammaCertificate& cert,
                                        double lipschitz, double s_floor_fraction = 0.05,
                                        double slack = 1.1);

enum class CounterexampleKind { Interior, ZeroBoundary };
std::string to_string(CounterexampleKind k);

/// Divergence probe for the square-root profile family: truncated
/// symmetrized energies over the ladder eps_k = |Omega| 2^{-k}, their
/// identically truncated mirrored (source) energies, the fitted slope of E
/// against ln(1/eps), and the full-range source energy.
struct CounterexampleTrace {
    int dimension = 0;
    CounterexampleKind kind = CounterexampleKind::Interior;
    double measure = 0.0;
    std::vector<double> eps;
    std::vector<double> energy;
    std::vector<double> ln_inv_eps;
    std::vector<double> source_truncated;
    double slope = 0.0;
    double source_energy = 0.0;
};

CounterexampleTrace run_counterexample(int dimension, CounterexampleKind kind,
                                       double measure = 0.0 /* default: unit ball */);

void write_trace_csv(const CounterexampleTrace& t, const std::string& path);
/// Reads back the CSV columns and trailer (dimension/kind are not stored).
CounterexampleTrace read_trace_csv(const std::string& path);

}  // namespace rearr
