#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rearr/grid.hpp"
#include "rearr/rearrange.hpp"

namespace rearr {

/// Multiplicative slack accepted when checking the lower perimeter bound
/// P {u > t} >= gamma * mu(t)^{1-1/n} on a voxel grid.
inline constexpr double kScanSlack = 0.10;
/// Level sets whose measure is below c_n * (kScanFloorRadiusCells * h)^n are
/// skipped in threshold scans: the face-count perimeter of a digitized set
/// of radius r carries an O(h/r) error, so sets below a dozen cells across
/// are dominated by lattice error.
inline constexpr double kScanFloorRadiusCells = 12.0;
/// Threshold cap for level-set scans (quantile thinning above this).
inline constexpr int kScanMaxThresholds = 512;

/// Per-cell |Du| by central differences inside the mask, one-sided at the
/// mask boundary. Exact for affine data.
GridFunction gradient_magnitude(const GridFunction& u);
/// Per-cell gradient vectors, same stencil (cell-major, n entries each).
std::vector<double> gradient_vectors(const GridFunction& u);
/// Midpoint sum of |Du|^2 h^n.
double dirichlet_energy(const GridFunction& u);
/// max |Du| over cells; used as the discrete Lipschitz bound of u.
double lipschitz_estimate(const GridFunction& u);

/// (n c_n^{1/n})^2 * integral of |Dp(s)|^2 s^{2-2/n} over [s_lo, s_hi],
/// exact per linear piece (p must be in piecewise-linear form). This is the
/// Dirichlet energy of the radial arrangement in the volume coordinate.
double radial_profile_energy(const StepProfile& p, const BallDomain& ball, double s_lo,
                             double s_hi);
/// Same with weight (|Omega| - s)^{2-2/n}: the energy of the mirrored
/// (radially increasing) arrangement.
double mirrored_profile_energy(const StepProfile& p, const BallDomain& ball, double s_lo,
                               double s_hi);

/// Super-level set {u > t} as a cell membership mask.
struct LevelSet {
    const Domain* domain = nullptr;
    double threshold = 0.0;
    std::vector<std::uint8_t> member;  // per interior cell

    static LevelSet of(const GridFunction& u, double t);
    double measure() const;
};

/// Face-count perimeter relative to the domain (interior interfaces only;
/// faces on the domain boundary are excluded). `raw` is the l1 (anisotropic)
/// value; `calibrated` divides by the direction-averaged anisotropy factor.
struct PerimeterEstimate {
    double raw = 0.0;
    double calibrated = 0.0;
};

PerimeterEstimate relative_perimeter(const LevelSet& ls);
/// h^{n-1} times the count of member-cell faces on the domain boundary.
double boundary_trace_measure(const LevelSet& ls);

/// Mean of sum_i |nu_i| over uniformly random unit normals nu: the expected
/// ratio of the l1 face-count perimeter to the true one. Monte-Carlo with a
/// fixed seed, cached per dimension (4/pi in 2-D, 3/2 in 3-D).
double anisotropy_factor(int dimension);

struct IsoperimetricConstants {
    double Q = 0.0;
    double C = 0.0;
    std::string method;  // "searched" | "analytic"
};

/// Lower bound on the best constant in min(|E|, |Omega \ E|)^{1-1/n} <= Q P(E),
/// searched over half-space cuts (direction/offset grid) and single-threshold
/// level sets of the probe functions.
double estimate_Q(const Domain& domain, std::span<const GridFunction> probes = {});
/// Lower bound on the best constant in trace(E) <= C * P(E) over |E| <= |Omega|/2,
/// same search family.
double estimate_C(const Domain& domain, std::span<const GridFunction> probes = {});
IsoperimetricConstants estimate_constants(const Domain& domain,
                                          std::span<const GridFunction> probes = {});

enum class GammaCase { I, II, III, IV, V };

std::string to_string(GammaCase c);
GammaCase gamma_case_from_string(const std::string& s);

struct GammaInputs {
    int dimension = 0;
    double measure = 0.0;
    double Q = 0.0;    // required for cases ii-v
    double C = 0.0;    // required for cases iv, v
    double eps = 0.0;  // required for cases iii-v
};

/// Closed-form lower perimeter-bound constant for one of the five sufficient
/// conditions: (i) full boundary vanishing, (ii) small support, (iii) zero
/// set of measure eps, (iv) boundary-trace vanishing, (v) projection of the
/// zero set.
struct GammaCertificate {
    double gamma = 0.0;
    GammaCase kase = GammaCase::I;
    std::map<std::string, double> inputs;
};

GammaCertificate gamma_for_case(GammaCase kase, const GammaInputs& in);

/// Thresholds for level-set scans: the distinct cell values, thinned to at
/// most `cap` by quantile selection.
std::vector<double> level_thresholds(const GridFunction& u, int cap = kScanMaxThresholds);

/// level_thresholds filtered by the scan policy: the level set must clear
/// the measure floor and its complement must not be confined to the
/// one-cell boundary shell (where interfaces are entangled with the domain
/// boundary and face counts are meaningless).
std::vector<double> resolvable_thresholds(const GridFunction& u);

struct ScanResult {
    bool passed = true;
    double max_violation = 0.0;  // max of (bound - perimeter)/bound over tested t
    double worst_threshold = 0.0;
    int tested = 0;
    int skipped_small = 0;
    std::string reason;  // set when not passed
};

/// Scans the super-level sets of u against the certified lower perimeter
/// bound, calibrated perimeter vs gamma * mu(t)^{1-1/n}, within kScanSlack.
ScanResult scan_perimeter_condition(const GridFunction& u, double gamma);

/// Evidence that u vanishes toward the domain boundary: every cell with a
/// face on the boundary carries |u| <= tol (default tol: h times the
/// measured Lipschitz bound).
bool boundary_vanishing(const GridFunction& u, std::optional<double> tol = std::nullopt);

/// Both sides of the curve-integral identity for f >= 0: the direct cell sum
/// of f |Du| h^n, and the t-quadrature of f-weighted interface sums (faces
/// carry a local-normal correction).
std::pair<double, double> coarea_check(const GridFunction& u, const GridFunction& f);

/// RCONST v1 certificate file.
struct ConstantsCertificate {
    IsoperimetricConstants constants;
    std::optional<GammaCertificate> gamma;
};

void write_constants(const ConstantsCertificate& c, const std::string& path);
ConstantsCertificate read_constants(const std::string& path);

}  // namespace rearr
