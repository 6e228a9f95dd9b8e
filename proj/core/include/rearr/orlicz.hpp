#pragma once

#include <functional>
#include <optional>
#include <string>

#include "rearr/geometry.hpp"
#include "rearr/grid.hpp"
#include "rearr/inequalities.hpp"
#include "rearr/rearrange.hpp"

namespace rearr {

/// Doubling classification of a Young function: A(2t) <= delta A(t) globally
/// or for t >= t0. `method` records how it was established ("formula" for
/// tagged families, "probed" for custom evaluators).
struct Delta2Info {
    bool global = false;
    bool near_infinity = false;
    double delta = 0.0;
    double t0 = 0.0;
    std::string method;
};

/// An N-function: increasing, continuous, convex on [0, inf) with A(t)/t
/// tending to 0 at 0 and to infinity at infinity. Construction validates
/// these properties on a log-spaced probe grid.
class NFunction {
public:
    /// A(r) = r^p, p > 1.
    static NFunction power(double p);
    /// A(r) = r^p log(1+r), p >= 1.
    static NFunction power_log(double p);
    /// A given by a one-variable expression in r.
    static NFunction custom(std::string expression);

    double operator()(double t) const { return eval_(t); }
    const std::string& tag() const { return tag_; }
    double exponent() const { return p_; }
    /// Descriptor line, e.g. "tag=power-p p=2".
    std::string descriptor() const;

    const Delta2Info& delta2() const { return delta2_; }

private:
    NFunction() = default;
    void validate() const;

    std::function<double(double)> eval_;
    std::string tag_;
    double p_ = 0.0;
    std::string expression_;
    Delta2Info delta2_;

    friend Delta2Info delta2_classify(const NFunction& A, double t_lo, double t_hi);
};

/// Parses "tag=power-p p=2" / "tag=p-log p=1" / "tag=custom expr=..." either
/// inline or from an NFUNC v1 file (the argument is treated as a path when a
/// file exists there).
NFunction parse_nfunction(const std::string& descriptor_or_path);
void write_nfunction(const NFunction& A, const std::string& path);

/// Probe-based doubling classification over [t_lo, t_hi] (span must cover at
/// least 12 decades). Tagged families report exact formula values.
Delta2Info delta2_classify(const NFunction& A, double t_lo = 1e-6, double t_hi = 1e6);

/// Integral of A(|u|/lambda): midpoint sum on grids, exact per interval on
/// step profiles. May legitimately be +infinity.
double modular(const GridFunction& u, const NFunction& A, double lambda);
double modular(const StepProfile& p, const NFunction& A, double lambda);

struct LuxemburgNorm {
    double value = 0.0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    double modular_at_value = 0.0;
};

/// inf{lambda > 0 : modular(u/lambda) <= 1} by bisection on the monotone
/// modular; relative bracket tolerance 1e-10 (or 200 iterations).
LuxemburgNorm luxemburg_norm(const GridFunction& u, const NFunction& A);
LuxemburgNorm luxemburg_norm(const StepProfile& p, const NFunction& A);

/// Modular of the symmetrized gradient in the volume coordinate:
/// integral of A(n c_n^{1/n} |Dp(s)| s^{1-1/n} / lambda) over [s_lo, s_hi]
/// (p in piecewise-linear form; fixed Gauss-Legendre rule per piece).
double symmetrized_gradient_modular(const StepProfile& p, const BallDomain& ball,
                                    const NFunction& A, double lambda, double s_lo, double s_hi);
LuxemburgNorm symmetrized_gradient_norm(const StepProfile& p, const BallDomain& ball,
                                        const NFunction& A, double s_lo, double s_hi);

/// Orlicz version of the global estimate: ||D(tilde u)||_A over the ball vs
/// (n c_n^{1/n}/gamma) ||Du||_A, conditional on the certificate.
InequalityReport verify_orlicz_polya_szego(const GridFunction& u, const GammaCertificate& cert,
                                           const NFunction& A);

/// Orlicz version of the local estimate on the concentric ball of measure
/// |Omega|-eps, eps in (0, |Omega|/2).
InequalityReport verify_orlicz_local(const GridFunction& u, double Q, double eps,
                                     const NFunction& A);

}  // namespace rearr
