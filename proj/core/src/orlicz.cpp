#include "rearr/orlicz.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "rearr/expr.hpp"
#include "rearr/numeric.hpp"

namespace rearr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDeltaRatioCap = 1e8;

double n_times_cn_root(int n) {
    return static_cast<double>(n) * std::pow(unit_ball_volume(n), 1.0 / n);
}

// 8-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr double kGLNode[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                               -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                               0.7966664774136267,  0.9602898564975363};
constexpr double kGLWeight[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                 0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                 0.2223810344533745, 0.1012285362903763};

std::vector<double> probe_grid(double lo, double hi, int per_decade) {
    const double decades = std::log10(hi / lo);
    const int count = std::max(2, static_cast<int>(decades * per_decade));
    std::vector<double> t(count);
    for (int i = 0; i < count; ++i) {
        t[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
    }
    return t;
}

}  // namespace

void NFunction::validate() const {
    if (std::abs(eval_(0.0)) > 0.0) throw std::invalid_argument("not an N-function: A(0) != 0");
    const auto probes = probe_grid(1e-6, 1e6, 8);
    double prev_t = 0.0, prev_a = 0.0;
    bool saw_infinite = false;
    for (double t : probes) {
        const double a = eval_(t);
        if (std::isnan(a) || a < 0.0)
            throw std::invalid_argument("not an N-function: negative or undefined value");
        if (std::isinf(a)) {
            saw_infinite = true;  // admissible tail; ratios below skip it
            continue;
        }
        if (saw_infinite) throw std::invalid_argument("not an N-function: non-monotone tail");
        if (a + 1e-300 < prev_a)
            throw std::invalid_argument("not an N-function: decreasing on the probe grid");
        // Midpoint convexity against the previous probe.
        if (prev_t > 0.0) {
            const double mid = 0.5 * (prev_t + t);
            const double lhs = eval_(mid);
            const double rhs = 0.5 * (prev_a + a);
            if (std::isfinite(lhs) && lhs > rhs * (1.0 + 1e-9) + 1e-300)
                throw std::invalid_argument("not an N-function: convexity fails on probes");
        }
        prev_t = t;
        prev_a = a;
    }
    const double ratio_lo = eval_(1e-6) / 1e-6;
    const double ratio_one = eval_(1.0);
    const double t_top = saw_infinite ? 0.0 : 1e6;
    const double ratio_hi = saw_infinite ? kInf : eval_(1e6) / 1e6;
    (void)t_top;
    if (!(ratio_one > 0.0)) throw std::invalid_argument("not an N-function: vanishes at 1");
    if (!(ratio_lo <= 0.9 * ratio_one))
        throw std::invalid_argument("not an N-function: A(t)/t does not decay near 0");
    if (!(ratio_hi >= 1.1 * ratio_one))
        throw std::invalid_argument("not an N-function: A(t)/t does not grow at infinity");
}

NFunction NFunction::power(double p) {
    if (!(p > 1.0)) throw std::invalid_argument("power N-function needs p > 1");
    NFunction A;
    A.tag_ = "power-p";
    A.p_ = p;
    A.eval_ = [p](double t) { return std::pow(t, p); };
    A.delta2_ = Delta2Info{true, true, std::pow(2.0, p), 0.0, "formula"};
    A.validate();
    return A;
}

NFunction NFunction::power_log(double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("p-log N-function needs p >= 1");
    NFunction A;
    A.tag_ = "p-log";
    A.p_ = p;
    A.eval_ = [p](double t) { return std::pow(t, p) * std::log1p(t); };
    // A(2t)/A(t) = 2^p log(1+2t)/log(1+t) decreases from 2^{p+1} to 2^p.
    A.delta2_ = Delta2Info{true, true, std::pow(2.0, p + 1.0), 0.0, "formula"};
    A.validate();
    return A;
}

NFunction NFunction::custom(std::string expression) {
    NFunction A;
    A.tag_ = "custom";
    A.expression_ = std::move(expression);
    A.eval_ = compile_expression(A.expression_);
    A.validate();
    A.delta2_ = delta2_classify(A);
    return A;
}

std::string NFunction::descriptor() const {
    std::ostringstream out;
    if (tag_ == "custom") {
        out << "tag=custom expr=" << expression_;
    } else {
        out << "tag=" << tag_ << " p=" << format_double(p_);
    }
    return out.str();
}

NFunction parse_nfunction(const std::string& descriptor_or_path) {
    std::string desc = descriptor_or_path;
    if (std::filesystem::exists(descriptor_or_path) &&
        std::filesystem::is_regular_file(descriptor_or_path)) {
        std::ifstream in(descriptor_or_path);
        std::string line;
        if (!std::getline(in, line) || line != "NFUNC v1")
            throw std::runtime_error("malformed header (line 1): expected 'NFUNC v1'");
        if (!std::getline(in, desc)) throw std::runtime_error("missing N-function descriptor line");
    }

    if (desc.rfind("tag=", 0) != 0)
        throw std::invalid_argument("N-function descriptor must start with 'tag='");
    std::istringstream ss(desc);
    std::string tag_tok;
    ss >> tag_tok;
    const std::string tag = tag_tok.substr(4);
    if (tag == "power-p" || tag == "p-log") {
        std::string p_tok;
        if (!(ss >> p_tok) || p_tok.rfind("p=", 0) != 0)
            throw std::invalid_argument("descriptor needs 'p=<real>'");
        const double p = parse_double(p_tok.substr(2), "N-function exponent");
        return tag == "power-p" ? NFunction::power(p) : NFunction::power_log(p);
    }
    if (tag == "custom") {
        const auto pos = desc.find("expr=");
        if (pos == std::string::npos) throw std::invalid_argument("descriptor needs 'expr=...'");
        return NFunction::custom(desc.substr(pos + 5));
    }
    throw std::invalid_argument("unknown N-function tag: " + tag);
}

void write_nfunction(const NFunction& A, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "NFUNC v1\n" << A.descriptor() << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

Delta2Info delta2_classify(const NFunction& A, double t_lo, double t_hi) {
    if (!(t_hi / t_lo >= 1e12))
        throw std::invalid_argument("probe range must span at least 12 decades");
    if (A.tag() != "custom" && A.delta2().method == "formula") return A.delta2();

    Delta2Info info;
    info.method = "probed";
    const double mid = std::sqrt(t_lo * t_hi);
    double max_all = 0.0, max_upper = 0.0;
    bool finite_all = true, finite_upper = true;
    for (double t : probe_grid(t_lo, t_hi, 8)) {
        const double a = A(t);
        const double a2 = A(2.0 * t);
        if (std::isnan(a) || std::isnan(a2))
            throw std::runtime_error("classification failure: A not finite");
        bool finite = false;
        if (std::isfinite(a) && std::isfinite(a2)) {
            if (!(a > 0.0)) continue;
            const double ratio = a2 / a;
            finite = ratio <= kDeltaRatioCap;
            if (finite) {
                max_all = std::max(max_all, ratio);
                if (t >= mid) max_upper = std::max(max_upper, ratio);
            }
        }
        // An overflowed value is evidence against doubling, not an error.
        finite_all = finite_all && finite;
        if (t >= mid) finite_upper = finite_upper && finite;
    }
    info.global = finite_all && max_all > 0.0;
    info.near_infinity = finite_upper && max_upper > 0.0;
    info.delta = info.global ? max_all : max_upper;
    info.t0 = info.global ? 0.0 : mid;
    return info;
}

double modular(const GridFunction& u, const NFunction& A, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    KahanSum acc;
    for (double v : u.values()) {
        const double a = A(std::abs(v) / lambda);
        if (!std::isfinite(a)) return kInf;
        acc.add(a);
    }
    return acc.value() * u.domain().cell_volume();
}

double modular(const StepProfile& p, const NFunction& A, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    if (p.form() != ProfileForm::Step) throw std::logic_error("modular expects the step form");
    KahanSum acc;
    const auto& bp = p.breakpoints();
    for (std::size_t i = 0; i < p.values().size(); ++i) {
        const double a = A(std::abs(p.values()[i]) / lambda);
        if (!std::isfinite(a)) return kInf;
        acc.add(a * (bp[i + 1] - bp[i]));
    }
    return acc.value();
}

namespace {

LuxemburgNorm bisect_modular(const std::function<double(double)>& mod, double seed) {
    LuxemburgNorm out;
    double hi = seed > 0.0 ? seed : 1.0;
    int guard = 0;
    while (mod(hi) > 1.0) {
        hi *= 4.0;
        if (++guard > 300) throw std::runtime_error("Luxemburg bracket search failed (upper)");
    }
    double lo = hi;
    guard = 0;
    while (mod(lo) <= 1.0) {
        lo /= 4.0;
        if (++guard > 300) {
            // Modular stays <= 1 for arbitrarily small lambda: numerically a
            // zero function.
            out.value = 0.0;
            out.bracket_lo = 0.0;
            out.bracket_hi = hi;
            out.modular_at_value = mod(hi);
            return out;
        }
    }
    for (int iter = 0; iter < 200 && (hi - lo) > 1e-10 * hi; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (mod(mid) <= 1.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    out.value = hi;
    out.bracket_lo = lo;
    out.bracket_hi = hi;
    out.modular_at_value = mod(hi);
    return out;
}

}  // namespace

LuxemburgNorm luxemburg_norm(const GridFunction& u, const NFunction& A) {
    double maxabs = 0.0;
    for (double v : u.values()) maxabs = std::max(maxabs, std::abs(v));
    if (maxabs == 0.0) return LuxemburgNorm{};
    return bisect_modular([&](double lam) { return modular(u, A, lam); }, maxabs);
}

LuxemburgNorm luxemburg_norm(const StepProfile& p, const NFunction& A) {
    double maxabs = 0.0;
    for (double v : p.values()) maxabs = std::max(maxabs, std::abs(v));
    if (maxabs == 0.0) return LuxemburgNorm{};
    return bisect_modular([&](double lam) { return modular(p, A, lam); }, maxabs);
}

double symmetrized_gradient_modular(const StepProfile& p, const BallDomain& ball,
                                    const NFunction& A, double lambda, double s_lo, double s_hi) {
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    if (p.form() != ProfileForm::PiecewiseLinear)
        throw std::logic_error("symmetrized gradient modular expects the piecewise-linear view");
    const double m = p.total_measure();
    if (!(s_lo >= -1e-12 * m) || !(s_hi <= m * (1.0 + 1e-12)) || !(s_lo < s_hi))
        throw std::invalid_argument("s-range outside [0, |Omega|]");
    const double lo = std::max(s_lo, 0.0);
    const double hi = std::min(s_hi, m);

    const int n = ball.dimension;
    const double nc = n_times_cn_root(n);
    const double w_exp = 1.0 - 1.0 / n;

    const auto& bp = p.breakpoints();
    const auto& vals = p.values();
    KahanSum acc;
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
        const double a = std::max(bp[i], lo);
        const double b = std::min(bp[i + 1], hi);
        if (!(b > a)) continue;
        const double slope = std::abs((vals[i + 1] - vals[i]) / (bp[i + 1] - bp[i]));
        const double half = 0.5 * (b - a);
        const double centre = 0.5 * (a + b);
        double piece = 0.0;
        for (int g = 0; g < 8; ++g) {
            const double s = centre + half * kGLNode[g];
            const double integrand = A(nc * slope * std::pow(s, w_exp) / lambda);
            if (!std::isfinite(integrand)) return kInf;
            piece += kGLWeight[g] * integrand;
        }
        acc.add(piece * half);
    }
    return acc.value();
}

LuxemburgNorm symmetrized_gradient_norm(const StepProfile& p, const BallDomain& ball,
                                        const NFunction& A, double s_lo, double s_hi) {
    // Seed from the largest slope-weight product.
    const int n = ball.dimension;
    const double nc = n_times_cn_root(n);
    double seed = 0.0;
    const auto& bp = p.breakpoints();
    const auto& vals = p.values();
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
        const double slope = std::abs((vals[i + 1] - vals[i]) / (bp[i + 1] - bp[i]));
        seed = std::max(seed, nc * slope * std::pow(bp[i + 1], 1.0 - 1.0 / n));
    }
    if (seed == 0.0) return LuxemburgNorm{};
    return bisect_modular(
        [&](double lam) { return symmetrized_gradient_modular(p, ball, A, lam, s_lo, s_hi); },
        seed);
}

InequalityReport verify_orlicz_polya_szego(const GridFunction& u, const GammaCertificate& cert,
                                           const NFunction& A) {
    // Same hypotheses as the quadratic global estimate; the certificate scan
    // gates the verdict identically.
    InequalityReport gate = verify_thm_1_1(u, cert);
    InequalityReport r;
    r.name = "orlicz-3.4";
    r.meta = gate.meta;
    r.meta["nfunc"] = A.descriptor();
    if (gate.verdict == Verdict::Vacuous) {
        r.verdict = Verdict::Vacuous;
        return r;
    }
    r.meta.erase("reason");

    const int n = u.domain().dimension();
    const double m = u.domain().measure();
    const double lambda0 = n_times_cn_root(n) / cert.gamma;

    const RadialFunction tilde = schwarz_symmetrization(u);
    const StepProfile pl = piecewise_linear_view(tilde.profile, tilde.ball, kProfileViewSpacingCells * u.spacing());
    const double lhs = symmetrized_gradient_norm(pl, tilde.ball, A, 0.0, m).value;
    const double grad_norm = luxemburg_norm(gradient_magnitude(u), A).value;

    r.lhs = lhs;
    r.rhs = lambda0 * grad_norm;
    r.constant = lambda0;
    r.margin = r.rhs - r.lhs;
    r.verdict = r.lhs <= r.rhs ? Verdict::Holds : Verdict::Violated;
    return r;
}

InequalityReport verify_orlicz_local(const GridFunction& u, double Q, double eps,
                                     const NFunction& A) {
    const double m = u.domain().measure();
    if (!(eps > 0.0) || !(eps < m / 2.0)) throw std::invalid_argument("eps out of range");
    if (!(Q > 0.0)) throw std::invalid_argument("missing constant Q");

    InequalityReport r;
    r.name = "orlicz-3.9";
    r.meta["nfunc"] = A.descriptor();
    const int n = u.domain().dimension();
    const double lambda = std::pow((m - eps) / eps, 1.0 - 1.0 / n);
    const double constant = Q * n_times_cn_root(n) * lambda;

    const RadialFunction tilde = schwarz_symmetrization(u);
    const StepProfile pl = piecewise_linear_view(tilde.profile, tilde.ball, kProfileViewSpacingCells * u.spacing());
    const double lhs = symmetrized_gradient_norm(pl, tilde.ball, A, 0.0, m - eps).value;
    const double grad_norm = luxemburg_norm(gradient_magnitude(u), A).value;

    r.meta["h"] = format_double(u.spacing());
    r.meta["eps"] = format_double(eps);
    r.meta["Q"] = format_double(Q);
    r.meta["lambda"] = format_double(lambda);
    r.lhs = lhs;
    r.rhs = constant * grad_norm;
    r.constant = constant;
    r.margin = r.rhs - r.lhs;
    r.verdict = r.lhs <= r.rhs ? Verdict::Holds : Verdict::Violated;
    return r;
}

}  // namespace rearr
