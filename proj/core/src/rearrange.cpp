#include "rearr/rearrange.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "rearr/numeric.hpp"

namespace rearr {

StepProfile::StepProfile(ProfileForm form, std::vector<double> breakpoints,
                         std::vector<double> values)
    : form_(form), breakpoints_(std::move(breakpoints)), values_(std::move(values)) {}

StepProfile StepProfile::step(std::vector<double> breakpoints, std::vector<double> values) {
    if (breakpoints.size() < 2) throw std::invalid_argument("profile needs at least one interval");
    if (values.size() + 1 != breakpoints.size())
        throw std::invalid_argument("step profile: values must be one per interval");
    if (breakpoints.front() != 0.0) throw std::invalid_argument("profile must start at 0");
    for (std::size_t i = 1; i < breakpoints.size(); ++i) {
        if (!(breakpoints[i] > breakpoints[i - 1]))
            throw std::invalid_argument("profile breakpoints must increase");
    }
    return StepProfile(ProfileForm::Step, std::move(breakpoints), std::move(values));
}

StepProfile StepProfile::piecewise_linear(std::vector<double> breakpoints,
                                          std::vector<double> node_values) {
    if (breakpoints.size() < 2) throw std::invalid_argument("profile needs at least one interval");
    if (node_values.size() != breakpoints.size())
        throw std::invalid_argument("piecewise-linear profile: one value per breakpoint");
    if (breakpoints.front() != 0.0) throw std::invalid_argument("profile must start at 0");
    for (std::size_t i = 1; i < breakpoints.size(); ++i) {
        if (!(breakpoints[i] > breakpoints[i - 1]))
            throw std::invalid_argument("profile breakpoints must increase");
    }
    return StepProfile(ProfileForm::PiecewiseLinear, std::move(breakpoints), std::move(node_values));
}

double StepProfile::value_at(double s) const {
    const double m = total_measure();
    if (s <= 0.0) return values_.front();
    if (s >= m) return values_.back();
    const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), s);
    const auto idx = static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
    if (form_ == ProfileForm::Step) {
        return values_[std::min(idx, values_.size() - 1)];
    }
    const double a = breakpoints_[idx];
    const double b = breakpoints_[idx + 1];
    const double t = (s - a) / (b - a);
    return values_[idx] + t * (values_[idx + 1] - values_[idx]);
}

bool StepProfile::nonincreasing() const {
    for (std::size_t i = 1; i < values_.size(); ++i) {
        if (values_[i] > values_[i - 1]) return false;
    }
    return true;
}

StepProfile StepProfile::offset(double c) const {
    std::vector<double> shifted(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) shifted[i] = values_[i] - c;
    return StepProfile(form_, breakpoints_, std::move(shifted));
}

double StepProfile::lp_norm(double p) const {
    if (form_ != ProfileForm::Step) throw std::logic_error("lp_norm expects the step form");
    KahanSum acc;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        acc.add(std::pow(std::abs(values_[i]), p) * (breakpoints_[i + 1] - breakpoints_[i]));
    }
    return std::pow(acc.value(), 1.0 / p);
}

BallDomain BallDomain::with_measure(int dimension, double measure) {
    if (dimension < 1) throw std::invalid_argument("dimension must be >= 1");
    if (!(measure > 0.0)) throw std::invalid_argument("measure must be positive");
    BallDomain b;
    b.dimension = dimension;
    b.unit_volume = unit_ball_volume(dimension);
    b.measure = measure;
    b.radius = std::pow(measure / b.unit_volume, 1.0 / dimension);
    return b;
}

double BallDomain::volume_coordinate(double r) const {
    return unit_volume * std::pow(std::abs(r), static_cast<double>(dimension));
}

double distribution(const GridFunction& u, double t) {
    std::int64_t count = 0;
    for (double v : u.values()) count += v > t ? 1 : 0;
    return static_cast<double>(count) * u.domain().cell_volume();
}

double distribution(const StepProfile& p, double t) {
    if (p.form() != ProfileForm::Step) throw std::logic_error("distribution expects the step form");
    KahanSum acc;
    const auto& bp = p.breakpoints();
    const auto& vals = p.values();
    for (std::size_t i = 0; i < vals.size(); ++i) {
        if (vals[i] > t) acc.add(bp[i + 1] - bp[i]);
    }
    return acc.value();
}

StepProfile decreasing_rearrangement(const GridFunction& u) {
    std::vector<double> sorted(u.values().begin(), u.values().end());
    std::stable_sort(sorted.begin(), sorted.end(), std::greater<double>());
    const double cell = u.domain().cell_volume();
    std::vector<double> bp(sorted.size() + 1);
    for (std::size_t i = 0; i < bp.size(); ++i) bp[i] = static_cast<double>(i) * cell;
    return StepProfile::step(std::move(bp), std::move(sorted));
}

RadialFunction schwarz_symmetrization(const GridFunction& u) {
    return RadialFunction{BallDomain::with_measure(u.domain().dimension(), u.domain().measure()),
                          decreasing_rearrangement(u)};
}

StepProfile positive_part(const StepProfile& p) {
    std::vector<double> vals(p.values().size());
    for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = std::max(p.values()[i], 0.0);
    if (p.form() == ProfileForm::Step) return StepProfile::step(p.breakpoints(), std::move(vals));
    return StepProfile::piecewise_linear(p.breakpoints(), std::move(vals));
}

StepProfile negative_part_reflected(const StepProfile& p) {
    if (p.form() != ProfileForm::Step)
        throw std::logic_error("negative_part_reflected expects the step form");
    const auto& bp = p.breakpoints();
    const auto& vals = p.values();
    const std::size_t k = vals.size();
    const double m = p.total_measure();

    // Equal-width profiles (every grid rearrangement) reflect onto the same
    // multiples of the width, bit for bit.
    const double width = bp[1];
    bool uniform = true;
    for (std::size_t i = 0; i <= k && uniform; ++i) {
        uniform = bp[i] == static_cast<double>(i) * width;
    }

    std::vector<double> rb(k + 1);
    if (uniform) {
        for (std::size_t j = 0; j <= k; ++j) rb[j] = static_cast<double>(j) * width;
        rb[k] = m;
    } else {
        for (std::size_t j = 0; j <= k; ++j) rb[j] = m - bp[k - j];
        rb[0] = 0.0;
    }
    std::vector<double> rv(k);
    for (std::size_t j = 0; j < k; ++j) rv[j] = std::max(-vals[k - 1 - j], 0.0);
    return StepProfile::step(std::move(rb), std::move(rv));
}

double median_level(const StepProfile& p) { return p.value_at(p.total_measure() / 2.0); }

StepProfile piecewise_linear_view(const StepProfile& p, const BallDomain& ball,
                                  double radial_spacing) {
    if (p.form() == ProfileForm::PiecewiseLinear) return p;
    if (!(radial_spacing > 0.0)) throw std::invalid_argument("radial spacing must be positive");
    const double m = p.total_measure();

    std::vector<double> knots;
    knots.push_back(0.0);
    for (std::int64_t k = 1;; ++k) {
        const double s = ball.volume_coordinate(static_cast<double>(k) * radial_spacing);
        if (s >= m) break;
        if (s > knots.back()) knots.push_back(s);
    }
    // A sliver shorter than half the last shell would amplify difference
    // quotients; fold it into the final piece.
    if (knots.size() >= 2 && m - knots.back() < 0.5 * (knots.back() - knots[knots.size() - 2])) {
        knots.pop_back();
    }
    if (knots.back() < m) knots.push_back(m);
    if (knots.size() < 2) knots = {0.0, m};

    // Node values are window means of the step profile around each knot
    // (windows split at knot midpoints). Pointwise order statistics carry
    // lattice quantization noise whose squared difference quotients inflate
    // energies; window means keep slopes at the grid's radial resolution.
    const auto& bp = p.breakpoints();
    const auto& vals = p.values();
    std::vector<double> prefix(bp.size(), 0.0);
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
        prefix[i + 1] = prefix[i] + vals[i] * (bp[i + 1] - bp[i]);
    }
    auto integral_to = [&](double s) {
        if (s <= 0.0) return 0.0;
        if (s >= m) return prefix.back();
        const auto it = std::upper_bound(bp.begin(), bp.end(), s);
        const auto idx = static_cast<std::size_t>(it - bp.begin()) - 1;
        return prefix[idx] + vals[std::min(idx, vals.size() - 1)] * (s - bp[idx]);
    };

    std::vector<double> nodes(knots.size());
    for (std::size_t i = 0; i < knots.size(); ++i) {
        const double lo = i == 0 ? 0.0 : 0.5 * (knots[i - 1] + knots[i]);
        const double hi = i + 1 == knots.size() ? m : 0.5 * (knots[i] + knots[i + 1]);
        nodes[i] = (integral_to(hi) - integral_to(lo)) / (hi - lo);
    }
    return StepProfile::piecewise_linear(std::move(knots), std::move(nodes));
}

GridFunction resample_on_ball(const RadialFunction& f, double h) {
    Domain ball = make_domain(DomainSpec::ball(f.ball.dimension, f.ball.radius, h));
    std::vector<double> values(ball.cell_count());
    for (std::int64_t c = 0; c < ball.cell_count(); ++c) {
        const auto x = ball.cell_center(ball.lattice_of_cell(c));
        double r2 = 0.0;
        for (double xi : x) r2 += xi * xi;
        values[c] = f.value_at_radius(std::sqrt(r2));
    }
    return GridFunction(std::move(ball), std::move(values));
}

void write_profile(const StepProfile& p, const std::string& path) {
    if (p.form() != ProfileForm::Step)
        throw std::logic_error("profile files carry the step form only");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "RPROF v1\n";
    out << "|Omega|=" << format_double(p.total_measure()) << "\n";
    for (std::size_t i = 0; i < p.values().size(); ++i) {
        out << format_double(p.breakpoints()[i]) << ' ' << format_double(p.values()[i]) << "\n";
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

StepProfile read_profile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "RPROF v1")
        throw std::runtime_error("malformed header (line 1): expected 'RPROF v1'");
    if (!std::getline(in, line) || line.rfind("|Omega|=", 0) != 0)
        throw std::runtime_error("malformed header (line 2): expected '|Omega|=<real>'");
    const double measure = parse_double(line.substr(8), "|Omega|");
    if (!(measure > 0.0)) throw std::runtime_error("|Omega| must be positive");

    std::vector<double> bp, vals;
    std::int64_t lineno = 2;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string s_tok, v_tok;
        if (!(ss >> s_tok >> v_tok))
            throw std::runtime_error("malformed profile row (line " + std::to_string(lineno) + ")");
        bp.push_back(parse_double(s_tok, "breakpoint (line " + std::to_string(lineno) + ")"));
        vals.push_back(parse_double(v_tok, "value (line " + std::to_string(lineno) + ")"));
    }
    if (bp.empty()) throw std::runtime_error("profile has no intervals: " + path);
    bp.push_back(measure);
    return StepProfile::step(std::move(bp), std::move(vals));
}

}  // namespace rearr
