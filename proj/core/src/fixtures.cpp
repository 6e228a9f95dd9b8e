#include "rearr/fixtures.hpp"

#include <cmath>
#include <random>

namespace rearr::fixtures {

namespace {

double radius(const std::vector<double>& x) {
    double r2 = 0.0;
    for (double xi : x) r2 += xi * xi;
    return std::sqrt(r2);
}

double dist(const std::vector<double>& x, double cx, double cy) {
    const double dx = x[0] - cx;
    const double dy = x[1] - cy;
    return std::sqrt(dx * dx + dy * dy);
}

}  // namespace

Domain unit_square(double h) {
    return make_domain(DomainSpec::box({0.0, 0.0}, {1.0, 1.0}, h));
}

Domain unit_disk(double h) { return make_domain(DomainSpec::ball(2, 1.0, h)); }

Domain unit_ball3(double h) { return make_domain(DomainSpec::ball(3, 1.0, h)); }

double bump(double rho) {
    if (rho >= 1.0) return 0.0;
    const double t = 1.0 - rho * rho;
    return t * t;
}

GridFunction radial_bump_disk(double h) {
    return sample(unit_disk(h), [](const std::vector<double>& x) { return bump(radius(x) / 0.8); });
}

GridFunction two_bump_square(double h) {
    return sample(unit_square(h), [](const std::vector<double>& x) {
        return bump(dist(x, 0.3, 0.35) / 0.22) + 0.7 * bump(dist(x, 0.7, 0.62) / 0.2);
    });
}

GridFunction quadrant_bump_square(double h) {
    return sample(unit_square(h),
                  [](const std::vector<double>& x) { return bump(dist(x, 0.25, 0.25) / 0.2); });
}

GridFunction center_bump_square(double h, double support_radius) {
    return sample(unit_square(h), [support_radius](const std::vector<double>& x) {
        return bump(dist(x, 0.5, 0.5) / support_radius);
    });
}

GridFunction cosine_square(double h) {
    return sample(unit_square(h),
                  [](const std::vector<double>& x) { return std::cos(M_PI * x[0]); });
}

GridFunction cone_disk(double h) {
    return sample(unit_disk(h), [](const std::vector<double>& x) { return 1.0 - radius(x); });
}

GridFunction wave_positive_square(double h) {
    return sample(unit_square(h), [](const std::vector<double>& x) {
        return 1.0 + 0.5 * std::sin(2.0 * M_PI * x[0]) * std::sin(2.0 * M_PI * x[1]);
    });
}

GridFunction sine_base_square(double h) {
    return sample(unit_square(h), [](const std::vector<double>& x) {
        return std::sin(M_PI * x[0]) * std::sin(M_PI * x[1]);
    });
}

GridFunction half_ball_bump3(double h) {
    return sample(unit_ball3(h), [](const std::vector<double>& x) {
        const double r = radius(x);
        return std::max(x[0], 0.0) * (1.0 - r * r);
    });
}

GridFunction ramp_square(double h) {
    return sample(unit_square(h), [](const std::vector<double>& x) { return x[0]; });
}

GridFunction diameter_pinned_disk(double h) {
    return sample(unit_disk(h), [](const std::vector<double>& x) {
        return std::abs(std::sin(M_PI * x[1])) * (1.0 - radius(x));
    });
}

GridFunction random_square(int cells_per_side, unsigned seed) {
    Domain d = make_domain(
        DomainSpec::box({0.0, 0.0}, {1.0, 1.0}, 1.0 / static_cast<double>(cells_per_side)));
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<double> values(d.cell_count());
    for (auto& v : values) v = uni(rng);
    return GridFunction(std::move(d), std::move(values));
}

}  // namespace rearr::fixtures
