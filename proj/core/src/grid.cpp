#include "rearr/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rearr/numeric.hpp"

namespace rearr {

namespace {

double pow_int(double base, int n) {
    double out = 1.0;
    for (int i = 0; i < n; ++i) out *= base;
    return out;
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

}  // namespace

DomainSpec DomainSpec::box(std::vector<double> lower, std::vector<double> upper, double spacing) {
    DomainSpec s;
    s.dimension = static_cast<int>(lower.size());
    s.kind = DomainKind::Box;
    s.spacing = spacing;
    s.lower = std::move(lower);
    s.upper = std::move(upper);
    return s;
}

DomainSpec DomainSpec::ball(int dimension, double radius, double spacing) {
    DomainSpec s;
    s.dimension = dimension;
    s.kind = DomainKind::Ball;
    s.spacing = spacing;
    s.radius = radius;
    return s;
}

DomainSpec DomainSpec::voxels(std::vector<std::int64_t> extents, std::vector<std::uint8_t> mask,
                              double spacing, std::vector<double> origin) {
    DomainSpec s;
    s.dimension = static_cast<int>(extents.size());
    s.kind = DomainKind::Mask;
    s.spacing = spacing;
    s.extents = std::move(extents);
    s.mask = std::move(mask);
    s.origin = std::move(origin);
    return s;
}

std::int64_t Domain::neighbor(std::int64_t lattice, int axis, int step) const {
    const std::int64_t coord = (lattice / strides_[axis]) % extents_[axis];
    const std::int64_t moved = coord + step;
    if (moved < 0 || moved >= extents_[axis]) return -1;
    return lattice + step * strides_[axis];
}

std::vector<double> Domain::cell_center(std::int64_t lattice) const {
    std::vector<double> x(dimension_);
    for (int a = 0; a < dimension_; ++a) x[a] = cell_center_coord(lattice, a);
    return x;
}

double Domain::cell_center_coord(std::int64_t lattice, int axis) const {
    const std::int64_t coord = (lattice / strides_[axis]) % extents_[axis];
    return origin_[axis] + (static_cast<double>(coord) + 0.5) * spacing_;
}

bool Domain::same_layout(const Domain& other) const {
    return dimension_ == other.dimension_ && spacing_ == other.spacing_ &&
           extents_ == other.extents_ && cells_ == other.cells_;
}

Domain make_domain(const DomainSpec& spec) {
    if (spec.dimension < 1) throw std::invalid_argument("dimension must be >= 1");
    double h = spec.spacing;
    if (!spec.spacings.empty()) {
        h = spec.spacings.front();
        for (double hi : spec.spacings) {
            if (hi != h) throw std::invalid_argument("anisotropic grid unsupported");
        }
    }
    if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("spacing must be positive");

    Domain d;
    d.dimension_ = spec.dimension;
    d.kind_ = spec.kind;
    d.spacing_ = h;
    d.cell_volume_ = pow_int(h, spec.dimension);
    d.face_area_ = pow_int(h, spec.dimension - 1);

    const int n = spec.dimension;
    switch (spec.kind) {
        case DomainKind::Box: {
            if (static_cast<int>(spec.lower.size()) != n || static_cast<int>(spec.upper.size()) != n)
                throw std::invalid_argument("box bounds must match the dimension");
            d.origin_ = spec.lower;
            d.extents_.resize(n);
            for (int a = 0; a < n; ++a) {
                const double len = spec.upper[a] - spec.lower[a];
                if (!(len > 0.0)) throw std::invalid_argument("degenerate box interval");
                const auto count = static_cast<std::int64_t>(std::llround(len / h));
                if (count < 1 || std::abs(count * h - len) > 1e-9 * std::max(1.0, std::abs(len)))
                    throw std::invalid_argument("box side is not a multiple of the spacing");
                d.extents_[a] = count;
            }
            break;
        }
        case DomainKind::Ball: {
            if (!(spec.radius > 0.0)) throw std::invalid_argument("ball radius must be positive");
            const auto half = static_cast<std::int64_t>(std::ceil(spec.radius / h - 1e-12));
            const std::int64_t count = 2 * std::max<std::int64_t>(half, 1);
            d.extents_.assign(n, count);
            d.origin_.assign(n, -0.5 * static_cast<double>(count) * h);
            break;
        }
        case DomainKind::Mask: {
            if (static_cast<int>(spec.extents.size()) != n)
                throw std::invalid_argument("mask extents must match the dimension");
            d.extents_ = spec.extents;
            d.origin_ = spec.origin.empty() ? std::vector<double>(n, 0.0) : spec.origin;
            if (static_cast<int>(d.origin_.size()) != n)
                throw std::invalid_argument("mask origin must match the dimension");
            break;
        }
    }

    d.strides_.assign(n, 1);
    for (int a = n - 2; a >= 0; --a) d.strides_[a] = d.strides_[a + 1] * d.extents_[a + 1];
    d.lattice_size_ = d.strides_[0] * d.extents_[0];

    d.lattice_to_cell_.assign(d.lattice_size_, -1);
    d.cells_.clear();
    for (std::int64_t i = 0; i < d.lattice_size_; ++i) {
        bool inside = true;
        switch (spec.kind) {
            case DomainKind::Box:
                break;
            case DomainKind::Ball: {
                double r2 = 0.0;
                for (int a = 0; a < n; ++a) {
                    const double c = d.cell_center_coord(i, a);
                    r2 += c * c;
                }
                inside = r2 < spec.radius * spec.radius;
                break;
            }
            case DomainKind::Mask:
                if (static_cast<std::int64_t>(spec.mask.size()) != d.lattice_size_)
                    throw std::invalid_argument("mask size does not match the extents");
                inside = spec.mask[i] != 0;
                break;
        }
        if (inside) {
            d.lattice_to_cell_[i] = static_cast<std::int64_t>(d.cells_.size());
            d.cells_.push_back(i);
        }
    }
    if (d.cells_.empty()) throw std::invalid_argument("empty domain");
    d.measure_ = static_cast<double>(d.cells_.size()) * d.cell_volume_;
    return d;
}

GridFunction::GridFunction(Domain domain, std::vector<double> values)
    : domain_(std::move(domain)), values_(std::move(values)) {
    if (static_cast<std::int64_t>(values_.size()) != domain_.cell_count())
        throw std::invalid_argument("value count does not match the interior cell count");
    for (double v : values_) {
        if (!std::isfinite(v)) throw std::invalid_argument("singular sample");
    }
}

double GridFunction::min_value() const {
    return *std::min_element(values_.begin(), values_.end());
}

double GridFunction::max_value() const {
    return *std::max_element(values_.begin(), values_.end());
}

GridFunction sample(const Domain& domain, const PointFunction& f) {
    std::vector<double> values(domain.cell_count());
    for (std::int64_t c = 0; c < domain.cell_count(); ++c) {
        const double v = f(domain.cell_center(domain.lattice_of_cell(c)));
        if (!std::isfinite(v)) throw std::runtime_error("singular sample");
        values[c] = v;
    }
    return GridFunction(domain, std::move(values));
}

void write_grid(const GridFunction& g, const std::string& path) {
    const Domain& d = g.domain();
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "RGRID v1\n";
    out << "n=" << d.dimension() << " h=" << format_double(d.spacing()) << "\n";
    for (int a = 0; a < d.dimension(); ++a) {
        if (a) out << ' ';
        out << d.extents()[a];
    }
    out << "\n";
    const bool full = d.cell_count() == d.lattice_size();
    out << "mask=" << (full ? "full" : "inline") << "\n";
    if (!full) {
        for (std::int64_t i = 0; i < d.lattice_size(); ++i) out << (d.in_mask(i) ? '1' : '0') << "\n";
    }
    for (double v : g.values()) out << format_double(v) << "\n";
    if (!out) throw std::runtime_error("write failed: " + path);
}

GridFunction read_grid(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string line;
    std::int64_t lineno = 0;
    auto next_line = [&](const char* what) {
        if (!std::getline(in, line)) {
            throw std::runtime_error(std::string("unexpected end of file while reading ") + what +
                                     " (" + path + ")");
        }
        ++lineno;
    };

    next_line("header");
    if (line != "RGRID v1") throw std::runtime_error("malformed header (line 1): expected 'RGRID v1'");

    next_line("grid parameters");
    int n = 0;
    double h = 0.0;
    {
        const auto toks = split_ws(line);
        if (toks.size() != 2 || toks[0].rfind("n=", 0) != 0 || toks[1].rfind("h=", 0) != 0)
            throw std::runtime_error("malformed header (line 2): expected 'n=<dim> h=<spacing>'");
        n = static_cast<int>(parse_int(toks[0].substr(2), "dimension"));
        h = parse_double(toks[1].substr(2), "spacing");
        if (n < 1) throw std::runtime_error("malformed header (line 2): dimension must be >= 1");
        if (!(h > 0.0)) throw std::runtime_error("malformed header (line 2): spacing must be positive");
    }

    next_line("extents");
    std::vector<std::int64_t> extents;
    for (const auto& tok : split_ws(line)) extents.push_back(parse_int(tok, "axis extent"));
    if (static_cast<int>(extents.size()) != n)
        throw std::runtime_error("malformed header (line 3): expected " + std::to_string(n) +
                                 " axis extents, got " + std::to_string(extents.size()));
    std::int64_t lattice = 1;
    for (auto e : extents) {
        if (e < 1) throw std::runtime_error("malformed header (line 3): extents must be positive");
        lattice *= e;
    }

    next_line("mask mode");
    bool inline_mask = false;
    if (line == "mask=full") {
        inline_mask = false;
    } else if (line == "mask=inline") {
        inline_mask = true;
    } else {
        throw std::runtime_error("malformed header (line 4): expected 'mask=<inline|full>'");
    }

    std::vector<std::uint8_t> mask(lattice, 1);
    if (inline_mask) {
        for (std::int64_t i = 0; i < lattice; ++i) {
            next_line("mask bits");
            if (line == "0") {
                mask[i] = 0;
            } else if (line == "1") {
                mask[i] = 1;
            } else {
                throw std::runtime_error("malformed mask bit (line " + std::to_string(lineno) + ")");
            }
        }
    }

    DomainSpec spec = DomainSpec::voxels(extents, std::move(mask), h);
    Domain domain = make_domain(spec);

    std::vector<double> values;
    values.reserve(domain.cell_count());
    for (std::int64_t i = 0; i < domain.cell_count(); ++i) {
        next_line("values");
        const double v = parse_double(line, "value (line " + std::to_string(lineno) + ")");
        if (!std::isfinite(v))
            throw std::runtime_error("singular sample (line " + std::to_string(lineno) + ")");
        values.push_back(v);
    }
    if (std::getline(in, line) && !line.empty())
        throw std::runtime_error("value count mismatch: trailing payload in " + path);
    return GridFunction(std::move(domain), std::move(values));
}

double grid_lp_norm(const GridFunction& g, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("p must be >= 1");
    KahanSum acc;
    for (double v : g.values()) acc.add(std::pow(std::abs(v), p));
    return std::pow(acc.value() * g.domain().cell_volume(), 1.0 / p);
}

double grid_l2_norm(const GridFunction& g) {
    KahanSum acc;
    for (double v : g.values()) acc.add(v * v);
    return std::sqrt(acc.value() * g.domain().cell_volume());
}

}  // namespace rearr
