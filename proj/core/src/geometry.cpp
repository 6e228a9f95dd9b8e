#include "rearr/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>
#include <stdexcept>

#include "rearr/numeric.hpp"

namespace rearr {

namespace {

double n_times_cn_root(int n) {
    return static_cast<double>(n) * std::pow(unit_ball_volume(n), 1.0 / n);
}

/// Scan floor in measure units: digitized sets smaller than a ball of radius
/// kScanFloorRadiusCells * h have face-count perimeters dominated by lattice
/// error.
double scan_floor_measure(int n, double h) {
    return unit_ball_volume(n) * std::pow(kScanFloorRadiusCells * h, n);
}

}  // namespace

GridFunction gradient_magnitude(const GridFunction& u) {
    const Domain& d = u.domain();
    const int n = d.dimension();
    for (int a = 0; a < n; ++a) {
        if (d.extents()[a] < 2) throw std::invalid_argument("axis too short");
    }
    const auto grads = gradient_vectors(u);
    std::vector<double> out(d.cell_count());
    for (std::int64_t c = 0; c < d.cell_count(); ++c) {
        double g2 = 0.0;
        for (int a = 0; a < n; ++a) g2 += grads[c * n + a] * grads[c * n + a];
        out[c] = std::sqrt(g2);
    }
    return GridFunction(d, std::move(out));
}

std::vector<double> gradient_vectors(const GridFunction& u) {
    const Domain& d = u.domain();
    const int n = d.dimension();
    const double h = d.spacing();
    std::vector<double> grads(static_cast<std::size_t>(d.cell_count()) * n, 0.0);
    for (std::int64_t c = 0; c < d.cell_count(); ++c) {
        const std::int64_t lat = d.lattice_of_cell(c);
        for (int a = 0; a < n; ++a) {
            const std::int64_t fwd_lat = d.neighbor(lat, a, +1);
            const std::int64_t bwd_lat = d.neighbor(lat, a, -1);
            const std::int64_t fwd = fwd_lat >= 0 ? d.cell_of_lattice(fwd_lat) : -1;
            const std::int64_t bwd = bwd_lat >= 0 ? d.cell_of_lattice(bwd_lat) : -1;
            double g = 0.0;
            if (fwd >= 0 && bwd >= 0) {
                g = (u.value(fwd) - u.value(bwd)) / (2.0 * h);
            } else if (fwd >= 0) {
                g = (u.value(fwd) - u.value(c)) / h;
            } else if (bwd >= 0) {
                g = (u.value(c) - u.value(bwd)) / h;
            }
            grads[c * n + a] = g;
        }
    }
    return grads;
}

double dirichlet_energy(const GridFunction& u) {
    const GridFunction g = gradient_magnitude(u);
    KahanSum acc;
    for (double v : g.values()) acc.add(v * v);
    return acc.value() * u.domain().cell_volume();
}

double lipschitz_estimate(const GridFunction& u) {
    const GridFunction g = gradient_magnitude(u);
    return g.max_value();
}

namespace {

double direct_weight_integral(double a, double b, double q) {
    return (std::pow(b, q) - std::pow(a, q)) / q;
}

double profile_energy_impl(const StepProfile& p, const BallDomain& ball, double s_lo, double s_hi,
                           bool mirrored) {
    if (p.form() != ProfileForm::PiecewiseLinear)
        throw std::logic_error("profile energy expects the piecewise-linear view");
    const double m = p.total_measure();
    if (!(s_lo >= -1e-12 * m) || !(s_hi <= m * (1.0 + 1e-12)) || !(s_lo < s_hi))
        throw std::invalid_argument("s-range outside [0, |Omega|]");
    const double lo = std::max(s_lo, 0.0);
    const double hi = std::min(s_hi, m);

    const int n = ball.dimension;
    const double q = 3.0 - 2.0 / n;  // exponent of the weight antiderivative
    const double factor = n_times_cn_root(n) * n_times_cn_root(n);

    const auto& bp = p.breakpoints();
    const auto& vals = p.values();
    KahanSum acc;
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
        const double a = std::max(bp[i], lo);
        const double b = std::min(bp[i + 1], hi);
        if (!(b > a)) continue;
        const double slope = (vals[i + 1] - vals[i]) / (bp[i + 1] - bp[i]);
        if (slope == 0.0) continue;
        const double w = mirrored ? direct_weight_integral(m - b, m - a, q)
                                  : direct_weight_integral(a, b, q);
        acc.add(slope * slope * w);
    }
    return factor * acc.value();
}

}  // namespace

double radial_profile_energy(const StepProfile& p, const BallDomain& ball, double s_lo,
                             double s_hi) {
    return profile_energy_impl(p, ball, s_lo, s_hi, false);
}

double mirrored_profile_energy(const StepProfile& p, const BallDomain& ball, double s_lo,
                               double s_hi) {
    return profile_energy_impl(p, ball, s_lo, s_hi, true);
}

LevelSet LevelSet::of(const GridFunction& u, double t) {
    LevelSet ls;
    ls.domain = &u.domain();
    ls.threshold = t;
    ls.member.resize(u.cell_count());
    for (std::int64_t c = 0; c < u.cell_count(); ++c) ls.member[c] = u.value(c) > t ? 1 : 0;
    return ls;
}

double LevelSet::measure() const {
    std::int64_t count = 0;
    for (auto m : member) count += m;
    return static_cast<double>(count) * domain->cell_volume();
}

PerimeterEstimate relative_perimeter(const LevelSet& ls) {
    const Domain& d = *ls.domain;
    const int n = d.dimension();
    std::int64_t faces = 0;
    for (std::int64_t c = 0; c < d.cell_count(); ++c) {
        const std::int64_t lat = d.lattice_of_cell(c);
        for (int a = 0; a < n; ++a) {
            const std::int64_t nb_lat = d.neighbor(lat, a, +1);
            if (nb_lat < 0) continue;
            const std::int64_t nb = d.cell_of_lattice(nb_lat);
            if (nb < 0) continue;
            if (ls.member[c] != ls.member[nb]) ++faces;
        }
    }
    PerimeterEstimate est;
    est.raw = static_cast<double>(faces) * d.face_area();
    est.calibrated = est.raw / anisotropy_factor(n);
    return est;
}

double boundary_trace_measure(const LevelSet& ls) {
    const Domain& d = *ls.domain;
    const int n = d.dimension();
    std::int64_t faces = 0;
    for (std::int64_t c = 0; c < d.cell_count(); ++c) {
        if (!ls.member[c]) continue;
        const std::int64_t lat = d.lattice_of_cell(c);
        for (int a = 0; a < n; ++a) {
            for (int step : {-1, +1}) {
                const std::int64_t nb_lat = d.neighbor(lat, a, step);
                if (nb_lat < 0 || d.cell_of_lattice(nb_lat) < 0) ++faces;
            }
        }
    }
    return static_cast<double>(faces) * d.face_area();
}

double anisotropy_factor(int dimension) {
    if (dimension < 1) throw std::invalid_argument("dimension must be >= 1");
    if (dimension == 1) return 1.0;
    static std::mutex mu;
    static std::map<int, double> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(dimension);
    if (it != cache.end()) return it->second;

    std::mt19937_64 rng(0x5eedf00dULL);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int samples = 200000;
    KahanSum acc;
    std::vector<double> v(dimension);
    for (int s = 0; s < samples; ++s) {
        double norm2 = 0.0;
        for (int a = 0; a < dimension; ++a) {
            v[a] = gauss(rng);
            norm2 += v[a] * v[a];
        }
        if (norm2 <= 0.0) continue;
        const double inv = 1.0 / std::sqrt(norm2);
        double l1 = 0.0;
        for (int a = 0; a < dimension; ++a) l1 += std::abs(v[a]) * inv;
        acc.add(l1);
    }
    const double factor = acc.value() / samples;
    cache[dimension] = factor;
    return factor;
}

namespace {

/// Sub-level machinery for families of sets cut by one scalar per cell:
/// E(t) = {phi <= t}. Measures, interior face counts, and boundary traces
/// for every threshold come from three sorted arrays.
struct FieldSweep {
    double cell_volume = 0.0;
    double face_area = 0.0;
    double total_measure = 0.0;
    double total_boundary = 0.0;
    std::vector<double> cells;    // sorted phi per cell
    std::vector<double> face_lo;  // sorted
    std::vector<double> face_hi;  // sorted
    std::vector<double> bfaces;   // sorted phi of boundary-face owners

    static FieldSweep build(const Domain& d, std::span<const double> phi) {
        FieldSweep s;
        const int n = d.dimension();
        s.cell_volume = d.cell_volume();
        s.face_area = d.face_area();
        s.total_measure = d.measure();
        s.cells.assign(phi.begin(), phi.end());
        std::sort(s.cells.begin(), s.cells.end());
        for (std::int64_t c = 0; c < d.cell_count(); ++c) {
            const std::int64_t lat = d.lattice_of_cell(c);
            for (int a = 0; a < n; ++a) {
                const std::int64_t fwd_lat = d.neighbor(lat, a, +1);
                const std::int64_t fwd = fwd_lat >= 0 ? d.cell_of_lattice(fwd_lat) : -1;
                if (fwd >= 0) {
                    s.face_lo.push_back(std::min(phi[c], phi[fwd]));
                    s.face_hi.push_back(std::max(phi[c], phi[fwd]));
                }
                for (int step : {-1, +1}) {
                    const std::int64_t nb_lat = d.neighbor(lat, a, step);
                    if (nb_lat < 0 || d.cell_of_lattice(nb_lat) < 0) s.bfaces.push_back(phi[c]);
                }
            }
        }
        std::sort(s.face_lo.begin(), s.face_lo.end());
        std::sort(s.face_hi.begin(), s.face_hi.end());
        std::sort(s.bfaces.begin(), s.bfaces.end());
        s.total_boundary = static_cast<double>(s.bfaces.size()) * s.face_area;
        return s;
    }

    static std::int64_t count_le(const std::vector<double>& v, double t) {
        return std::upper_bound(v.begin(), v.end(), t) - v.begin();
    }

    double measure_sub(double t) const {
        return static_cast<double>(count_le(cells, t)) * cell_volume;
    }
    double perimeter_raw(double t) const {
        return static_cast<double>(count_le(face_lo, t) - count_le(face_hi, t)) * face_area;
    }
    double trace_sub(double t) const {
        return static_cast<double>(count_le(bfaces, t)) * face_area;
    }
};

std::vector<std::vector<double>> search_directions(int n) {
    std::vector<std::vector<double>> dirs;
    if (n == 1) {
        dirs.push_back({1.0});
        return dirs;
    }
    if (n == 2) {
        const int K = 48;
        for (int j = 0; j < K; ++j) {
            const double th = M_PI * j / K;
            dirs.push_back({std::cos(th), std::sin(th)});
        }
        return dirs;
    }
    // Axes first (they carry the exact flat cuts), then diagonals, then a
    // Fibonacci hemisphere for coverage.
    for (int a = 0; a < n; ++a) {
        std::vector<double> e(n, 0.0);
        e[a] = 1.0;
        dirs.push_back(e);
    }
    if (n == 3) {
        const double r2 = 1.0 / std::sqrt(2.0), r3 = 1.0 / std::sqrt(3.0);
        dirs.push_back({r2, r2, 0.0});
        dirs.push_back({r2, -r2, 0.0});
        dirs.push_back({r2, 0.0, r2});
        dirs.push_back({r2, 0.0, -r2});
        dirs.push_back({0.0, r2, r2});
        dirs.push_back({0.0, r2, -r2});
        dirs.push_back({r3, r3, r3});
        dirs.push_back({r3, r3, -r3});
        dirs.push_back({r3, -r3, r3});
        dirs.push_back({r3, -r3, -r3});
        const int F = 48;
        const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
        for (int j = 0; j < F; ++j) {
            const double z = (j + 0.5) / F;  // hemisphere suffices (cuts are symmetric)
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double phi = 2.0 * M_PI * j / golden;
            dirs.push_back({r * std::cos(phi), r * std::sin(phi), z});
        }
        return dirs;
    }
    std::mt19937_64 rng(0xd1ce5eedULL);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int j = 0; j < 48; ++j) {
        std::vector<double> v(n);
        double norm2 = 0.0;
        for (int a = 0; a < n; ++a) {
            v[a] = gauss(rng);
            norm2 += v[a] * v[a];
        }
        const double inv = 1.0 / std::sqrt(norm2);
        for (auto& x : v) x *= inv;
        dirs.push_back(v);
    }
    return dirs;
}

/// Cut offsets: midpoints between the order statistics of phi at evenly
/// spaced ranks, so exact half cuts are always among the candidates.
std::vector<double> cut_offsets(std::vector<double> phi_sorted) {
    const std::int64_t n = static_cast<std::int64_t>(phi_sorted.size());
    std::vector<double> offsets;
    const int ranks = 64;
    for (int j = 1; j < ranks; ++j) {
        const std::int64_t k = j * n / ranks;
        if (k <= 0 || k >= n) continue;
        if (phi_sorted[k - 1] < phi_sorted[k]) {
            offsets.push_back(0.5 * (phi_sorted[k - 1] + phi_sorted[k]));
        }
    }
    std::sort(offsets.begin(), offsets.end());
    offsets.erase(std::unique(offsets.begin(), offsets.end()), offsets.end());
    return offsets;
}

struct SearchAccumulator {
    double best_q = 0.0;
    double best_c = 0.0;

    void feed(const FieldSweep& sweep, double t, int n) {
        const double P = sweep.perimeter_raw(t);
        if (!(P > 0.0)) return;
        const double ms = sweep.measure_sub(t);
        const double mc = sweep.total_measure - ms;
        const double small = std::min(ms, mc);
        if (small > 0.0) {
            const double q = std::pow(small, 1.0 - 1.0 / n) / P;
            best_q = std::max(best_q, q);
        }
        const double ts = sweep.trace_sub(t);
        if (ms > 0.0 && ms <= sweep.total_measure / 2.0) {
            best_c = std::max(best_c, ts / P);
        }
        if (mc > 0.0 && mc <= sweep.total_measure / 2.0) {
            best_c = std::max(best_c, (sweep.total_boundary - ts) / P);
        }
    }
};

void search_family(const Domain& domain, std::span<const GridFunction> probes,
                   SearchAccumulator& acc) {
    const int n = domain.dimension();
    const auto dirs = search_directions(n);

    // Directions are independent; fan them out and merge per-direction maxima
    // in a fixed order (REARRANGE_THREADS caps the worker count).
    std::vector<SearchAccumulator> per_dir(dirs.size());
    parallel_chunks(static_cast<std::int64_t>(dirs.size()),
                    [&](std::int64_t begin, std::int64_t end, int) {
                        std::vector<double> phi(domain.cell_count());
                        for (std::int64_t j = begin; j < end; ++j) {
                            const auto& dir = dirs[j];
                            for (std::int64_t c = 0; c < domain.cell_count(); ++c) {
                                const std::int64_t lat = domain.lattice_of_cell(c);
                                double s = 0.0;
                                for (int a = 0; a < n; ++a)
                                    s += dir[a] * domain.cell_center_coord(lat, a);
                                phi[c] = s;
                            }
                            const FieldSweep sweep = FieldSweep::build(domain, phi);
                            for (double t : cut_offsets(sweep.cells))
                                per_dir[j].feed(sweep, t, n);
                        }
                    });
    for (const auto& partial : per_dir) {
        acc.best_q = std::max(acc.best_q, partial.best_q);
        acc.best_c = std::max(acc.best_c, partial.best_c);
    }

    for (const auto& probe : probes) {
        if (!probe.domain().same_layout(domain)) continue;
        std::vector<double> vals(probe.values().begin(), probe.values().end());
        const FieldSweep sweep = FieldSweep::build(domain, vals);
        for (double t : level_thresholds(probe, 128)) acc.feed(sweep, t, n);
    }
}

}  // namespace

double estimate_Q(const Domain& domain, std::span<const GridFunction> probes) {
    SearchAccumulator acc;
    search_family(domain, probes, acc);
    if (!(acc.best_q > 0.0)) throw std::runtime_error("search family empty");
    return acc.best_q;
}

double estimate_C(const Domain& domain, std::span<const GridFunction> probes) {
    SearchAccumulator acc;
    search_family(domain, probes, acc);
    if (!(acc.best_c > 0.0)) throw std::runtime_error("search family empty");
    return acc.best_c;
}

IsoperimetricConstants estimate_constants(const Domain& domain,
                                          std::span<const GridFunction> probes) {
    SearchAccumulator acc;
    search_family(domain, probes, acc);
    if (!(acc.best_q > 0.0) || !(acc.best_c > 0.0))
        throw std::runtime_error("search family empty");
    return IsoperimetricConstants{acc.best_q, acc.best_c, "searched"};
}

std::string to_string(GammaCase c) {
    switch (c) {
        case GammaCase::I: return "i";
        case GammaCase::II: return "ii";
        case GammaCase::III: return "iii";
        case GammaCase::IV: return "iv";
        case GammaCase::V: return "v";
    }
    return "?";
}

GammaCase gamma_case_from_string(const std::string& s) {
    if (s == "i") return GammaCase::I;
    if (s == "ii") return GammaCase::II;
    if (s == "iii") return GammaCase::III;
    if (s == "iv") return GammaCase::IV;
    if (s == "v") return GammaCase::V;
    throw std::invalid_argument("unknown case tag: " + s);
}

GammaCertificate gamma_for_case(GammaCase kase, const GammaInputs& in) {
    if (in.dimension < 1) throw std::invalid_argument("dimension must be >= 1");
    if (!(in.measure > 0.0)) throw std::invalid_argument("measure must be positive");
    const int n = in.dimension;
    const double nc = n_times_cn_root(n);
    const double pow_measure = std::pow(in.measure, 1.0 - 1.0 / n);

    auto need_Q = [&] {
        if (!(in.Q > 0.0) || !std::isfinite(in.Q)) throw std::invalid_argument("missing constant Q");
    };
    auto need_C = [&] {
        if (!(in.C > 0.0) || !std::isfinite(in.C)) throw std::invalid_argument("missing constant C");
    };

    GammaCertificate cert;
    cert.kase = kase;
    cert.inputs["n"] = n;
    cert.inputs["measure"] = in.measure;
    switch (kase) {
        case GammaCase::I:
            cert.gamma = nc;
            break;
        case GammaCase::II:
            need_Q();
            cert.gamma = 1.0 / in.Q;
            cert.inputs["Q"] = in.Q;
            break;
        case GammaCase::III: {
            need_Q();
            if (!(in.eps > 0.0) || !(in.eps < in.measure / 2.0))
                throw std::invalid_argument("epsilon out of range");
            const double alpha = in.eps / (in.measure - in.eps);
            cert.gamma = std::pow(alpha, 1.0 - 1.0 / n) / in.Q;
            cert.inputs["Q"] = in.Q;
            cert.inputs["eps"] = in.eps;
            cert.inputs["alpha"] = alpha;
            break;
        }
        case GammaCase::IV:
            need_Q();
            need_C();
            if (!(in.eps > 0.0)) throw std::invalid_argument("epsilon out of range");
            cert.gamma = std::min(1.0 / in.Q, in.eps / (in.C * pow_measure));
            cert.inputs["Q"] = in.Q;
            cert.inputs["C"] = in.C;
            cert.inputs["eps"] = in.eps;
            break;
        case GammaCase::V:
            need_Q();
            need_C();
            if (!(in.eps > 0.0)) throw std::invalid_argument("epsilon out of range");
            cert.gamma = std::min(1.0 / in.Q, in.eps / ((in.C + 1.0) * pow_measure));
            cert.inputs["Q"] = in.Q;
            cert.inputs["C"] = in.C;
            cert.inputs["eps"] = in.eps;
            break;
    }
    return cert;
}

std::vector<double> level_thresholds(const GridFunction& u, int cap) {
    std::vector<double> sorted(u.values().begin(), u.values().end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> distinct;
    for (double v : sorted) {
        if (distinct.empty() || distinct.back() != v) distinct.push_back(v);
    }
    if (static_cast<int>(distinct.size()) <= cap) return distinct;

    // Quantile thinning over the cell multiset.
    std::vector<double> picked;
    picked.reserve(cap);
    const std::int64_t n = static_cast<std::int64_t>(sorted.size());
    for (int j = 0; j < cap; ++j) {
        const std::int64_t k = j * (n - 1) / (cap - 1);
        const double v = sorted[k];
        if (picked.empty() || picked.back() != v) picked.push_back(v);
    }
    return picked;
}

std::vector<double> resolvable_thresholds(const GridFunction& u) {
    const Domain& d = u.domain();
    const int n = d.dimension();
    const double floor = scan_floor_measure(n, d.spacing());
    const double cell = d.cell_volume();

    std::vector<double> sorted(u.values().begin(), u.values().end());
    std::sort(sorted.begin(), sorted.end());

    // Values of the cells NOT adjacent to the domain boundary. A threshold
    // whose level-set complement stays inside the one-cell boundary shell is
    // unresolvable on the mask (its interface is entangled with the domain
    // boundary).
    std::vector<double> inner_vals;
    for (std::int64_t c = 0; c < d.cell_count(); ++c) {
        const std::int64_t lat = d.lattice_of_cell(c);
        bool boundary = false;
        for (int a = 0; a < n && !boundary; ++a) {
            for (int step : {-1, +1}) {
                const std::int64_t nb = d.neighbor(lat, a, step);
                if (nb < 0 || d.cell_of_lattice(nb) < 0) {
                    boundary = true;
                    break;
                }
            }
        }
        if (!boundary) inner_vals.push_back(u.value(c));
    }
    std::sort(inner_vals.begin(), inner_vals.end());

    auto count_le = [](const std::vector<double>& v, double t) {
        return std::upper_bound(v.begin(), v.end(), t) - v.begin();
    };

    std::vector<double> out;
    for (double t : level_thresholds(u)) {
        const double mu =
            static_cast<double>(sorted.size() - count_le(sorted, t)) * cell;
        if (mu <= 0.0 || mu < floor) continue;
        if (count_le(inner_vals, t) == 0 && mu < d.measure()) continue;
        out.push_back(t);
    }
    return out;
}

ScanResult scan_perimeter_condition(const GridFunction& u, double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma))
        throw std::invalid_argument("gamma must be positive");
    const Domain& d = u.domain();
    const int n = d.dimension();
    const double factor = anisotropy_factor(n);

    std::vector<double> vals(u.values().begin(), u.values().end());
    const FieldSweep sweep = FieldSweep::build(d, vals);
    const auto all = level_thresholds(u);
    const auto kept = resolvable_thresholds(u);

    ScanResult res;
    res.skipped_small = static_cast<int>(all.size() - kept.size());
    for (double t : kept) {
        // Super-level set {u > t}; its perimeter equals the sub-level one.
        const double mu = sweep.total_measure - sweep.measure_sub(t);
        const double bound = gamma * std::pow(mu, 1.0 - 1.0 / n);
        const double perim = sweep.perimeter_raw(t) / factor;
        ++res.tested;
        const double violation = (bound - perim) / bound;
        if (violation > res.max_violation) {
            res.max_violation = violation;
            res.worst_threshold = t;
        }
    }
    res.passed = res.max_violation <= kScanSlack;
    if (!res.passed) {
        std::ostringstream why;
        why << "perimeter lower bound violated by " << res.max_violation * 100.0 << "% at t="
            << res.worst_threshold;
        res.reason = why.str();
    }
    return res;
}

bool boundary_vanishing(const GridFunction& u, std::optional<double> tol) {
    const Domain& d = u.domain();
    const int n = d.dimension();
    double bound;
    if (tol) {
        bound = *tol;
    } else {
        double maxabs = 0.0;
        for (double v : u.values()) maxabs = std::max(maxabs, std::abs(v));
        bound = 2.5 * d.spacing() * lipschitz_estimate(u) + 1e-12 * maxabs;
    }
    for (std::int64_t c = 0; c < d.cell_count(); ++c) {
        const std::int64_t lat = d.lattice_of_cell(c);
        bool on_boundary = false;
        for (int a = 0; a < n && !on_boundary; ++a) {
            for (int step : {-1, +1}) {
                const std::int64_t nb_lat = d.neighbor(lat, a, step);
                if (nb_lat < 0 || d.cell_of_lattice(nb_lat) < 0) {
                    on_boundary = true;
                    break;
                }
            }
        }
        if (on_boundary && std::abs(u.value(c)) > bound) return false;
    }
    return true;
}

std::pair<double, double> coarea_check(const GridFunction& u, const GridFunction& f) {
    const Domain& d = u.domain();
    if (!f.domain().same_layout(d)) throw std::invalid_argument("domain mismatch");
    const int n = d.dimension();

    const GridFunction gmag = gradient_magnitude(u);
    KahanSum lhs;
    for (std::int64_t c = 0; c < d.cell_count(); ++c) lhs.add(f.value(c) * gmag.value(c));

    // Right side: each interface face of {u > t} is active exactly for t in
    // the value gap it spans, so the t-integral is taken in closed form per
    // face. Faces carry a local-normal correction |nu|_2 / |nu|_1.
    const auto grads = gradient_vectors(u);
    KahanSum rhs;
    for (std::int64_t c = 0; c < d.cell_count(); ++c) {
        const std::int64_t lat = d.lattice_of_cell(c);
        for (int a = 0; a < n; ++a) {
            const std::int64_t nb_lat = d.neighbor(lat, a, +1);
            if (nb_lat < 0) continue;
            const std::int64_t nb = d.cell_of_lattice(nb_lat);
            if (nb < 0) continue;
            const double gap = std::abs(u.value(c) - u.value(nb));
            if (gap == 0.0) continue;
            double l1 = 0.0, l2 = 0.0;
            for (int b = 0; b < n; ++b) {
                const double nu = 0.5 * (grads[c * n + b] + grads[nb * n + b]);
                l1 += std::abs(nu);
                l2 += nu * nu;
            }
            const double corr = l1 > 0.0 ? std::sqrt(l2) / l1 : 1.0;
            const double favg = 0.5 * (f.value(c) + f.value(nb));
            rhs.add(favg * corr * gap);
        }
    }
    return {lhs.value() * d.cell_volume(), rhs.value() * d.face_area()};
}

void write_constants(const ConstantsCertificate& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "RCONST v1\n";
    out << "Q=" << format_double(c.constants.Q) << " method=" << c.constants.method << "\n";
    out << "C=" << format_double(c.constants.C) << " method=" << c.constants.method << "\n";
    if (c.gamma) {
        out << "gamma=" << format_double(c.gamma->gamma) << " case=" << to_string(c.gamma->kase)
            << "\n";
        for (const auto& [k, v] : c.gamma->inputs) {
            out << "gamma." << k << "=" << format_double(v) << "\n";
        }
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

ConstantsCertificate read_constants(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line) || line != "RCONST v1")
        throw std::runtime_error("malformed header (line 1): expected 'RCONST v1'");

    ConstantsCertificate cert;
    auto parse_kv_line = [&](const std::string& text, const std::string& key) {
        if (text.rfind(key + "=", 0) != 0)
            throw std::runtime_error("malformed constants line: " + text);
        std::istringstream ss(text);
        std::string first, second;
        ss >> first >> second;
        const double value = parse_double(first.substr(key.size() + 1), key);
        std::string method;
        if (!second.empty()) {
            if (second.rfind("method=", 0) != 0)
                throw std::runtime_error("malformed constants line: " + text);
            method = second.substr(7);
        }
        return std::pair<double, std::string>(value, method);
    };

    if (!std::getline(in, line)) throw std::runtime_error("missing Q line");
    auto [q, qm] = parse_kv_line(line, "Q");
    if (!std::getline(in, line)) throw std::runtime_error("missing C line");
    auto [cv, cm] = parse_kv_line(line, "C");
    cert.constants.Q = q;
    cert.constants.C = cv;
    cert.constants.method = qm.empty() ? cm : qm;

    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.rfind("gamma=", 0) == 0) {
            GammaCertificate g;
            std::istringstream ss(line);
            std::string first, second;
            ss >> first >> second;
            g.gamma = parse_double(first.substr(6), "gamma");
            if (second.rfind("case=", 0) != 0)
                throw std::runtime_error("malformed gamma line: " + line);
            g.kase = gamma_case_from_string(second.substr(5));
            cert.gamma = std::move(g);
        } else if (line.rfind("gamma.", 0) == 0) {
            if (!cert.gamma) throw std::runtime_error("gamma inputs before gamma line");
            const auto eq = line.find('=');
            if (eq == std::string::npos) throw std::runtime_error("malformed gamma input: " + line);
            cert.gamma->inputs[line.substr(6, eq - 6)] =
                parse_double(line.substr(eq + 1), "gamma input");
        } else {
            throw std::runtime_error("unexpected constants line: " + line);
        }
    }
    return cert;
}

}  // namespace rearr
