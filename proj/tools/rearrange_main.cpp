// Command-line front end: symmetrize grids, verify the estimate battery,
// search domain constants, run the divergence probe, and drive the bundled
// suite. Exit codes: 0 all holds/vacuous, 2 any violated, 1 operational
// error.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rearr/fixtures.hpp"
#include "rearr/geometry.hpp"
#include "rearr/grid.hpp"
#include "rearr/inequalities.hpp"
#include "rearr/numeric.hpp"
#include "rearr/orlicz.hpp"
#include "rearr/rearrange.hpp"

namespace fs = std::filesystem;
using namespace rearr;

namespace {

constexpr int kExitViolated = 2;

/// Write-temp-then-rename so partially written artifacts never appear.
template <typename WriteFn>
void atomic_emit(const fs::path& path, WriteFn&& write_fn) {
    fs::create_directories(path.parent_path());
    const fs::path tmp = path.string() + ".tmp";
    write_fn(tmp.string());
    fs::rename(tmp, path);
}

void require_inputs(const std::vector<std::string>& paths) {
    for (const auto& p : paths) {
        if (!fs::exists(p)) throw std::runtime_error("input path does not exist: " + p);
    }
}

double trace_tol(const GridFunction& u) {
    return 2.5 * u.spacing() * lipschitz_estimate(u) + 1e-12 * std::abs(u.max_value());
}

/// Cell owning a boundary-face center (the in-mask side).
std::int64_t owner_cell(const Domain& d, const std::vector<double>& x) {
    const int n = d.dimension();
    for (int a = 0; a < n; ++a) {
        for (int side : {-1, +1}) {
            std::vector<std::int64_t> idx(n);
            bool ok = true;
            for (int b = 0; b < n; ++b) {
                double coord = x[b];
                if (b == a) coord += 0.5 * side * d.spacing();
                const double rel = (coord - d.origin()[b]) / d.spacing() - 0.5;
                const auto i = static_cast<std::int64_t>(std::llround(rel));
                if (i < 0 || i >= d.extents()[b] ||
                    std::abs(rel - static_cast<double>(i)) > 0.25) {
                    ok = false;
                    break;
                }
                idx[b] = i;
            }
            if (!ok) continue;
            std::int64_t lat = 0;
            for (int b = 0; b < n; ++b) lat = lat * d.extents()[b] + idx[b];
            const std::int64_t cell = d.cell_of_lattice(lat);
            if (cell >= 0) return cell;
        }
    }
    return -1;
}

/// Trace measure of the boundary faces whose owner carries |u| <= tol.
double vanishing_trace_measure(const GridFunction& u, double tol) {
    const Domain& d = u.domain();
    const int n = d.dimension();
    std::int64_t faces = 0;
    for (std::int64_t c = 0; c < d.cell_count(); ++c) {
        if (std::abs(u.value(c)) > tol) continue;
        const std::int64_t lat = d.lattice_of_cell(c);
        for (int a = 0; a < n; ++a) {
            for (int step : {-1, +1}) {
                const std::int64_t nb = d.neighbor(lat, a, step);
                if (nb < 0 || d.cell_of_lattice(nb) < 0) ++faces;
            }
        }
    }
    return static_cast<double>(faces) * d.face_area();
}

/// Largest axis-hyperplane projection measure of the near-zero cell set.
double vanishing_projection_measure(const GridFunction& u, double tol) {
    const Domain& d = u.domain();
    const int n = d.dimension();
    double best = 0.0;
    for (int a = 0; a < n; ++a) {
        std::vector<std::int64_t> cols;
        for (std::int64_t c = 0; c < d.cell_count(); ++c) {
            if (std::abs(u.value(c)) > tol) continue;
            const std::int64_t lat = d.lattice_of_cell(c);
            const std::int64_t stride = [&] {
                std::int64_t s = 1;
                for (int b = n - 1; b > a; --b) s *= d.extents()[b];
                return s;
            }();
            const std::int64_t coord = (lat / stride) % d.extents()[a];
            cols.push_back(lat - coord * stride);
        }
        std::sort(cols.begin(), cols.end());
        cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
        best = std::max(best, static_cast<double>(cols.size()) * d.face_area());
    }
    return best;
}

struct CommonOpts {
    std::vector<std::string> inputs;
    std::string out_dir = ".";
    std::string thm;
    std::string kase = "i";
    std::string nfunc = "tag=power-p p=2";
    std::string which = "interior";
    double eps = std::nan("");
    int dim = 2;
    double spacing = std::nan("");
    bool emit_plots = false;
};

void emit_profile_csv(const StepProfile& p, const fs::path& path) {
    atomic_emit(path, [&](const std::string& tmp) {
        std::ofstream out(tmp);
        out << "s,value\n";
        for (std::size_t i = 0; i < p.values().size(); ++i) {
            out << format_double(p.breakpoints()[i]) << ',' << format_double(p.values()[i])
                << "\n";
        }
    });
}

int cmd_symmetrize(const CommonOpts& opt) {
    require_inputs(opt.inputs);
    const GridFunction u = read_grid(opt.inputs.front());
    const RadialFunction tilde = schwarz_symmetrization(u);

    const fs::path out(opt.out_dir);
    atomic_emit(out / "profile.rprof",
                [&](const std::string& p) { write_profile(tilde.profile, p); });
    const GridFunction resampled = resample_on_ball(tilde, u.spacing());
    atomic_emit(out / "schwarz.rgrid", [&](const std::string& p) { write_grid(resampled, p); });

    atomic_emit(out / "summary.txt", [&](const std::string& p) {
        std::ofstream s(p);
        s << "RSUMMARY v1\n";
        s << "n=" << u.domain().dimension() << "\n";
        s << "h=" << format_double(u.spacing()) << "\n";
        s << "measure=" << format_double(u.domain().measure()) << "\n";
        s << "ball_radius=" << format_double(tilde.ball.radius) << "\n";
        s << "l1_before=" << format_double(grid_lp_norm(u, 1.0)) << "\n";
        s << "l1_after=" << format_double(tilde.profile.lp_norm(1.0)) << "\n";
        s << "l2_before=" << format_double(grid_l2_norm(u)) << "\n";
        s << "l2_after=" << format_double(tilde.profile.lp_norm(2.0)) << "\n";
        s << "min=" << format_double(u.min_value()) << "\n";
        s << "max=" << format_double(u.max_value()) << "\n";
    });
    if (opt.emit_plots) emit_profile_csv(tilde.profile, out / "profile_points.csv");
    std::cout << "symmetrize: wrote profile.rprof, schwarz.rgrid, summary.txt\n";
    return 0;
}

ConstantsCertificate load_constants(const fs::path& out_dir) {
    const fs::path path = out_dir / "constants.rconst";
    if (!fs::exists(path))
        throw std::runtime_error(
            "missing constants certificate " + path.string() + " (run `constants` first)");
    return read_constants(path.string());
}

int emit_report(const InequalityReport& r, const fs::path& out_dir, const std::string& stem) {
    atomic_emit(out_dir / (stem + ".rreport"),
                [&](const std::string& p) { write_report(r, p); });
    std::cout << r.name << ": " << to_string(r.verdict) << " (lhs=" << format_double(r.lhs)
              << " rhs=" << format_double(r.rhs) << ")\n";
    return r.verdict == Verdict::Violated ? kExitViolated : 0;
}

int cmd_verify(const CommonOpts& opt) {
    require_inputs(opt.inputs);
    const GridFunction u = read_grid(opt.inputs.front());
    const fs::path out(opt.out_dir);
    const double measure = u.domain().measure();

    auto need_eps = [&]() {
        if (std::isnan(opt.eps)) throw std::runtime_error("--eps is required for this estimate");
        return opt.eps;
    };

    if (opt.thm == "1.1" || opt.thm == "3.4") {
        const GammaCase kase = gamma_case_from_string(opt.kase);
        GammaInputs in;
        in.dimension = u.domain().dimension();
        in.measure = measure;
        if (kase != GammaCase::I) {
            const auto cert = load_constants(out);
            in.Q = cert.constants.Q;
            in.C = cert.constants.C;
            if (kase == GammaCase::III || kase == GammaCase::IV || kase == GammaCase::V)
                in.eps = need_eps();
        }
        const GammaCertificate cert = gamma_for_case(kase, in);
        if (opt.emit_plots)
            emit_profile_csv(decreasing_rearrangement(u), out / ("profile_" + opt.thm + ".csv"));
        if (opt.thm == "1.1") return emit_report(verify_thm_1_1(u, cert), out, "report_thm_1.1");
        return emit_report(verify_orlicz_polya_szego(u, cert, parse_nfunction(opt.nfunc)), out,
                           "report_orlicz_3.4");
    }
    if (opt.thm == "1.2") {
        const auto cert = load_constants(out);
        return emit_report(verify_thm_1_2(u, cert.constants.Q), out, "report_thm_1.2");
    }
    if (opt.thm == "1.3") {
        const auto cert = load_constants(out);
        const double tol = trace_tol(u);
        const double measured = vanishing_trace_measure(u, tol);
        const double eps = std::isnan(opt.eps) ? measured : opt.eps;
        const Domain* dom = &u.domain();
        const GridFunction* up = &u;
        auto region = [dom, up, tol](const std::vector<double>& x) {
            const std::int64_t cell = owner_cell(*dom, x);
            return cell >= 0 && std::abs(up->value(cell)) <= tol;
        };
        return emit_report(verify_thm_1_3(u, cert.constants.Q, cert.constants.C, region, eps), out,
                           "report_thm_1.3");
    }
    if (opt.thm == "1.4") {
        const auto cert = load_constants(out);
        const double tol = trace_tol(u);
        const double measured = vanishing_projection_measure(u, tol);
        const double eps = std::isnan(opt.eps) ? measured : opt.eps;
        const Domain* dom = &u.domain();
        const GridFunction* up = &u;
        auto region = [dom, up, tol](const std::vector<double>& x) {
            const std::int64_t cell = owner_cell(*dom, x);
            return cell >= 0 && std::abs(up->value(cell)) <= tol;
        };
        return emit_report(verify_thm_1_4(u, cert.constants.Q, cert.constants.C, region, eps), out,
                           "report_thm_1.4");
    }
    if (opt.thm == "2.1") {
        const auto cert = load_constants(out);
        return emit_report(verify_thm_2_1(u, cert.constants.Q, need_eps()), out,
                           "report_thm_2.1");
    }
    if (opt.thm == "2.2") {
        if (opt.inputs.size() != 2)
            throw std::runtime_error("--thm 2.2 compares two grids: pass --input twice");
        const GridFunction v = read_grid(opt.inputs[1]);
        const auto cert = load_constants(out);
        return emit_report(verify_cor_2_2(u, v, cert.constants.Q, need_eps()), out,
                           "report_cor_2.2");
    }
    if (opt.thm == "1.6") {
        const auto cert = load_constants(out);
        const double zeros = zero_set_measure(u);
        if (!(zeros > 0.0))
            throw std::runtime_error("--thm 1.6 needs a function with a nonempty zero set");
        const double L =
            thm_1_2_constant(u.domain().dimension(), measure, cert.constants.Q, zeros);
        return emit_report(verify_cor_1_6(u, L), out, "report_cor_1.6");
    }
    if (opt.thm == "3.9") {
        const auto cert = load_constants(out);
        return emit_report(
            verify_orlicz_local(u, cert.constants.Q, need_eps(), parse_nfunction(opt.nfunc)), out,
            "report_orlicz_3.9");
    }
    throw std::runtime_error("unknown theorem tag: " + opt.thm);
}

int cmd_constants(const CommonOpts& opt) {
    require_inputs(opt.inputs);
    std::vector<GridFunction> probes;
    std::optional<Domain> domain;
    if (!opt.inputs.empty()) {
        probes.push_back(read_grid(opt.inputs.front()));
        domain = probes.front().domain();
    } else {
        const double h = std::isnan(opt.spacing) ? 1.0 / 64 : opt.spacing;
        domain = fixtures::unit_square(h);
    }
    ConstantsCertificate cert;
    cert.constants = estimate_constants(*domain, probes);
    if (!std::isnan(opt.eps)) {
        GammaInputs in;
        in.dimension = domain->dimension();
        in.measure = domain->measure();
        in.Q = cert.constants.Q;
        in.C = cert.constants.C;
        in.eps = opt.eps;
        cert.gamma = gamma_for_case(gamma_case_from_string(opt.kase), in);
    }
    atomic_emit(fs::path(opt.out_dir) / "constants.rconst",
                [&](const std::string& p) { write_constants(cert, p); });
    std::cout << "constants: Q=" << format_double(cert.constants.Q)
              << " C=" << format_double(cert.constants.C) << " method=" << cert.constants.method
              << "\n";
    return 0;
}

int cmd_counterexample(const CommonOpts& opt) {
    const CounterexampleKind kind =
        opt.which == "h10" ? CounterexampleKind::ZeroBoundary : CounterexampleKind::Interior;
    if (opt.which != "h10" && opt.which != "interior")
        throw std::runtime_error("--which must be 'interior' or 'h10'");
    const CounterexampleTrace trace = run_counterexample(opt.dim, kind);
    const std::string stem =
        "counterexample_" + std::string(opt.which) + "_n" + std::to_string(opt.dim) + ".csv";
    atomic_emit(fs::path(opt.out_dir) / stem,
                [&](const std::string& p) { write_trace_csv(trace, p); });
    std::cout << "counterexample: n=" << opt.dim << " slope=" << format_double(trace.slope)
              << " source_energy=" << format_double(trace.source_energy) << "\n";
    return 0;
}

int cmd_suite(const CommonOpts& opt) {
    const fs::path out(opt.out_dir);
    const double h = std::isnan(opt.spacing) ? 1.0 / 96 : opt.spacing;
    int exit_code = 0;
    auto run = [&](const std::string& stem, InequalityReport r, const std::string& fixture) {
        r.meta["fixture"] = fixture;
        const int rc = emit_report(r, out, stem);
        exit_code = std::max(exit_code, rc);
    };

    // Domain constants for the three bundled domains.
    const GridFunction bump2 = fixtures::two_bump_square(h);
    const GridFunction cosine = fixtures::cosine_square(h);
    std::vector<GridFunction> square_probes{bump2, cosine};
    const IsoperimetricConstants square_consts =
        estimate_constants(bump2.domain(), square_probes);
    ConstantsCertificate cert;
    cert.constants = square_consts;
    atomic_emit(out / "constants.rconst",
                [&](const std::string& p) { write_constants(cert, p); });

    // Global estimate: equality and strict fixtures, quadratic and Orlicz.
    const GridFunction radial = fixtures::radial_bump_disk(h);
    const GammaCertificate case1_disk =
        gamma_for_case(GammaCase::I, {2, radial.domain().measure(), 0.0, 0.0, 0.0});
    run("report_thm_1.1_equality", verify_thm_1_1(radial, case1_disk), "radial-bump-disk");

    const GammaCertificate case1_square =
        gamma_for_case(GammaCase::I, {2, bump2.domain().measure(), 0.0, 0.0, 0.0});
    run("report_thm_1.1_strict", verify_thm_1_1(bump2, case1_square), "two-bump-square");

    const NFunction plog = NFunction::power_log(2.0);
    run("report_orlicz_3.4_plog", verify_orlicz_polya_szego(radial, case1_disk, plog),
        "radial-bump-disk");

    // Small-support estimate.
    const GridFunction quadrant = fixtures::quadrant_bump_square(h);
    run("report_thm_1.2_quadrant", verify_thm_1_2(quadrant, square_consts.Q),
        "quadrant-bump-square");

    // Boundary-trace estimate on the ramp (vanishes on the left edge).
    const GridFunction ramp = fixtures::ramp_square(h);
    auto left_edge = [](const std::vector<double>& x) { return x[0] < 1e-9; };
    run("report_thm_1.3_ramp",
        verify_thm_1_3(ramp, square_consts.Q, square_consts.C, left_edge, 1.0), "ramp-square");

    // Projection estimate on the diameter-pinned disk.
    const GridFunction pinned = fixtures::diameter_pinned_disk(h);
    const IsoperimetricConstants disk_consts = estimate_constants(pinned.domain(), {});
    auto diameter = [h](const std::vector<double>& x) { return std::abs(x[1]) <= 0.55 * h; };
    run("report_thm_1.4_diameter",
        verify_thm_1_4(pinned, disk_consts.Q, disk_consts.C, diameter, 2.0), "diameter-disk");

    // Local estimate, quadratic and Orlicz, on the sign-changing cosine.
    const double m_sq = cosine.domain().measure();
    run("report_thm_2.1_cosine", verify_thm_2_1(cosine, square_consts.Q, 0.1 * m_sq),
        "cosine-square");
    run("report_orlicz_3.9_plog",
        verify_orlicz_local(cosine, square_consts.Q, 0.1 * m_sq, NFunction::power_log(1.0)),
        "cosine-square");

    // Approximation sequence for the uniform comparison.
    const GridFunction base = fixtures::sine_base_square(h);
    const GridFunction wave = fixtures::wave_positive_square(h);
    for (int m : {1, 2, 4, 8, 16}) {
        std::vector<double> vals(base.values().begin(), base.values().end());
        for (std::int64_t c = 0; c < base.cell_count(); ++c)
            vals[c] += wave.value(c) / static_cast<double>(m);
        const GridFunction um(base.domain(), std::move(vals));
        run("report_cor_2.2_m" + std::to_string(m),
            verify_cor_2_2(um, base, square_consts.Q, 0.1 * m_sq),
            "sine-plus-wave/m=" + std::to_string(m));
    }

    // Embedding estimate in 3-D.
    const double h3 = std::max(h, 1.0 / 28);
    const GridFunction half3 = fixtures::half_ball_bump3(h3);
    const IsoperimetricConstants ball3_consts = estimate_constants(half3.domain(), {});
    const double L3 = thm_1_2_constant(3, half3.domain().measure(), ball3_consts.Q,
                                       zero_set_measure(half3));
    run("report_cor_1.6_halfball", verify_cor_1_6(half3, L3), "half-ball-3d");

    // Difference-quotient bound on the cone.
    const GridFunction cone = fixtures::cone_disk(h);
    const GammaCertificate case1_cone =
        gamma_for_case(GammaCase::I, {2, cone.domain().measure(), 0.0, 0.0, 0.0});
    run("report_lipschitz_cone",
        verify_lipschitz_bound(cone, case1_cone, lipschitz_estimate(cone)), "cone-disk");

    // Divergence probe (both surfaces) plus the one-dimensional control.
    for (int n : {1, 2}) {
        const CounterexampleTrace t = run_counterexample(n, CounterexampleKind::Interior);
        atomic_emit(out / ("counterexample_interior_n" + std::to_string(n) + ".csv"),
                    [&](const std::string& p) { write_trace_csv(t, p); });
        std::cout << "counterexample n=" << n << ": slope=" << format_double(t.slope) << "\n";
    }

    if (opt.emit_plots) {
        emit_profile_csv(decreasing_rearrangement(radial), out / "profile_radial_bump.csv");
        emit_profile_csv(decreasing_rearrangement(cosine), out / "profile_cosine.csv");
    }

    std::cout << "suite: " << (exit_code == 0 ? "all verdicts holds/vacuous" : "violations found")
              << "\n";
    return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Measure rearrangements and symmetrization estimates on voxel grids"};
    app.set_help_flag("--help", "print help");
    app.require_subcommand(1);

    CommonOpts opt;
    auto add_common = [&](CLI::App* cmd, bool with_input) {
        cmd->set_help_flag("--help", "print help");
        if (with_input) cmd->add_option("--input", opt.inputs, "input grid file(s)");
        cmd->add_option("--out", opt.out_dir, "output directory");
        cmd->add_option("--eps", opt.eps, "epsilon parameter");
        cmd->add_option("--n", opt.dim, "dimension");
        cmd->add_option("--h", opt.spacing, "grid spacing override");
        cmd->add_option("--case", opt.kase, "certificate case (i..v)");
        cmd->add_option("--nfunc", opt.nfunc, "N-function descriptor or path");
        cmd->add_flag("--emit-plots", opt.emit_plots, "emit CSV plot series");
        return cmd;
    };

    auto* symmetrize = add_common(app.add_subcommand("symmetrize", "rearrangement outputs"), true);
    auto* verify = add_common(app.add_subcommand("verify", "verify one estimate"), true);
    verify->add_option("--thm", opt.thm, "estimate tag (1.1 1.2 1.3 1.4 1.6 2.1 2.2 3.4 3.9)")
        ->required();
    auto* constants =
        add_common(app.add_subcommand("constants", "search domain constants"), true);
    auto* counter =
        add_common(app.add_subcommand("counterexample", "divergence probe"), false);
    counter->add_option("--which", opt.which, "profile variant: interior | h10");
    auto* suite = add_common(app.add_subcommand("suite", "bundled verification battery"), false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (symmetrize->parsed()) {
            if (opt.inputs.empty()) throw std::runtime_error("symmetrize needs --input");
            return cmd_symmetrize(opt);
        }
        if (verify->parsed()) {
            if (opt.inputs.empty()) throw std::runtime_error("verify needs --input");
            return cmd_verify(opt);
        }
        if (constants->parsed()) return cmd_constants(opt);
        if (counter->parsed()) return cmd_counterexample(opt);
        if (suite->parsed()) return cmd_suite(opt);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
