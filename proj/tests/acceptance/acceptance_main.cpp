// Acceptance battery: twelve checks, one line of output each, nonzero exit
// on any failure. argv[1] must point at the CLI binary (used by the
// determinism check).

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
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

int g_failures = 0;

void report(int criterion, const std::string& label, bool pass, const std::string& detail) {
    std::cout << (pass ? "[PASS] " : "[FAIL] ") << "criterion " << criterion << ": " << label
              << " (" << detail << ")\n";
    if (!pass) ++g_failures;
}

std::string fmt(double v) { return format_double(v); }

// --- 1. divergence dichotomy -------------------------------------------------

void criterion_1() {
    const double pi2 = M_PI * M_PI;
    CounterexampleTrace t = run_counterexample(2, CounterexampleKind::Interior, M_PI);
    const bool slope_ok = std::abs(t.slope - pi2) <= 0.02 * pi2;
    const bool source_ok = std::abs(t.source_energy - pi2) <= 0.02 * pi2;
    bool increasing = true;
    for (std::size_t k = 0; k + 1 < t.energy.size(); ++k) {
        increasing = increasing && t.energy[k + 1] > t.energy[k];
    }

    CounterexampleTrace one = run_counterexample(1, CounterexampleKind::Interior);
    bool bounded_by_source = true;
    for (std::size_t k = 0; k < one.energy.size(); ++k) {
        bounded_by_source =
            bounded_by_source && one.energy[k] <= one.source_truncated[k] * (1.0 + 1e-9);
    }

    report(1, "divergence dichotomy",
           slope_ok && source_ok && increasing && bounded_by_source,
           "slope=" + fmt(t.slope) + " source=" + fmt(t.source_energy) + " target=" + fmt(pi2) +
               "; n=1 bounded by source=" + (bounded_by_source ? "yes" : "no"));
}

// --- 2. equality case --------------------------------------------------------

void criterion_2() {
    const double h = 1.0 / 256;
    GridFunction u = fixtures::radial_bump_disk(h);
    GammaCertificate cert =
        gamma_for_case(GammaCase::I, {2, u.domain().measure(), 0.0, 0.0, 0.0});
    InequalityReport r = verify_thm_1_1(u, cert);
    const double ratio = r.lhs / r.rhs;
    report(2, "global estimate equality case",
           r.verdict == Verdict::Holds && ratio >= 0.97 && ratio <= 1.0,
           "lhs/rhs=" + fmt(ratio) + " verdict=" + to_string(r.verdict));
}

// --- 3. strict case ----------------------------------------------------------

void criterion_3() {
    bool ok = true;
    std::ostringstream detail;
    for (double h : {1.0 / 128, 1.0 / 256}) {
        GridFunction u = fixtures::two_bump_square(h);
        GammaCertificate cert =
            gamma_for_case(GammaCase::I, {2, u.domain().measure(), 0.0, 0.0, 0.0});
        InequalityReport r = verify_thm_1_1(u, cert);
        ok = ok && r.verdict == Verdict::Holds && r.margin >= 0.05 * r.rhs;
        detail << "h=1/" << std::lround(1.0 / h) << " margin/rhs=" << fmt(r.margin / r.rhs) << " ";
    }
    report(3, "global estimate strict case", ok, detail.str());
}

// --- 4. small-support constant -----------------------------------------------

void criterion_4() {
    const double h = 1.0 / 128;
    GridFunction u = fixtures::quadrant_bump_square(h);
    const double Q = estimate_Q(u.domain());
    InequalityReport r = verify_thm_1_2(u, Q);

    const double m = u.domain().measure();
    const double eps = zero_set_measure(u);
    bool formula_ok = true;
    double worst = 0.0;
    for (double e : {eps, 0.3 * m, 0.2 * m}) {
        const double half = e / 2.0;
        const double L_half = thm_1_2_constant(2, m, Q, half);
        const double alpha = half <= m / 2.0 ? half / (m - half) : 1.0;
        const double expected = Q * 2.0 * std::sqrt(M_PI) / std::sqrt(alpha);
        worst = std::max(worst, std::abs(L_half - expected) / expected);
        formula_ok = formula_ok && std::abs(L_half - expected) <= 1e-12 * expected &&
                     L_half >= thm_1_2_constant(2, m, Q, e);
    }
    report(4, "small-support estimate",
           r.verdict == Verdict::Holds && formula_ok,
           "verdict=" + to_string(r.verdict) + " Q=" + fmt(Q) +
               " constant-formula err=" + fmt(worst));
}

// --- 5. local estimate for sign-changing input --------------------------------

void criterion_5() {
    const double h = 1.0 / 256;
    GridFunction u = fixtures::cosine_square(h);
    const double m = u.domain().measure();
    const double Q = std::sqrt(0.5);
    InequalityReport r = verify_thm_2_1(u, Q, 0.1 * m);
    const bool factor_exact = local_estimate_factor(2, m, 0.5 * m) == 1.0;
    InequalityReport rh = verify_thm_2_1(u, Q, 0.5 * m);
    const bool meta_exact = rh.meta.at("c_eps") == "1";
    report(5, "local estimate, sign-changing input",
           r.verdict == Verdict::Holds && factor_exact && meta_exact,
           "verdict=" + to_string(r.verdict) + " margin/rhs=" + fmt(r.margin / r.rhs) +
               " c(|Omega|/2)=1 exact=" + (factor_exact && meta_exact ? "yes" : "no"));
}

// --- 6. uniform comparison ladder ---------------------------------------------

void criterion_6() {
    const double h = 1.0 / 128;
    GridFunction base = fixtures::sine_base_square(h);
    GridFunction wave = fixtures::wave_positive_square(h);
    const double m = base.domain().measure();
    const double Q = std::sqrt(0.5);
    bool ok = true;
    double prev = 1e300;
    std::ostringstream detail;
    for (int mstep : {1, 2, 4, 8, 16}) {
        std::vector<double> vals(base.values().begin(), base.values().end());
        for (std::int64_t c = 0; c < base.cell_count(); ++c) {
            vals[c] += wave.value(c) / static_cast<double>(mstep);
        }
        GridFunction um(base.domain(), std::move(vals));
        InequalityReport r = verify_cor_2_2(um, base, Q, 0.1 * m);
        ok = ok && r.verdict == Verdict::Holds && r.lhs <= prev * (1.0 + 1e-12);
        prev = r.lhs;
        detail << "m=" << mstep << ":" << fmt(r.lhs) << "<=" << fmt(r.rhs) << " ";
    }
    report(6, "uniform comparison ladder", ok, detail.str());
}

// --- 7. exact discrete identities ----------------------------------------------

void criterion_7() {
    bool ok = true;
    std::string first_bad;
    for (unsigned seed = 0; seed < 100 && ok; ++seed) {
        GridFunction u = fixtures::random_square(16, 9000 + seed);
        StepProfile star = decreasing_rearrangement(u);
        RadialFunction tilde = schwarz_symmetrization(u);

        // Equimeasurability: identical distribution at every sampled level.
        for (std::int64_t c = 0; c < u.cell_count() && ok; c += 17) {
            const double t = u.value(c);
            const double mu = distribution(u, t);
            ok = distribution(star, t) == mu && distribution(tilde.profile, t) == mu;
            if (!ok) first_bad = "equimeasurability seed=" + std::to_string(seed);
        }
        // L^p preservation.
        for (double p : {1.0, 2.0, 4.0}) {
            const double a = grid_lp_norm(u, p);
            const double b = star.lp_norm(p);
            if (std::abs(a - b) > 1e-12 * std::max(a, 1.0)) {
                ok = false;
                first_bad = "Lp preservation p=" + fmt(p);
            }
        }
        // Part identities, exact.
        const double level = median_level(star);
        std::vector<double> plus(u.values().begin(), u.values().end());
        std::vector<double> minus(u.values().begin(), u.values().end());
        std::vector<double> shifted_plus(u.values().begin(), u.values().end());
        for (auto& v : plus) v = std::max(v, 0.0);
        for (auto& v : minus) v = std::max(-v, 0.0);
        for (auto& v : shifted_plus) v = std::max(v - level, 0.0);
        StepProfile plus_star = decreasing_rearrangement(GridFunction(u.domain(), plus));
        StepProfile minus_star = decreasing_rearrangement(GridFunction(u.domain(), minus));
        StepProfile shift_star = decreasing_rearrangement(GridFunction(u.domain(), shifted_plus));
        StepProfile via_pos = positive_part(star);
        StepProfile via_neg = negative_part_reflected(star);
        StepProfile via_shift = positive_part(star.offset(level));
        for (std::size_t i = 0; i < star.values().size(); ++i) {
            if (plus_star.values()[i] != via_pos.values()[i] ||
                minus_star.values()[i] != via_neg.values()[i] ||
                minus_star.breakpoints()[i] != via_neg.breakpoints()[i] ||
                shift_star.values()[i] != via_shift.values()[i]) {
                ok = false;
                first_bad = "part identity seed=" + std::to_string(seed);
                break;
            }
        }
    }

    // Negative-part analogue of the commutation identity fails on a witness.
    Domain d22 = make_domain(DomainSpec::box({0.0, 0.0}, {2.0, 2.0}, 1.0));
    GridFunction w(d22, {2.0, -1.0, 0.0, 5.0});
    StepProfile wstar = decreasing_rearrangement(w);
    const double level = median_level(wstar);  // 0
    std::vector<double> wminus = {std::max(level - 2.0, 0.0), std::max(level + 1.0, 0.0),
                                  std::max(level - 0.0, 0.0), std::max(level - 5.0, 0.0)};
    StepProfile minus_sym = decreasing_rearrangement(GridFunction(d22, wminus));
    const StepProfile shifted = wstar.offset(level);
    bool analogue_fails = false;
    for (double s : {0.5, 1.5, 2.5, 3.5}) {
        if (minus_sym.value_at(s) != std::max(-shifted.value_at(s), 0.0)) analogue_fails = true;
    }
    ok = ok && analogue_fails;
    report(7, "exact discrete identities", ok,
           ok ? "100 random 16x16 grids; negative analogue fails on the witness"
              : ("first failure: " + first_bad +
                 (analogue_fails ? "" : " (negative analogue unexpectedly held)")));
}

// --- 8. isoperimetric equality for symmetrized level sets ----------------------

void criterion_8() {
    bool ok = true;
    std::ostringstream detail;
    const double h = 1.0 / 128;
    struct Fixture {
        const char* name;
        GridFunction u;
    };
    std::vector<Fixture> fixtures_list;
    fixtures_list.push_back({"radial-bump", fixtures::radial_bump_disk(h)});
    fixtures_list.push_back({"two-bump", fixtures::two_bump_square(h)});
    fixtures_list.push_back({"cosine", fixtures::cosine_square(h)});
    const double nc = 2.0 * std::sqrt(M_PI);
    for (const auto& f : fixtures_list) {
        GridFunction tilde = resample_on_ball(schwarz_symmetrization(f.u), h);
        double worst = 0.0;
        int tested = 0;
        for (double t : resolvable_thresholds(tilde)) {
            LevelSet ls = LevelSet::of(tilde, t);
            const double mu = ls.measure();
            const double predicted = nc * std::sqrt(mu);
            const double measured = relative_perimeter(ls).calibrated;
            worst = std::max(worst, std::abs(measured - predicted) / predicted);
            ++tested;
        }
        ok = ok && tested > 50 && worst <= 0.05;
        detail << f.name << ": worst=" << fmt(worst) << " over " << tested << " levels; ";
    }
    report(8, "isoperimetric equality across level scans", ok, detail.str());
}

// --- 9. quadratic reduction of the Orlicz verifiers ----------------------------

void criterion_9() {
    bool ok = true;
    std::ostringstream detail;
    NFunction sq = NFunction::power(2.0);

    const double h = 1.0 / 128;
    std::vector<GridFunction> all;
    all.push_back(fixtures::radial_bump_disk(h));
    all.push_back(fixtures::two_bump_square(h));
    all.push_back(fixtures::cosine_square(h));
    all.push_back(fixtures::quadrant_bump_square(h));
    double worst_norm = 0.0;
    for (const auto& u : all) {
        const double lux = luxemburg_norm(u, sq).value;
        const double l2 = grid_l2_norm(u);
        worst_norm = std::max(worst_norm, std::abs(lux - l2) / std::max(l2, 1e-30));
    }
    ok = ok && worst_norm <= 1e-9;
    detail << "max |lux-l2|/l2=" << fmt(worst_norm);

    GridFunction radial = fixtures::radial_bump_disk(h);
    GammaCertificate cert =
        gamma_for_case(GammaCase::I, {2, radial.domain().measure(), 0.0, 0.0, 0.0});
    InequalityReport quad = verify_thm_1_1(radial, cert);
    InequalityReport orl = verify_orlicz_polya_szego(radial, cert, sq);
    const double global_lhs_err = std::abs(orl.lhs - std::sqrt(quad.lhs)) / std::sqrt(quad.lhs);
    const double global_rhs_err = std::abs(orl.rhs - std::sqrt(quad.rhs)) / std::sqrt(quad.rhs);

    GridFunction cosine = fixtures::cosine_square(h);
    const double m = cosine.domain().measure();
    InequalityReport quad_l = verify_thm_2_1(cosine, std::sqrt(0.5), 0.1 * m);
    InequalityReport orl_l = verify_orlicz_local(cosine, std::sqrt(0.5), 0.1 * m, sq);
    const double local_lhs_err =
        std::abs(orl_l.lhs - std::sqrt(quad_l.lhs)) / std::sqrt(quad_l.lhs);
    const double local_rhs_err =
        std::abs(orl_l.rhs - std::sqrt(quad_l.rhs)) / std::sqrt(quad_l.rhs);

    ok = ok && global_lhs_err <= 1e-6 && global_rhs_err <= 1e-6 && local_lhs_err <= 1e-6 &&
         local_rhs_err <= 1e-6;
    detail << "; norm-form errs=" << fmt(global_lhs_err) << "," << fmt(global_rhs_err) << ","
           << fmt(local_lhs_err) << "," << fmt(local_rhs_err);
    report(9, "Orlicz verifiers reduce to the quadratic ones", ok, detail.str());
}

// --- 10. genuine Orlicz family --------------------------------------------------

void criterion_10() {
    bool ok = true;
    std::ostringstream detail;
    NFunction plog2 = NFunction::power_log(2.0);
    NFunction plog1 = NFunction::power_log(1.0);
    for (double h : {1.0 / 128, 1.0 / 256}) {
        GridFunction radial = fixtures::radial_bump_disk(h);
        GammaCertificate cert =
            gamma_for_case(GammaCase::I, {2, radial.domain().measure(), 0.0, 0.0, 0.0});
        InequalityReport global = verify_orlicz_polya_szego(radial, cert, plog2);

        GridFunction cosine = fixtures::cosine_square(h);
        InequalityReport local = verify_orlicz_local(cosine, std::sqrt(0.5),
                                                     0.1 * cosine.domain().measure(), plog1);
        ok = ok && global.verdict == Verdict::Holds && local.verdict == Verdict::Holds;
        detail << "h=1/" << std::lround(1.0 / h) << " global=" << to_string(global.verdict)
               << " local=" << to_string(local.verdict) << "; ";
    }
    report(10, "p-log Orlicz family", ok, detail.str());
}

// --- 11. difference-quotient bound ----------------------------------------------

void criterion_11() {
    const double h = 1.0 / 256;
    GridFunction cone = fixtures::cone_disk(h);
    GammaCertificate cert =
        gamma_for_case(GammaCase::I, {2, cone.domain().measure(), 0.0, 0.0, 0.0});
    InequalityReport r = verify_lipschitz_bound(cone, cert, lipschitz_estimate(cone), 0.05, 1.1);
    report(11, "rearrangement difference-quotient bound",
           r.verdict == Verdict::Holds && r.lhs <= 1.1,
           "max quotient/bound=" + fmt(r.lhs) + " for s >= 0.05|Omega|");
}

// --- 12. determinism and format round-trips --------------------------------------

std::vector<fs::path> sorted_files(const fs::path& dir) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void criterion_12(const std::string& cli) {
    const fs::path base = fs::temp_directory_path() / "rearr_acceptance";
    fs::remove_all(base);
    const fs::path d1 = base / "run1";
    const fs::path d2 = base / "run2";
    fs::create_directories(d1);
    fs::create_directories(d2);

    const std::string quiet = " >/dev/null 2>&1";
    const int rc1 =
        std::system((cli + " suite --h 0.015625 --out " + d1.string() + quiet).c_str());
    const int rc2 =
        std::system((cli + " suite --h 0.015625 --out " + d2.string() + quiet).c_str());
    bool ok = WEXITSTATUS(rc1) == 0 && WEXITSTATUS(rc2) == 0;
    std::string detail = "suite exits: " + std::to_string(WEXITSTATUS(rc1)) + "," +
                         std::to_string(WEXITSTATUS(rc2));

    const auto files1 = sorted_files(d1);
    const auto files2 = sorted_files(d2);
    bool identical = files1.size() == files2.size() && !files1.empty();
    for (std::size_t i = 0; identical && i < files1.size(); ++i) {
        identical = files1[i].filename() == files2[i].filename() &&
                    slurp(files1[i]) == slurp(files2[i]);
    }
    ok = ok && identical;
    detail += "; byte-identical=" + std::string(identical ? "yes" : "no") + " over " +
              std::to_string(files1.size()) + " files";

    // Every emitted artifact parses back through its reader.
    int parsed = 0;
    bool readers_ok = true;
    for (const auto& f : files1) {
        const std::string name = f.filename().string();
        try {
            if (name.ends_with(".rreport")) {
                read_report(f.string());
                ++parsed;
            } else if (name.ends_with(".rconst")) {
                read_constants(f.string());
                ++parsed;
            } else if (name.ends_with(".csv")) {
                read_trace_csv(f.string());
                ++parsed;
            }
        } catch (const std::exception& e) {
            readers_ok = false;
            detail += std::string("; reader failed on ") + name + ": " + e.what();
        }
    }
    // Symmetrize outputs round-trip too.
    try {
        const fs::path gpath = base / "input.rgrid";
        write_grid(fixtures::radial_bump_disk(1.0 / 64), gpath.string());
        const int rc3 = std::system(
            (cli + " symmetrize --input " + gpath.string() + " --out " + base.string() + quiet)
                .c_str());
        readers_ok = readers_ok && WEXITSTATUS(rc3) == 0;
        read_profile((base / "profile.rprof").string());
        read_grid((base / "schwarz.rgrid").string());
        parsed += 2;
    } catch (const std::exception& e) {
        readers_ok = false;
        detail += std::string("; symmetrize round-trip failed: ") + e.what();
    }
    ok = ok && readers_ok && parsed >= 10;
    detail += "; parsed " + std::to_string(parsed) + " artifacts";
    report(12, "determinism and format round-trips", ok, detail);
    fs::remove_all(base);
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: rearrange_acceptance <path-to-cli>\n";
        return 2;
    }
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    criterion_12(argv[1]);
    if (g_failures > 0) {
        std::cout << g_failures << " criterion(s) failed\n";
        return 1;
    }
    std::cout << "all 12 criteria passed\n";
    return 0;
}
