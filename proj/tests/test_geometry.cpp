#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "rearr/fixtures.hpp"
#include "rearr/geometry.hpp"
#include "rearr/grid.hpp"
#include "rearr/inequalities.hpp"
#include "rearr/numeric.hpp"
#include "rearr/rearrange.hpp"

using namespace rearr;

TEST_CASE("gradient of a constant vanishes; affine data is exact") {
    GridFunction c = sample(fixtures::unit_square(0.125), [](const auto&) { return 5.0; });
    GridFunction gc = gradient_magnitude(c);
    for (double v : gc.values()) CHECK(v == 0.0);

    GridFunction affine = sample(fixtures::unit_square(1.0 / 16),
                                 [](const std::vector<double>& x) { return 3.0 * x[0]; });
    GridFunction ga = gradient_magnitude(affine);
    for (double v : ga.values()) CHECK(v == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("gradient of the square-root dome matches the closed form away from the rim") {
    auto run = [](double h) {
        Domain disk = fixtures::unit_disk(h);
        GridFunction u = sample(disk, [](const std::vector<double>& x) {
            return std::sqrt(std::max(M_PI - M_PI * (x[0] * x[0] + x[1] * x[1]), 0.0));
        });
        GridFunction g = gradient_magnitude(u);
        double worst = 0.0;
        for (std::int64_t c = 0; c < u.cell_count(); ++c) {
            const auto x = u.domain().cell_center(u.domain().lattice_of_cell(c));
            const double r = std::sqrt(x[0] * x[0] + x[1] * x[1]);
            if (r > 0.7 || r < 0.05) continue;
            const double exact = std::sqrt(M_PI) * r / std::sqrt(1.0 - r * r);
            worst = std::max(worst, std::abs(g.value(c) - exact) / exact);
        }
        return worst;
    };
    const double coarse = run(1.0 / 64);
    const double fine = run(1.0 / 128);
    CHECK(coarse < 0.05);
    CHECK(fine < 0.7 * coarse);
}

TEST_CASE("gradient rejects degenerate axes") {
    Domain thin = make_domain(DomainSpec::box({0.0, 0.0}, {1.0, 0.25}, 0.25));
    GridFunction u = sample(thin, [](const std::vector<double>& x) { return x[0]; });
    CHECK_THROWS_WITH_AS(gradient_magnitude(u), "axis too short", std::invalid_argument);
}

TEST_CASE("dirichlet energy: constant, affine, and the finite radial source") {
    GridFunction c = sample(fixtures::unit_square(0.125), [](const auto&) { return 2.0; });
    CHECK(dirichlet_energy(c) == 0.0);

    GridFunction affine = fixtures::ramp_square(1.0 / 32);
    CHECK(dirichlet_energy(affine) == doctest::Approx(1.0).epsilon(1e-10));

    // Radially increasing arrangement of the square-root profile:
    // u = sqrt(pi) |x| on the unit disk, energy pi^2.
    GridFunction cone = sample(fixtures::unit_disk(1.0 / 64), [](const std::vector<double>& x) {
        return std::sqrt(M_PI) * std::sqrt(x[0] * x[0] + x[1] * x[1]);
    });
    CHECK(dirichlet_energy(cone) == doctest::Approx(M_PI * M_PI).epsilon(0.05));
}

TEST_CASE("radial profile energy: closed forms") {
    BallDomain ball = BallDomain::with_measure(2, M_PI);

    StepProfile flat = StepProfile::piecewise_linear({0.0, M_PI / 2, M_PI}, {3.0, 3.0, 3.0});
    CHECK(radial_profile_energy(flat, ball, 0.0, M_PI) == 0.0);
    CHECK(mirrored_profile_energy(flat, ball, 0.0, M_PI) == 0.0);

    // Dense nodes of sqrt(pi - s): truncated direct energy follows
    // pi^2 ln(pi/eps) - pi^2 + pi*eps; mirrored full-range energy is pi^2.
    std::vector<double> knots, nodes;
    for (int j = 0; j <= 512; ++j) knots.push_back(M_PI * j / 512.0);
    for (int k = 1; k <= 60; ++k) {
        knots.push_back(M_PI * (1.0 - std::pow(2.0, -k / 4.0)));
    }
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    if (knots.back() < M_PI) knots.push_back(M_PI);
    for (double s : knots) nodes.push_back(std::sqrt(std::max(M_PI - s, 0.0)));
    StepProfile root = StepProfile::piecewise_linear(knots, nodes);

    for (int k : {4, 8, 12}) {
        const double eps = M_PI * std::pow(2.0, -k);
        const double expected = M_PI * M_PI * std::log(M_PI / eps) - M_PI * M_PI + M_PI * eps;
        CHECK(radial_profile_energy(root, ball, 0.0, M_PI - eps) ==
              doctest::Approx(expected).epsilon(2e-3));
    }
    CHECK(mirrored_profile_energy(root, ball, 0.0, M_PI) ==
          doctest::Approx(M_PI * M_PI).epsilon(5e-3));

    CHECK_THROWS_WITH_AS(radial_profile_energy(root, ball, -1.0, 1.0),
                         "s-range outside [0, |Omega|]", std::invalid_argument);
}

TEST_CASE("odd-symmetric profile has equal direct and mirrored energies") {
    // Linear profile 1 - s/m: |slope| symmetric about s = m/2.
    BallDomain ball = BallDomain::with_measure(2, 4.0);
    StepProfile lin = StepProfile::piecewise_linear({0.0, 2.0, 4.0}, {1.0, 0.5, 0.0});
    const double direct = radial_profile_energy(lin, ball, 0.0, 4.0);
    const double mirrored = mirrored_profile_energy(lin, ball, 0.0, 4.0);
    CHECK(direct == doctest::Approx(mirrored).epsilon(1e-13));
}

TEST_CASE("profile energy agrees with the resampled grid energy on smooth data") {
    const double h = 1.0 / 96;
    GridFunction u = fixtures::radial_bump_disk(h);
    RadialFunction tilde = schwarz_symmetrization(u);
    StepProfile pl = piecewise_linear_view(tilde.profile, tilde.ball, h);
    const double one_d = radial_profile_energy(pl, tilde.ball, 0.0, tilde.ball.measure);
    const double two_d = dirichlet_energy(resample_on_ball(tilde, h));
    CHECK(one_d == doctest::Approx(two_d).epsilon(0.08));
}

TEST_CASE("level sets are monotone and their measure matches the distribution") {
    GridFunction u = fixtures::two_bump_square(1.0 / 32);
    LevelSet lo = LevelSet::of(u, 0.1);
    LevelSet hi = LevelSet::of(u, 0.4);
    for (std::size_t c = 0; c < lo.member.size(); ++c) {
        if (hi.member[c]) CHECK(lo.member[c]);
    }
    CHECK(lo.measure() == distribution(u, 0.1));
    CHECK(hi.measure() == distribution(u, 0.4));
}

TEST_CASE("perimeter: flat cut is exact in the raw count, empty and full are zero") {
    const double h = 1.0 / 64;
    GridFunction u = fixtures::ramp_square(h);
    LevelSet half = LevelSet::of(u, 0.5);
    PerimeterEstimate est = relative_perimeter(half);
    CHECK(est.raw == 1.0);
    CHECK(est.calibrated == doctest::Approx(1.0 / anisotropy_factor(2)).epsilon(1e-12));

    LevelSet empty = LevelSet::of(u, 2.0);
    CHECK(relative_perimeter(empty).raw == 0.0);
    LevelSet full = LevelSet::of(u, -1.0);
    CHECK(relative_perimeter(full).raw == 0.0);
}

TEST_CASE("anisotropy factor matches the closed forms") {
    CHECK(anisotropy_factor(1) == 1.0);
    CHECK(anisotropy_factor(2) == doctest::Approx(4.0 / M_PI).epsilon(2e-3));
    CHECK(anisotropy_factor(3) == doctest::Approx(1.5).epsilon(2e-3));
}

TEST_CASE("calibrated perimeter of a digitized ball tracks the isoperimetric value") {
    const double h = 1.0 / 128;
    Domain box = make_domain(DomainSpec::box({-1.0, -1.0}, {1.0, 1.0}, h));
    GridFunction r2 = sample(box, [](const std::vector<double>& x) {
        return -(x[0] * x[0] + x[1] * x[1]);
    });
    for (double radius : {0.3, 0.5, 0.8}) {
        LevelSet ball = LevelSet::of(r2, -radius * radius);
        const double v = ball.measure();
        const double expected = 2.0 * std::sqrt(M_PI) * std::sqrt(v);
        CHECK(relative_perimeter(ball).calibrated == doctest::Approx(expected).epsilon(0.05));
    }
}

TEST_CASE("boundary trace measure: full square, interior set, half square") {
    const double h = 1.0 / 32;
    GridFunction u = fixtures::ramp_square(h);

    LevelSet all = LevelSet::of(u, -1.0);
    CHECK(boundary_trace_measure(all) == doctest::Approx(4.0).epsilon(1e-12));

    GridFunction bump = fixtures::quadrant_bump_square(h);
    LevelSet interior = LevelSet::of(bump, 0.01);
    CHECK(boundary_trace_measure(interior) == 0.0);

    // Left half [0, 1/2] x [0, 1]: one full side plus two half sides.
    LevelSet left_half = LevelSet::of(u, 0.5);
    std::vector<std::uint8_t> flipped(left_half.member.size());
    for (std::size_t i = 0; i < flipped.size(); ++i) flipped[i] = left_half.member[i] ? 0 : 1;
    LevelSet left{left_half.domain, 0.5, flipped};
    CHECK(boundary_trace_measure(left) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("searched Q on the unit square is the exact half-cut value") {
    Domain square = fixtures::unit_square(1.0 / 64);
    const double q = estimate_Q(square);
    CHECK(q == doctest::Approx(std::sqrt(0.5)).epsilon(1e-9));
}

TEST_CASE("searched trace constant on the unit square comes from the half cut") {
    Domain square = fixtures::unit_square(1.0 / 64);
    const double c = estimate_C(square);
    CHECK(c == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("disk cut search peaks at the diameter") {
    Domain disk = fixtures::unit_disk(1.0 / 48);
    const double q = estimate_Q(disk);
    // Diameter cut: min measure (pi/2)^{1/2} over raw length 2.
    CHECK(q == doctest::Approx(std::sqrt(M_PI / 2.0) / 2.0).epsilon(0.05));
}

TEST_CASE("probe level sets extend the search family") {
    Domain square = fixtures::unit_square(1.0 / 32);
    GridFunction probe = fixtures::two_bump_square(1.0 / 32);
    std::vector<GridFunction> probes{probe};
    const double with_probes = estimate_Q(square, probes);
    const double cuts_only = estimate_Q(square);
    CHECK(with_probes >= cuts_only - 1e-15);
}

TEST_CASE("constant search is independent of the worker-thread count") {
    Domain disk = fixtures::unit_disk(1.0 / 32);
    setenv("REARRANGE_THREADS", "1", 1);
    const double q1 = estimate_Q(disk);
    const double c1 = estimate_C(disk);
    setenv("REARRANGE_THREADS", "3", 1);
    const double q3 = estimate_Q(disk);
    const double c3 = estimate_C(disk);
    unsetenv("REARRANGE_THREADS");
    CHECK(q1 == q3);
    CHECK(c1 == c3);
}

TEST_CASE("certificate constants: closed forms per case") {
    GammaInputs in;
    in.dimension = 2;
    in.measure = 1.0;

    GammaCertificate c1 = gamma_for_case(GammaCase::I, in);
    CHECK(c1.gamma == doctest::Approx(2.0 * std::sqrt(M_PI)).epsilon(1e-14));

    in.Q = 1.0;
    CHECK(gamma_for_case(GammaCase::II, in).gamma == doctest::Approx(1.0));

    in.eps = 0.25;
    GammaCertificate c3 = gamma_for_case(GammaCase::III, in);
    CHECK(c3.gamma == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-12));

    in.C = 2.0;
    GammaCertificate c4 = gamma_for_case(GammaCase::IV, in);
    CHECK(c4.gamma == doctest::Approx(std::min(1.0, 0.25 / 2.0)).epsilon(1e-12));
    GammaCertificate c5 = gamma_for_case(GammaCase::V, in);
    CHECK(c5.gamma == doctest::Approx(std::min(1.0, 0.25 / 3.0)).epsilon(1e-12));

    in.eps = 0.75;  // >= measure/2
    CHECK_THROWS_WITH_AS(gamma_for_case(GammaCase::III, in), "epsilon out of range",
                         std::invalid_argument);
    in.eps = 0.25;
    in.Q = 0.0;
    CHECK_THROWS_WITH_AS(gamma_for_case(GammaCase::II, in), "missing constant Q",
                         std::invalid_argument);
}

TEST_CASE("certificates recompute from their recorded inputs") {
    GammaInputs in;
    in.dimension = 3;
    in.measure = 2.5;
    in.Q = 0.8;
    in.eps = 0.4;
    GammaCertificate c = gamma_for_case(GammaCase::III, in);
    const double alpha = c.inputs.at("eps") / (c.inputs.at("measure") - c.inputs.at("eps"));
    const double recomputed = std::pow(alpha, 1.0 - 1.0 / 3.0) / c.inputs.at("Q");
    CHECK(std::abs(c.gamma - recomputed) <= 1e-12 * recomputed);
}

TEST_CASE("perimeter condition scan accepts certified inputs and rejects constants") {
    const double h = 1.0 / 64;
    GridFunction cone = fixtures::cone_disk(h);
    GammaCertificate cert =
        gamma_for_case(GammaCase::I, {2, cone.domain().measure(), 0.0, 0.0, 0.0});
    ScanResult ok = scan_perimeter_condition(cone, cert.gamma);
    CHECK(ok.passed);
    CHECK(ok.tested > 40);

    // A gamma far above the isoperimetric value must fail the scan.
    ScanResult bad = scan_perimeter_condition(cone, 3.0 * cert.gamma);
    CHECK(!bad.passed);
}

TEST_CASE("scan violation shrinks under refinement on smooth inputs") {
    GridFunction coarse = fixtures::radial_bump_disk(1.0 / 48);
    GridFunction fine = fixtures::radial_bump_disk(1.0 / 96);
    const double gamma = 2.0 * std::sqrt(M_PI);
    ScanResult a = scan_perimeter_condition(coarse, gamma);
    ScanResult b = scan_perimeter_condition(fine, gamma);
    CHECK(b.max_violation <= a.max_violation + 0.01);
}

TEST_CASE("boundary vanishing evidence") {
    CHECK(boundary_vanishing(fixtures::cone_disk(1.0 / 48)));
    CHECK(boundary_vanishing(fixtures::radial_bump_disk(1.0 / 48)));
    GridFunction ones = sample(fixtures::unit_square(1.0 / 16), [](const auto&) { return 1.0; });
    CHECK(!boundary_vanishing(ones));
    CHECK(!boundary_vanishing(fixtures::ramp_square(1.0 / 16)));
}

TEST_CASE("coarea identity: affine, zero weight, and radial inputs") {
    const double h = 1.0 / 64;
    GridFunction u = fixtures::ramp_square(h);
    GridFunction one = sample(fixtures::unit_square(h), [](const auto&) { return 1.0; });
    auto [lhs, rhs] = coarea_check(u, one);
    CHECK(lhs == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rhs == doctest::Approx(lhs).epsilon(0.02));

    GridFunction zero = sample(fixtures::unit_square(h), [](const auto&) { return 0.0; });
    auto [zl, zr] = coarea_check(u, zero);
    CHECK(zl == 0.0);
    CHECK(zr == 0.0);

    GridFunction bumpd = fixtures::radial_bump_disk(h);
    GridFunction oned = sample(fixtures::unit_disk(h), [](const auto&) { return 1.0; });
    auto [bl, br] = coarea_check(bumpd, oned);
    CHECK(bl == doctest::Approx(br).epsilon(0.05));

    // With unit weight the surface side also matches the t-quadrature of the
    // calibrated level-set perimeters.
    KahanSum perim_integral;
    const auto thresholds = level_thresholds(bumpd);
    for (std::size_t j = 0; j + 1 < thresholds.size(); ++j) {
        const double p = relative_perimeter(LevelSet::of(bumpd, thresholds[j])).calibrated;
        perim_integral.add(p * (thresholds[j + 1] - thresholds[j]));
    }
    CHECK(br == doctest::Approx(perim_integral.value()).epsilon(0.05));
}

TEST_CASE("constants certificate file round-trip") {
    ConstantsCertificate cert;
    cert.constants = {std::sqrt(0.5), 2.0, "searched"};
    GammaInputs in;
    in.dimension = 2;
    in.measure = 1.0;
    in.Q = std::sqrt(0.5);
    in.eps = 0.25;
    cert.gamma = gamma_for_case(GammaCase::III, in);
    const auto path = (std::filesystem::temp_directory_path() / "c.rconst").string();
    write_constants(cert, path);
    ConstantsCertificate back = read_constants(path);
    CHECK(back.constants.Q == cert.constants.Q);
    CHECK(back.constants.C == cert.constants.C);
    CHECK(back.constants.method == "searched");
    REQUIRE(back.gamma.has_value());
    CHECK(back.gamma->gamma == cert.gamma->gamma);
    CHECK(back.gamma->kase == GammaCase::III);
    CHECK(back.gamma->inputs.at("eps") == 0.25);
    std::remove(path.c_str());
}
