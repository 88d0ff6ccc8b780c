#include "doctest.h"

#include <cmath>

#include "qcfb/barriers.hpp"

using namespace qcfb;

namespace {
ConvexBody unit_square() {
    return make_body({{-1, -1}, {1, -1}, {1, 1}, {-1, 1}});
}
OperatorKind pucci12() {
    OperatorKind k;
    k.tag = OperatorKind::Tag::PucciMinus;
    k.lam = 1;
    k.Lam = 2;
    return k;
}
} // namespace

TEST_CASE("subsolution profile values") {
    double a = -0.5, tau = 0.25, rho = 0.1;
    double beta = beta_exponent(a);
    SubsolutionFull sub(unit_square(), a, tau, rho);
    CHECK(sub({1.0, 0.0}) == doctest::Approx(1.0));                       // d = tau on the face
    CHECK(sub({1.0 + rho / 2, 0.0}) == doctest::Approx(std::pow(0.5, beta)));
    CHECK(sub({1.0 + rho, 0.0}) == doctest::Approx(0.0));
    CHECK(sub({3.0, 3.0}) == 0.0);
    // truncation identity on a sweep
    int j = 8;
    Grid2D g = Grid2D::square(1.6, 81);
    for (int jj = 0; jj < g.ny; jj += 3)
        for (int ii = 0; ii < g.nx; ii += 3) {
            Vec2 x = g.at(ii, jj);
            CHECK(sub.truncated(x, j) == doctest::Approx(std::max(sub(x), 1.0 / 16)));
        }
}

TEST_CASE("beta power profile is exact along a face normal") {
    double a = -0.5, tau = 0.25, rho = 0.1;
    double beta = beta_exponent(a);
    SubsolutionFull sub(unit_square(), a, tau, rho);
    // slope of log w against log(tau+rho-d) along the outward normal of a face
    double prev_lw = 0, prev_lx = 0;
    bool first = true;
    for (double d = tau + 0.01; d < tau + rho - 0.01; d += 0.01) {
        double w = sub({0.75 + d, 0.0});
        double lw = std::log(w), lx = std::log(tau + rho - d);
        if (!first) CHECK((lw - prev_lw) / (lx - prev_lx) == doctest::Approx(beta).epsilon(1e-6));
        prev_lw = lw;
        prev_lx = lx;
        first = false;
    }
}

TEST_CASE("supersolution values and validation") {
    ConvexBody K = unit_square();
    int j = 8;
    SupersolutionFull sup(K, 3.0, 5.0, j);
    CHECK(sup({5.0, 0.0}) == doctest::Approx(1.0 / 16));
    CHECK(sup({3.0, 0.0}) == doctest::Approx(1.0));
    double mid = (3.0 + 5.0) / 2;
    CHECK(sup({mid, 0.0}) == doctest::Approx((1 - 1.0 / 16) * 0.5 * 0.5 * 0.5 * 0.5 + 1.0 / 16));
    CHECK_THROWS_AS(SupersolutionFull(K, 1.5, 5.0, j), Error); // K not inside B_{0.75}
}

TEST_CASE("thin subsolution: plateau, gap, profile") {
    ConvexBody seg = segment_body(1.0);
    double a = -0.5;
    int m = 4; // tau_m = 0.25
    double rho_m = 0.4 * (std::sqrt(2.0) - 1.0) / m;
    SubsolutionThin sub(seg, a, m, rho_m);
    CHECK(sub({0.0, 0.0}) == doctest::Approx(1.0)); // on K^{tau_m}
    CHECK(sub({0.5, 0.0}) == doctest::Approx(1.0));
    // off K on the line: zero thanks to the sqrt(2) gap
    for (double x = 1.0001; x < 3.0; x += 0.05) CHECK(sub({x, 0.0}) == 0.0);
    double beta = beta_exponent(a);
    CHECK(sub({0.0, rho_m / 2}) == doctest::Approx(std::pow(0.5, beta)));
    CHECK_THROWS_AS(SubsolutionThin(seg, a, 4, 0.2), Error);  // rho too thick
    CHECK_THROWS_AS(SubsolutionThin(seg, a, 1, 0.01), Error); // tau_m past the inradius
}

TEST_CASE("even reflection") {
    Grid2D full = Grid2D::square(2.0, 41);
    Grid2D half = Grid2D::box(-2.0, 2.0, 0.0, 2.0, 41, 21);
    ScalarField hf(half);
    for (int j = 0; j < half.ny; ++j)
        for (int i = 0; i < half.nx; ++i) {
            Vec2 p = half.at(i, j);
            hf.at(i, j) = std::exp(-p.y) * (2.0 - std::abs(p.x));
        }
    ScalarField rf = reflect_even(hf, full);
    for (int j = 0; j < full.ny; ++j)
        for (int i = 0; i < full.nx; ++i) {
            int jr = full.ny - 1 - j;
            CHECK(rf.at(i, j) == doctest::Approx(rf.at(i, jr)));
        }
    CHECK(rf.max_value() == doctest::Approx(hf.max_value()));
    // trace on the plane row equals the half-field row 0
    int j0 = (full.ny - 1) / 2;
    for (int i = 0; i < full.nx; ++i) CHECK(rf.at(i, j0) == doctest::Approx(hf.at(i, 0)));
}

TEST_CASE("rho bisection certifies a positive collar margin (trace, square)") {
    ConvexBody K = unit_square();
    RHSSpec spec;
    RhsFn h = RhsFn::h(spec, 0.3);
    RhsFn hj = RhsFn::truncate(h, 4);
    Grid2D g = Grid2D::square(1.45, 257);
    double tau = 0.25;
    RhoSearch rs = bisect_rho(K, spec.a, hj, OperatorKind{}, g, tau, tau, 0.0);
    CHECK(rs.found);
    CHECK(rs.rho > 0.0);
    CHECK(rs.report.min_margin >= 0.0);
    CHECK(rs.report.cells > 50);
}

TEST_CASE("rho bisection for the pucci operator finds a thinner collar") {
    ConvexBody K = unit_square();
    RHSSpec spec;
    RhsFn h = RhsFn::h(spec, 0.3);
    RhsFn hj = RhsFn::truncate(h, 4);
    Grid2D g = Grid2D::square(1.45, 257);
    RhoSearch tr = bisect_rho(K, spec.a, hj, OperatorKind{}, g, 0.25, 0.25, 0.0);
    RhoSearch pm = bisect_rho(K, spec.a, hj, pucci12(), g, 0.25, 0.25, 0.0);
    CHECK(pm.found);
    CHECK(pm.report.min_margin >= 0.0);
    CHECK(pm.rho <= tr.rho + 1e-12);
}

TEST_CASE("R0 bisection brings the supersolution margin under tolerance") {
    ConvexBody K = unit_square();
    RHSSpec spec;
    RhsFn h = RhsFn::h(spec, 0.3);
    RhsFn hj = RhsFn::truncate(h, 4);
    R0Search rs = bisect_R0(K, hj, OperatorKind{}, 257, 3.0, 4.0, 24.0, 1e-3, 4);
    CHECK(rs.found);
    CHECK(rs.report.max_margin <= 1e-3);
    // the margin shrinks with R0
    SupersolutionFull supA(K, 3.0, 6.0, 4), supB(K, 3.0, 12.0, 4);
    Grid2D gA = Grid2D::square(6.2, 257), gB = Grid2D::square(12.4, 257);
    MarginReport mA = supersolution_margin(sample_field(gA, [&](Vec2 x) { return supA(x); }), 3.0,
                                           6.0, hj, OperatorKind{});
    MarginReport mB = supersolution_margin(sample_field(gB, [&](Vec2 x) { return supB(x); }), 3.0,
                                           12.0, hj, OperatorKind{});
    CHECK(mB.max_margin < mA.max_margin);
    // the floor region margin is exactly zero where the field is constant
    CHECK(mA.min_margin <= 0.0 + 1e-12);
}
