#include "doctest.h"

#include <cmath>

#include "qcfb/rhs.hpp"

using namespace qcfb;

static RHSSpec default_spec() { return RHSSpec{}; }

TEST_CASE("beta exponent") {
    CHECK(beta_exponent(-0.5) == doctest::Approx(4.0 / 3.0));
    CHECK(beta_exponent(0.0) == doctest::Approx(2.0));
    CHECK(beta_exponent(-0.999) == doctest::Approx(2.0 / 1.999));
    CHECK_THROWS_AS(beta_exponent(-1.0), Error);
    CHECK_THROWS_AS(beta_exponent(1.0), Error);
}

TEST_CASE("g: zero below, value at 1, sandwich sweep") {
    RHSSpec spec = default_spec();
    RhsFn g = RhsFn::g(spec);
    CHECK(g.eval(-1.0) == 0.0);
    CHECK(g.eval(1.0) == doctest::Approx(spec.C1));
    for (int k = 1; k <= 99; ++k) {
        double t = k / 100.0;
        double gt = g.eval(t);
        CHECK(gt >= spec.c1 * std::pow(t, spec.b) - 1e-12);
        CHECK(gt <= spec.C1 * std::pow(t, spec.a) + 1e-12);
    }
    CHECK(g.eval(7.0) == doctest::Approx(spec.bound_above_one));
}

TEST_CASE("h: plateau, positivity, h <= g+2") {
    RHSSpec spec = default_spec();
    double eps1 = 0.3;
    RhsFn h = RhsFn::h(spec, eps1);
    RhsFn g = RhsFn::g(spec);
    CHECK(h.eval(eps1 / 2) == doctest::Approx(1.0));
    CHECK(h.eval(-0.3) == 0.0);
    for (int k = 1; k <= 400; ++k) {
        double t = k / 100.0;
        CHECK(h.eval(t) <= g.eval(t) + 2.0 + 1e-12);
        CHECK(h.eval(t) > 0.0);
        if (t < 1.0) CHECK(h.eval(t) >= spec.c1 * std::pow(t, spec.b) - 1e-12);
    }
    CHECK(h.lipschitz() == doctest::Approx((spec.C1 + 1.0) / eps1));
}

TEST_CASE("h^j: ramp values and monotone convergence to h") {
    RHSSpec spec = default_spec();
    RhsFn h = RhsFn::h(spec, 0.3);
    int j = 8;
    RhsFn hj = RhsFn::truncate(h, j);
    CHECK(hj.eval(1.0 / (2 * j)) == doctest::Approx(0.0));
    CHECK(hj.eval(3.0 / (4 * j)) == doctest::Approx(0.5));
    CHECK(hj.eval(1.0 / j) == doctest::Approx(1.0));
    CHECK(hj.lipschitz() == doctest::Approx(std::max(2.0 * j, h.lipschitz())));

    RhsFn hj2 = RhsFn::truncate(h, 2 * j);
    for (int k = 1; k <= 300; ++k) {
        double t = k / 100.0;
        CHECK(hj.eval(t) <= hj2.eval(t) + 1e-12);
        CHECK(hj2.eval(t) <= h.eval(t) + 1e-12);
        if (t >= 1.0 / j && t < 1.0)
            CHECK(hj.eval(t) >= spec.c1 * std::pow(t, spec.b) - 1e-12);
    }
    CHECK_THROWS_AS(RhsFn::truncate(h, 2), Error); // 1/2 > eps1
}

TEST_CASE("g^i: plateau, splice, equality with g beyond the splice") {
    RHSSpec spec = default_spec();
    RhsFn g = RhsFn::g(spec);
    int i = 5;
    RhsFn gi = RhsFn::gi(spec, i);
    CHECK(gi.eval(std::pow(0.5, i + 1)) == doctest::Approx(1.0));
    CHECK(gi.eval(0.0) == 0.0);
    CHECK(gi.eval(-3.0) == 0.0);
    CHECK(gi.eval(0.9) == doctest::Approx(g.eval(0.9)));
    for (int k = 1; k <= 400; ++k) {
        double t = k / 100.0;
        CHECK(gi.eval(t) <= g.eval(t) + 2.0 + 1e-12);
        if (t >= std::pow(2.0, 1 - i)) CHECK(gi.eval(t) == doctest::Approx(g.eval(t)));
    }
}

TEST_CASE("antiderivatives: exact piecewise integrals") {
    RHSSpec spec = default_spec();
    RhsFn h = RhsFn::h(spec, 0.1);
    CHECK(h.antiderivative(0.0) == 0.0);
    CHECK(h.antiderivative(-2.0) == 0.0);
    CHECK(h.antiderivative(0.05) == doctest::Approx(0.05)); // integral of 1
    // monotone
    double prev = 0.0;
    for (int k = 1; k <= 500; ++k) {
        double t = k / 100.0;
        double H = h.antiderivative(t);
        CHECK(H >= prev - 1e-15);
        prev = H;
    }
    // cross-check against midpoint quadrature on the g family (away from the
    // integrable singularity at 0, where midpoint rule is a bad oracle)
    RhsFn g = RhsFn::g(spec);
    double lo = 0.1, T = 0.8;
    int n = 200000;
    double quad = 0.0;
    for (int k = 0; k < n; ++k) quad += g.eval(lo + (k + 0.5) * (T - lo) / n) * ((T - lo) / n);
    CHECK(g.antiderivative(T) - g.antiderivative(lo) == doctest::Approx(quad).epsilon(1e-7));
}

TEST_CASE("truncation of a g^i base keeps the composite consistent") {
    RHSSpec spec = default_spec();
    int i = 3, j = 16;
    RhsFn gi = RhsFn::gi(spec, i);
    RhsFn gij = RhsFn::truncate(gi, j);
    CHECK(gij.eval(1.0 / (2 * j)) == doctest::Approx(0.0));
    CHECK(gij.eval(1.0 / j) == doctest::Approx(1.0));
    CHECK(gij.eval(0.5) == doctest::Approx(gi.eval(0.5)));
    // composite requires 1/j inside the plateau of g^i
    CHECK_THROWS_AS(RhsFn::truncate(gi, 4), Error);
}

TEST_CASE("spec validation") {
    RHSSpec bad = default_spec();
    bad.a = 0.5;
    CHECK_THROWS_AS(bad.validate(), Error);
    RegSpec rs;
    rs.eps1 = 0.3;
    rs.j = 8;
    rs.i = 4;
    CHECK_NOTHROW(rs.validate());
    rs.j = 2;
    CHECK_THROWS_AS(rs.validate(), Error);
    rs.j = 8;
    rs.i = 1;
    CHECK_THROWS_AS(rs.validate(), Error);
}
