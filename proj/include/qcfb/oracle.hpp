#ifndef QCFB_ORACLE_HPP
#define QCFB_ORACLE_HPP

#include <vector>

#include "qcfb/operators.hpp"
#include "qcfb/rhs.hpp"

namespace qcfb {

/// One-dimensional radial reference solution for ball obstacles.
struct RadialProfile {
    std::vector<double> r;
    std::vector<double> u;
    double r_K = 1.0;
    double R_fb = 0.0;   // free-boundary / floor-contact radius
    double floor = 0.0;  // far-field value (0 or 1/(2j))
    int n = 2;
    double slope0 = 0.0; // bisected u'(r_K)
    int branch_switches = 0;
    double residual = 0.0;

    /// Linear interpolation; 1 inside r_K, floor beyond the stored range.
    double value(double radius) const;
};

/// Radial solve of F(D^2 u) = f(u), u(r_K) = 1, by shooting on u'(r_K).
/// kind: trace (u'' + (n-1)u'/r = f) or pucci_minus (sign-branched weights).
/// With f.zero_below() == 0 the target is the free boundary u = u' = 0;
/// with a positive floor the target is the matched two-point problem
/// u(r_out) = floor (r_out > r_K required).
RadialProfile radial_solve_fn(int n, const RhsFn& f, double r_K, const OperatorKind& kind,
                              double r_out = 0.0, double step_scale = 1.0);

/// Radial p-Laplacian flux form ((eps+u'^2)^(p/2-1) u' r^(n-1))' = r^(n-1) f(u).
RadialProfile radial_solve_plap(int n, double p, const RhsFn& f, double eps, double r_K,
                                double r_out = 0.0, double step_scale = 1.0);

struct CompareReport {
    double linf = 0.0;
    double l2 = 0.0;
    double support_diff = 0.0;
    long cells = 0;
};

/// Field-vs-profile error over the annulus r >= r_K around `center`,
/// plus the support-radius gap at the given floor threshold.
CompareReport compare(const ScalarField& field, const RadialProfile& profile, Vec2 center,
                      double u_floor);

} // namespace qcfb

#endif
