#ifndef QCFB_BARRIERS_HPP
#define QCFB_BARRIERS_HPP

#include <functional>
#include <vector>

#include "qcfb/geometry.hpp"
#include "qcfb/operators.hpp"
#include "qcfb/rhs.hpp"

namespace qcfb {

struct BarrierSpec {
    double tau = 0.0;  // inset depth; default inradius/4 chosen by callers
    double rho = 0.0;  // collar thickness (from bisection)
    double r0 = 0.0;   // inner supersolution radius
    double R0 = 0.0;   // outer support radius
    int j = 4;
};

/// w_sharp: 1 where d_{K^tau} <= tau (covers K), the beta-power profile
/// rho^-beta (tau+rho-d)^beta on the collar tau < d < tau+rho, 0 beyond.
class SubsolutionFull {
public:
    SubsolutionFull(const ConvexBody& K, double a, double tau, double rho);
    double operator()(Vec2 x) const;
    double truncated(Vec2 x, int j) const; // max(w_sharp, 1/(2j))
    const ConvexBody& inset_body() const { return ktau_; }
    double tau() const { return tau_; }
    double rho() const { return rho_; }
    double beta() const { return beta_; }

private:
    ConvexBody ktau_;
    double tau_, rho_, beta_;
};

/// 1 on B_{r0}, (1-1/(2j)) ((R0-|x|)/(R0-r0))^4 + 1/(2j) on the annulus,
/// 1/(2j) beyond B_{R0}. Requires B_{r0/2} to contain K.
class SupersolutionFull {
public:
    SupersolutionFull(const ConvexBody& K, double r0, double R0, int j);
    double operator()(Vec2 x) const;
    double r0() const { return r0_; }
    double R0() const { return R0_; }

private:
    double r0_, R0_, floor_, amp_;
};

/// Thin-geometry subsolution: the beta profile of the distance to the tilted
/// inner body K^{tau_m} - tau_m e_y with tau_m = 1/m. Vanishes on the plane
/// off K provided rho_m < (sqrt(2)-1) tau_m.
class SubsolutionThin {
public:
    SubsolutionThin(const ConvexBody& K, double a, int m, double rho_m);
    double operator()(Vec2 x) const;
    double truncated(Vec2 x, int j) const;
    double tau() const { return tau_; }
    double rho() const { return rho_; }

private:
    ConvexBody tilted_;
    double tau_, rho_, beta_;
};

/// Sample a pointwise barrier onto a grid.
ScalarField sample_field(const Grid2D& grid, const std::function<double(Vec2)>& f);

/// Even reflection of a half-space field (rows y >= 0) onto a full grid whose
/// rows are symmetric about y = 0. Grids must share spacing and x-range.
ScalarField reflect_even(const ScalarField& half, const Grid2D& full);

struct MarginReport {
    double min_margin = 1e300;
    double max_margin = -1e300;
    double min_margin_face = 1e300; // collar cells nearest to an edge of K^tau
    double min_margin_fan = 1e300;  // collar cells nearest to a vertex (corner fans)
    long cells = 0;
    long fan_cells = 0;
    bool resolved = false; // any computable collar cell
};

/// Margins F(D^2 w) - hj(w) over the collar cells tau < d_{K^tau} < tau+rho of
/// a sampled subsolution field. Positive margins certify the seed inequality.
MarginReport subsolution_margin(const ScalarField& w, const ConvexBody& ktau, double tau,
                                double rho, const RhsFn& hj, const OperatorKind& kind);

/// Margins over annulus cells r0 < |x| < R0 + 2 cells of a sampled
/// supersolution field. Valid when max_margin <= +tol.
MarginReport supersolution_margin(const ScalarField& w, double r0, double R0, const RhsFn& hj,
                                  const OperatorKind& kind);

struct RhoSearch {
    bool found = false;
    double rho = 0.0;
    MarginReport report;
};

/// Largest rho in (3s, rho_max] whose collar margin stays >= -tol on the grid,
/// by bisection. The paper level quantifier "rho small enough" made concrete.
RhoSearch bisect_rho(const ConvexBody& K, double a, const RhsFn& hj, const OperatorKind& kind,
                     const Grid2D& grid, double tau, double rho_max, double tol);

struct R0Search {
    bool found = false;
    double R0 = 0.0;
    MarginReport report;
};

/// Smallest R0 in [lo, hi] with supersolution margin <= +tol, bisected on a
/// fresh square grid of n points per side per trial (box tracks R0).
R0Search bisect_R0(const ConvexBody& K, const RhsFn& hj, const OperatorKind& kind, int n,
                   double r0, double lo, double hi, double tol, int j);

} // namespace qcfb

#endif
