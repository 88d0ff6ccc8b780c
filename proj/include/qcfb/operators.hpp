#ifndef QCFB_OPERATORS_HPP
#define QCFB_OPERATORS_HPP

#include <utility>

#include "qcfb/grid.hpp"

namespace qcfb {

/// 2x2 symmetric matrix of second derivatives.
struct SymMat2 {
    double xx = 0, xy = 0, yy = 0;
};

/// Eigenvalues in ascending order.
std::pair<double, double> eigen_values(const SymMat2& m);

double pucci_plus(const SymMat2& m, double lam, double Lam);
double pucci_minus(const SymMat2& m, double lam, double Lam);

/// Coefficient matrix A with tr(A m) = pucci_minus(m): lam on the positive
/// eigenspace, Lam on the negative one (the policy-iteration linearization).
SymMat2 pucci_minus_coeff(const SymMat2& m, double lam, double Lam);

struct OperatorKind {
    enum class Tag { Trace, PucciMinus, PLaplace };
    Tag tag = Tag::Trace;
    double lam = 1.0;
    double Lam = 1.0;
    double p = 2.0;        // PLaplace only
    double eps = 1e-3;     // PLaplace regularization
    bool wide_stencil = false; // 8-direction monotone stencil for F paths

    void validate() const;
    bool is_fn() const { return tag != Tag::PLaplace; }
};

/// Trace or minimal Pucci of a matrix. Throws UnsupportedKind for PLaplace.
double F_eval(const OperatorKind& kind, const SymMat2& m);

/// Central second differences (diagonal 3-point, mixed 4-point cross).
/// Throws StencilClipped unless all 8 neighbors exist and none is masked
/// as obstacle when `respect_mask` is set.
SymMat2 discrete_hessian(const ScalarField& field, int i, int j, bool respect_mask = false);

/// a(z) = (eps+|z|^2)^(p/2-2) [ (p-2) z z^T + (eps+|z|^2) I ].
SymMat2 plap_coeff(Vec2 z, double p, double eps);

const double kResidualSentinel = std::nan("");

/// Pointwise F(D^2 u) - rhs on interior computable cells; NaN elsewhere.
ScalarField fn_residual(const ScalarField& field, const ScalarField& rhs_field,
                        const OperatorKind& kind);

/// F(D^2 u) via the 8-direction wide stencil (directions at multiples of
/// pi/8 approximated by the integer offsets (1,0),(2,1),(1,1),(1,2) and
/// rotations): minimum over orthogonal direction pairs of the lam/Lam
/// weighted second differences.
double F_wide(const ScalarField& field, int i, int j, const OperatorKind& kind);

/// Face-based discrete p-Laplacian residual: div[(eps+|grad u|^2_f)^(p/2-1)
/// grad u] - rhs, as the exact variational derivative of the face energy
/// (see solver_plap). Full face metric for p != 2, compact for p == 2.
ScalarField plap_residual(const ScalarField& field, const ScalarField& rhs_field, double p,
                          double eps);

/// Shared face-energy machinery (also used by the energy path).
/// face metric: at p==2 the compact normal-only scheme (classic 5-point),
/// otherwise full face gradients with transverse averaging, weight 1/2.
struct PlapScheme {
    double p;
    double eps;
    bool compact; // true iff p == 2

    explicit PlapScheme(double p_, double eps_) : p(p_), eps(eps_), compact(p_ == 2.0) {}

    /// Gradient-energy part of the discrete energy (no potential term).
    double gradient_energy(const ScalarField& w) const;
    /// d(gradient_energy)/dw at every free cell; 0 at frozen cells.
    void gradient_energy_diff(const ScalarField& w, std::vector<double>& out) const;
};

} // namespace qcfb

#endif
