#ifndef QCFB_SOLVER_FN_HPP
#define QCFB_SOLVER_FN_HPP

#include <optional>
#include <string>
#include <vector>

#include "qcfb/barriers.hpp"
#include "qcfb/geometry.hpp"
#include "qcfb/operators.hpp"
#include "qcfb/rhs.hpp"

namespace qcfb {

enum class Geometry { Full, Thin, Hybrid };

struct Tolerances {
    double fix_tol = 1e-7;
    double lin_tol = 1e-9;
    double tol_barrier = 1e-3;
    double grad_fb_factor = 20.0; // grad_fb_tol = factor * s^(beta-1)
    int max_outer = 50000;
    int max_sweeps = 10000;
};

struct ProblemSpec {
    Geometry geometry = Geometry::Full;
    ConvexBody K;
    OperatorKind op;
    RHSSpec rhs;
    double eps1 = 0.3;
    std::vector<int> j_ladder; // assembled from the grid when empty
    std::vector<int> i_ladder; // assembled when empty; {-1} disables i stages
    Grid2D grid;
    double r0 = 0.0;
    double R0 = 0.0;
    Tolerances tol;
    double barrier_tau = -1.0; // default: inradius(K)/4
    double barrier_rho = -1.0; // default: 0.45 * tau (validated, reported)
    std::string mu_policy = "two_lip_plus_one";

    void validate() const;
};

/// One rung of the regularization ladder: RHS = truncate(base, j) where base
/// is h (i == 0) or the i-th approximation of g.
struct Stage {
    int j = 0;
    int i = 0; // 0 = h-based
    RhsFn base;
    RhsFn hj;
};

/// Ladder assembly: j doubles from 4 and stops after the first rung whose
/// floor 1/(2j) drops below max(10 s^2, 1e-4); i stages need j > 2^i from the
/// same ladder and (1/2)^i < eps1.
std::vector<Stage> assemble_stages(const ProblemSpec& spec);

struct StageReport {
    int j = 0, i = 0;
    double mu = 0;
    int outer_iters = 0;
    long sweeps = 0;
    double final_update = 0;
    double min_update = 1e300;      // most negative w_{k+1}-w_k over the stage
    double sandwich_low = 1e300;    // min of v - barrier, outside the K staircase band
    double sandwich_low_seed = 1e300; // min of v - seed, all free cells
    double sandwich_high = 1e300;   // min of supersolution - v
    double seed_margin_min = 1e300;
    long seed_cells_clipped = 0;
};

struct SolveReport {
    std::vector<StageReport> stages;
    double support_radius = 0;
    double u_floor = 0;
    double residual_max = 0;   // PDE residual on the positivity set away from the free boundary
    double residual_tol = 0;
    long range_violations = 0;
    double min_value = 0, max_value = 0;
    double bc_K_max_dev = 0;
    double outer_floor_max_dev = 0;
    double fb_grad_max = 0;
    double grad_fb_tol = 0;
    long sandwich_violations = 0;
    double rho_used = 0, tau_used = 0;
    bool hard_pass = true; // sandwich, range, support, boundary data
};

/// Damped point Gauss-Seidel on F(D^2 w) - mu w + source = 0 over free cells
/// (policy-style eigenframe refreeze per sweep for the Pucci operator).
/// Returns the sweep count; throws NoConvergence past tol.max_sweeps.
long solve_linearized(ScalarField& w, const OperatorKind& kind, double mu,
                      const std::vector<double>& source, double lin_tol, int max_sweeps,
                      double omega = 1.0);

/// Pure elliptic Dirichlet solve F(D^2 w) = 0 on the free cells (SOR).
long solve_F_dirichlet(ScalarField& w, const OperatorKind& kind, double tol, int max_sweeps);

class FnSolver {
public:
    explicit FnSolver(const ProblemSpec& spec);

    /// Runs the full continuation (j ladder, then i ladder) and returns the
    /// final field with its report. Dispatches on spec.geometry.
    std::pair<ScalarField, SolveReport> solve();

    /// Single monotone stage from the barrier seed; exposed for tests.
    ScalarField monotone_stage(const Stage& stage, StageReport& rep,
                               const ScalarField* warm = nullptr);

    const ProblemSpec& spec() const { return spec_; }
    double tau() const { return tau_; }
    double rho() const { return rho_; }

private:
    ProblemSpec spec_;
    double tau_, rho_;
    std::vector<Stage> stages_;

    ScalarField make_cells(double floor) const;  // kinds + frozen values
    ScalarField seed_field(const Stage& stage) const;
    ScalarField supersolution_field(const Stage& stage) const;
    void finalize_report(const ScalarField& u, const Stage& last, SolveReport& rep) const;

    // hybrid geometry runs a thin pre-solve and reflects it; cached here
    mutable std::optional<ScalarField> thin_seed_;
};

/// Max |x| over cells with value strictly above the floor.
double support_radius(const ScalarField& field, double floor);

struct GrowthFit {
    double slope_median = 0;
    double C_fit = 0;
    int probes = 0;
    std::vector<double> slopes;
};

/// Log-log fit of sup_{B_r} u vs r at free-boundary-adjacent probes, dyadic
/// radii; the growth-estimate diagnostic sup_{B_r} u <= C (r^beta + u(x)).
GrowthFit growth_fit(const ScalarField& u, double u_floor, double beta, int max_probes = 20);

struct NondegReport {
    double kappa = 0;
    double fitted_exponent = 0;
    double largest_c = 0;
    int probes = 0;
    bool degenerate = false;
};

/// Lower-growth diagnostic with kappa = 2/(1-b) (fully nonlinear) or
/// p/(p-1-b) (p-Laplacian).
NondegReport nondegeneracy_check(const ScalarField& u, double u_floor, double kappa,
                                 int max_probes = 20);

} // namespace qcfb

#endif
