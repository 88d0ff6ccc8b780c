#include "qcfb/solver_fn.hpp"

#include <algorithm>
#include <cmath>

namespace qcfb {

void ProblemSpec::validate() const {
    rhs.validate();
    op.validate();
    if (op.tag == OperatorKind::Tag::PLaplace)
        throw Error(ErrorCode::UnsupportedKind, "the fully nonlinear solver takes trace or pucci_minus");
    if (K.vertices.empty()) throw Error(ErrorCode::InvalidSpec, "empty obstacle");
    if (!(r0 > 1.0 && R0 > r0)) throw Error(ErrorCode::InvalidSpec, "need 1 < r0 < R0");
    if (grid.nx < 9 || grid.ny < 5) throw Error(ErrorCode::InvalidSpec, "grid too small");
    double xmax = grid.x0 + (grid.nx - 1) * grid.s;
    double ymax = grid.y0 + (grid.ny - 1) * grid.s;
    if (geometry == Geometry::Thin) {
        if (K.dim != 1) throw Error(ErrorCode::InvalidSpec, "thin geometry expects a dim-1 obstacle");
        if (std::abs(grid.y0) > 1e-12)
            throw Error(ErrorCode::InvalidSpec, "thin grid must start at the plane y=0");
        if (!(xmax >= 2 * R0 - 1e-9 && grid.x0 <= -2 * R0 + 1e-9 && ymax >= 2 * R0 - 1e-9))
            throw Error(ErrorCode::InvalidSpec, "thin grid must contain the upper half of B_{2R0}");
    } else {
        if (geometry == Geometry::Hybrid) {
            if (K.dim != 1)
                throw Error(ErrorCode::InvalidSpec, "hybrid geometry expects a dim-1 obstacle");
            if (grid.ny % 2 == 0 || std::abs(grid.y0 + ymax) > 1e-9)
                throw Error(ErrorCode::InvalidSpec, "hybrid grid must be symmetric with a y=0 row");
        }
        if (!(xmax >= 2 * R0 - 1e-9 && grid.x0 <= -2 * R0 + 1e-9 && ymax >= 2 * R0 - 1e-9 &&
              grid.y0 <= -2 * R0 + 1e-9) &&
            geometry == Geometry::Full)
            throw Error(ErrorCode::InvalidSpec, "grid box must contain B_{2R0}");
        if (geometry == Geometry::Hybrid && !(xmax >= 2 * R0 - 1e-9 && ymax >= 2 * R0 - 1e-9))
            throw Error(ErrorCode::InvalidSpec, "grid box must contain B_{2R0}");
    }
    if (mu_policy != "two_lip_plus_one")
        throw Error(ErrorCode::InvalidSpec, "unknown mu policy: " + mu_policy);
}

std::vector<Stage> assemble_stages(const ProblemSpec& spec) {
    double threshold = std::max(10.0 * spec.grid.s * spec.grid.s, 1e-4);
    std::vector<int> js = spec.j_ladder;
    if (js.empty()) {
        int j = 4;
        while (true) {
            js.push_back(j);
            if (1.0 / (2.0 * j) < threshold) break;
            j *= 2;
        }
    }
    for (int j : js)
        if (!(1.0 / j < spec.eps1))
            throw Error(ErrorCode::InvalidSpec,
                        "ladder rung j=" + std::to_string(j) + " violates 1/j < eps1");
    int j_max = *std::max_element(js.begin(), js.end());

    std::vector<int> is = spec.i_ladder;
    bool disabled = is.size() == 1 && is[0] == -1;
    if (disabled) {
        is.clear();
    } else if (is.empty()) {
        int i = 1;
        while (std::pow(0.5, i) >= spec.eps1) ++i;
        for (; (1 << i) < j_max; ++i) {
            is.push_back(i);
            if (std::pow(0.5, i) < threshold) break;
        }
    }

    RhsFn h = RhsFn::h(spec.rhs, spec.eps1);
    std::vector<Stage> stages;
    for (int j : js) stages.push_back({j, 0, h, RhsFn::truncate(h, j)});
    for (int i : is) {
        RhsFn gi = RhsFn::gi(spec.rhs, i);
        for (int j : js)
            if (j > (1 << i)) stages.push_back({j, i, gi, RhsFn::truncate(gi, j)});
    }
    if (stages.empty()) throw Error(ErrorCode::InvalidSpec, "empty regularization ladder");
    return stages;
}

namespace {

struct SweepKernel {
    const OperatorKind& kind;
    double mu;
    double omega;
    const std::vector<double>& src;
    std::vector<SymMat2> coeff; // pucci central: frozen per sweep

    double sweep(ScalarField& w) {
        const Grid2D& g = w.grid;
        double s2 = g.s * g.s;
        double upd = 0.0;
        if (kind.tag == OperatorKind::Tag::Trace) {
            double diag = 4.0 / s2 + mu;
            for (int j = 1; j < g.ny - 1; ++j) {
                int row = j * g.nx;
                for (int i = 1; i < g.nx - 1; ++i) {
                    int c = row + i;
                    if (w.kind[c] != 0) continue;
                    double nb = w.v[c - 1] + w.v[c + 1] + w.v[c - g.nx] + w.v[c + g.nx];
                    double cand = (nb / s2 + src[c]) / diag;
                    double nw = w.v[c] + omega * (cand - w.v[c]);
                    upd = std::max(upd, std::abs(nw - w.v[c]));
                    w.v[c] = nw;
                }
            }
            return upd;
        }
        if (!kind.wide_stencil) {
            // refreeze the eigenframe from the current iterate
            coeff.assign(g.size(), SymMat2{1, 0, 1});
            for (int j = 1; j < g.ny - 1; ++j)
                for (int i = 1; i < g.nx - 1; ++i) {
                    int c = g.idx(i, j);
                    if (w.kind[c] != 0) continue;
                    coeff[c] = pucci_minus_coeff(discrete_hessian(w, i, j), kind.lam, kind.Lam);
                }
            for (int j = 1; j < g.ny - 1; ++j)
                for (int i = 1; i < g.nx - 1; ++i) {
                    int c = g.idx(i, j);
                    if (w.kind[c] != 0) continue;
                    const SymMat2& A = coeff[c];
                    double uxy = (w.v[c + 1 + g.nx] + w.v[c - 1 - g.nx] - w.v[c - 1 + g.nx] -
                                  w.v[c + 1 - g.nx]) /
                                 (4 * s2);
                    double num = A.xx * (w.v[c - 1] + w.v[c + 1]) / s2 +
                                 A.yy * (w.v[c - g.nx] + w.v[c + g.nx]) / s2 + 2 * A.xy * uxy +
                                 src[c];
                    double den = 2 * (A.xx + A.yy) / s2 + mu;
                    double cand = num / den;
                    double nw = w.v[c] + omega * (cand - w.v[c]);
                    upd = std::max(upd, std::abs(nw - w.v[c]));
                    w.v[c] = nw;
                }
            return upd;
        }
        // wide stencil: freeze the minimizing direction pair and signs
        static const int dirs[4][2] = {{1, 0}, {2, 1}, {1, 1}, {1, 2}};
        for (int j = 2; j < g.ny - 2; ++j)
            for (int i = 2; i < g.nx - 2; ++i) {
                int c = g.idx(i, j);
                if (w.kind[c] != 0) continue;
                double best = 1e300;
                double bc1 = kind.lam, bc2 = kind.lam;
                int bk = 0;
                for (int k = 0; k < 4; ++k) {
                    int a = dirs[k][0], b = dirs[k][1];
                    double l1 = (a * a + b * b) * s2;
                    double d1 = (w.at(i + a, j + b) - 2 * w.v[c] + w.at(i - a, j - b)) / l1;
                    double d2 = (w.at(i - b, j + a) - 2 * w.v[c] + w.at(i + b, j - a)) / l1;
                    double c1 = d1 > 0 ? kind.lam : kind.Lam;
                    double c2 = d2 > 0 ? kind.lam : kind.Lam;
                    double val = c1 * d1 + c2 * d2;
                    if (val < best) {
                        best = val;
                        bc1 = c1;
                        bc2 = c2;
                        bk = k;
                    }
                }
                int a = dirs[bk][0], b = dirs[bk][1];
                double l1 = (a * a + b * b) * s2;
                double num = bc1 * (w.at(i + a, j + b) + w.at(i - a, j - b)) / l1 +
                             bc2 * (w.at(i - b, j + a) + w.at(i + b, j - a)) / l1 + src[c];
                double den = 2 * (bc1 + bc2) / l1 + mu;
                double cand = num / den;
                double nw = w.v[c] + omega * (cand - w.v[c]);
                upd = std::max(upd, std::abs(nw - w.v[c]));
                w.v[c] = nw;
            }
        return upd;
    }
};

} // namespace

long solve_linearized(ScalarField& w, const OperatorKind& kind, double mu,
                      const std::vector<double>& source, double lin_tol, int max_sweeps,
                      double omega) {
    if (!(mu > 0)) throw Error(ErrorCode::InvalidSpec, "mu must be positive");
    SweepKernel kern{kind, mu, omega, source, {}};
    for (long k = 1; k <= max_sweeps; ++k) {
        double upd = kern.sweep(w);
        if (upd <= lin_tol) return k;
    }
    throw Error(ErrorCode::NoConvergence, "linearized sweep stalled (lin)");
}

long solve_F_dirichlet(ScalarField& w, const OperatorKind& kind, double tol, int max_sweeps) {
    std::vector<double> zero(w.grid.size(), 0.0);
    // SOR on the unshifted elliptic problem
    SweepKernel kern{kind, 0.0, kind.tag == OperatorKind::Tag::Trace ? 1.85 : 1.5, zero, {}};
    for (long k = 1; k <= max_sweeps; ++k) {
        double upd = kern.sweep(w);
        if (upd <= tol) return k;
    }
    throw Error(ErrorCode::NoConvergence, "elliptic Dirichlet sweep stalled");
}

FnSolver::FnSolver(const ProblemSpec& spec) : spec_(spec) {
    spec_.validate();
    double inr = inradius(spec_.K);
    tau_ = spec_.barrier_tau > 0 ? spec_.barrier_tau : inr / 4.0;
    rho_ = spec_.barrier_rho > 0 ? spec_.barrier_rho : 0.45 * tau_;
    if (spec_.geometry != Geometry::Full) {
        // thin barrier ladders use tau_m = 1/m; tau_, rho_ unused there
        tau_ = std::min(tau_, inr / 4.0);
    }
    stages_ = assemble_stages(spec_);
}

ScalarField FnSolver::make_cells(double floor) const {
    const Grid2D& g = spec_.grid;
    ScalarField w(g, floor);
    int ring = spec_.op.wide_stencil ? 2 : 1;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            Vec2 p = g.at(i, j);
            bool on_ring = i < ring || j < ring || i >= g.nx - ring || j >= g.ny - ring;
            bool obstacle = false;
            if (spec_.geometry == Geometry::Full) {
                obstacle = spec_.K.contains(p);
            } else {
                // K lives on the plane row y = 0
                bool on_plane = std::abs(p.y) < 0.5 * g.s;
                obstacle = on_plane && spec_.K.contains({p.x, 0.0}, 1e-12);
                if (spec_.geometry == Geometry::Thin && j == 0 && !obstacle) {
                    w.set_kind(i, j, CellKind::Plane);
                    w.at(i, j) = floor;
                    continue;
                }
            }
            if (obstacle) {
                w.set_kind(i, j, CellKind::Obstacle);
                w.at(i, j) = 1.0;
            } else if (on_ring || norm(p) >= spec_.R0) {
                w.set_kind(i, j, CellKind::Outer);
                w.at(i, j) = floor;
            } else {
                w.at(i, j) = floor;
            }
        }
    return w;
}

ScalarField FnSolver::seed_field(const Stage& stage) const {
    double floor = 1.0 / (2.0 * stage.j);
    ScalarField w = make_cells(floor);
    const Grid2D& g = spec_.grid;
    if (spec_.geometry == Geometry::Full) {
        SubsolutionFull sub(spec_.K, spec_.rhs.a, tau_, rho_);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                if (w.free_at(i, j)) w.at(i, j) = std::max(sub.truncated(g.at(i, j), stage.j), floor);
        return w;
    }
    if (spec_.geometry == Geometry::Thin) {
        double inr = inradius(spec_.K);
        int M = static_cast<int>(std::floor(1.0 / inr)) + 1;
        std::vector<SubsolutionThin> rungs;
        for (int m = M, k = 0; k < 4; ++k, m *= 2)
            rungs.emplace_back(spec_.K, spec_.rhs.a, m, 0.45 * (std::sqrt(2.0) - 1.0) / m);
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                if (w.free_at(i, j)) {
                    double v = floor;
                    for (const auto& r : rungs) v = std::max(v, r.truncated(g.at(i, j), stage.j));
                    w.at(i, j) = v;
                }
        return w;
    }
    // hybrid: even reflection of the thin pre-solve
    if (!thin_seed_) throw Error(ErrorCode::InvalidSpec, "hybrid seed requested before thin pre-solve");
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            if (w.free_at(i, j)) w.at(i, j) = std::max(thin_seed_->at(i, j), floor);
    return w;
}

ScalarField FnSolver::supersolution_field(const Stage& stage) const {
    const Grid2D& g = spec_.grid;
    SupersolutionFull sup(spec_.K, spec_.r0, spec_.R0, stage.j);
    ScalarField w = sample_field(g, [&](Vec2 x) { return sup(x); });
    if (spec_.geometry != Geometry::Thin) return w;
    // thin geometry: min with the F-harmonic field carrying the plane data
    double floor = 1.0 / (2.0 * stage.j);
    ScalarField star = make_cells(floor);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            if (star.free_at(i, j)) star.at(i, j) = w.at(i, j); // init from the radial cap
    solve_F_dirichlet(star, spec_.op, 1e-10, 200000);
    ScalarField out = w;
    for (int k = 0; k < g.size(); ++k) out.v[k] = std::min(w.v[k], star.v[k]);
    return out;
}

ScalarField FnSolver::monotone_stage(const Stage& stage, StageReport& rep,
                                     const ScalarField* warm) {
    const Grid2D& g = spec_.grid;
    rep.j = stage.j;
    rep.i = stage.i;
    double mu = 2.0 * stage.hj.lipschitz() + 1.0;
    rep.mu = mu;

    ScalarField barrier = seed_field(stage);
    ScalarField supers = supersolution_field(stage);

    // The sampled barrier may fail the discrete subsolution inequality where
    // the collar is thinner than a few cells. Clip offending cells to the
    // floor (a subsolution at any resolution) until the seed margin is clean;
    // the sandwich check below still runs against the unclipped barrier.
    double floor = 1.0 / (2.0 * stage.j);
    ScalarField seed = barrier;
    {
        int ring = spec_.op.wide_stencil ? 2 : 1;
        for (int pass = 0; pass < 64; ++pass) {
            std::vector<int> bad;
            double worst = 1e300;
            for (int j = ring; j < g.ny - ring; ++j)
                for (int i = ring; i < g.nx - ring; ++i) {
                    if (!seed.free_at(i, j)) continue;
                    double F = spec_.op.wide_stencil
                                   ? F_wide(seed, i, j, spec_.op)
                                   : F_eval(spec_.op, discrete_hessian(seed, i, j));
                    double m = F - stage.hj.eval(seed.at(i, j));
                    worst = std::min(worst, m);
                    if (m < 0 && seed.at(i, j) > floor) bad.push_back(g.idx(i, j));
                }
            rep.seed_margin_min = worst;
            if (bad.empty()) break;
            rep.seed_cells_clipped += static_cast<long>(bad.size());
            for (int c : bad) seed.v[c] = floor;
        }
    }

    ScalarField wk = seed;       // previous outer iterate
    ScalarField w = seed;        // current unknown (warm init allowed)
    if (warm) {
        for (int k = 0; k < g.size(); ++k)
            if (w.kind[k] == 0) w.v[k] = warm->v[k];
    }
    std::vector<double> src(g.size(), 0.0);
    for (int it = 1; it <= spec_.tol.max_outer; ++it) {
        for (int k = 0; k < g.size(); ++k)
            if (wk.kind[k] == 0) src[k] = mu * wk.v[k] - stage.hj.eval(wk.v[k]);
        rep.sweeps += solve_linearized(w, spec_.op, mu, src, spec_.tol.lin_tol,
                                       spec_.tol.max_sweeps);
        double up_max = 0, up_min = 1e300;
        for (int k = 0; k < g.size(); ++k)
            if (wk.kind[k] == 0) {
                double d = w.v[k] - wk.v[k];
                up_max = std::max(up_max, std::abs(d));
                up_min = std::min(up_min, d);
            }
        rep.outer_iters = it;
        rep.final_update = up_max;
        rep.min_update = std::min(rep.min_update, up_min);
        wk.v = w.v;
        if (up_max <= spec_.tol.fix_tol) break;
        if (it == spec_.tol.max_outer)
            throw Error(ErrorCode::NoConvergence, "monotone iteration stalled (fix)");
    }
    // the continuum barrier is not samplable to O(s) accuracy inside the
    // K staircase band; there the certified inequality is v >= seed
    std::vector<std::uint8_t> band(g.size(), 0);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            if (w.kind_at(i, j) == CellKind::Obstacle)
                for (int dj = -2; dj <= 2; ++dj)
                    for (int di = -2; di <= 2; ++di)
                        if (g.inside(i + di, j + dj)) band[g.idx(i + di, j + dj)] = 1;
    double lo = 1e300, lo_seed = 1e300, hi = 1e300;
    for (int k = 0; k < g.size(); ++k)
        if (w.kind[k] == 0) {
            if (!band[k]) lo = std::min(lo, w.v[k] - barrier.v[k]);
            lo_seed = std::min(lo_seed, w.v[k] - seed.v[k]);
            hi = std::min(hi, supers.v[k] - w.v[k]);
        }
    rep.sandwich_low = lo;
    rep.sandwich_low_seed = lo_seed;
    rep.sandwich_high = hi;
    if (lo < -1e3 * spec_.tol.fix_tol || hi < -1e3 * spec_.tol.fix_tol ||
        lo_seed < -1e3 * spec_.tol.fix_tol)
        throw Error(ErrorCode::SandwichViolated,
                    "stage j=" + std::to_string(stage.j) + " i=" + std::to_string(stage.i) +
                        " sandwich min " + std::to_string(std::min({lo, hi, lo_seed})));
    return w;
}

std::pair<ScalarField, SolveReport> FnSolver::solve() {
    SolveReport rep;
    rep.tau_used = tau_;
    rep.rho_used = rho_;
    if (spec_.geometry == Geometry::Hybrid && !thin_seed_) {
        ProblemSpec thin = spec_;
        thin.geometry = Geometry::Thin;
        int ny_half = (spec_.grid.ny + 1) / 2;
        thin.grid = spec_.grid;
        thin.grid.y0 = 0.0;
        thin.grid.ny = ny_half;
        FnSolver pre(thin);
        auto [tf, trep] = pre.solve();
        thin_seed_ = reflect_even(tf, spec_.grid);
    }
    ScalarField u(spec_.grid);
    const ScalarField* warm = nullptr;
    for (const Stage& st : stages_) {
        StageReport srep;
        u = monotone_stage(st, srep, warm);
        rep.stages.push_back(srep);
        warm = &u;
    }
    finalize_report(u, stages_.back(), rep);
    return {u, rep};
}

void FnSolver::finalize_report(const ScalarField& u, const Stage& last, SolveReport& rep) const {
    const Grid2D& g = spec_.grid;
    double floor = 1.0 / (2.0 * last.j);
    // slack above an exactly-at-floor threshold: the regularized tail is
    // strictly positive everywhere, so "above the floor" needs headroom
    rep.u_floor = std::max(floor + 100.0 * spec_.tol.fix_tol, 10.0 * g.s * g.s);
    rep.support_radius = support_radius(u, rep.u_floor);
    rep.min_value = u.min_value();
    rep.max_value = u.max_value();
    for (double v : u.v)
        if (v < -spec_.tol.fix_tol || v > 1.0 + spec_.tol.fix_tol) ++rep.range_violations;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            CellKind k = u.kind_at(i, j);
            if (k == CellKind::Obstacle)
                rep.bc_K_max_dev = std::max(rep.bc_K_max_dev, std::abs(u.at(i, j) - 1.0));
            if (k != CellKind::Obstacle && norm(g.at(i, j)) >= spec_.R0)
                rep.outer_floor_max_dev =
                    std::max(rep.outer_floor_max_dev, std::abs(u.at(i, j) - floor));
        }
    // PDE residual on the positivity set away from the free boundary
    ScalarField rhs_field(g);
    for (int k = 0; k < g.size(); ++k) rhs_field.v[k] = last.hj.eval(u.v[k]);
    ScalarField res = fn_residual(u, rhs_field, spec_.op);
    std::vector<std::uint8_t> near_fb(g.size(), 0);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            if (u.at(i, j) <= rep.u_floor)
                for (int dj = -2; dj <= 2; ++dj)
                    for (int di = -2; di <= 2; ++di)
                        if (g.inside(i + di, j + dj)) near_fb[g.idx(i + di, j + dj)] = 1;
    double mu = 2.0 * last.hj.lipschitz() + 1.0;
    rep.residual_tol = spec_.tol.lin_tol * (4.0 / (g.s * g.s) + mu) +
                       (mu + last.hj.lipschitz()) * spec_.tol.fix_tol;
    for (int j = 1; j < g.ny - 1; ++j)
        for (int i = 1; i < g.nx - 1; ++i) {
            int c = g.idx(i, j);
            if (near_fb[c] || !u.free_at(i, j) || u.v[c] <= rep.u_floor) continue;
            if (!std::isnan(res.v[c]))
                rep.residual_max = std::max(rep.residual_max, std::abs(res.v[c]));
        }
    // free-boundary gradient check
    double beta = beta_exponent(spec_.rhs.a);
    rep.grad_fb_tol = spec_.tol.grad_fb_factor * std::pow(g.s, beta - 1.0);
    for (int j = 1; j < g.ny - 1; ++j)
        for (int i = 1; i < g.nx - 1; ++i) {
            if (u.at(i, j) <= rep.u_floor) continue;
            bool edge = u.at(i - 1, j) <= rep.u_floor || u.at(i + 1, j) <= rep.u_floor ||
                        u.at(i, j - 1) <= rep.u_floor || u.at(i, j + 1) <= rep.u_floor;
            if (!edge) continue;
            double gx = (u.at(i + 1, j) - u.at(i - 1, j)) / (2 * g.s);
            double gy = (u.at(i, j + 1) - u.at(i, j - 1)) / (2 * g.s);
            rep.fb_grad_max = std::max(rep.fb_grad_max, std::hypot(gx, gy));
        }
    for (const StageReport& s : rep.stages)
        if (s.min_update < -spec_.tol.fix_tol || s.sandwich_low < -spec_.tol.fix_tol ||
            s.sandwich_high < -spec_.tol.fix_tol || s.sandwich_low_seed < -spec_.tol.fix_tol)
            ++rep.sandwich_violations;
    rep.hard_pass = rep.sandwich_violations == 0 && rep.range_violations == 0 &&
                    rep.bc_K_max_dev == 0.0 && rep.outer_floor_max_dev <= spec_.tol.fix_tol &&
                    rep.support_radius <= spec_.R0 + g.s;
}

double support_radius(const ScalarField& field, double floor) {
    double r = 0.0;
    const Grid2D& g = field.grid;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            if (field.at(i, j) > floor) r = std::max(r, norm(g.at(i, j)));
    return r;
}

namespace {

std::vector<int> fb_adjacent_probes(const ScalarField& u, double u_floor, int max_probes) {
    const Grid2D& g = u.grid;
    std::vector<int> cand;
    for (int j = 1; j < g.ny - 1; ++j)
        for (int i = 1; i < g.nx - 1; ++i) {
            if (!(u.at(i, j) > u_floor)) continue;
            if (u.at(i - 1, j) <= u_floor || u.at(i + 1, j) <= u_floor ||
                u.at(i, j - 1) <= u_floor || u.at(i, j + 1) <= u_floor)
                cand.push_back(g.idx(i, j));
        }
    if (static_cast<int>(cand.size()) <= max_probes) return cand;
    std::vector<int> out;
    double step = static_cast<double>(cand.size()) / max_probes;
    for (int k = 0; k < max_probes; ++k) out.push_back(cand[static_cast<int>(k * step)]);
    return out;
}

double sup_ball(const ScalarField& u, int ci, int cj, double r) {
    const Grid2D& g = u.grid;
    int ir = static_cast<int>(std::ceil(r / g.s));
    double m = -1e300;
    for (int j = std::max(0, cj - ir); j <= std::min(g.ny - 1, cj + ir); ++j)
        for (int i = std::max(0, ci - ir); i <= std::min(g.nx - 1, ci + ir); ++i) {
            double dx = (i - ci) * g.s, dy = (j - cj) * g.s;
            if (dx * dx + dy * dy <= r * r) m = std::max(m, u.at(i, j));
        }
    return m;
}

} // namespace

GrowthFit growth_fit(const ScalarField& u, double u_floor, double beta, int max_probes) {
    GrowthFit out;
    const Grid2D& g = u.grid;
    auto probes = fb_adjacent_probes(u, u_floor, max_probes);
    double grid_half = 0.5 * std::min((g.nx - 1) * g.s, (g.ny - 1) * g.s);
    for (int c : probes) {
        int ci = c % g.nx, cj = c / g.nx;
        double ux = u.v[c];
        std::vector<double> lr, ls;
        double cfit = 0;
        for (double r = 2 * g.s; r <= grid_half; r *= 2) {
            double S = sup_ball(u, ci, cj, r);
            cfit = std::max(cfit, S / (std::pow(r, beta) + ux));
            // the scaling window: above the floor plateau, below saturation
            if (S >= 3 * u_floor && S <= 0.5) {
                lr.push_back(std::log(r));
                ls.push_back(std::log(S));
            }
        }
        if (lr.size() >= 3) {
            double n = lr.size(), sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (size_t k = 0; k < lr.size(); ++k) {
                sx += lr[k];
                sy += ls[k];
                sxx += lr[k] * lr[k];
                sxy += lr[k] * ls[k];
            }
            double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
            out.slopes.push_back(slope);
            out.C_fit = std::max(out.C_fit, cfit);
        }
    }
    out.probes = static_cast<int>(out.slopes.size());
    if (!out.slopes.empty()) {
        std::vector<double> s = out.slopes;
        std::sort(s.begin(), s.end());
        out.slope_median = s[s.size() / 2];
    }
    return out;
}

NondegReport nondegeneracy_check(const ScalarField& u, double u_floor, double kappa,
                                 int max_probes) {
    NondegReport out;
    out.kappa = kappa;
    auto probes = fb_adjacent_probes(u, u_floor, max_probes);
    if (probes.empty()) {
        out.degenerate = true;
        return out;
    }
    const Grid2D& g = u.grid;
    double grid_half = 0.5 * std::min((g.nx - 1) * g.s, (g.ny - 1) * g.s);
    double worst_c = 1e300;
    std::vector<double> slopes;
    for (int c : probes) {
        int ci = c % g.nx, cj = c / g.nx;
        double ux = u.v[c];
        std::vector<double> lr, ls;
        for (double r = 2 * g.s; r <= grid_half; r *= 2) {
            double S = sup_ball(u, ci, cj, r);
            worst_c = std::min(worst_c, S / std::pow(r, kappa));
            if (S >= 2 * ux && S <= 0.95) {
                lr.push_back(std::log(r));
                ls.push_back(std::log(S));
            }
        }
        if (lr.size() >= 3) {
            double n = lr.size(), sx = 0, sy = 0, sxx = 0, sxy = 0;
            for (size_t k = 0; k < lr.size(); ++k) {
                sx += lr[k];
                sy += ls[k];
                sxx += lr[k] * lr[k];
                sxy += lr[k] * ls[k];
            }
            slopes.push_back((n * sxy - sx * sy) / (n * sxx - sx * sx));
        }
    }
    out.probes = static_cast<int>(slopes.size());
    if (!slopes.empty()) {
        std::sort(slopes.begin(), slopes.end());
        out.fitted_exponent = slopes[slopes.size() / 2];
    }
    out.largest_c = worst_c == 1e300 ? 0.0 : worst_c;
    return out;
}

} // namespace qcfb
