#include "qcfb/barriers.hpp"

#include <algorithm>
#include <cmath>

namespace qcfb {

SubsolutionFull::SubsolutionFull(const ConvexBody& K, double a, double tau, double rho)
    : tau_(tau), rho_(rho), beta_(beta_exponent(a)) {
    if (!(rho > 0)) throw Error(ErrorCode::InvalidSpec, "collar thickness must be positive");
    ktau_ = inset(K, tau); // throws EmptyInset when tau reaches the inradius
}

double SubsolutionFull::operator()(Vec2 x) const {
    double d = distance(ktau_, x);
    if (d <= tau_) return 1.0;
    if (d >= tau_ + rho_) return 0.0;
    return std::pow((tau_ + rho_ - d) / rho_, beta_);
}

double SubsolutionFull::truncated(Vec2 x, int j) const {
    return std::max((*this)(x), 1.0 / (2.0 * j));
}

SupersolutionFull::SupersolutionFull(const ConvexBody& K, double r0, double R0, int j)
    : r0_(r0), R0_(R0) {
    if (!(r0 > 1.0 && R0 > r0)) throw Error(ErrorCode::InvalidSpec, "need 1 < r0 < R0");
    for (Vec2 v : K.vertices)
        if (norm(v) >= 0.5 * r0)
            throw Error(ErrorCode::InvalidSpec, "K must lie inside B_{r0/2}");
    floor_ = 1.0 / (2.0 * j);
    amp_ = 1.0 - floor_;
}

double SupersolutionFull::operator()(Vec2 x) const {
    double r = norm(x);
    if (r <= r0_) return 1.0;
    if (r >= R0_) return floor_;
    double q = (R0_ - r) / (R0_ - r0_);
    return amp_ * q * q * q * q + floor_;
}

SubsolutionThin::SubsolutionThin(const ConvexBody& K, double a, int m, double rho_m)
    : tau_(1.0 / m), rho_(rho_m), beta_(beta_exponent(a)) {
    if (!(rho_m > 0 && rho_m < (std::sqrt(2.0) - 1.0) * tau_))
        throw Error(ErrorCode::InvalidSpec, "need 0 < rho_m < (sqrt(2)-1) tau_m");
    tilted_ = tilt_translate(K, tau_); // throws EmptyInset when 1/m >= inradius
}

double SubsolutionThin::operator()(Vec2 x) const {
    double d = distance(tilted_, x);
    if (d <= tau_) return 1.0;
    if (d >= tau_ + rho_) return 0.0;
    return std::pow((tau_ + rho_ - d) / rho_, beta_);
}

double SubsolutionThin::truncated(Vec2 x, int j) const {
    return std::max((*this)(x), 1.0 / (2.0 * j));
}

ScalarField sample_field(const Grid2D& grid, const std::function<double(Vec2)>& f) {
    ScalarField out(grid);
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i) out.at(i, j) = f(grid.at(i, j));
    return out;
}

ScalarField reflect_even(const ScalarField& half, const Grid2D& full) {
    if (std::abs(half.grid.s - full.s) > 1e-12 || half.grid.nx != full.nx ||
        std::abs(half.grid.x0 - full.x0) > 1e-12 || std::abs(half.grid.y0) > 1e-12)
        throw Error(ErrorCode::SchemaMismatch, "half grid does not match the full grid");
    ScalarField out(full);
    for (int j = 0; j < full.ny; ++j) {
        double y = full.y0 + j * full.s;
        double ay = std::abs(y);
        int jh = static_cast<int>(std::llround(ay / half.grid.s));
        for (int i = 0; i < full.nx; ++i)
            out.at(i, j) = jh < half.grid.ny ? half.at(i, jh) : 0.0;
    }
    return out;
}

namespace {

// fan = nearest point of K^tau is one of its vertices
bool nearest_is_vertex(const ConvexBody& ktau, Vec2 x, double tol) {
    double dbest = 1e300;
    for (Vec2 v : ktau.vertices) dbest = std::min(dbest, norm(x - v));
    return std::abs(dbest - distance(ktau, x)) <= tol;
}

double F_of(const ScalarField& w, int i, int j, const OperatorKind& kind) {
    if (kind.wide_stencil) return F_wide(w, i, j, kind);
    return F_eval(kind, discrete_hessian(w, i, j));
}

} // namespace

MarginReport subsolution_margin(const ScalarField& w, const ConvexBody& ktau, double tau,
                                double rho, const RhsFn& hj, const OperatorKind& kind) {
    MarginReport rep;
    const Grid2D& g = w.grid;
    int ring = kind.wide_stencil ? 2 : 1;
    for (int j = ring; j < g.ny - ring; ++j)
        for (int i = ring; i < g.nx - ring; ++i) {
            double d = distance(ktau, g.at(i, j));
            if (!(d > tau && d < tau + rho)) continue;
            // the inequality is interior to the collar: skip cells whose
            // stencil reads the plateau inside d < tau
            bool clipped = false;
            for (int dj = -ring; dj <= ring && !clipped; ++dj)
                for (int di = -ring; di <= ring && !clipped; ++di)
                    if (distance(ktau, g.at(i + di, j + dj)) < tau) clipped = true;
            if (clipped) continue;
            double m = F_of(w, i, j, kind) - hj.eval(w.at(i, j));
            rep.resolved = true;
            ++rep.cells;
            rep.min_margin = std::min(rep.min_margin, m);
            rep.max_margin = std::max(rep.max_margin, m);
            if (nearest_is_vertex(ktau, g.at(i, j), 1e-9)) {
                ++rep.fan_cells;
                rep.min_margin_fan = std::min(rep.min_margin_fan, m);
            } else {
                rep.min_margin_face = std::min(rep.min_margin_face, m);
            }
        }
    return rep;
}

MarginReport supersolution_margin(const ScalarField& w, double r0, double R0, const RhsFn& hj,
                                  const OperatorKind& kind) {
    MarginReport rep;
    const Grid2D& g = w.grid;
    int ring = kind.wide_stencil ? 2 : 1;
    for (int j = ring; j < g.ny - ring; ++j)
        for (int i = ring; i < g.nx - ring; ++i) {
            double r = norm(g.at(i, j));
            if (!(r > r0 && r < R0 + 2 * g.s)) continue;
            double m = F_of(w, i, j, kind) - hj.eval(w.at(i, j));
            rep.resolved = true;
            ++rep.cells;
            rep.min_margin = std::min(rep.min_margin, m);
            rep.max_margin = std::max(rep.max_margin, m);
        }
    return rep;
}

RhoSearch bisect_rho(const ConvexBody& K, double a, const RhsFn& hj, const OperatorKind& kind,
                     const Grid2D& grid, double tau, double rho_max, double tol) {
    auto margin_at = [&](double rho) {
        SubsolutionFull sub(K, a, tau, rho);
        ScalarField w = sample_field(grid, [&](Vec2 x) { return sub(x); });
        return subsolution_margin(w, sub.inset_body(), tau, rho, hj, kind);
    };
    double rho_min = 5.0 * grid.s;
    RhoSearch out;
    if (rho_min >= rho_max) return out; // collar unresolvable on this grid
    auto valid = [&](const MarginReport& r) { return r.resolved && r.min_margin >= -tol; };

    MarginReport top = margin_at(rho_max);
    if (valid(top)) {
        out.found = true;
        out.rho = rho_max;
        out.report = top;
        return out;
    }
    MarginReport bottom = margin_at(rho_min);
    if (!valid(bottom)) {
        out.report = bottom; // flag failure instead of guessing
        return out;
    }
    double lo = rho_min, hi = rho_max;
    MarginReport best = bottom;
    for (int it = 0; it < 40; ++it) {
        double mid = 0.5 * (lo + hi);
        MarginReport r = margin_at(mid);
        if (valid(r)) {
            lo = mid;
            best = r;
        } else {
            hi = mid;
        }
    }
    out.found = true;
    out.rho = lo;
    out.report = best;
    return out;
}

R0Search bisect_R0(const ConvexBody& K, const RhsFn& hj, const OperatorKind& kind, int n,
                   double r0, double lo, double hi, double tol, int j) {
    auto margin_at = [&](double R0) {
        Grid2D g = Grid2D::square(R0 * 1.02, n);
        SupersolutionFull sup(K, r0, R0, j);
        ScalarField w = sample_field(g, [&](Vec2 x) { return sup(x); });
        return supersolution_margin(w, r0, R0, hj, kind);
    };
    R0Search out;
    auto valid = [&](const MarginReport& r) { return r.resolved && r.max_margin <= tol; };
    MarginReport at_hi = margin_at(hi);
    if (!valid(at_hi)) {
        out.report = at_hi; // record the failing margin
        return out;
    }
    MarginReport at_lo = margin_at(lo);
    if (valid(at_lo)) {
        out.found = true;
        out.R0 = lo;
        out.report = at_lo;
        return out;
    }
    double a = lo, b = hi;
    MarginReport best = at_hi;
    double best_R0 = hi;
    for (int it = 0; it < 40; ++it) {
        double mid = 0.5 * (a + b);
        MarginReport r = margin_at(mid);
        if (valid(r)) {
            b = mid;
            best = r;
            best_R0 = mid;
        } else {
            a = mid;
        }
    }
    out.found = true;
    out.R0 = best_R0;
    out.report = best;
    return out;
}

} // namespace qcfb
