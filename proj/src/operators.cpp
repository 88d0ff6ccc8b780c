#include "qcfb/operators.hpp"

#include <algorithm>
#include <cmath>

namespace qcfb {

std::pair<double, double> eigen_values(const SymMat2& m) {
    double mean = 0.5 * (m.xx + m.yy);
    double disc = std::hypot(0.5 * (m.xx - m.yy), m.xy);
    return {mean - disc, mean + disc};
}

namespace {
inline double clip_pos(double t) { return t > 0 ? t : 0; }
inline double clip_neg(double t) { return t < 0 ? t : 0; }
} // namespace

double pucci_plus(const SymMat2& m, double lam, double Lam) {
    auto [e1, e2] = eigen_values(m);
    return Lam * (clip_pos(e1) + clip_pos(e2)) + lam * (clip_neg(e1) + clip_neg(e2));
}

double pucci_minus(const SymMat2& m, double lam, double Lam) {
    auto [e1, e2] = eigen_values(m);
    return lam * (clip_pos(e1) + clip_pos(e2)) + Lam * (clip_neg(e1) + clip_neg(e2));
}

SymMat2 pucci_minus_coeff(const SymMat2& m, double lam, double Lam) {
    auto [e1, e2] = eigen_values(m);
    double c1 = e1 > 0 ? lam : (e1 < 0 ? Lam : lam);
    double c2 = e2 > 0 ? lam : (e2 < 0 ? Lam : lam);
    double vx, vy; // eigenvector for e2
    if (std::abs(m.xy) > 1e-300) {
        vx = m.xy;
        vy = e2 - m.xx;
        double n = std::hypot(vx, vy);
        vx /= n;
        vy /= n;
    } else if (m.xx >= m.yy) {
        vx = 1;
        vy = 0;
    } else {
        vx = 0;
        vy = 1;
    }
    // v1 = rotate(v2, 90deg)
    double wx = -vy, wy = vx;
    SymMat2 a;
    a.xx = c1 * wx * wx + c2 * vx * vx;
    a.xy = c1 * wx * wy + c2 * vx * vy;
    a.yy = c1 * wy * wy + c2 * vy * vy;
    return a;
}

void OperatorKind::validate() const {
    switch (tag) {
        case Tag::Trace:
            break;
        case Tag::PucciMinus:
            if (!(lam > 0 && Lam >= lam))
                throw Error(ErrorCode::InvalidSpec, "Pucci needs 0 < lambda <= Lambda");
            break;
        case Tag::PLaplace:
            if (!(p > 1.0)) throw Error(ErrorCode::InvalidSpec, "p must exceed 1");
            if (!(eps > 0 && eps <= 1)) throw Error(ErrorCode::InvalidSpec, "eps must lie in (0,1]");
            break;
    }
}

double F_eval(const OperatorKind& kind, const SymMat2& m) {
    switch (kind.tag) {
        case OperatorKind::Tag::Trace:
            return m.xx + m.yy;
        case OperatorKind::Tag::PucciMinus:
            return pucci_minus(m, kind.lam, kind.Lam);
        case OperatorKind::Tag::PLaplace:
            throw Error(ErrorCode::UnsupportedKind,
                        "p-Laplacian uses divergence-form residuals, not F_eval");
    }
    return 0;
}

SymMat2 discrete_hessian(const ScalarField& f, int i, int j, bool respect_mask) {
    const Grid2D& g = f.grid;
    if (!g.interior(i, j)) throw Error(ErrorCode::StencilClipped, "cell touches the grid boundary");
    if (respect_mask) {
        for (int dj = -1; dj <= 1; ++dj)
            for (int di = -1; di <= 1; ++di)
                if (f.kind_at(i + di, j + dj) == CellKind::Obstacle)
                    throw Error(ErrorCode::StencilClipped, "stencil touches the obstacle");
    }
    double s2 = g.s * g.s;
    SymMat2 m;
    m.xx = (f.at(i + 1, j) - 2 * f.at(i, j) + f.at(i - 1, j)) / s2;
    m.yy = (f.at(i, j + 1) - 2 * f.at(i, j) + f.at(i, j - 1)) / s2;
    m.xy = (f.at(i + 1, j + 1) + f.at(i - 1, j - 1) - f.at(i - 1, j + 1) - f.at(i + 1, j - 1)) /
           (4 * s2);
    return m;
}

SymMat2 plap_coeff(Vec2 z, double p, double eps) {
    if (!(eps > 0)) throw Error(ErrorCode::InvalidSpec, "eps must be positive");
    double q = eps + dot(z, z);
    double f = std::pow(q, 0.5 * p - 2.0);
    SymMat2 a;
    a.xx = f * ((p - 2) * z.x * z.x + q);
    a.xy = f * (p - 2) * z.x * z.y;
    a.yy = f * ((p - 2) * z.y * z.y + q);
    return a;
}

double F_wide(const ScalarField& f, int i, int j, const OperatorKind& kind) {
    const Grid2D& g = f.grid;
    if (i < 2 || j < 2 || i > g.nx - 3 || j > g.ny - 3)
        throw Error(ErrorCode::StencilClipped, "wide stencil needs two rings");
    static const int dirs[4][2] = {{1, 0}, {2, 1}, {1, 1}, {1, 2}};
    double s2 = g.s * g.s;
    double lam = kind.tag == OperatorKind::Tag::Trace ? 1.0 : kind.lam;
    double Lam = kind.tag == OperatorKind::Tag::Trace ? 1.0 : kind.Lam;
    auto second_diff = [&](int a, int b) {
        double len2 = (a * a + b * b) * s2;
        return (f.at(i + a, j + b) - 2 * f.at(i, j) + f.at(i - a, j - b)) / len2;
    };
    auto phi = [&](double t) { return lam * clip_pos(t) + Lam * clip_neg(t); };
    double best = 1e300;
    for (auto& d : dirs) {
        double d1 = second_diff(d[0], d[1]);
        double d2 = second_diff(-d[1], d[0]);
        best = std::min(best, phi(d1) + phi(d2));
    }
    return best;
}

ScalarField fn_residual(const ScalarField& field, const ScalarField& rhs_field,
                        const OperatorKind& kind) {
    if (!field.grid.same_layout(rhs_field.grid))
        throw Error(ErrorCode::SchemaMismatch, "field and rhs grids differ");
    ScalarField out(field.grid, kResidualSentinel);
    for (int j = 1; j < field.grid.ny - 1; ++j)
        for (int i = 1; i < field.grid.nx - 1; ++i) {
            if (!field.free_at(i, j)) continue;
            try {
                double F = kind.wide_stencil ? F_wide(field, i, j, kind)
                                             : F_eval(kind, discrete_hessian(field, i, j, true));
                out.at(i, j) = F - rhs_field.at(i, j);
            } catch (const Error&) {
                // leave sentinel
            }
        }
    return out;
}

namespace {
// Transverse gradient stencil of a face: up to 4 cells with weights.
// Centered average of the two adjacent cells' transverse differences in the
// interior; one-sided at grid-edge faces.
struct TStencil {
    int n = 0;
    int cell[4];
    double wgt[4];
};

// x-face between (i,j) and (i+1,j); transverse direction is y. Centered
// average of the two cells' transverse differences; absent at edge faces,
// which is why the energy path keeps two frozen rings (see solver_plap).
inline TStencil xface_t(const Grid2D& g, int i, int j) {
    TStencil t;
    auto put = [&](int ii, int jj, double w) {
        t.cell[t.n] = g.idx(ii, jj);
        t.wgt[t.n++] = w;
    };
    if (j >= 1 && j + 1 < g.ny) {
        double w = 1.0 / 4.0;
        put(i, j + 1, w), put(i + 1, j + 1, w), put(i, j - 1, -w), put(i + 1, j - 1, -w);
    }
    return t;
}

// y-face between (i,j) and (i,j+1); transverse direction is x.
inline TStencil yface_t(const Grid2D& g, int i, int j) {
    TStencil t;
    auto put = [&](int ii, int jj, double w) {
        t.cell[t.n] = g.idx(ii, jj);
        t.wgt[t.n++] = w;
    };
    if (i >= 1 && i + 1 < g.nx) {
        double w = 1.0 / 4.0;
        put(i + 1, j, w), put(i + 1, j + 1, w), put(i - 1, j, -w), put(i - 1, j + 1, -w);
    }
    return t;
}

inline double apply_t(const TStencil& t, const std::vector<double>& v, double s) {
    double acc = 0;
    for (int k = 0; k < t.n; ++k) acc += t.wgt[k] * v[t.cell[k]];
    return acc / s;
}
} // namespace

double PlapScheme::gradient_energy(const ScalarField& w) const {
    const Grid2D& g = w.grid;
    double s = g.s, s2 = s * s;
    double weight = compact ? 1.0 : 0.5;
    double epow = std::pow(eps, 0.5 * p);
    double E = 0.0;
    // x-faces
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i + 1 < g.nx; ++i) {
            double gn = (w.at(i + 1, j) - w.at(i, j)) / s;
            double gt = compact ? 0.0 : apply_t(xface_t(g, i, j), w.v, s);
            double q = gn * gn + gt * gt;
            E += weight * s2 * (std::pow(eps + q, 0.5 * p) - epow);
        }
    // y-faces
    for (int j = 0; j + 1 < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double gn = (w.at(i, j + 1) - w.at(i, j)) / s;
            double gt = compact ? 0.0 : apply_t(yface_t(g, i, j), w.v, s);
            double q = gn * gn + gt * gt;
            E += weight * s2 * (std::pow(eps + q, 0.5 * p) - epow);
        }
    return E;
}

void PlapScheme::gradient_energy_diff(const ScalarField& w, std::vector<double>& out) const {
    const Grid2D& g = w.grid;
    double s = g.s, s2 = s * s;
    double weight = compact ? 1.0 : 0.5;
    out.assign(g.size(), 0.0);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i + 1 < g.nx; ++i) {
            double gn = (w.at(i + 1, j) - w.at(i, j)) / s;
            TStencil t;
            double gt = 0.0;
            if (!compact) {
                t = xface_t(g, i, j);
                gt = apply_t(t, w.v, s);
            }
            double q = gn * gn + gt * gt;
            double c = weight * s2 * 0.5 * p * std::pow(eps + q, 0.5 * p - 1.0);
            out[g.idx(i + 1, j)] += c * 2 * gn / s;
            out[g.idx(i, j)] -= c * 2 * gn / s;
            if (gt != 0.0)
                for (int k = 0; k < t.n; ++k) out[t.cell[k]] += c * 2 * gt * t.wgt[k] / s;
        }
    for (int j = 0; j + 1 < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double gn = (w.at(i, j + 1) - w.at(i, j)) / s;
            TStencil t;
            double gt = 0.0;
            if (!compact) {
                t = yface_t(g, i, j);
                gt = apply_t(t, w.v, s);
            }
            double q = gn * gn + gt * gt;
            double c = weight * s2 * 0.5 * p * std::pow(eps + q, 0.5 * p - 1.0);
            out[g.idx(i, j + 1)] += c * 2 * gn / s;
            out[g.idx(i, j)] -= c * 2 * gn / s;
            if (gt != 0.0)
                for (int k = 0; k < t.n; ++k) out[t.cell[k]] += c * 2 * gt * t.wgt[k] / s;
        }
    for (int k = 0; k < g.size(); ++k)
        if (w.kind[k] != 0) out[k] = 0.0;
}

ScalarField plap_residual(const ScalarField& field, const ScalarField& rhs_field, double p,
                          double eps) {
    if (!field.grid.same_layout(rhs_field.grid))
        throw Error(ErrorCode::SchemaMismatch, "field and rhs grids differ");
    PlapScheme scheme(p, eps);
    std::vector<double> diff;
    scheme.gradient_energy_diff(field, diff);
    double ps2 = p * field.grid.s * field.grid.s;
    ScalarField out(field.grid, kResidualSentinel);
    // the full face metric loses its transverse terms at edge faces, so the
    // first interior ring is not a consistent sample there
    int ring = scheme.compact ? 1 : 2;
    for (int j = ring; j < field.grid.ny - ring; ++j)
        for (int i = ring; i < field.grid.nx - ring; ++i) {
            if (!field.free_at(i, j)) continue;
            double div = -diff[field.grid.idx(i, j)] / ps2;
            out.at(i, j) = div - rhs_field.at(i, j);
        }
    return out;
}

} // namespace qcfb
