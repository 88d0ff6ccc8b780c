#include "qcfb/rhs.hpp"

#include <algorithm>
#include <cmath>

namespace qcfb {

void RHSSpec::validate() const {
    if (!(a > -1.0 && a < 0.0)) throw Error(ErrorCode::InvalidSpec, "a must lie in (-1,0)");
    if (!(b > 0.0 && b < 1.0)) throw Error(ErrorCode::InvalidSpec, "b must lie in (0,1)");
    if (!(c1 > 0.0 && C1 >= c1)) throw Error(ErrorCode::InvalidSpec, "need 0 < c1 <= C1");
    if (!(bound_above_one >= 0.0))
        throw Error(ErrorCode::InvalidSpec, "bound above one must be nonnegative");
    // Sandwich sweep: c1 t^b <= g(t) <= C1 t^a on (0,1).
    for (int k = 1; k <= 200; ++k) {
        double t = std::pow(10.0, -6.0 + 6.0 * k / 200.0) * 0.999999;
        double gt = C1 * std::pow(t, a);
        if (c1 * std::pow(t, b) > gt * (1 + 1e-12))
            throw Error(ErrorCode::InvalidSpec, "lower sandwich bound fails for built-in g");
    }
}

void RegSpec::validate() const {
    if (!(eps1 > 0.0 && eps1 < 1.0)) throw Error(ErrorCode::InvalidSpec, "eps1 must lie in (0,1)");
    if (!(j >= 1 && 1.0 / j < eps1)) throw Error(ErrorCode::InvalidSpec, "need 1/j < eps1");
    if (!(std::pow(0.5, i) < eps1)) throw Error(ErrorCode::InvalidSpec, "need (1/2)^i < eps1");
}

double beta_exponent(double a) {
    if (!(a > -1.0 && a < 1.0))
        throw Error(ErrorCode::DomainError, "beta exponent needs a in (-1,1)");
    return 2.0 / (1.0 - a);
}

namespace {
constexpr double kInf = 1e300;

double piece_eval(const RhsFn::Piece& p, double t) {
    return p.kind == RhsFn::PieceKind::Linear ? p.A + p.B * t : p.A * std::pow(t, p.B);
}

double piece_integral(const RhsFn::Piece& p, double lo, double hi) {
    if (hi <= lo) return 0.0;
    if (p.kind == RhsFn::PieceKind::Linear)
        return p.A * (hi - lo) + 0.5 * p.B * (hi * hi - lo * lo);
    double e = p.B + 1.0;
    return p.A / e * (std::pow(hi, e) - std::pow(lo, e));
}

double piece_lip(const RhsFn::Piece& p) {
    if (p.kind == RhsFn::PieceKind::Linear) return std::abs(p.B);
    if (p.lo <= 0.0) return kInf; // power with exponent < 1 has unbounded slope at 0
    double slo = std::abs(p.A * p.B) * std::pow(p.lo, p.B - 1.0);
    double shi = p.hi >= kInf ? 0.0 : std::abs(p.A * p.B) * std::pow(p.hi, p.B - 1.0);
    return std::max(slo, shi);
}
} // namespace

void RhsFn::finalize() {
    cumulative_.assign(pieces_.size(), 0.0);
    double acc = 0.0;
    for (size_t k = 0; k < pieces_.size(); ++k) {
        cumulative_[k] = acc;
        double hi = std::min(pieces_[k].hi, kInf);
        if (pieces_[k].hi < kInf) acc += piece_integral(pieces_[k], pieces_[k].lo, hi);
    }
}

double RhsFn::eval(double t) const {
    if (t <= 0.0 || t <= zero_below_) return 0.0;
    for (const Piece& p : pieces_)
        if (t < p.hi || &p == &pieces_.back()) return t >= p.lo ? piece_eval(p, t) : 0.0;
    return 0.0;
}

double RhsFn::antiderivative(double t) const {
    if (t <= 0.0) return 0.0;
    for (size_t k = 0; k < pieces_.size(); ++k) {
        if (t < pieces_[k].hi || k + 1 == pieces_.size())
            return cumulative_[k] + piece_integral(pieces_[k], pieces_[k].lo, std::max(pieces_[k].lo, std::min(t, kInf)));
    }
    return 0.0;
}

double RhsFn::lipschitz() const {
    double m = 0.0;
    for (const Piece& p : pieces_) m = std::max(m, piece_lip(p));
    return m;
}

double RhsFn::sup() const {
    double m = 0.0;
    for (const Piece& p : pieces_) {
        m = std::max(m, piece_eval(p, p.lo));
        if (p.hi < kInf) m = std::max(m, piece_eval(p, p.hi));
    }
    return m;
}

RhsFn RhsFn::g(const RHSSpec& spec) {
    spec.validate();
    RhsFn f;
    f.name_ = "g";
    f.pieces_.push_back({0.0, 1.0, PieceKind::Power, spec.C1, spec.a});
    f.pieces_.push_back({1.0, kInf, PieceKind::Linear, spec.bound_above_one, 0.0});
    f.plateau_end_ = 0.0;
    f.finalize();
    return f;
}

RhsFn RhsFn::constant(double value) {
    if (!(value >= 0)) throw Error(ErrorCode::InvalidSpec, "constant rhs must be nonnegative");
    RhsFn f;
    f.name_ = "const";
    f.pieces_.push_back({0.0, kInf, PieceKind::Linear, value, 0.0});
    f.plateau_end_ = value == 1.0 ? kInf : 0.0;
    f.finalize();
    return f;
}

RhsFn RhsFn::h(const RHSSpec& spec, double eps1) {
    spec.validate();
    if (!(eps1 > 0.0 && eps1 < 0.5))
        throw Error(ErrorCode::InvalidSpec, "eps1 must lie in (0, 1/2)");
    double cap = spec.C1 + 2.0; // = g(1)+2, so h <= g+2 holds exactly on (0,1)
    RhsFn f;
    f.name_ = "h";
    double slope = (cap - 1.0) / eps1;
    f.pieces_.push_back({0.0, eps1, PieceKind::Linear, 1.0, 0.0});
    f.pieces_.push_back({eps1, 2 * eps1, PieceKind::Linear, 1.0 - slope * eps1, slope});
    f.pieces_.push_back({2 * eps1, kInf, PieceKind::Linear, cap, 0.0});
    f.plateau_end_ = eps1;
    f.finalize();
    return f;
}

RhsFn RhsFn::gi(const RHSSpec& spec, int i) {
    spec.validate();
    if (i < 1) throw Error(ErrorCode::InvalidSpec, "approximation index must be >= 1");
    double t0 = std::pow(0.5, i);
    double t1 = 2.0 * t0;
    if (t1 >= 1.0) throw Error(ErrorCode::InvalidSpec, "approximation index too small: 2^(1-i) >= 1");
    double g1 = spec.C1 * std::pow(t1, spec.a);
    RhsFn f;
    f.name_ = "g^" + std::to_string(i);
    double slope = (g1 - 1.0) / t0;
    f.pieces_.push_back({0.0, t0, PieceKind::Linear, 1.0, 0.0});
    f.pieces_.push_back({t0, t1, PieceKind::Linear, 1.0 - slope * t0, slope});
    f.pieces_.push_back({t1, 1.0, PieceKind::Power, spec.C1, spec.a});
    f.pieces_.push_back({1.0, kInf, PieceKind::Linear, spec.bound_above_one, 0.0});
    f.plateau_end_ = t0;
    f.finalize();
    return f;
}

RhsFn RhsFn::truncate(const RhsFn& base, int j) {
    if (j < 1) throw Error(ErrorCode::InvalidSpec, "truncation index must be >= 1");
    if (1.0 / j > base.plateau_end_ + 1e-15)
        throw Error(ErrorCode::InvalidSpec,
                    "truncation needs 1/j inside the base plateau (1/j <= " +
                        std::to_string(base.plateau_end_) + ")");
    double lo = 1.0 / (2.0 * j), hi = 1.0 / j;
    RhsFn f;
    f.name_ = base.name_ + "_j" + std::to_string(j);
    f.zero_below_ = lo;
    f.plateau_end_ = base.plateau_end_;
    f.pieces_.push_back({0.0, lo, PieceKind::Linear, 0.0, 0.0});
    f.pieces_.push_back({lo, hi, PieceKind::Linear, -1.0, 2.0 * j});
    for (const Piece& p : base.pieces_) {
        if (p.hi <= hi) continue;
        Piece q = p;
        q.lo = std::max(p.lo, hi);
        f.pieces_.push_back(q);
    }
    f.finalize();
    return f;
}

} // namespace qcfb
