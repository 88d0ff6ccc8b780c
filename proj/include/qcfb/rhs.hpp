#ifndef QCFB_RHS_HPP
#define QCFB_RHS_HPP

#include <string>
#include <vector>

#include "qcfb/errors.hpp"

namespace qcfb {

/// Parameters of the singular right-hand side family:
/// zero on (-inf,0], sandwiched c1*t^b <= g(t) <= C1*t^a on (0,1),
/// bounded on [1,inf).
struct RHSSpec {
    double a = -0.5;   // in (-1,0)
    double b = 0.45;   // in (0,1)
    double c1 = 1.0;
    double C1 = 1.5;
    double bound_above_one = 1.5; // value of g on [1,inf)

    void validate() const;
};

/// Regularization indices: h == 1 on (0, eps1]; the j-truncation needs
/// 1/j < eps1 and the i-splice needs (1/2)^i < eps1.
struct RegSpec {
    double eps1 = 0.3;
    int j = 8;
    int i = 4;

    void validate() const;
};

/// beta = 2/(1-a); the free-boundary profile exponent. a in (-1,1).
double beta_exponent(double a);

/// A nonnegative function on (0,inf), zero on (-inf,0], stored as exact
/// piecewise closed forms (constant / linear / power pieces), with exact
/// antiderivative and certified Lipschitz constant.
class RhsFn {
public:
    enum class PieceKind { Linear, Power };
    struct Piece {
        double lo, hi;     // t-interval [lo, hi)
        PieceKind kind;
        double A = 0, B = 0;   // Linear: A + B*t ; Power: A * t^B
    };

    double eval(double t) const;
    /// H(t) = integral_{0}^{t} f(s) ds for t > 0; 0 for t <= 0.
    double antiderivative(double t) const;
    double lipschitz() const;
    double sup() const;
    /// Value below which the function vanishes (0 for untruncated families,
    /// 1/(2j) after truncation).
    double zero_below() const { return zero_below_; }
    /// End of the leading plateau where the function equals 1.
    double plateau_end() const { return plateau_end_; }
    const std::string& name() const { return name_; }
    const std::vector<Piece>& pieces() const { return pieces_; }

    /// The built-in singular family: C1*t^a on (0,1), constant on [1,inf).
    static RhsFn g(const RHSSpec& spec);
    /// Constant value on (0,inf) (step at 0); plateau covers all of (0,inf)
    /// when the value is 1, so any truncation index is admissible.
    static RhsFn constant(double value);
    /// Lipschitz regularization: 1 on (0,eps1], linear splice on [eps1,2eps1]
    /// up to C1+2, constant beyond. Satisfies h <= g+2 and h >= c1 t^b.
    static RhsFn h(const RHSSpec& spec, double eps1);
    /// i-th approximation of g: 1 on (0,(1/2)^i], linear to g(2^(1-i)),
    /// then g itself.
    static RhsFn gi(const RHSSpec& spec, int i);
    /// j-truncation of a base with leading plateau 1: zero below 1/(2j),
    /// ramp 2jt-1 on (1/(2j),1/j), base beyond. Requires 1/j <= plateau.
    static RhsFn truncate(const RhsFn& base, int j);

private:
    std::vector<Piece> pieces_; // ordered, covering (0, inf)
    double zero_below_ = 0.0;
    double plateau_end_ = 0.0;
    std::string name_;

    void finalize();
    std::vector<double> cumulative_; // antiderivative at piece left endpoints
};

} // namespace qcfb

#endif
