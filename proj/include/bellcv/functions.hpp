#pragma once

#include <string>
#include <vector>

namespace bellcv {

enum class FunctionFamily { Identity, Power, TripleBin, TanhPow, Rational, SignBin };

// Odd measured function applied to a quadrature outcome. Families:
//   Identity        f(x) = x
//   Power(m)        f(x) = |x|^m sign(x),            m > 0
//   TripleBin(s)    f(x) = -1, 0, +1 split at +-s,   s >= 0
//   TanhPow(q, m)   f(x) = sign(x) |tanh(q x)|^m,    q > 0, m > 0
//   Rational(eps)   f(x) = x / (1 + eps x^2),        eps >= 0
//   SignBin         f(x) = sign(x)
// All evaluations are exactly odd: f(-x) == -f(x).
class FunctionSpec {
public:
    static FunctionSpec identity();
    static FunctionSpec power(double m);
    static FunctionSpec triple_bin(double s);
    static FunctionSpec tanh_pow(double q, double m);
    static FunctionSpec rational(double eps);
    static FunctionSpec sign_bin();

    FunctionFamily family() const { return family_; }
    double param1() const { return p1_; }
    double param2() const { return p2_; }

    double operator()(double x) const;

    // Locations where f or f^2 is non-smooth; integration splits here.
    std::vector<double> breakpoints() const;

    // Stable identifier used as the kernel-cache key.
    std::string key() const;
    std::string to_string() const { return key(); }

    // Accepts identity, bin, power(M), triplebin(S), tanh(Q,M), rational(E).
    static FunctionSpec parse(const std::string& text);

    bool operator==(const FunctionSpec& o) const {
        return family_ == o.family_ && p1_ == o.p1_ && p2_ == o.p2_;
    }

private:
    FunctionSpec(FunctionFamily fam, double p1, double p2);

    FunctionFamily family_;
    double p1_;
    double p2_;
};

}  // namespace bellcv
