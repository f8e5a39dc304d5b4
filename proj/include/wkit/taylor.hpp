#pragma once

// Truncated multivariate Taylor polynomials in the four jet coordinates
// (x, y, p, q). A Jet of order n stores the Taylor coefficients
// d^a f / a! for every multi-index a with |a| <= n, so products, quotients
// and elementary functions propagate all mixed partials up to order n
// exactly (to machine precision) without finite differencing.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace wkit {

inline constexpr int kJetVars = 4;
inline constexpr int kMaxJetOrder = 8;

using MultiIndex = std::array<int, kJetVars>;

// Number of monomials in four variables of total degree <= order.
int monomial_count(int order);

class Jet {
public:
    Jet() : Jet(0) {}
    explicit Jet(int order);

    static Jet constant(double value, int order);
    // The coordinate function `var` expanded about `value`.
    static Jet variable(int var, double value, int order);

    int order() const { return order_; }
    double value() const { return c_[0]; }

    // Taylor coefficient d^a f / a!.
    double coeff(const MultiIndex& a) const;
    // Partial derivative d^a f = a! * coeff(a). Zero beyond the jet order.
    double partial(const MultiIndex& a) const;
    double partial(int nx, int ny, int np, int nq) const { return partial(MultiIndex{nx, ny, np, nq}); }

    std::span<const double> coefficients() const { return c_; }
    std::span<double> coefficients() { return c_; }

    // d/d(var); the result has order one less.
    Jet derivative(int var) const;
    Jet truncated(int order) const;

    // Sum_k c_k (f - f(0))^k, i.e. composition with a univariate function
    // whose Taylor coefficients at value() are `series`.
    Jet compose(std::span<const double> series) const;

    Jet& operator+=(const Jet& o);
    Jet& operator-=(const Jet& o);
    Jet& operator*=(const Jet& o);
    Jet& operator+=(double s);
    Jet& operator-=(double s);
    Jet& operator*=(double s);
    Jet& operator/=(double s);

    friend Jet operator+(Jet a, const Jet& b) { return a += b; }
    friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
    friend Jet operator*(const Jet& a, const Jet& b);
    friend Jet operator+(Jet a, double s) { return a += s; }
    friend Jet operator+(double s, Jet a) { return a += s; }
    friend Jet operator-(Jet a, double s) { return a -= s; }
    friend Jet operator-(double s, const Jet& a) { return -a + s; }
    friend Jet operator*(Jet a, double s) { return a *= s; }
    friend Jet operator*(double s, Jet a) { return a *= s; }
    friend Jet operator/(Jet a, double s) { return a /= s; }
    friend Jet operator-(Jet a);

private:
    int order_;
    std::vector<double> c_;
};

// Elementary functions. Callers are responsible for domain checks on
// value(); these only build the series.
Jet reciprocal(const Jet& a);
Jet operator/(const Jet& a, const Jet& b);
Jet sin(const Jet& a);
Jet cos(const Jet& a);
Jet exp(const Jet& a);
Jet log(const Jet& a);
Jet sqrt(const Jet& a);
Jet pow(const Jet& a, double exponent);
Jet pow(const Jet& a, int exponent);

// Multi-index of the monomial stored at position `index` (graded order).
const MultiIndex& monomial(int index);

}  // namespace wkit
