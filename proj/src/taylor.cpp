#include "wkit/taylor.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wkit {
namespace {

int degree(const MultiIndex& a) { return a[0] + a[1] + a[2] + a[3]; }

int encode(const MultiIndex& a) { return ((a[0] * 16 + a[1]) * 16 + a[2]) * 16 + a[3]; }

struct Triple {
    int lhs, rhs, out;
};

struct DerivEntry {
    int src, dst;
    double factor;
};

struct Tables {
    std::vector<MultiIndex> monomials;
    std::array<int, kMaxJetOrder + 2> count{};
    std::vector<int> index_of;  // encode() -> index, -1 if absent
    std::vector<Triple> triples;  // sorted by degree of the product
    std::array<std::size_t, kMaxJetOrder + 1> triples_upto{};
    std::array<std::vector<DerivEntry>, kJetVars> deriv;  // sorted by degree of src
    std::array<std::array<std::size_t, kMaxJetOrder + 1>, kJetVars> deriv_upto{};

    Tables() {
        index_of.assign(16 * 16 * 16 * 16, -1);
        for (int d = 0; d <= kMaxJetOrder; ++d) {
            for (int a = d; a >= 0; --a)
                for (int b = d - a; b >= 0; --b)
                    for (int c = d - a - b; c >= 0; --c) {
                        MultiIndex m{a, b, c, d - a - b - c};
                        index_of[encode(m)] = static_cast<int>(monomials.size());
                        monomials.push_back(m);
                    }
            count[d] = static_cast<int>(monomials.size());
        }
        const int n = static_cast<int>(monomials.size());
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                MultiIndex s;
                for (int v = 0; v < kJetVars; ++v) s[v] = monomials[i][v] + monomials[j][v];
                if (degree(s) <= kMaxJetOrder) triples.push_back({i, j, index_of[encode(s)]});
            }
        std::stable_sort(triples.begin(), triples.end(), [&](const Triple& a, const Triple& b) {
            return degree(monomials[a.out]) < degree(monomials[b.out]);
        });
        for (int d = 0; d <= kMaxJetOrder; ++d)
            triples_upto[d] = static_cast<std::size_t>(
                std::count_if(triples.begin(), triples.end(),
                              [&](const Triple& t) { return degree(monomials[t.out]) <= d; }));
        for (int v = 0; v < kJetVars; ++v) {
            for (int i = 0; i < n; ++i) {
                const MultiIndex& m = monomials[i];
                if (m[v] == 0) continue;
                MultiIndex lower = m;
                --lower[v];
                deriv[v].push_back({i, index_of[encode(lower)], static_cast<double>(m[v])});
            }
            for (int d = 0; d <= kMaxJetOrder; ++d)
                deriv_upto[v][d] = static_cast<std::size_t>(
                    std::count_if(deriv[v].begin(), deriv[v].end(),
                                  [&](const DerivEntry& e) { return degree(monomials[e.src]) <= d; }));
        }
    }
};

const Tables& tables() {
    static const Tables t;
    return t;
}

void check_order(int order) {
    if (order < 0 || order > kMaxJetOrder)
        throw std::out_of_range("jet order " + std::to_string(order) + " outside [0, " +
                                std::to_string(kMaxJetOrder) + "]");
}

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

}  // namespace

int monomial_count(int order) {
    check_order(order);
    return tables().count[order];
}

const MultiIndex& monomial(int index) { return tables().monomials.at(index); }

Jet::Jet(int order) : order_(order) {
    check_order(order);
    c_.assign(tables().count[order], 0.0);
}

Jet Jet::constant(double value, int order) {
    Jet j(order);
    j.c_[0] = value;
    return j;
}

Jet Jet::variable(int var, double value, int order) {
    Jet j(order);
    j.c_[0] = value;
    if (order >= 1) {
        MultiIndex m{0, 0, 0, 0};
        m[var] = 1;
        j.c_[tables().index_of[encode(m)]] = 1.0;
    }
    return j;
}

double Jet::coeff(const MultiIndex& a) const {
    for (int v : a)
        if (v < 0 || v > kMaxJetOrder) return 0.0;
    if (degree(a) > order_) return 0.0;
    return c_[tables().index_of[encode(a)]];
}

double Jet::partial(const MultiIndex& a) const {
    double f = 1.0;
    for (int v : a) f *= factorial(v);
    return coeff(a) * f;
}

Jet Jet::derivative(int var) const {
    if (order_ == 0) return Jet(0);
    Jet r(order_ - 1);
    const auto& t = tables();
    const std::size_t n = t.deriv_upto[var][order_];
    for (std::size_t k = 0; k < n; ++k) {
        const auto& e = t.deriv[var][k];
        r.c_[e.dst] += e.factor * c_[e.src];
    }
    return r;
}

Jet Jet::truncated(int order) const {
    check_order(order);
    Jet r(order);
    const int n = std::min(order, order_);
    std::copy_n(c_.begin(), tables().count[n], r.c_.begin());
    return r;
}

Jet Jet::compose(std::span<const double> series) const {
    Jet h = *this;
    h.c_[0] = 0.0;
    const int n = std::min<int>(order_, static_cast<int>(series.size()) - 1);
    Jet r = Jet::constant(series[n], order_);
    for (int k = n - 1; k >= 0; --k) {
        r = r * h;
        r.c_[0] += series[k];
    }
    return r;
}

Jet& Jet::operator+=(const Jet& o) {
    if (o.order_ < order_) *this = truncated(o.order_);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
    return *this;
}

Jet& Jet::operator-=(const Jet& o) {
    if (o.order_ < order_) *this = truncated(o.order_);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
    return *this;
}

Jet& Jet::operator*=(const Jet& o) { return *this = *this * o; }

Jet& Jet::operator+=(double s) {
    c_[0] += s;
    return *this;
}

Jet& Jet::operator-=(double s) {
    c_[0] -= s;
    return *this;
}

Jet& Jet::operator*=(double s) {
    for (double& v : c_) v *= s;
    return *this;
}

Jet& Jet::operator/=(double s) {
    for (double& v : c_) v /= s;
    return *this;
}

Jet operator-(Jet a) {
    for (double& v : a.c_) v = -v;
    return a;
}

Jet operator*(const Jet& a, const Jet& b) {
    const int order = std::min(a.order_, b.order_);
    Jet r(order);
    const auto& t = tables();
    const std::size_t n = t.triples_upto[order];
    const double* ac = a.c_.data();
    const double* bc = b.c_.data();
    double* rc = r.c_.data();
    for (std::size_t k = 0; k < n; ++k) {
        const Triple& tr = t.triples[k];
        rc[tr.out] += ac[tr.lhs] * bc[tr.rhs];
    }
    return r;
}

Jet reciprocal(const Jet& a) {
    const double v = a.value();
    std::vector<double> s(a.order() + 1);
    double inv = 1.0 / v;
    double pw = inv;
    for (int k = 0; k <= a.order(); ++k) {
        s[k] = (k % 2 == 0 ? pw : -pw);
        pw *= inv;
    }
    return a.compose(s);
}

Jet operator/(const Jet& a, const Jet& b) { return a * reciprocal(b); }

Jet sin(const Jet& a) {
    const double v = a.value();
    std::vector<double> s(a.order() + 1);
    for (int k = 0; k <= a.order(); ++k) s[k] = std::sin(v + k * std::numbers::pi / 2) / factorial(k);
    return a.compose(s);
}

Jet cos(const Jet& a) {
    const double v = a.value();
    std::vector<double> s(a.order() + 1);
    for (int k = 0; k <= a.order(); ++k) s[k] = std::cos(v + k * std::numbers::pi / 2) / factorial(k);
    return a.compose(s);
}

Jet exp(const Jet& a) {
    const double e = std::exp(a.value());
    std::vector<double> s(a.order() + 1);
    for (int k = 0; k <= a.order(); ++k) s[k] = e / factorial(k);
    return a.compose(s);
}

Jet log(const Jet& a) {
    const double v = a.value();
    std::vector<double> s(a.order() + 1);
    s[0] = std::log(v);
    double pw = 1.0;
    for (int k = 1; k <= a.order(); ++k) {
        pw /= v;
        s[k] = (k % 2 == 1 ? 1.0 : -1.0) * pw / k;
    }
    return a.compose(s);
}

Jet pow(const Jet& a, double exponent) {
    const double v = a.value();
    std::vector<double> s(a.order() + 1);
    double binom = 1.0;
    for (int k = 0; k <= a.order(); ++k) {
        s[k] = binom * std::pow(v, exponent - k);
        binom *= (exponent - k) / (k + 1);
    }
    return a.compose(s);
}

Jet sqrt(const Jet& a) {
    Jet r = pow(a, 0.5);
    r.coefficients()[0] = std::sqrt(a.value());
    return r;
}

Jet pow(const Jet& a, int exponent) {
    if (exponent < 0) return reciprocal(pow(a, -exponent));
    Jet result = Jet::constant(1.0, a.order());
    Jet base = a;
    unsigned e = static_cast<unsigned>(exponent);
    while (e) {
        if (e & 1u) result = result * base;
        e >>= 1;
        if (e) base = base * base;
    }
    return result;
}

}  // namespace wkit
