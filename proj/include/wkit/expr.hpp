#pragma once

// Right-hand sides F(x, y, p, q) of third-order equations y''' = F.
//
// Grammar (the only wire format for F anywhere in the toolkit):
//
//   expr    = term { ("+" | "-") term } ;
//   term    = unary { ("*" | "/") unary } ;
//   unary   = "-" unary | power ;
//   power   = primary [ "^" unary ] ;          (right associative)
//   primary = number | variable | func "(" expr ")" | "(" expr ")" ;
//   variable = "x" | "y" | "p" | "q" ;
//   func    = "sin" | "cos" | "exp" | "log" | "sqrt" ;
//   number  = digits [ "." digits ] [ ("e" | "E") [ "+" | "-" ] digits ] ;
//
// so "^" binds tighter than unary minus, which binds tighter than "*" and "/".

#include <array>
#include <memory>
#include <string>
#include <string_view>

#include "wkit/taylor.hpp"

namespace wkit {

enum class Var { x = 0, y = 1, p = 2, q = 3 };

// A point (x, y, p, q) of the second jet space; p plays y', q plays y''.
struct JetPoint {
    double x = 0, y = 0, p = 0, q = 0;

    double operator[](int i) const { return i == 0 ? x : i == 1 ? y : i == 2 ? p : q; }
    bool operator==(const JetPoint&) const = default;
};

class Expression {
public:
    enum class Kind { constant, variable, neg, sin, cos, exp, log, sqrt, add, sub, mul, div, pow };

    struct Node {
        Kind kind;
        double value = 0;  // constant
        Var var = Var::x;  // variable
        std::shared_ptr<const Node> lhs, rhs;
    };

    Expression() = default;
    explicit Expression(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

    static Expression parse(std::string_view source);

    // Canonical text: no whitespace, minimal parentheses. parse(to_string())
    // reproduces the tree exactly.
    std::string to_string() const;

    double evaluate(const JetPoint& pt) const;
    // Evaluate with jet arguments; all arguments must share one order.
    Jet evaluate(const std::array<Jet, 4>& args) const;

    const Node* root() const { return root_.get(); }
    bool empty() const { return !root_; }

    friend bool operator==(const Expression& a, const Expression& b);

private:
    std::shared_ptr<const Node> root_;
};

std::string to_string(const Expression::Node& node);

// F and all its mixed partials in (x, y, p, q) up to `order` at one point.
class DerivativeBundle {
public:
    DerivativeBundle(Jet jet, JetPoint at) : jet_(std::move(jet)), at_(at) {}

    int order() const { return jet_.order(); }
    const JetPoint& at() const { return at_; }
    double value() const { return jet_.value(); }
    double partial(int nx, int ny, int np, int nq) const { return jet_.partial(nx, ny, np, nq); }
    const Jet& jet() const { return jet_; }

private:
    Jet jet_;
    JetPoint at_;
};

// Coordinate jets (x, y, p, q) expanded about `pt`.
std::array<Jet, 4> coordinate_jets(const JetPoint& pt, int order);

DerivativeBundle eval_derivs(const Expression& f, const JetPoint& pt, int order);

// V(g) = g_x + p g_y + q g_p + F g_q for the total derivative V of y''' = F.
// `g` and `f` are jets about `pt`; the result has order
// min(g.order() - 1, f.order()).
Jet total_derivative(const Jet& g, const Jet& f, const JetPoint& pt);

}  // namespace wkit
