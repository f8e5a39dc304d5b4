#include "wkit/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <functional>
#include <type_traits>

#include "wkit/errors.hpp"

namespace wkit {
namespace {

using Kind = Expression::Kind;
using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make_node(Kind kind, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
    auto n = std::make_shared<Node>();
    n->kind = kind;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

// ---------------------------------------------------------------------------
// Parser

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    NodePtr parse() {
        NodePtr e = parse_expr();
        skip_ws();
        if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
        return e;
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const { throw ParseError("syntax error: " + what, pos_); }

    void skip_ws() {
        while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' ||
                                      src_[pos_] == '\r'))
            ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr parse_expr() {
        NodePtr lhs = parse_term();
        for (;;) {
            if (accept('+'))
                lhs = make_node(Kind::add, lhs, parse_term());
            else if (accept('-'))
                lhs = make_node(Kind::sub, lhs, parse_term());
            else
                return lhs;
        }
    }

    NodePtr parse_term() {
        NodePtr lhs = parse_unary();
        for (;;) {
            if (accept('*'))
                lhs = make_node(Kind::mul, lhs, parse_unary());
            else if (accept('/'))
                lhs = make_node(Kind::div, lhs, parse_unary());
            else
                return lhs;
        }
    }

    NodePtr parse_unary() {
        if (accept('-')) return make_node(Kind::neg, parse_unary());
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_primary();
        if (accept('^')) return make_node(Kind::pow, base, parse_unary());
        return base;
    }

    NodePtr parse_primary() {
        skip_ws();
        if (pos_ >= src_.size()) fail("unexpected end of input");
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = parse_expr();
            if (!accept(')')) fail("expected ')'");
            return e;
        }
        if ((c >= '0' && c <= '9') || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
        fail("unexpected '" + std::string(1, c) + "'");
    }

    NodePtr parse_number() {
        const std::size_t start = pos_;
        auto digits = [&] {
            std::size_t n = 0;
            while (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') ++pos_, ++n;
            return n;
        };
        std::size_t n = digits();
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            n += digits();
        }
        if (n == 0) {
            pos_ = start;
            fail("malformed number");
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            const std::size_t save = pos_;
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (digits() == 0) {
                pos_ = save;
                fail("malformed exponent");
            }
        }
        double value = 0;
        const auto res = std::from_chars(src_.data() + start, src_.data() + pos_, value);
        if (res.ec != std::errc() || res.ptr != src_.data() + pos_) {
            pos_ = start;
            fail("malformed number");
        }
        auto node = std::make_shared<Node>();
        node->kind = Kind::constant;
        node->value = value;
        return node;
    }

    NodePtr parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
            ++pos_;
        const std::string_view name = src_.substr(start, pos_ - start);
        if (name.size() == 1 && std::strchr("xypq", name[0])) {
            auto node = std::make_shared<Node>();
            node->kind = Kind::variable;
            node->var = name[0] == 'x' ? Var::x : name[0] == 'y' ? Var::y : name[0] == 'p' ? Var::p : Var::q;
            return node;
        }
        Kind kind;
        if (name == "sin")
            kind = Kind::sin;
        else if (name == "cos")
            kind = Kind::cos;
        else if (name == "exp")
            kind = Kind::exp;
        else if (name == "log")
            kind = Kind::log;
        else if (name == "sqrt")
            kind = Kind::sqrt;
        else
            throw ParseError("unknown identifier '" + std::string(name) + "'", start);
        if (!accept('(')) fail("expected '(' after " + std::string(name));
        NodePtr arg = parse_expr();
        if (!accept(')')) fail("expected ')'");
        return make_node(kind, arg);
    }
};

// ---------------------------------------------------------------------------
// Printer

int precedence(Kind k) {
    switch (k) {
        case Kind::add:
        case Kind::sub: return 1;
        case Kind::mul:
        case Kind::div: return 2;
        case Kind::neg: return 3;
        case Kind::pow: return 4;
        default: return 5;
    }
}

const char* function_name(Kind k) {
    switch (k) {
        case Kind::sin: return "sin";
        case Kind::cos: return "cos";
        case Kind::exp: return "exp";
        case Kind::log: return "log";
        case Kind::sqrt: return "sqrt";
        default: return nullptr;
    }
}

void print(const Node& n, std::string& out);

void print_child(const Node& child, bool parens, std::string& out) {
    if (parens) out += '(';
    print(child, out);
    if (parens) out += ')';
}

void print(const Node& n, std::string& out) {
    switch (n.kind) {
        case Kind::constant: {
            char buf[64];
            const auto res = std::to_chars(buf, buf + sizeof buf, std::abs(n.value));
            if (std::signbit(n.value)) out += "(-";
            out.append(buf, res.ptr);
            if (std::signbit(n.value)) out += ')';
            return;
        }
        case Kind::variable: out += "xypq"[static_cast<int>(n.var)]; return;
        case Kind::neg:
            out += '-';
            print_child(*n.lhs, precedence(n.lhs->kind) < 3, out);
            return;
        case Kind::pow:
            print_child(*n.lhs, precedence(n.lhs->kind) <= 4, out);
            out += '^';
            print_child(*n.rhs, precedence(n.rhs->kind) < 3, out);
            return;
        case Kind::add:
        case Kind::sub:
        case Kind::mul:
        case Kind::div: {
            const int p = precedence(n.kind);
            print_child(*n.lhs, precedence(n.lhs->kind) < p, out);
            out += n.kind == Kind::add ? '+' : n.kind == Kind::sub ? '-' : n.kind == Kind::mul ? '*' : '/';
            print_child(*n.rhs, precedence(n.rhs->kind) <= p, out);
            return;
        }
        default:
            out += function_name(n.kind);
            out += '(';
            print(*n.lhs, out);
            out += ')';
            return;
    }
}

bool same_tree(const Node* a, const Node* b) {
    if (a == b) return true;
    if (!a || !b || a->kind != b->kind) return false;
    if (a->kind == Kind::constant) return a->value == b->value;
    if (a->kind == Kind::variable) return a->var == b->var;
    return same_tree(a->lhs.get(), b->lhs.get()) && same_tree(a->rhs.get(), b->rhs.get());
}

// ---------------------------------------------------------------------------
// Evaluation, generic over double and Jet.

double value_of(double v) { return v; }
double value_of(const Jet& j) { return j.value(); }

template <class T>
T constant_like(double v, const std::array<T, 4>& args) {
    if constexpr (std::is_same_v<T, double>)
        return v;
    else
        return Jet::constant(v, args[0].order());
}

// Literal integer exponent, possibly negated.
bool has_variable(const Node& e) {
    if (e.kind == Kind::variable) return true;
    return (e.lhs && has_variable(*e.lhs)) || (e.rhs && has_variable(*e.rhs));
}

bool integer_value(double v, int& out) {
    if (v != std::floor(v) || std::abs(v) > 1 << 20) return false;
    out = static_cast<int>(v);
    return true;
}

template <class T>
int derivative_order(const T& v) {
    if constexpr (std::is_same_v<T, double>)
        return 0;
    else
        return v.order();
}

template <class T>
T eval(const Node& n, const std::array<T, 4>& args) {
    using std::cos;
    using std::exp;
    using std::log;
    using std::pow;
    using std::sin;
    using std::sqrt;
    auto domain = [&](const char* what) -> DomainError { return DomainError(what, to_string(n)); };
    switch (n.kind) {
        case Kind::constant: return constant_like(n.value, args);
        case Kind::variable: return args[static_cast<int>(n.var)];
        case Kind::neg: return -eval(*n.lhs, args);
        case Kind::sin: return sin(eval(*n.lhs, args));
        case Kind::cos: return cos(eval(*n.lhs, args));
        case Kind::exp: return exp(eval(*n.lhs, args));
        case Kind::log: {
            T a = eval(*n.lhs, args);
            if (!(value_of(a) > 0)) throw domain("log of non-positive value");
            return log(a);
        }
        case Kind::sqrt: {
            T a = eval(*n.lhs, args);
            const double v = value_of(a);
            if (v < 0 || std::isnan(v)) throw domain("sqrt of negative value");
            if (v == 0 && derivative_order(a) > 0) throw domain("sqrt not differentiable at 0");
            return sqrt(a);
        }
        case Kind::add: return eval(*n.lhs, args) + eval(*n.rhs, args);
        case Kind::sub: return eval(*n.lhs, args) - eval(*n.rhs, args);
        case Kind::mul: return eval(*n.lhs, args) * eval(*n.rhs, args);
        case Kind::div: {
            T d = eval(*n.rhs, args);
            if (value_of(d) == 0) throw domain("division by zero");
            return eval(*n.lhs, args) / d;
        }
        case Kind::pow: {
            T base = eval(*n.lhs, args);
            int k;
            const bool fixed = !has_variable(*n.rhs);
            const double e = fixed ? eval(*n.rhs, std::array<double, 4>{}) : 0.0;
            if (fixed && integer_value(e, k)) {
                if (k < 0 && value_of(base) == 0) throw domain("division by zero");
                if constexpr (std::is_same_v<T, double>)
                    return std::pow(base, static_cast<double>(k));
                else
                    return pow(base, k);
            }
            if (!(value_of(base) > 0)) throw domain("non-integer power of non-positive base");
            if (fixed) return pow(base, e);
            return exp(eval(*n.rhs, args) * log(base));
        }
    }
    throw Error("corrupt expression tree");
}

}  // namespace

Expression Expression::parse(std::string_view source) { return Expression(Parser(source).parse()); }

std::string to_string(const Expression::Node& node) {
    std::string out;
    print(node, out);
    return out;
}

std::string Expression::to_string() const { return root_ ? wkit::to_string(*root_) : std::string(); }

bool operator==(const Expression& a, const Expression& b) { return same_tree(a.root(), b.root()); }

double Expression::evaluate(const JetPoint& pt) const {
    const double v = eval<double>(*root_, {pt.x, pt.y, pt.p, pt.q});
    if (!std::isfinite(v)) throw DomainError("non-finite value", to_string());
    return v;
}

Jet Expression::evaluate(const std::array<Jet, 4>& args) const {
    Jet r = eval<Jet>(*root_, args);
    for (double c : r.coefficients())
        if (!std::isfinite(c)) throw DomainError("non-finite value", to_string());
    return r;
}

std::array<Jet, 4> coordinate_jets(const JetPoint& pt, int order) {
    return {Jet::variable(0, pt.x, order), Jet::variable(1, pt.y, order), Jet::variable(2, pt.p, order),
            Jet::variable(3, pt.q, order)};
}

DerivativeBundle eval_derivs(const Expression& f, const JetPoint& pt, int order) {
    return DerivativeBundle(f.evaluate(coordinate_jets(pt, order)), pt);
}

Jet total_derivative(const Jet& g, const Jet& f, const JetPoint& pt) {
    const int order = std::min(g.order() - 1, f.order());
    if (order < 0) throw std::invalid_argument("total_derivative needs a jet of order >= 1");
    Jet r = g.derivative(0).truncated(order);
    r += Jet::variable(2, pt.p, order) * g.derivative(1);
    r += Jet::variable(3, pt.q, order) * g.derivative(2);
    r += f.truncated(order) * g.derivative(3);
    return r;
}

}  // namespace wkit
