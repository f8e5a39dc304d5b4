#include <doctest.h>

#include <cmath>
#include <random>

#include "wkit/errors.hpp"
#include "wkit/expr.hpp"

using namespace wkit;

namespace {

// Random expression text over the grammar, kept inside the domain by
// using only smooth total functions and exp/sqrt/log of positive arguments.
std::string random_expr(std::mt19937& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth > 0 ? 9 : 2);
    const char* vars[] = {"x", "y", "p", "q"};
    switch (pick(rng)) {
        case 0: return vars[rng() % 4];
        case 1: return std::to_string(static_cast<int>(rng() % 7) + 1);
        case 2: return "0.5";
        case 3: return "(" + random_expr(rng, depth - 1) + "+" + random_expr(rng, depth - 1) + ")";
        case 4: return random_expr(rng, depth - 1) + "-" + random_expr(rng, depth - 1);
        case 5: return random_expr(rng, depth - 1) + "*" + random_expr(rng, depth - 1);
        case 6: return "sin(" + random_expr(rng, depth - 1) + ")";
        case 7: return "exp(" + random_expr(rng, depth - 1) + "/9)";
        case 8: return "-" + random_expr(rng, depth - 1);
        default: return "(" + random_expr(rng, depth - 1) + ")^2";
    }
}

}  // namespace

TEST_CASE("parse examples") {
    CHECK(Expression::parse("q").to_string() == "q");
    const Expression circle = Expression::parse("3*q^2/(2*p)");
    CHECK(circle.evaluate({0, 1, 1, 1}) == doctest::Approx(1.5));
    CHECK(Expression::parse(" 3 * q ^ 2 / ( 2 * p ) ") == circle);
}

TEST_CASE("precedence") {
    CHECK(Expression::parse("-2^2").evaluate(JetPoint{}) == -4);
    CHECK(Expression::parse("2^3^2").evaluate(JetPoint{}) == 512);
    CHECK(Expression::parse("1-2-3").evaluate(JetPoint{}) == -4);
    CHECK(Expression::parse("8/4/2").evaluate(JetPoint{}) == 1);
    CHECK(Expression::parse("2*-3").evaluate(JetPoint{}) == -6);
    CHECK(Expression::parse("1.5e1+2E-1").evaluate(JetPoint{}) == doctest::Approx(15.2));
}

TEST_CASE("syntax errors carry positions") {
    try {
        Expression::parse("sin(");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.position() == 4);
    }
    CHECK_THROWS_AS(Expression::parse("z+1"), ParseError);
    CHECK_THROWS_AS(Expression::parse("tan(q)"), ParseError);
    CHECK_THROWS_AS(Expression::parse("q)"), ParseError);
    CHECK_THROWS_AS(Expression::parse(""), ParseError);
    CHECK_THROWS_AS(Expression::parse("2 3"), ParseError);
}

TEST_CASE("domain errors name the subexpression") {
    const Expression circle = Expression::parse("3*q^2/(2*p)");
    try {
        circle.evaluate({0, 1, 0, 1});
        FAIL("expected a domain error");
    } catch (const DomainError& e) {
        CHECK(e.subexpression() == "3*q^2/(2*p)");
    }
    CHECK_THROWS_AS(eval_derivs(circle, {0, 1, 0, 1}, 2), DomainError);
    CHECK_THROWS_AS(Expression::parse("log(p)").evaluate({0, 0, -1, 0}), DomainError);
    CHECK_THROWS_AS(Expression::parse("sqrt(p)").evaluate({0, 0, -1, 0}), DomainError);
    CHECK_THROWS_AS(Expression::parse("p^0.5").evaluate({0, 0, -1, 0}), DomainError);
    CHECK(Expression::parse("p^3").evaluate({0, 0, -2, 0}) == -8);
}

TEST_CASE("eval_derivs examples") {
    const auto q = eval_derivs(Expression::parse("q"), {}, 1);
    CHECK(q.value() == 0);
    CHECK(q.partial(0, 0, 0, 1) == 1);
    CHECK(q.partial(1, 0, 0, 0) == 0);
    CHECK(q.partial(0, 1, 0, 0) == 0);
    CHECK(q.partial(0, 0, 1, 0) == 0);

    const auto c = eval_derivs(Expression::parse("3*q^2/(2*p)"), {0, 1, 1, 1}, 2);
    CHECK(c.value() == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(c.partial(0, 0, 1, 0) == doctest::Approx(-1.5).epsilon(1e-15));
    CHECK(c.partial(0, 0, 0, 1) == doctest::Approx(3).epsilon(1e-15));
}

TEST_CASE("total derivative examples") {
    const JetPoint pt{0.3, -0.2, 0.7, 1.1};
    const Expression zero = Expression::parse("0");
    const auto c = coordinate_jets(pt, 2);
    const Jet f0 = zero.evaluate(c);
    CHECK(total_derivative(c[3], f0, pt).value() == 0);
    const Jet f = Expression::parse("x*y+sin(q)").evaluate(c);
    CHECK(total_derivative(c[2], f, pt).value() == doctest::Approx(pt.q));

    const JetPoint one{0, 1, 1, 1};
    const Jet fc = Expression::parse("3*q^2/(2*p)").evaluate(coordinate_jets(one, 3));
    CHECK(total_derivative(fc.derivative(3), fc.truncated(2), one).value() == doctest::Approx(1.5).epsilon(1e-14));
}

TEST_CASE("property: printer round trip is the identity on trees") {
    std::mt19937 rng(11);
    for (int i = 0; i < 300; ++i) {
        const Expression e = Expression::parse(random_expr(rng, 4));
        const Expression again = Expression::parse(e.to_string());
        CHECK(again == e);
        CHECK(again.to_string() == e.to_string());
    }
}

TEST_CASE("property: partials match finite differences and mixed partials commute") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-0.8, 0.8);
    int checked = 0;
    for (int i = 0; i < 60; ++i) {
        const Expression e = Expression::parse(random_expr(rng, 3));
        const JetPoint pt{u(rng), u(rng), u(rng), u(rng)};
        const auto b = eval_derivs(e, pt, 2);
        for (int v = 0; v < 4; ++v) {
            const double h = 1e-5;
            JetPoint a = pt, m = pt;
            (v == 0 ? a.x : v == 1 ? a.y : v == 2 ? a.p : a.q) += h;
            (v == 0 ? m.x : v == 1 ? m.y : v == 2 ? m.p : m.q) -= h;
            const double fd = (e.evaluate(a) - e.evaluate(m)) / (2 * h);
            const double exact = b.partial(v == 0, v == 1, v == 2, v == 3);
            CHECK(std::abs(fd - exact) <= 1e-5 * (1 + std::abs(exact)));
            ++checked;
        }
        const Jet pq = b.jet().derivative(2).derivative(3), qp = b.jet().derivative(3).derivative(2);
        CHECK(std::abs(pq.value() - qp.value()) <= 1e-10 * (1 + std::abs(pq.value())));
    }
    CHECK(checked == 240);
}
