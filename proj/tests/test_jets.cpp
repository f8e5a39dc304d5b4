#include <doctest.h>

#include <cmath>
#include <random>

#include "wkit/errors.hpp"
#include "wkit/invariants.hpp"

using namespace wkit;

namespace {

const char* kTestEquations[] = {"0", "q", "3*q^2/(2*p)"};

JetPoint random_point(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-1, 1), pos(0.5, 2);
    return {u(rng), u(rng), pos(rng), u(rng)};
}

}  // namespace

TEST_CASE("K examples") {
    CHECK(compute_K(Expression::parse("0"), {0.2, 0.1, 0.3, 0.4}) == 0);
    CHECK(compute_K(Expression::parse("q"), {0.2, 0.1, 0.3, 0.4}) == doctest::Approx(-1.0 / 9).epsilon(1e-15));
    CHECK(std::abs(compute_K(Expression::parse("3*q^2/(2*p)"), {0, 1, 1, 1})) <= 1e-15);
}

TEST_CASE("Wuenschmann examples") {
    CHECK(wuenschmann(Expression::parse("0"), {0.2, 0.1, 0.3, 0.4}) == 0);
    CHECK(std::abs(wuenschmann(Expression::parse("q"), {0, 0, 0, 0}) - 2.0 / 27) <= 1e-12);
    CHECK(std::abs(wuenschmann(Expression::parse("3*q^2/(2*p)"), {0, 1, 1, 1})) <= 1e-12);
    // y''' = y: F_y = 1, K = 0.
    CHECK(wuenschmann(Expression::parse("y"), {0.3, 0.1, 0.2, 0.5}) == doctest::Approx(1));
}

TEST_CASE("Wuenschmann oracle on a polynomial F") {
    // F = a p + b q: K = -b^2/9 - a/2 is constant, so W = -(2/3) b K.
    const double a = 0.7, b = -1.3;
    const Expression F = Expression::parse("0.7*p-1.3*q");
    const double K = -b * b / 9 - a / 2;
    CHECK(compute_K(F, {0.1, 0.2, 0.3, 0.4}) == doctest::Approx(K).epsilon(1e-14));
    CHECK(wuenschmann(F, {0.1, 0.2, 0.3, 0.4}) == doctest::Approx(-2.0 / 3 * b * K).epsilon(1e-14));
}

TEST_CASE("Chern metric examples") {
    const Expression zero = Expression::parse("0");
    const Mat4 g0 = chern_metric(zero, {0, 0, 0, 0}).g;
    Mat4 expect = Mat4::Zero();
    expect(1, 3) = expect(3, 1) = 1;
    expect(2, 2) = -1;
    CHECK((g0 - expect).norm() == 0);

    // p = 1: 2 (dy - dx) dq - dp^2.
    const Mat4 g1 = chern_metric(zero, {0, 0, 1, 0}).g;
    expect(0, 3) = expect(3, 0) = -1;
    CHECK((g1 - expect).norm() <= 1e-15);
    CHECK(g1(0, 0) == 0);
}

TEST_CASE("property: degeneracy along V and rank 3") {
    std::mt19937 rng(1);
    const char* family[] = {"0", "q", "3*q^2/(2*p)", "x*p+y*q^2", "sin(p)*q+exp(y/3)"};
    for (int i = 0; i < 100; ++i) {
        const Expression F = Expression::parse(family[i % 5]);
        const DegenerateMetric m = chern_metric(F, random_point(rng));
        CHECK((m.g * m.direction).norm() <= 1e-9 * m.g.norm());
        CHECK((m.g - m.g.transpose()).norm() == 0);
        Eigen::JacobiSVD<Mat4> svd(m.g);
        CHECK(svd.singularValues()[2] > 1e-6 * svd.singularValues()[0]);
        CHECK(svd.singularValues()[3] <= 1e-12 * svd.singularValues()[0]);
    }
}

TEST_CASE("dual cometric examples and duality") {
    const Cometric c0 = dual_cometric(Expression::parse("0"), {0.1, 0.2, 0.3, 0.4});
    Mat4 expect = Mat4::Zero();
    expect(2, 2) = -1;
    expect(1, 3) = expect(3, 1) = 1;
    CHECK((c0.m - expect).norm() == 0);
    const Cometric cq = dual_cometric(Expression::parse("q"), {0.1, 0.2, 0.3, 0.4});
    CHECK(cq.m(2, 3) == doctest::Approx(-1.0 / 3));
    CHECK(cq.m(3, 3) == doctest::Approx(1.0 / 9));

    // On the (y, p, q) block the metric and cometric are mutually inverse.
    std::mt19937 rng(2);
    for (const char* src : {"0", "q", "3*q^2/(2*p)", "x*p+y*q^2"}) {
        const Expression F = Expression::parse(src);
        for (int i = 0; i < 5; ++i) {
            const JetPoint pt = random_point(rng);
            const Mat4 g = chern_metric(F, pt).g, m = dual_cometric(F, pt).m;
            const Eigen::Matrix3d prod = g.bottomRightCorner<3, 3>() * m.bottomRightCorner<3, 3>();
            CHECK((prod - Eigen::Matrix3d::Identity()).norm() <= 1e-12);
        }
    }
}

TEST_CASE("Lie derivative examples") {
    const Expression zero = Expression::parse("0"), q = Expression::parse("q");
    const JetPoint o{0, 0, 0, 0};
    CHECK((lie_derivative_metric(q, o, 0) - chern_metric(q, o).g).norm() == 0);
    const Mat4 g0 = chern_metric(zero, o).g;
    CHECK(proportionality_residual(g0, lie_derivative_metric(zero, o, 1)) <= 1e-7);
    CHECK(proportionality_residual(chern_metric(q, o).g, lie_derivative_metric(q, o, 1)) > 0.01);
    CHECK(proportionality_residual(g0, 2 * g0) <= 1e-15);
    CHECK(proportionality_residual(g0, Mat4::Zero()) == 0);
    CHECK_THROWS(proportionality_residual(Mat4::Zero(), g0));
}

TEST_CASE("Lie derivatives: jet and flow routes agree") {
    std::mt19937 rng(3);
    for (const char* src : {"q", "3*q^2/(2*p)", "x*p+y*q^2"}) {
        const Expression F = Expression::parse(src);
        const JetPoint pt = random_point(rng);
        for (int k = 1; k <= 2; ++k) {
            const Mat4 a = lie_derivative_metric(F, pt, k), b = lie_derivative_metric_flow(F, pt, k);
            CHECK((a - b).norm() <= 1e-5 * (1 + a.norm()));
        }
    }
}

TEST_CASE("property: W = 0 exactly when L_V g is proportional to g") {
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> c(-1, 1);
    std::vector<std::string> eqs(std::begin(kTestEquations), std::end(kTestEquations));
    for (int i = 0; i < 5; ++i) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%.3f*y+%.3f*p*q+%.3f*q^2+%.3f*x*y", c(rng), c(rng), c(rng), c(rng));
        eqs.push_back(buf);
    }
    for (const auto& src : eqs) {
        const Expression F = Expression::parse(src);
        for (int i = 0; i < 10; ++i) {
            const JetPoint pt = random_point(rng);
            const auto lie = lie_derivatives(chern_field(F), pt, 1);
            const bool proportional = proportionality_residual(lie[0], lie[1]) <= 1e-6;
            const bool flat = std::abs(wuenschmann(F, pt)) <= 1e-9;
            CHECK(proportional == flat);
        }
    }
}

TEST_CASE("domain errors propagate") {
    CHECK_THROWS_AS(wuenschmann(Expression::parse("3*q^2/(2*p)"), {0, 1, 0, 1}), DomainError);
}
