#include <doctest.h>

#include <cmath>
#include <sstream>

#include "wkit/causal.hpp"
#include "wkit/errors.hpp"
#include "wkit/ode.hpp"
#include "wkit/projective.hpp"

using namespace wkit;

TEST_CASE("flat equation is integrated exactly") {
    const Trajectory t = Trajectory::integrate(Expression::parse("0"), {0, {1, 2, 3}}, -1, 1);
    for (double x : {-1.0, -0.3, 0.0, 0.45, 1.0}) {
        const TrajectorySample s = t.sample(x);
        CHECK(s.point.y == doctest::Approx(1 + 2 * x + 1.5 * x * x).epsilon(1e-13));
        CHECK(s.phi[0][0] == doctest::Approx(1));
        CHECK(s.phi[0][1] == doctest::Approx(x));
        CHECK(s.phi[0][2] == doctest::Approx(x * x / 2));
        CHECK(wronskian(t, x) == doctest::Approx(1).epsilon(1e-13));
    }
}

TEST_CASE("F = q: closed form and Liouville") {
    const Trajectory t = Trajectory::integrate(Expression::parse("q"), {0, {0, 0, 1}}, 0, 1);
    for (double x : {0.0, 0.25, 0.5, 1.0}) CHECK(std::abs(t.sample(x).point.q - std::exp(x)) <= 1e-8);
    CHECK(wronskian(t, 0) == doctest::Approx(1).epsilon(1e-14));
    CHECK(wronskian(t, 1) == doctest::Approx(std::exp(1.0)).epsilon(1e-9));
}

TEST_CASE("defect of the circle equation") {
    const Expression F = Expression::parse("3*q^2/(2*p)");
    const Trajectory t = Trajectory::integrate(F, {0, {0, 1, 1}}, 0, 0.5);
    for (int i = 1; i < 50; ++i) {
        const double x = 0.5 * i / 50;
        const JetPoint pt = t.point(x);
        const double f3 = solution_jet(F, pt, 3)[3];
        // f''' from the integrated state versus a centered difference of f''.
        const double h = 1e-4;
        const double fd = (t.point(x + h).q - t.point(x - h).q) / (2 * h);
        CHECK(std::abs(fd - f3) <= 1e-6 * (1 + std::abs(f3)));
        CHECK(std::abs(f3 - F.evaluate(pt)) <= 1e-8 * (1 + std::abs(f3)));
    }
}

TEST_CASE("linearized coefficients") {
    const Trajectory flat = Trajectory::integrate(Expression::parse("0"), {0, {0.1, 0.2, 0.3}}, -1, 1);
    CHECK(linearized_coefficients(flat, 0.3).h.norm() <= 1e-12);
    const Trajectory q = Trajectory::integrate(Expression::parse("q"), {0, {0.1, 0.2, 0.3}}, -1, 1);
    CHECK((linearized_coefficients(q, 0.7).h - Vec3(0, 0, 1)).norm() <= 1e-8);
    const Trajectory c = Trajectory::integrate(Expression::parse("3*q^2/(2*p)"), {0, {0, 1, 1}}, -0.5, 0.5);
    const LinearizedCoefficients lc = linearized_coefficients(c, 0);
    CHECK((lc.h - Vec3(0, -1.5, 3)).norm() <= 1e-10);
    CHECK(linearized_coefficients(c, 0.4).discrepancy <= 1e-7);
}

TEST_CASE("property: variational solutions match finite differences of the flow") {
    const Expression F = Expression::parse("y*q+sin(p)");
    const SolutionParams P{0, {0.1, -0.2, 0.3}};
    const Trajectory t = Trajectory::integrate(F, P, -1, 1);
    const double h = 1e-5;
    for (int i = 0; i < 3; ++i) {
        SolutionParams a = P, b = P;
        a.P[i] += h;
        b.P[i] -= h;
        const Trajectory ta = Trajectory::integrate(F, a, -1, 1), tb = Trajectory::integrate(F, b, -1, 1);
        for (double x : {-0.9, -0.2, 0.6, 1.0}) {
            const double fd = (ta.point(x).y - tb.point(x).y) / (2 * h);
            const double phi = t.sample(x).phi[0][i];
            CHECK(std::abs(fd - phi) <= 1e-4 * (1 + std::abs(phi)));
        }
    }
}

TEST_CASE("property: Liouville formula d log W / dx = h2") {
    const Expression F = Expression::parse("y*q+sin(p)");
    const Trajectory t = Trajectory::integrate(F, {0, {0.1, -0.2, 0.3}}, -1, 1);
    for (double x : {-0.7, 0.0, 0.5}) {
        const double h = 1e-4;
        const double d = (std::log(wronskian(t, x + h)) - std::log(wronskian(t, x - h))) / (2 * h);
        const double h2 = t.sample(x).h[2];
        CHECK(std::abs(d - h2) <= 1e-5 * (1 + std::abs(h2)));
    }
}

TEST_CASE("phi jets follow the linearized equation") {
    const Expression F = Expression::parse("y*q+sin(p)");
    const Trajectory t = Trajectory::integrate(F, {0, {0.1, -0.2, 0.3}}, -1, 1);
    const auto jet = t.phi_jet(0.2, 5);
    const double h = 1e-3;
    const auto up = t.phi_jet(0.2 + h, 4), dn = t.phi_jet(0.2 - h, 4);
    for (int k = 1; k <= 4; ++k) CHECK(((up[k - 1] - dn[k - 1]) / (2 * h) - jet[k]).norm() <= 1e-5 * (1 + jet[k].norm()));
}

TEST_CASE("adjoint solutions") {
    const Trajectory flat = Trajectory::integrate(Expression::parse("0"), {0, {0, 0, 0}}, -1, 1);
    const AdjointSolutions z = adjoint_solutions(flat);
    for (double x : {-0.8, 0.0, 0.6}) CHECK((z(x)[0] - Vec3(x * x / 2, -x, 1)).norm() <= 1e-12);

    // Wilczynski: the adjoint curve is the projective dual of the phi curve.
    for (const char* src : {"q", "y*q+sin(p)"}) {
        const Trajectory t = Trajectory::integrate(Expression::parse(src), {0, {0.1, -0.2, 0.3}}, -1, 1);
        const AdjointSolutions a = adjoint_solutions(t);
        for (double x : {-0.9, -0.3, 0.2, 0.8}) {
            const TrajectorySample s = t.sample(x);
            CHECK(projective_distance(s.phi[0].cross(s.phi[1]), a(x)[0]) <= 1e-5);
        }
    }
}

TEST_CASE("integration failures are reported") {
    // y''' = q^2 from q = 1 blows up at finite x.
    CHECK_THROWS_AS(Trajectory::integrate(Expression::parse("q^2"), {0, {0, 0, 1}}, 0, 5), IntegrationError);
    CHECK_THROWS_AS(Trajectory::integrate(Expression::parse("log(p)"), {0, {0, 0.1, -1}}, 0, 1), IntegrationError);
    const Trajectory t = Trajectory::integrate(Expression::parse("0"), {0, {0, 0, 0}}, -1, 1);
    CHECK_THROWS(t.sample(1.5));
}

TEST_CASE("trajectory CSV") {
    const Trajectory t = Trajectory::integrate(Expression::parse("0"), {0, {1, 2, 3}}, -1, 1);
    std::ostringstream out;
    write_trajectory_csv(out, t, {0.0, 0.5});
    std::istringstream in(out.str());
    std::string header, row;
    std::getline(in, header);
    CHECK(header == "x,f,f_x,f_xx,phi11,phi12,phi13,phi21,phi22,phi23,phi31,phi32,phi33");
    std::getline(in, row);
    CHECK(row.rfind("0,1,2,3,1,0,0,0,1,0,0,0,1", 0) == 0);
}
