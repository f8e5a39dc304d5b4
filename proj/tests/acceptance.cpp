// Acceptance suite: one PASS/FAIL line per criterion. Known deviations are
// reported as FAIL but do not change the exit status; see README.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "wkit/causal.hpp"
#include "wkit/conic.hpp"
#include "wkit/errors.hpp"
#include "wkit/hamilton.hpp"
#include "wkit/inverse.hpp"
#include "wkit/projective.hpp"

using namespace wkit;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

struct TestEquation {
    const char* eq;
    SolutionParams P;
    double lo, hi;
};

// The circle equation blows up within [-1, 1] for some nearby solutions, so
// it is exercised on a shorter interval.
const TestEquation kEquations[] = {
    {"0", {0, {0, 1, 1}}, -1, 1},
    {"q", {0, {0, 1, 1}}, -1, 1},
    {"3*q^2/(2*p)", {0, {0, 1, 1}}, -0.5, 0.5},
};

const std::set<std::string> kKnownDeviations = {"7a"};

std::string fmt(const char* f, double a) {
    char buf[96];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

JetPoint random_jet(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-1, 1), pos(0.3, 2);
    std::bernoulli_distribution sign;
    return {u(rng), u(rng), (sign(rng) ? 1 : -1) * pos(rng), u(rng)};
}

Outcome c1() {
    const Expression zero = Expression::parse("0"), q = Expression::parse("q"), circle = Expression::parse("3*q^2/(2*p)");
    std::mt19937 rng(101);
    double w0 = 0, wc = 0;
    for (int i = 0; i < 50; ++i) {
        const JetPoint pt = random_jet(rng);
        w0 = std::max(w0, std::abs(wuenschmann(zero, pt)));
        wc = std::max(wc, std::abs(wuenschmann(circle, pt)));
    }
    const double wq = std::abs(wuenschmann(q, {0.3, -0.2, 0.5, 0.7}) - 2.0 / 27);
    return {w0 == 0 && wq <= 1e-12 && wc <= 1e-10,
            "W(0) max " + fmt("%.1e", w0) + ", |W(q)-2/27| " + fmt("%.1e", wq) + ", circle max |W| " + fmt("%.1e", wc)};
}

Outcome c2() {
    std::mt19937 rng(102);
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
        const DegenerateMetric m = chern_metric(Expression::parse(kEquations[i % 3].eq), random_jet(rng));
        worst = std::max(worst, (m.g * m.direction).norm() / m.g.norm());
    }
    return {worst <= 1e-9, "max |gV|/|g| " + fmt("%.1e", worst) + " over 100 jets"};
}

Outcome c3() {
    std::mt19937 rng(103);
    std::uniform_real_distribution<double> c(-1, 1);
    std::vector<std::string> eqs;
    for (const auto& e : kEquations) eqs.push_back(e.eq);
    for (int i = 0; i < 5; ++i) {
        char buf[200];
        std::snprintf(buf, sizeof buf, "%.4f*y+%.4f*p*q+%.4f*q^2+%.4f*x*y+%.4f*p^2", c(rng), c(rng), c(rng), c(rng), c(rng));
        eqs.push_back(buf);
    }
    int agree = 0, total = 0, flat = 0;
    for (const auto& src : eqs) {
        const Expression F = Expression::parse(src);
        for (int i = 0; i < 10; ++i) {
            const JetPoint pt = random_jet(rng);
            const auto lie = lie_derivatives(chern_field(F), pt, 1);
            const bool prop = proportionality_residual(lie[0], lie[1]) <= 1e-6;
            const bool w0 = std::abs(wuenschmann(F, pt)) <= 1e-9;
            agree += prop == w0;
            flat += w0;
            ++total;
        }
    }
    return {agree == total, std::to_string(agree) + "/" + std::to_string(total) + " points agree (" +
                                std::to_string(flat) + " with W = 0)"};
}

Outcome c4() {
    double worst = 0;
    for (const auto& e : kEquations) {
        const Expression F = Expression::parse(e.eq);
        const Trajectory t = Trajectory::integrate(F, e.P, e.lo, e.hi);
        for (int i = 0; i <= 20; ++i) {
            const double x = e.lo + (e.hi - e.lo) * i / 20;
            const double w = wuenschmann(F, t.point(x));
            worst = std::max(worst, std::abs(projective_curvature(t, x).oracle - 12 * w) / (1 + std::abs(w)));
        }
    }
    return {worst <= 1e-5, "max |curvature - 12 W|/(1+|W|) " + fmt("%.1e", worst)};
}

Outcome c5() {
    std::vector<double> ts;
    for (int i = 0; i < 12; ++i) ts.push_back(std::pow(10.0, -3.0 + 2.0 * i / 11));
    bool pass = true;
    std::string detail;
    std::vector<TestEquation> eqs(std::begin(kEquations), std::end(kEquations));
    eqs.push_back({"p+2*q", {0, {0.1, 0.2, 0.3}}, -1, 1});
    eqs.push_back({"y*q+sin(p)", {0, {0.1, -0.2, 0.3}}, -1, 1});
    for (const auto& e : eqs) {
        const double s = osculation_exponent(e.P.x0, ts, osculation_defect(Expression::parse(e.eq), e.P, ts));
        pass = pass && s >= 4.8;
        detail += std::string(detail.empty() ? "" : ", ") + e.eq + ": " + (std::isinf(s) ? "defect = 0" : fmt("%.3f", s));
    }
    return {pass, "slopes " + detail};
}

Outcome c6() {
    double dd = 0, wil = 0;
    for (const auto& e : kEquations) {
        const Trajectory t = Trajectory::integrate(Expression::parse(e.eq), e.P, e.lo, e.hi);
        std::vector<double> grid;
        for (int i = 0; i <= 20; ++i) grid.push_back(e.lo + (e.hi - e.lo) * i / 20);
        const auto polar = polar_curve(t, grid);
        const auto twice = dual_curve(dual_curve(polar));
        const AdjointSolutions adj = adjoint_solutions(t);
        const auto dual = dual_curve(polar);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            dd = std::max(dd, projective_distance(twice[i].v, polar[i].v));
            wil = std::max(wil, projective_distance(dual[i].v, adj(grid[i])[0]));
        }
    }
    return {dd <= 1e-6 && wil <= 1e-5, "dual o dual " + fmt("%.1e", dd) + ", Wilczynski " + fmt("%.1e", wil)};
}

struct RegularityStats {
    double cubic = 0, square = 0, flat_hessian = 0;
    int samples = 0;
};

RegularityStats regularity() {
    RegularityStats s;
    std::mt19937 rng(107);
    for (const auto& e : kEquations) {
        const Trajectory t = Trajectory::integrate(Expression::parse(e.eq), e.P, e.lo, e.hi);
        std::uniform_real_distribution<double> ux(e.lo + 0.05 * (e.hi - e.lo), e.hi - 0.05 * (e.hi - e.lo)), scale(0.5, 2);
        for (int i = 0; i < 50; ++i) {
            const double x = ux(rng);
            const TrajectorySample ts = t.sample(x);
            const RegularityCheck r = lagrangian_hessian(t, scale(rng) * ts.phi[0].cross(ts.phi[1]), x);
            s.cubic = std::max(s.cubic, r.relative_error_cubic);
            s.square = std::max(s.square, r.relative_error);
            ++s.samples;
        }
    }
    const Trajectory flat = Trajectory::integrate(Expression::parse("0"), {0, {0, 0, 0}}, -2, 2);
    Mat3 expect;
    expect << 0, 0, 1, 0, -1, 0, 1, 0, 0;
    s.flat_hessian = (lagrangian_hessian(flat, Vec3(1, std::sqrt(2.0), 1)).hessian - expect).norm();
    return s;
}

Outcome c7a(const RegularityStats& s) {
    return {s.cubic <= 1e-7 && s.flat_hessian <= 1e-10,
            "det Hess = -(det[A B C])^3: max rel. error " + fmt("%.2e", s.cubic) + " over " + std::to_string(s.samples) +
                " samples; flat Hessian error " + fmt("%.1e", s.flat_hessian)};
}

Outcome c7b(const RegularityStats& s) {
    return {s.square <= 1e-7 && s.flat_hessian <= 1e-10,
            "det Hess = (det[A B C])^2: max rel. error " + fmt("%.1e", s.square) + " over " + std::to_string(s.samples) +
                " samples; flat Hessian error " + fmt("%.1e", s.flat_hessian)};
}

Outcome c8() {
    double haus = 0, drift = 0;
    int endpoints = 0, total = 0;
    std::string failures;
    for (const auto& e : kEquations) {
        const double width = e.hi - e.lo;
        const TrajectoryFamily fam(Expression::parse(e.eq), e.P.x0, e.lo - 0.25 * width, e.hi + 0.25 * width);
        const Trajectory t = fam.at(e.P.vec());
        for (int k = 0; k < 10; ++k) {
            // Incidence abscissae on both sides of x0, away from it.
            const double frac = (k < 5 ? -1 : 1) * (0.25 + 0.15 * (k % 5));
            const double x = e.P.x0 + frac * 0.5 * width;
            const TrajectorySample s = t.sample(x);
            ++total;
            try {
                const GeodesicComparison c =
                    compare_geodesic_with_incidence(fam, e.P.vec(), s.phi[0].cross(s.phi[1]), 0.25 * width, 10);
                haus = std::max(haus, c.hausdorff);
                drift = std::max(drift, c.h_drift);
                endpoints += c.endpoint && std::abs(c.endpoint->x - c.x_inc) <= 1e-6 * (1 + std::abs(c.x_inc));
            } catch (const Error& err) {
                failures += std::string(" [") + e.eq + " #" + std::to_string(k) + ": " + err.what() + "]";
            }
        }
    }
    return {failures.empty() && haus <= 1e-5 && drift <= 1e-7 && endpoints == total,
            "max Hausdorff " + fmt("%.1e", haus) + ", max H drift " + fmt("%.1e", drift) + ", incident endpoints " +
                std::to_string(endpoints) + "/" + std::to_string(total) + failures};
}

Outcome c9() {
    bool pass = true;
    std::string detail;
    for (const char* src : {"0", "q"}) {
        const AxiomReport r = verify_axioms(Expression::parse(src), {0, {0, 1, 1}});
        pass = pass && r.all_pass();
        detail += std::string("F=") + src + (r.all_pass() ? " all pass; " : " FAILS; ");
    }
    AxiomOptions bad;
    bad.trajectory.corrupt_variational = true;
    const bool a5 = verify_axioms(Expression::parse("q"), {0, {0, 1, 1}}, bad).check(5).pass;
    pass = pass && !a5;
    detail += std::string("corrupted variational data: Axiom 5 ") + (a5 ? "passes" : "fails");
    return {pass, detail};
}

Outcome c10() {
    const Trajectory flat = Trajectory::integrate(Expression::parse("0"), {0, {0.1, 0.2, 0.3}}, -1, 1);
    const Trajectory q = Trajectory::integrate(Expression::parse("q"), {0, {0.1, 0.2, 0.3}}, -1, 1);
    const PipelineConicFamily ff(flat), fq(q);
    int rank1 = 0, rank5 = 0;
    double worst = 0;
    for (int i = 0; i < 20; ++i) {
        const double t0 = -0.9 + 1.8 * i / 19;
        rank1 += classify_rank(build_system(ff, t0)).rank == 1;
        const InverseReport r = analyze_family(fq, t0);
        rank5 += r.rank.rank == 5 && r.tag == InverseTag::RANK5_CAUSAL;
        worst = std::max(worst, r.point ? projective_distance(*r.point, q.sample(t0).phi[0]) : 1.0);
    }
    // Injected X = diag(1, 1, 0): a full-rank system whose null vector is X.
    Eigen::Matrix<double, 6, 6> basis = Eigen::Matrix<double, 6, 6>::Identity();
    basis.col(0) = vectorize(Mat3(Vec3(1, 1, 0).asDiagonal()));
    const Eigen::Matrix<double, 6, 6> qm = Eigen::HouseholderQR<Eigen::Matrix<double, 6, 6>>(basis).householderQ();
    const TraceSystem s = qm.rightCols<5>().transpose();
    const InverseReport injected = analyze_system(s, unvectorize(s.row(0).transpose()), unvectorize(s.row(1).transpose()));
    const Rank2Report r2 = rank2_analysis(Mat3(Vec3(1, -1, 1).asDiagonal()), Mat3(Vec3(1, 1, -1).asDiagonal()));
    const bool pencil = (r2.x - Vec3(0, 2, 2)).norm() == 0 && r2.points.size() == 2 &&
                        projective_distance(r2.points[0], Vec3(0, 1, 1)) <= 1e-15 &&
                        projective_distance(r2.points[1], Vec3(0, 1, -1)) <= 1e-15 && r2.trace_residual <= 1e-15;
    const bool inj = injected.tag == InverseTag::INCONSISTENT;
    return {rank1 == 20 && rank5 == 20 && worst <= 1e-6 && inj && pencil,
            "rank 1 (F=0) " + std::to_string(rank1) + "/20, rank 5 (F=q) " + std::to_string(rank5) +
                "/20, max recovery distance " + fmt("%.1e", worst) + ", injected X " + to_string(injected.tag) +
                ", pencil X = (0,2,2) " + (pencil ? "ok" : "wrong")};
}

Outcome c11() {
    std::vector<JetPoint> pts;
    for (int i = 0; i < 10; ++i) pts.push_back({0.1 * i - 0.5, 0.2, 0.5 + 0.1 * i, 0.3 - 0.05 * i});
    const auto q = theorem2_classify(chern_field(Expression::parse("q")), pts);
    const auto c = theorem2_classify(chern_field(Expression::parse("3*q^2/(2*p)")), pts);
    const auto g = theorem2_classify(perturbed_field(Expression::parse("q"), 0.1), pts);
    return {q.tag == MetricTag::NONZERO_WUENSCHMANN && c.tag == MetricTag::VANISHING_WUENSCHMANN &&
                g.tag == MetricTag::NOT_FROM_ODE,
            "F=q " + to_string(q.tag) + " (adj " + fmt("%.1e", q.adjugate) + "), circle " + to_string(c.tag) +
                " (prop " + fmt("%.1e", c.proportionality) + "), perturbed " + to_string(g.tag) + " (adj " +
                fmt("%.1e", g.adjugate) + ")"};
}

}  // namespace

int main() {
    int unexpected = 0;
    auto report = [&](const std::string& id, const std::string& name, const std::function<Outcome()>& f) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = f();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool known = kKnownDeviations.count(id) > 0;
        if (!o.pass && !known) ++unexpected;
        std::printf("%s %-3s %-34s %s%s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id.c_str(), name.c_str(), o.detail.c_str(),
                    !o.pass && known ? " [known deviation]" : "", secs);
        std::fflush(stdout);
    };
    report("1", "Wuenschmann values", c1);
    report("2", "Chern metric degeneracy", c2);
    report("3", "W = 0 iff L_V g ~ g", c3);
    report("4", "projective curvature = 12 W", c4);
    report("5", "osculation order", c5);
    report("6", "duality", c6);
    RegularityStats reg;
    std::string reg_error;
    try {
        reg = regularity();
    } catch (const std::exception& e) {
        reg_error = e.what();
    }
    auto checked = [&](Outcome (*f)(const RegularityStats&)) {
        return [&, f] { return reg_error.empty() ? f(reg) : Outcome{false, "exception: " + reg_error}; };
    };
    report("7a", "regularity identity (cube form)", checked(c7a));
    report("7b", "regularity identity (square form)", checked(c7b));
    report("8", "null geodesics = incidence curves", c8);
    report("9", "causal axioms", c9);
    report("10", "inverse dichotomy and round trip", c10);
    report("11", "Gamma classifier", c11);
    std::printf("%s: %d unexpected failure(s)\n", unexpected ? "FAILED" : "OK", unexpected);
    return unexpected ? 1 : 0;
}
