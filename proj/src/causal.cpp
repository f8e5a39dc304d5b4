#include "wkit/causal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wkit/errors.hpp"
#include "wkit/projective.hpp"

namespace wkit {
namespace {

constexpr int kScan = 48;

ProjectiveCurveSample make_sample(double t, std::vector<Vec3> jet) {
    if (jet.empty() || !(jet[0].norm() > 0)) throw DegenerateError("zero homogeneous vector");
    return {t, canonical(jet[0]), std::move(jet)};
}

// Safeguarded Newton for g on [lo, hi] with g(lo), g(hi) of opposite sign.
template <class G>
double bracketed_root(const G& g, double lo, double hi, double glo) {
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 100; ++it) {
        const auto [v, dv] = g(x);
        if (v == 0) return x;
        if ((v < 0) == (glo < 0)) {
            lo = x;
            glo = v;
        } else {
            hi = x;
        }
        double next = dv != 0 ? x - v / dv : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) <= 1e-15 * (1 + std::abs(x)) || hi - lo <= 1e-15 * (1 + std::abs(x))) return next;
        x = next;
    }
    return x;
}

// Roots of g on [lo, hi]: sign changes and exact zeros on a uniform grid,
// polished by bracketed Newton; grid points where |g| is tiny are polished
// by plain Newton (tangential roots). Returns roots sorted ascending.
template <class G>
std::vector<double> scan_roots(const G& g, double lo, double hi, int n, double zero_tol) {
    std::vector<double> xs(n + 1), vs(n + 1), ds(n + 1);
    for (int i = 0; i <= n; ++i) {
        xs[i] = lo + (hi - lo) * i / n;
        const auto [v, dv] = g(xs[i]);
        vs[i] = v;
        ds[i] = dv;
    }
    std::vector<double> roots;
    for (int i = 0; i < n; ++i) {
        if (vs[i] == 0) roots.push_back(xs[i]);
        else if ((vs[i] < 0) != (vs[i + 1] < 0) && vs[i + 1] != 0)
            roots.push_back(bracketed_root(g, xs[i], xs[i + 1], vs[i]));
    }
    if (vs[n] == 0) roots.push_back(xs[n]);
    // Near-zero local minima of |g| without a sign change.
    for (int i = 1; i < n; ++i) {
        if (std::abs(vs[i]) > zero_tol) continue;
        if (std::abs(vs[i]) > std::abs(vs[i - 1]) || std::abs(vs[i]) > std::abs(vs[i + 1])) continue;
        double x = xs[i];
        for (int it = 0; it < 30; ++it) {
            const auto [v, dv] = g(x);
            if (dv == 0) break;
            const double step = v / dv;
            x -= step;
            if (x < lo || x > hi) break;
            if (std::abs(step) <= 1e-15 * (1 + std::abs(x))) break;
        }
        if (x >= lo && x <= hi) roots.push_back(x);
    }
    std::sort(roots.begin(), roots.end());
    std::vector<double> unique;
    for (double r : roots)
        if (unique.empty() || std::abs(r - unique.back()) > 1e-9 * (1 + std::abs(r))) unique.push_back(r);
    return unique;
}

double binormal_det(const Vec3& a, const Vec3& b, const Vec3& c) {
    Mat3 m;
    m << a, b, c;
    return m.determinant();
}

}  // namespace

std::vector<ProjectiveCurveSample> polar_curve(const Trajectory& traj, const std::vector<double>& grid) {
    std::vector<ProjectiveCurveSample> out;
    out.reserve(grid.size());
    for (double x : grid) {
        const TrajectorySample s = traj.sample(x);
        Mat3 e = frame(s);
        if (!(std::abs(e.determinant()) > 1e-12 * e.colwise().norm().prod()))
            throw DegenerateError("singular Wronskian on the polar curve at x = " + std::to_string(x));
        out.push_back(make_sample(x, {s.phi.begin(), s.phi.end()}));
    }
    return out;
}

std::vector<ProjectiveCurveSample> dual_curve(const std::vector<ProjectiveCurveSample>& samples) {
    std::vector<ProjectiveCurveSample> out;
    out.reserve(samples.size());
    for (const auto& s : samples) {
        const auto& g = s.jet;
        if (g.size() < 2) throw std::invalid_argument("dual_curve needs first derivatives");
        std::vector<Vec3> d{g[0].cross(g[1])};
        if (!(d[0].norm() > 1e-12 * g[0].norm() * g[1].norm()))
            throw DegenerateError("gamma and gamma' are dependent at t = " + std::to_string(s.t));
        if (g.size() >= 3) d.push_back(g[0].cross(g[2]));
        if (g.size() >= 4) d.push_back(g[1].cross(g[2]) + g[0].cross(g[3]));
        out.push_back(make_sample(s.t, std::move(d)));
    }
    return out;
}

std::vector<ProjectiveCurveSample> indicatrix(const Trajectory& traj, const std::vector<double>& grid) {
    return dual_curve(polar_curve(traj, grid));
}

LagrangianValue lagrangian(const Trajectory& traj, const Vec3& qdot, std::optional<double> hint) {
    const double lo = traj.lower(), hi = traj.upper();
    auto g = [&](double x) {
        const TrajectorySample s = traj.sample(x);
        return std::pair{qdot.dot(s.phi[1]), qdot.dot(s.phi[2])};
    };
    std::optional<double> root;
    if (hint && *hint >= lo && *hint <= hi) {
        double x = *hint;
        for (int it = 0; it < 40; ++it) {
            const auto [v, dv] = g(x);
            if (dv == 0) break;
            const double step = v / dv;
            x -= step;
            if (x < lo || x > hi) break;
            if (std::abs(step) <= 1e-14 * (1 + std::abs(x))) {
                root = x;
                break;
            }
        }
    }
    if (!root) {
        const auto roots = scan_roots(g, lo, hi, kScan, 0.0);
        if (roots.empty()) throw DegenerateError("outside cone chart: qdot . phi'(x) has no root in the interval");
        const double target = hint.value_or(traj.params().x0);
        root = *std::min_element(roots.begin(), roots.end(), [&](double a, double b) {
            return std::abs(a - target) < std::abs(b - target);
        });
    }
    const TrajectorySample s = traj.sample(*root);
    LagrangianValue out;
    out.x_star = *root;
    out.a = qdot.dot(s.phi[0]);
    out.b = qdot.dot(s.phi[2]);
    if (!(std::abs(out.b) > 1e-12 * qdot.norm() * s.phi[2].norm()))
        throw DegenerateError("outside cone chart: qdot . phi''(x*) vanishes");
    out.L = out.a * out.b;
    return out;
}

LagrangianDerivatives lagrangian_derivatives(const Trajectory& traj, const Vec3& qdot, std::optional<double> hint) {
    LagrangianDerivatives out;
    out.value = lagrangian(traj, qdot, hint);
    const auto phi = traj.phi_jet(out.value.x_star, 4);
    const double a = out.value.a, g2 = out.value.b;
    const double g3 = qdot.dot(phi[3]), g4 = qdot.dot(phi[4]);
    const Vec3 xi = -phi[1] / g2;
    out.gradient = phi[0] * g2 + a * (phi[2] + g3 * xi);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const double xij = -(phi[2][i] * xi[j] + phi[2][j] * xi[i] + g3 * xi[i] * xi[j]) / g2;
            out.hessian(i, j) = -phi[1][i] * phi[1][j] + phi[0][i] * phi[2][j] + phi[0][j] * phi[2][i] +
                                g3 * (phi[0][i] * xi[j] + phi[0][j] * xi[i]) +
                                a * (phi[3][i] * xi[j] + phi[3][j] * xi[i] + g4 * xi[i] * xi[j] + g3 * xij);
        }
    return out;
}

RegularityCheck lagrangian_hessian(const Trajectory& traj, const Vec3& qdot, std::optional<double> hint,
                                   double cone_tol) {
    const LagrangianDerivatives d = lagrangian_derivatives(traj, qdot, hint);
    const auto phi = traj.phi_jet(d.value.x_star, 3);
    const double scale = qdot.squaredNorm() * phi[0].norm() * phi[2].norm();
    if (std::abs(d.value.L) > cone_tol * scale)
        throw DegenerateError("direction is off the null cone (|L| = " + std::to_string(std::abs(d.value.L)) + ")");
    RegularityCheck out;
    out.hessian = d.hessian;
    out.A = phi[1];
    out.B = phi[0];
    out.C = phi[2] - (qdot.dot(phi[3]) / d.value.b) * phi[1];
    out.det_hessian = d.hessian.determinant();
    out.det_abc = binormal_det(out.A, out.B, out.C);
    const double square = out.det_abc * out.det_abc;
    const double cubic = -out.det_abc * out.det_abc * out.det_abc;
    out.relative_error = std::abs(out.det_hessian - square) / std::abs(square);
    out.relative_error_cubic = std::abs(out.det_hessian - cubic) / std::abs(cubic);
    const Mat3 structure = -out.A * out.A.transpose() + out.B * out.C.transpose() + out.C * out.B.transpose();
    out.structure_error = (d.hessian - structure).norm() / d.hessian.norm();
    return out;
}

std::optional<IncidencePoint> incidence_solve(const Trajectory& P, const Trajectory& Q, double lower, double upper,
                                              int grid) {
    lower = std::max({lower, P.lower(), Q.lower()});
    upper = std::min({upper, P.upper(), Q.upper()});
    if (!(lower < upper)) throw std::invalid_argument("incidence_solve: empty common interval");
    auto dfx = [&](double x) {
        const JetPoint a = P.point(x), b = Q.point(x);
        return std::pair{a.p - b.p, a.q - b.q};
    };
    double scale = 0;
    for (int i = 0; i <= 8; ++i) {
        const JetPoint a = P.point(lower + (upper - lower) * i / 8);
        scale = std::max({scale, std::abs(a.p), std::abs(a.q)});
    }
    const auto roots = scan_roots(dfx, lower, upper, grid, 1e-3 * (1 + scale));
    std::optional<IncidencePoint> best;
    for (double x : roots) {
        const JetPoint a = P.point(x), b = Q.point(x);
        IncidencePoint ip{x, a.y, a.p, std::abs(a.y - b.y), std::abs(a.p - b.p)};
        if (ip.df > 1e-8 * (1 + std::abs(a.y)) || ip.dfx > 1e-8 * (1 + std::abs(a.p))) continue;
        if (!best || ip.df + ip.dfx < best->df + best->dfx) best = ip;
    }
    return best;
}

std::optional<IncidencePoint> incidence_solve(const Expression& F, const SolutionParams& P, const SolutionParams& Q,
                                              double lower, double upper, Tolerances tol) {
    TrajectoryOptions opt;
    opt.tol = tol;
    const Trajectory tp = Trajectory::integrate(F, P, std::min(lower, P.x0), std::max(upper, P.x0), opt);
    const Trajectory tq = Trajectory::integrate(F, Q, std::min(lower, Q.x0), std::max(upper, Q.x0), opt);
    return incidence_solve(tp, tq, lower, upper);
}

namespace {

System base_system(const Expression& F) {
    return [F](const State& s, State& ds, double x) {
        ds[0] = s[1];
        ds[1] = s[2];
        ds[2] = F.evaluate(JetPoint{x, s[0], s[1], s[2]});
    };
}

}  // namespace

std::vector<IncidenceCurveSample> incidence_curve(const Trajectory& P, double x_inc, const std::vector<double>& s_grid) {
    const JetPoint c = P.point(x_inc);
    const System sys = base_system(P.equation());
    std::vector<IncidenceCurveSample> out;
    for (double s : s_grid) {
        IncidenceCurveSample smp;
        smp.s = s;
        try {
            const State r = integrate_to(sys, State{c.y, c.p, s}, x_inc, P.params().x0, P.options().tol);
            smp.R = Vec3(r[0], r[1], r[2]);
        } catch (const Error& e) {
            smp.error = e.what();
        }
        out.push_back(std::move(smp));
    }
    return out;
}

std::vector<IncidenceCurveSample> incidence_curve(const Expression& F, const SolutionParams& P, double x_inc,
                                                  const std::vector<double>& s_grid, Tolerances tol) {
    TrajectoryOptions opt;
    opt.tol = tol;
    const Trajectory t = Trajectory::integrate(F, P, std::min(P.x0, x_inc), std::max(P.x0, x_inc), opt);
    return incidence_curve(t, x_inc, s_grid);
}

Vec3 transport_jet(const Expression& F, double x, const Vec3& jet, double x1, int steps) {
    if (x == x1) return jet;
    const State r = integrate_fixed(base_system(F), State{jet[0], jet[1], jet[2]}, x, x1, steps);
    for (double v : r)
        if (!std::isfinite(v)) throw IntegrationError("solution blew up", x1);
    return {r[0], r[1], r[2]};
}

bool AxiomReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const AxiomCheck& c) { return c.pass; });
}

const AxiomCheck& AxiomReport::check(int axiom) const {
    for (const auto& c : checks)
        if (c.axiom == axiom) return c;
    throw std::out_of_range("no check for axiom " + std::to_string(axiom));
}

namespace {

// The cone N_V of the solution V (chart coordinates at x0) parameterized by
// the incidence abscissa x and the free second derivative s there.
struct ConeSurface {
    Expression F;
    double x0;
    Vec3 vertex;

    Vec3 operator()(double x, double s) const {
        const Vec3 c = transport_jet(F, x0, vertex, x);
        return transport_jet(F, x, Vec3(c[0], c[1], s), x0);
    }

    double second_derivative(double x) const { return transport_jet(F, x0, vertex, x)[2]; }

    // Columns d/dx, d/ds by Richardson-extrapolated central differences.
    Eigen::Matrix<double, 3, 2> jacobian(double x, double s) const {
        auto diff = [&](double h, int var) {
            if (var == 0) return Vec3((operator()(x + h, s) - operator()(x - h, s)) / (2 * h));
            return Vec3((operator()(x, s + h) - operator()(x, s - h)) / (2 * h));
        };
        Eigen::Matrix<double, 3, 2> j;
        for (int var = 0; var < 2; ++var) {
            const double h = 1e-3;
            j.col(var) = (4 * diff(h / 2, var) - diff(h, var)) / 3;
        }
        return j;
    }
};

double smallest_singular_ratio(const Eigen::Matrix<double, 3, 2>& j) {
    Eigen::JacobiSVD<Eigen::Matrix<double, 3, 2>> svd(j);
    const auto s = svd.singularValues();
    return s[0] > 0 ? s[1] / s[0] : 0.0;
}

}  // namespace

AxiomReport verify_axioms(const Expression& F, const SolutionParams& P, const AxiomOptions& options) {
    const double x0 = P.x0;
    const double lower = std::min(options.lower, x0), upper = std::max(options.upper, x0);
    const Trajectory tp = Trajectory::integrate(F, P, lower, upper, options.trajectory);
    const ConeSurface np{F, x0, P.vec()};

    std::vector<double> xs;
    const int n = std::max(1, options.samples);
    for (int i = 0; i < n; ++i) {
        double frac = -0.7 + 1.4 * (i + 0.5) / n;
        if (std::abs(frac) < 0.1) frac = 0.1;
        xs.push_back(x0 + frac * (frac < 0 ? x0 - lower : upper - x0));
    }
    const double delta = 0.5;

    AxiomCheck a1{1, true, std::numeric_limits<double>::infinity(), 1e-6, ""};
    AxiomCheck a2{2, true, 0.0, 1e-8, ""};
    AxiomCheck a3{3, true, 0.0, 1e-6, ""};
    AxiomCheck a4{4, true, std::numeric_limits<double>::infinity(), 1e-8, ""};
    AxiomCheck a5{5, true, 0.0, 1e-6, ""};

    for (double x : xs) {
      try {
        const double s0 = np.second_derivative(x);
        // 1: N_P \ {P} is a smooth surface: the (x, s) parameterization has rank 2.
        for (double s : {s0 - delta, s0 + delta}) {
            const double r = smallest_singular_ratio(np.jacobian(x, s));
            a1.residual = std::min(a1.residual, r);
        }
        // 2: each ruling passes through P with a nonvanishing tangent.
        a2.residual = std::max(a2.residual, (np(x, s0) - P.vec()).norm() / (1 + P.vec().norm()));
        const double tangent = np.jacobian(x, s0 + delta).col(1).norm();
        if (!(tangent > 1e-8)) {
            a2.pass = false;
            a2.detail = "degenerate ruling tangent at x = " + std::to_string(x);
        }

        // 3: N_PQ = N_QP, re-solving the incidence from Q.
        const Vec3 q = np(x, s0 + delta);
        const Trajectory tq = Trajectory::integrate(F, SolutionParams::from(x0, q), lower, upper, options.trajectory);
        const auto inc = incidence_solve(tq, tp, lower, upper);
        if (!inc) {
            a3.pass = false;
            a3.residual = std::numeric_limits<double>::infinity();
            a3.detail = "no incidence found from Q for x = " + std::to_string(x);
        } else {
            double r = std::abs(inc->x - x);
            const std::vector<double> ss{s0 - delta, s0, s0 + delta / 2, s0 + 2 * delta};
            const auto from_p = incidence_curve(tp, x, ss);
            const auto from_q = incidence_curve(tq, inc->x, ss);
            for (std::size_t k = 0; k < ss.size(); ++k) {
                if (!from_p[k].R || !from_q[k].R) {
                    r = std::numeric_limits<double>::infinity();
                    continue;
                }
                r = std::max(r, (*from_p[k].R - *from_q[k].R).norm() / (1 + from_p[k].R->norm()));
            }
            a3.residual = std::max(a3.residual, r);
        }

        // 5: for Q, R on N_PQ (mutually incident at x), T_R N_P = T_R N_Q, and
        // both are the annihilator of d_R f(x; R).
        const double sr = s0 - delta;
        const Vec3 r = np(x, sr);
        const ConeSurface nq{F, x0, q};
        const Eigen::Matrix<double, 3, 2> jp = np.jacobian(x, sr);
        const Eigen::Matrix<double, 3, 2> jq = nq.jacobian(x, sr);
        const Vec3 normal_p = jp.col(0).cross(jp.col(1));
        const Vec3 normal_q = jq.col(0).cross(jq.col(1));
        const Trajectory tr = Trajectory::integrate(F, SolutionParams::from(x0, r), lower, upper, options.trajectory);
        const Vec3 drf = tr.sample(x).phi[0];
        const double res = std::max({projective_distance(normal_p, normal_q), projective_distance(normal_p, drf),
                                     projective_distance(normal_q, drf)});
        a5.residual = std::max(a5.residual, res);
      } catch (const Error& e) {
        for (AxiomCheck* c : {&a1, &a2, &a3, &a5}) {
            c->pass = false;
            c->detail = std::string("sample x = ") + std::to_string(x) + ": " + e.what();
        }
      }
    }
    a1.pass = a1.pass && a1.residual > a1.tolerance;
    if (a1.detail.empty()) a1.detail = "min sigma2/sigma1 of the cone parameterization";
    a2.pass = a2.pass && a2.residual <= a2.tolerance;
    if (a2.detail.empty()) a2.detail = "rulings pass through P with nonzero tangent";
    a3.pass = a3.pass && a3.residual <= a3.tolerance;
    if (a3.detail.empty()) a3.detail = "max distance between N_PQ and N_QP samples";

    // 4: the indicatrix has no inflections: det(gamma, gamma', gamma'') != 0.
    std::vector<double> grid;
    for (int i = 0; i <= 20; ++i) grid.push_back(lower + (upper - lower) * i / 20);
    try {
        for (const auto& smp : indicatrix(tp, grid)) {
            const auto& g = smp.jet;
            const double r = std::abs(binormal_det(g[0], g[1], g[2])) / (g[0].norm() * g[1].norm() * g[2].norm());
            a4.residual = std::min(a4.residual, r);
        }
        a4.pass = a4.residual > a4.tolerance;
        a4.detail = "min |det(gamma, gamma', gamma'')| / (|gamma| |gamma'| |gamma''|)";
    } catch (const Error& e) {
        a4.pass = false;
        a4.residual = 0;
        a4.detail = e.what();
    }

    a5.pass = a5.pass && a5.residual <= a5.tolerance;
    if (a5.detail.empty()) a5.detail = "max projective distance between normals of N_P, N_Q and d_R f at R";
    return AxiomReport{{a1, a2, a3, a4, a5}};
}

}  // namespace wkit
