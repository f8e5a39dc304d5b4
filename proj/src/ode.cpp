#include "wkit/ode.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "wkit/errors.hpp"

namespace wkit {
namespace {

constexpr int kBase = 3;
constexpr int kPhi = 9;
constexpr int kPsi = 18;
constexpr std::array<std::array<int, 2>, 6> kPairs{{{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}}};

int pair_index(int i, int j) {
    if (i > j) std::swap(i, j);
    for (int k = 0; k < 6; ++k)
        if (kPairs[k][0] == i && kPairs[k][1] == j) return k;
    return -1;
}

double binomial(int n, int k) {
    double r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

System solution_system(const Expression& F, bool second) {
    return [F, second](const State& s, State& ds, double x) {
        const JetPoint pt{x, s[0], s[1], s[2]};
        const Jet f = F.evaluate(coordinate_jets(pt, second ? 2 : 1));
        const double fy = f.partial(0, 1, 0, 0), fp = f.partial(0, 0, 1, 0), fq = f.partial(0, 0, 0, 1);
        ds[0] = s[1];
        ds[1] = s[2];
        ds[2] = f.value();
        for (int i = 0; i < 3; ++i) {
            const double* d = &s[kBase + 3 * i];
            double* dd = &ds[kBase + 3 * i];
            dd[0] = d[1];
            dd[1] = d[2];
            dd[2] = fy * d[0] + fp * d[1] + fq * d[2];
        }
        if (!second) return;
        double hess[3][3];
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                MultiIndex m{0, 0, 0, 0};
                ++m[a + 1];
                ++m[b + 1];
                hess[a][b] = f.partial(m);
            }
        for (int k = 0; k < 6; ++k) {
            const double* di = &s[kBase + 3 * kPairs[k][0]];
            const double* dj = &s[kBase + 3 * kPairs[k][1]];
            const double* d = &s[kBase + kPhi + 3 * k];
            double* dd = &ds[kBase + kPhi + 3 * k];
            double forcing = 0;
            for (int a = 0; a < 3; ++a)
                for (int b = 0; b < 3; ++b) forcing += hess[a][b] * di[a] * dj[b];
            dd[0] = d[1];
            dd[1] = d[2];
            dd[2] = fy * d[0] + fp * d[1] + fq * d[2] + forcing;
        }
    };
}

}  // namespace

Trajectory Trajectory::integrate(const Expression& F, const SolutionParams& P, double lower, double upper,
                                 const TrajectoryOptions& options) {
    if (!(lower <= P.x0 && P.x0 <= upper)) throw std::invalid_argument("interval must contain the base abscissa x0");
    Trajectory t;
    t.F_ = F;
    t.P_ = P;
    t.opt_ = options;
    State y0(kBase + kPhi + (options.second_variation ? kPsi : 0), 0.0);
    for (int i = 0; i < 3; ++i) {
        y0[i] = P.P[i];
        y0[kBase + 3 * i + i] = 1.0;
    }
    t.sol_ = DenseSolution::integrate(solution_system(F, options.second_variation), y0, P.x0, lower, upper,
                                      options.tol);
    return t;
}

JetPoint Trajectory::point(double x) const {
    const State s = sol_(x);
    return {x, s[0], s[1], s[2]};
}

TrajectorySample Trajectory::sample(double x) const {
    const State s = sol_(x);
    TrajectorySample out;
    out.x = x;
    out.point = {x, s[0], s[1], s[2]};
    const Jet f = F_.evaluate(coordinate_jets(out.point, 1));
    out.h = Vec3(f.partial(0, 1, 0, 0), f.partial(0, 0, 1, 0), f.partial(0, 0, 0, 1));
    for (int d = 0; d < 3; ++d)
        for (int i = 0; i < 3; ++i) out.phi[d][i] = s[kBase + 3 * i + d];
    if (opt_.corrupt_variational)
        for (int d = 0; d < 3; ++d) out.phi[d][0] = -out.phi[d][0];
    out.phi[3] = out.h[0] * out.phi[0] + out.h[1] * out.phi[1] + out.h[2] * out.phi[2];
    for (auto& m : out.psi) m.setZero();
    if (opt_.second_variation)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int d = 0; d < 3; ++d) out.psi[d](i, j) = s[kBase + kPhi + 3 * pair_index(i, j) + d];
    return out;
}

std::vector<Vec3> Trajectory::phi_jet(double x, int order) const {
    const TrajectorySample s = sample(x);
    if (order <= 3) return {s.phi.begin(), s.phi.begin() + order + 1};
    return phi_recurrence(s.phi[0], s.phi[1], s.phi[2], h_jets(F_, s.point, order - 3), order);
}

Eigen::Matrix<double, 3, Eigen::Dynamic> h_jets(const Expression& F, const JetPoint& pt, int kmax) {
    if (kmax < 0 || kmax + 1 > kMaxJetOrder) throw std::out_of_range("h_jets: derivative order out of range");
    const Jet f = F.evaluate(coordinate_jets(pt, kmax + 1));
    Eigen::Matrix<double, 3, Eigen::Dynamic> h(3, kmax + 1);
    for (int i = 0; i < 3; ++i) {
        Jet g = f.derivative(i + 1);
        h(i, 0) = g.value();
        for (int k = 1; k <= kmax; ++k) {
            g = total_derivative(g, f, pt);
            h(i, k) = g.value();
        }
    }
    return h;
}

std::vector<double> solution_jet(const Expression& F, const JetPoint& pt, int order) {
    std::vector<double> out{pt.y, pt.p, pt.q};
    if (order < 3) {
        out.resize(order + 1);
        return out;
    }
    const Jet f = F.evaluate(coordinate_jets(pt, order - 3));
    Jet g = f;
    out.push_back(g.value());
    for (int k = 4; k <= order; ++k) {
        g = total_derivative(g, f, pt);
        out.push_back(g.value());
    }
    return out;
}

std::vector<Vec3> phi_recurrence(const Vec3& phi0, const Vec3& phi1, const Vec3& phi2,
                                 const Eigen::Matrix<double, 3, Eigen::Dynamic>& h, int order) {
    std::vector<Vec3> phi{phi0, phi1, phi2};
    for (int n = 3; n <= order; ++n) {
        const int m = n - 3;
        if (h.cols() <= m) throw std::invalid_argument("phi_recurrence: not enough h derivatives");
        Vec3 acc = Vec3::Zero();
        for (int k = 0; k <= m; ++k) {
            const double c = binomial(m, k);
            acc += c * (h(0, k) * phi[m - k] + h(1, k) * phi[m - k + 1] + h(2, k) * phi[m - k + 2]);
        }
        phi.push_back(acc);
    }
    phi.resize(order + 1);
    return phi;
}

Mat3 frame(const TrajectorySample& s) {
    Mat3 e;
    e << s.phi[0], s.phi[1], s.phi[2];
    return e;
}

double wronskian(const Trajectory& traj, double x) { return frame(traj.sample(x)).determinant(); }

LinearizedCoefficients linearized_coefficients(const Trajectory& traj, double x) {
    const TrajectorySample s = traj.sample(x);
    const Mat3 w = frame(s);  // rows i: (phi_i, phi_i', phi_i'')
    const double det = w.determinant();
    const double scale = w.cwiseAbs().maxCoeff();
    if (std::abs(det) <= 1e-12 * scale * scale * scale) throw DegenerateError("singular Wronskian");
    LinearizedCoefficients out;
    for (int c = 0; c < 3; ++c) {
        Mat3 wc = w;
        wc.col(c) = s.phi[3];
        out.h[c] = wc.determinant() / det;
    }
    out.direct = s.h;
    out.discrepancy = (out.h - out.direct).norm() / (1.0 + out.direct.norm());
    return out;
}

std::array<Vec3, 3> AdjointSolutions::operator()(double x) const {
    const State s = sol_(x);
    std::array<Vec3, 3> z;
    for (int d = 0; d < 3; ++d)
        for (int i = 0; i < 3; ++i) z[d][i] = s[kBase + 3 * i + d];
    return z;
}

AdjointSolutions adjoint_solutions(const Trajectory& traj) {
    const Expression F = traj.equation();
    const System sys = [F](const State& s, State& ds, double x) {
        const JetPoint pt{x, s[0], s[1], s[2]};
        const auto h = h_jets(F, pt, 2);
        ds[0] = s[1];
        ds[1] = s[2];
        ds[2] = F.evaluate(pt);
        const double c0 = -(h(0, 0) - h(1, 1) + h(2, 2));
        const double c1 = h(1, 0) - 2 * h(2, 1);
        const double c2 = -h(2, 0);
        for (int i = 0; i < 3; ++i) {
            const double* z = &s[kBase + 3 * i];
            double* dz = &ds[kBase + 3 * i];
            dz[0] = z[1];
            dz[1] = z[2];
            dz[2] = c0 * z[0] + c1 * z[1] + c2 * z[2];
        }
    };
    const SolutionParams& P = traj.params();
    const JetPoint pt0{P.x0, P.P[0], P.P[1], P.P[2]};
    const auto h = h_jets(F, pt0, 1);
    // (phi x phi')/W and its derivatives at x0, where the frame is the identity.
    const Vec3 z0(0, 0, 1);
    const Vec3 z1(0, -1, -h(2, 0));
    const Vec3 z2(1, h(2, 0), h(1, 0) + h(2, 0) * h(2, 0) - h(2, 1));
    State y0(kBase + kPhi);
    for (int i = 0; i < 3; ++i) {
        y0[i] = P.P[i];
        y0[kBase + 3 * i] = z0[i];
        y0[kBase + 3 * i + 1] = z1[i];
        y0[kBase + 3 * i + 2] = z2[i];
    }
    AdjointSolutions a;
    a.sol_ = DenseSolution::integrate(sys, y0, P.x0, traj.lower(), traj.upper(), traj.options().tol);
    return a;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const std::vector<double>& grid) {
    out << "x,f,f_x,f_xx";
    for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 3; ++j) out << ",phi" << i << j;
    out << '\n';
    out.precision(17);
    for (double x : grid) {
        const TrajectorySample s = traj.sample(x);
        out << x << ',' << s.point.y << ',' << s.point.p << ',' << s.point.q;
        for (int i = 0; i < 3; ++i)
            for (int d = 0; d < 3; ++d) out << ',' << s.phi[d][i];
        out << '\n';
    }
}

}  // namespace wkit
