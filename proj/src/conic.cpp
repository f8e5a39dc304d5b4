#include "wkit/conic.hpp"

#include <cmath>
#include <limits>

#include "wkit/errors.hpp"
#include "wkit/projective.hpp"

namespace wkit {
namespace {

using Row6 = Eigen::Matrix<double, 1, 6>;

// Coefficients of x^T A y in the unknowns (a11, a22, a33, a12, a13, a23).
Row6 bilinear_row(const Vec3& x, const Vec3& y) {
    Row6 r;
    r << x[0] * y[0], x[1] * y[1], x[2] * y[2], x[0] * y[1] + x[1] * y[0], x[0] * y[2] + x[2] * y[0],
        x[1] * y[2] + x[2] * y[1];
    return r;
}

double binomial(int n, int k) {
    double r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

Mat3 unpack(const Eigen::Matrix<double, 6, 1>& u) {
    Mat3 a;
    a << u[0], u[3], u[4], u[3], u[1], u[5], u[4], u[5], u[2];
    return a;
}

void require_regular(const Mat3& e) {
    const double scale = e.colwise().norm().prod();
    if (!(std::abs(e.determinant()) > 1e-12 * scale)) throw DegenerateError("degenerate curve: det(phi, phi', phi'') = 0");
}

}  // namespace

Mat3 basis_conic(double h1, double h2, double h2p) {
    Mat3 b;
    b << 0, 0, 1, 0, -1, -h2 / 3, 1, -h2 / 3, (h2 * h2 - 3 * h2p + 9 * h1) / 9;
    return b;
}

OsculatingConic osculating_conic(const std::array<Vec3, 5>& phi) {
    Mat3 e;
    e << phi[0], phi[1], phi[2];
    require_regular(e);

    Eigen::Matrix<double, 6, 6> m;
    Eigen::Matrix<double, 6, 1> rhs = Eigen::Matrix<double, 6, 1>::Zero();
    for (int k = 0; k <= 4; ++k) {
        Row6 r = Row6::Zero();
        for (int j = 0; j <= k; ++j) r += binomial(k, j) * bilinear_row(phi[j], phi[k - j]);
        m.row(k) = r;
    }
    m.row(5) = bilinear_row(phi[0], phi[2]);
    rhs[5] = 1.0;
    // det(phi, phi', phi'') != 0 makes the system regular, but it can be
    // badly conditioned; one refinement step keeps the residual at rounding.
    Eigen::FullPivLU<Eigen::Matrix<double, 6, 6>> lu(m);
    Eigen::Matrix<double, 6, 1> u = lu.solve(rhs);
    u += lu.solve(rhs - m * u);
    if (!u.allFinite()) throw DegenerateError("osculating conic system is singular");

    OsculatingConic out;
    out.conic = {unpack(u), true};
    const Eigen::Matrix<double, 6, 1> r = m * u - rhs;
    for (int k = 0; k < 6; ++k)
        out.residual = std::max(out.residual, std::abs(r[k]) / (m.row(k).norm() * u.norm() + std::abs(rhs[k])));

    Eigen::PartialPivLU<Mat3> elu(e);
    const Vec3 c = elu.solve(phi[3]);
    const Vec3 d = elu.solve(phi[4] - c[2] * phi[3]);
    out.h1 = c[1];
    out.h2 = c[2];
    out.h2p = d[2] - c[1];
    out.basis_form = basis_conic(out.h1, out.h2, out.h2p);
    out.closed_form = conic_to_ambient(out.basis_form, e);
    out.agreement = projective_distance(out.conic.A, out.closed_form);
    return out;
}

double conic_defect_derivative(const Mat3& A, const std::vector<Vec3>& phi, int k) {
    double s = 0;
    for (int j = 0; j <= k; ++j) s += binomial(k, j) * phi[j].dot(A * phi[k - j]);
    return s;
}

ProjectiveCurvature projective_curvature(const Vec3& phi0, const Vec3& phi1, const Vec3& phi2,
                                         const Eigen::Matrix<double, 3, Eigen::Dynamic>& h) {
    if (h.cols() < 3) throw std::invalid_argument("projective_curvature needs h derivatives through order 2");
    Mat3 e;
    e << phi0, phi1, phi2;
    require_regular(e);
    const double h0 = h(0, 0), h1 = h(1, 0), h2 = h(2, 0);
    const double h1p = h(1, 1), h2p = h(2, 1), h2pp = h(2, 2);
    ProjectiveCurvature out;
    const double common = 12 * h0 + 8.0 / 9.0 * h2 * h2 * h2 - 6 * h1p - 4 * h2 * h2p + 2 * h2pp;
    out.printed = common + 4 * h1;
    out.expanded = common + 4 * h1 * h2;
    const Mat3 A = conic_to_ambient(basis_conic(h1, h2, h2p), e);
    out.oracle = conic_defect_derivative(A, phi_recurrence(phi0, phi1, phi2, h, 5), 5);
    return out;
}

ProjectiveCurvature projective_curvature(const Trajectory& traj, double x) {
    const TrajectorySample s = traj.sample(x);
    return projective_curvature(s.phi[0], s.phi[1], s.phi[2], h_jets(traj.equation(), s.point, 2));
}

Mat3 conic_to_ambient(const Mat3& basis_form, const Mat3& frame) {
    require_regular(frame);
    const Mat3 n = frame.inverse();
    Mat3 a = n.transpose() * basis_form * n;
    return (a + a.transpose()) / 2;
}

Mat3 cometric_on_solution_space(const Trajectory& traj, double x) {
    const TrajectorySample s = traj.sample(x);
    const auto h = h_jets(traj.equation(), s.point, 1);
    return conic_to_ambient(basis_conic(h(1, 0), h(2, 0), h(2, 1)), frame(s));
}

Mat4 pullback_metric(const Trajectory& traj, double x) {
    const TrajectorySample s = traj.sample(x);
    const JetPoint& pt = s.point;
    Eigen::Matrix<double, 3, 4> theta;
    theta << -pt.p, 1, 0, 0, -pt.q, 0, 1, 0, -traj.equation().evaluate(pt), 0, 0, 1;
    const Eigen::Matrix<double, 3, 4> j = frame(s).transpose().inverse() * theta;
    const Mat3 metric = cometric_on_solution_space(traj, x).inverse();
    Mat4 g = j.transpose() * metric * j;
    return (g + g.transpose()) / 2;
}

std::vector<double> osculation_defect(const Expression& F, const SolutionParams& P, const std::vector<double>& ts) {
    // State: y, p, q, then s00, s01, s02, s11, s12, s22 with s_jk = phi^(j)^T A phi^(k).
    const System sys = [F](const State& s, State& ds, double x) {
        const JetPoint pt{x, s[0], s[1], s[2]};
        const Jet f = F.evaluate(coordinate_jets(pt, 1));
        const double h0 = f.partial(0, 1, 0, 0), h1 = f.partial(0, 0, 1, 0), h2 = f.partial(0, 0, 0, 1);
        const double s00 = s[3], s01 = s[4], s02 = s[5], s11 = s[6], s12 = s[7], s22 = s[8];
        ds[0] = s[1];
        ds[1] = s[2];
        ds[2] = f.value();
        ds[3] = 2 * s01;
        ds[4] = s11 + s02;
        ds[5] = s12 + (h0 * s00 + h1 * s01 + h2 * s02);
        ds[6] = 2 * s12;
        ds[7] = s22 + (h0 * s01 + h1 * s11 + h2 * s12);
        ds[8] = 2 * (h0 * s02 + h1 * s12 + h2 * s22);
    };
    const JetPoint pt0{P.x0, P.P[0], P.P[1], P.P[2]};
    const auto h = h_jets(F, pt0, 1);
    const Mat3 b = basis_conic(h(1, 0), h(2, 0), h(2, 1));  // the frame is the identity at x0
    const State y0{P.P[0], P.P[1], P.P[2], b(0, 0), b(0, 1), b(0, 2), b(1, 1), b(1, 2), b(2, 2)};
    std::vector<double> out;
    out.reserve(ts.size());
    for (double t : ts) out.push_back(integrate_fixed(sys, y0, P.x0, t, 24)[3]);
    return out;
}

double osculation_exponent(double t0, const std::vector<double>& ts, const std::vector<double>& defects) {
    double max_defect = 0;
    for (double d : defects) max_defect = std::max(max_defect, std::abs(d));
    if (max_defect <= 1e-15) return std::numeric_limits<double>::infinity();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (defects[i] == 0.0) continue;
        const double lx = std::log(std::abs(ts[i] - t0));
        const double ly = std::log(std::abs(defects[i]));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (n < 2) throw DegenerateError("osculation_exponent needs at least two nonzero defects");
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace wkit
