#pragma once

// Osculating conics of the projective curve t -> phi(t) traced by the
// variational solutions, the projective curvature (fifth-order defect of the
// osculating conic) and reconstruction of the conformal structure on the
// solution space from the conic.

#include <array>
#include <vector>

#include "wkit/invariants.hpp"
#include "wkit/ode.hpp"

namespace wkit {

struct Conic {
    Mat3 A = Mat3::Zero();
    bool normalized = false;  // phi^T A phi'' = 1 imposed
};

// The osculating conic in the basis (phi, phi', phi''):
//   [[0, 0, 1], [0, -1, -h2/3], [1, -h2/3, (h2^2 - 3 h2' + 9 h1)/9]].
Mat3 basis_conic(double h1, double h2, double h2p);

struct OsculatingConic {
    Conic conic;          // ambient coordinates, from the 6x6 linear solve
    Mat3 basis_form;      // closed form in the basis (phi, phi', phi'')
    Mat3 closed_form;     // basis_form taken to ambient coordinates
    double h1 = 0, h2 = 0, h2p = 0;  // recovered from the jet
    double residual = 0;  // max relative residual |r_k| / (|m_k| |u| + |rhs_k|) of the six linear conditions
    double agreement = 0; // projective distance between conic.A and closed_form
};

// phi[k] = phi^(k), k = 0..4. Throws DegenerateError if det(phi, phi', phi'')
// vanishes or the linear system is rank deficient.
OsculatingConic osculating_conic(const std::array<Vec3, 5>& phi);

// (phi^T A phi)^(k) at the point of osculation for the Leibniz expansion over
// the supplied jet.
double conic_defect_derivative(const Mat3& A, const std::vector<Vec3>& phi, int k);

struct ProjectiveCurvature {
    double printed = 0;   // 12 h0 + 4 h1 + 8/9 h2^3 - 6 h1' - 4 h2 h2' + 2 h2''
    double expanded = 0;  // same with 4 h1 h2 in place of 4 h1
    double oracle = 0;    // (phi^T A phi)^(5) with phi^T A phi'' = 1
};

// h holds h_i^(k) for k = 0..2 at least.
ProjectiveCurvature projective_curvature(const Vec3& phi0, const Vec3& phi1, const Vec3& phi2,
                                         const Eigen::Matrix<double, 3, Eigen::Dynamic>& h);
ProjectiveCurvature projective_curvature(const Trajectory& traj, double x);

// A quadratic form written in the basis given by the columns of `frame`,
// expressed in ambient coordinates: frame^-T B frame^-1.
Mat3 conic_to_ambient(const Mat3& basis_form, const Mat3& frame);

// Osculating conic at x as a cometric on the solution space in the P-chart.
Mat3 cometric_on_solution_space(const Trajectory& traj, double x);

// Degenerate metric on J^2 at traj.point(x) obtained by pulling back the
// inverse of the conic cometric along the projection J^2 -> solution space.
Mat4 pullback_metric(const Trajectory& traj, double x);

// phi(t)^T A phi(t) at the given abscissae for the osculating conic A at the
// base abscissa x0 of the solution P. The defect is integrated as a linear
// ODE for the entries phi^(j)^T A phi^(k) (j, k <= 2), started from exact
// values at x0, so that its O((t - x0)^5) size is not lost to cancellation.
std::vector<double> osculation_defect(const Expression& F, const SolutionParams& P, const std::vector<double>& ts);

// Least-squares slope of log|d| against log|t - t0|. Infinite when every
// defect is exactly zero.
double osculation_exponent(double t0, const std::vector<double>& ts, const std::vector<double>& defects);

}  // namespace wkit
