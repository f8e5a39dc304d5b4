#pragma once

// General solution f(x; P) of y''' = F, charted by the jet P = (y, p, q) of
// the solution at a base abscissa x0, together with the variational
// solutions phi_i = df/dP_i, the Wronskian, the linearized coefficients
// h0 = F_y, h1 = F_p, h2 = F_q along the solution and the adjoint equation.
//
// Throughout, phi denotes the 3-vector (phi_1, phi_2, phi_3)(x) and phi^(k)
// its k-th x-derivative. Derivatives of order >= 3 always come from the
// linearized equation, never from differentiating interpolated data.

#include <array>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "wkit/expr.hpp"
#include "wkit/integrator.hpp"

namespace wkit {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct SolutionParams {
    double x0 = 0;
    std::array<double, 3> P{};  // (y, y', y'') at x0

    Vec3 vec() const { return {P[0], P[1], P[2]}; }
    static SolutionParams from(double x0, const Vec3& v) { return {x0, {v[0], v[1], v[2]}}; }
};

struct TrajectoryOptions {
    Tolerances tol;
    // Also integrate psi_ij = d^2 f / dP_i dP_j (needed by the Hamiltonian).
    bool second_variation = false;
    // Fault injection: report phi_1 with the wrong sign.
    bool corrupt_variational = false;
};

struct TrajectorySample {
    double x = 0;
    JetPoint point;            // (x, f, f_x, f_xx)
    std::array<Vec3, 4> phi;   // phi^(0..3)
    std::array<Mat3, 3> psi;   // psi^(k)(i, j), k = 0..2; zero unless requested
    Vec3 h = Vec3::Zero();     // (F_y, F_p, F_q) at point
};

class Trajectory {
public:
    static Trajectory integrate(const Expression& F, const SolutionParams& P, double lower, double upper,
                                const TrajectoryOptions& options = {});

    const Expression& equation() const { return F_; }
    const SolutionParams& params() const { return P_; }
    const TrajectoryOptions& options() const { return opt_; }
    double lower() const { return sol_.lower(); }
    double upper() const { return sol_.upper(); }

    TrajectorySample sample(double x) const;
    JetPoint point(double x) const;
    // phi^(0..order), order <= 8.
    std::vector<Vec3> phi_jet(double x, int order) const;

private:
    Expression F_;
    SolutionParams P_;
    TrajectoryOptions opt_;
    DenseSolution sol_;
};

// h_i^(k) along the solution through `pt`, k = 0..kmax (column k).
Eigen::Matrix<double, 3, Eigen::Dynamic> h_jets(const Expression& F, const JetPoint& pt, int kmax);

// f^(0..order) of the solution through `pt`.
std::vector<double> solution_jet(const Expression& F, const JetPoint& pt, int order);

// phi^(0..order) from phi, phi', phi'' and h_jets (which must reach order - 3).
std::vector<Vec3> phi_recurrence(const Vec3& phi0, const Vec3& phi1, const Vec3& phi2,
                                 const Eigen::Matrix<double, 3, Eigen::Dynamic>& h, int order);

// Matrix with columns phi, phi', phi''. Its determinant is the Wronskian.
Mat3 frame(const TrajectorySample& s);

double wronskian(const Trajectory& traj, double x);

struct LinearizedCoefficients {
    Vec3 h;        // solved from the variational data by Cramer's rule
    Vec3 direct;   // (F_y, F_p, F_q) along the base solution
    double discrepancy = 0;  // |h - direct| / (1 + |direct|)
};

LinearizedCoefficients linearized_coefficients(const Trajectory& traj, double x);

// Three solutions z_i of the adjoint equation
//   z''' = -(h0 - h1' + h2'') z - (2 h2' - h1) z' - h2 z''.
// Initial data are those of (phi x phi') / W at x0, so that the adjoint
// curve is the projective dual of the phi curve (Wilczynski). For F = 0 the
// solutions are (x^2/2, -x, 1).
class AdjointSolutions {
public:
    // z, z', z'' as 3-vectors over i.
    std::array<Vec3, 3> operator()(double x) const;
    double lower() const { return sol_.lower(); }
    double upper() const { return sol_.upper(); }

private:
    friend AdjointSolutions adjoint_solutions(const Trajectory& traj);
    DenseSolution sol_;
};

AdjointSolutions adjoint_solutions(const Trajectory& traj);

// CSV with header x,f,f_x,f_xx,phi11,...,phi33 where phi_ij = phi_i^(j-1).
void write_trajectory_csv(std::ostream& out, const Trajectory& traj, const std::vector<double>& grid);

}  // namespace wkit
