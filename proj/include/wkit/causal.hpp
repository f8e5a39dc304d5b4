#pragma once

// Causal geometry on the solution space: incidence of solutions, the cones
// N_P ruled by the curves N_PQ, the polar curve x -> d_P f(x; P) and its dual
// the indicatrix, the Lagrangian whose null cone is the tangent cone of N_P,
// and numeric checks of the five causal-geometry axioms.

#include <optional>
#include <string>
#include <vector>

#include "wkit/ode.hpp"

namespace wkit {

struct ProjectiveCurveSample {
    double t = 0;
    Vec3 v;                 // unit norm, first nonzero entry positive
    std::vector<Vec3> jet;  // unnormalized gamma, gamma', ... (may be empty)
};

// phi(x) with derivatives through order 3 at each grid point.
std::vector<ProjectiveCurveSample> polar_curve(const Trajectory& traj, const std::vector<double>& grid);

// gamma* = gamma x gamma' with derivatives (one order fewer than the input
// jet). Throws DegenerateError where gamma and gamma' are dependent.
std::vector<ProjectiveCurveSample> dual_curve(const std::vector<ProjectiveCurveSample>& samples);

std::vector<ProjectiveCurveSample> indicatrix(const Trajectory& traj, const std::vector<double>& grid);

struct LagrangianValue {
    double L = 0;
    double x_star = 0;  // root of qdot . phi'(x) = 0
    double a = 0;       // qdot . phi(x_star)
    double b = 0;       // qdot . phi''(x_star)
};

// L(qdot) = (qdot . phi(x*)) (qdot . phi''(x*)). The root is searched in the
// trajectory interval; Newton from `hint` first, then a grid scan choosing
// the root nearest the hint. Throws DegenerateError ("outside cone chart")
// when no root exists or qdot . phi''(x*) = 0.
LagrangianValue lagrangian(const Trajectory& traj, const Vec3& qdot, std::optional<double> hint = {});

struct LagrangianDerivatives {
    LagrangianValue value;
    Vec3 gradient;  // dL/dqdot
    Mat3 hessian;   // d^2 L/dqdot^2 through the implicit root
};

LagrangianDerivatives lagrangian_derivatives(const Trajectory& traj, const Vec3& qdot, std::optional<double> hint = {});

struct RegularityCheck {
    Mat3 hessian;
    Vec3 A, B, C;  // phi', phi, phi'' - (g3/g2) phi' at x*
    double det_hessian = 0;
    double det_abc = 0;  // det[A B C]
    // On the cone Hess L = -A A^T + B C^T + C B^T = M D M^T with M = [A B C]
    // and det D = 1, so det Hess L = det[A B C]^2. The cubic form
    // -det[A B C]^3 agrees only where det[A B C] = -1 (e.g. F = 0).
    double relative_error = 0;        // against det[A B C]^2
    double relative_error_cubic = 0;  // against -det[A B C]^3
    double structure_error = 0;       // |Hess - (-AA^T + BC^T + CB^T)| / |Hess|
};

// Hessian determinant identity at an on-cone direction. Rejects qdot with
// |L| above `cone_tol` relative to |qdot|^2 |phi| |phi''|.
RegularityCheck lagrangian_hessian(const Trajectory& traj, const Vec3& qdot, std::optional<double> hint = {},
                                   double cone_tol = 1e-7);

struct IncidencePoint {
    double x = 0;
    double y = 0, p = 0;  // shared contact element
    double df = 0, dfx = 0;  // |f(x;P) - f(x;Q)|, |f_x(x;P) - f_x(x;Q)|
};

// Incidence requires f and f_x to agree, i.e. a double root of f(.;P) -
// f(.;Q). The scan therefore looks for roots of the f_x difference and
// accepts those where the f difference vanishes too, both within 1e-8 scale-
// relative tolerance.
std::optional<IncidencePoint> incidence_solve(const Trajectory& P, const Trajectory& Q, double lower, double upper,
                                              int grid = 200);
std::optional<IncidencePoint> incidence_solve(const Expression& F, const SolutionParams& P, const SolutionParams& Q,
                                              double lower, double upper, Tolerances tol = {});

struct IncidenceCurveSample {
    double s = 0;
    std::optional<Vec3> R;  // chart coordinates at x0
    std::string error;
};

// s -> R(s): the solution with data (x_inc, f(x_inc;P), f_x(x_inc;P), s)
// expressed in the chart at P.x0.
std::vector<IncidenceCurveSample> incidence_curve(const Trajectory& P, double x_inc, const std::vector<double>& s_grid);
std::vector<IncidenceCurveSample> incidence_curve(const Expression& F, const SolutionParams& P, double x_inc,
                                                  const std::vector<double>& s_grid, Tolerances tol = {});

// Carries the jet (y, y', y'') at x from x to x1 with fixed high-order steps,
// so the result is a smooth function of (x, jet) suitable for differencing.
Vec3 transport_jet(const Expression& F, double x, const Vec3& jet, double x1, int steps = 200);

struct AxiomCheck {
    int axiom = 0;
    bool pass = false;
    double residual = 0;
    double tolerance = 0;
    std::string detail;
};

struct AxiomReport {
    std::vector<AxiomCheck> checks;
    bool all_pass() const;
    const AxiomCheck& check(int axiom) const;
};

struct AxiomOptions {
    double lower = -1, upper = 1;
    int samples = 4;  // incidence abscissae
    TrajectoryOptions trajectory;
};

AxiomReport verify_axioms(const Expression& F, const SolutionParams& P, const AxiomOptions& options = {});

}  // namespace wkit
