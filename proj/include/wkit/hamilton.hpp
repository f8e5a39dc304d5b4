#pragma once

// Legendre transform of the causal Lagrangian, the Hamiltonian H = L o
// Legendre^-1 (vanishing on the polar curve), its spray and null geodesics.
//
// L is homogeneous of degree 2 in qdot, so H(q, p) = L(q, v(q, p)) where v
// solves dL/dqdot (q, v) = p, dH/dp = v and dH/dq = -dL/dq at fixed qdot.

#include <optional>
#include <vector>

#include "wkit/causal.hpp"

namespace wkit {

// Solutions of y''' = F charted at a fixed x0, integrated on demand over a
// window of the working interval.
class TrajectoryFamily {
public:
    TrajectoryFamily(Expression F, double x0, double lower, double upper, Tolerances tol = {});

    const Expression& equation() const { return F_; }
    double x0() const { return x0_; }
    double lower() const { return lower_; }
    double upper() const { return upper_; }

    // Solution through q with first (and optionally second) variations,
    // integrated over [lower, upper] or, given a root hint, over a window
    // around it that contains x0.
    Trajectory at(const Vec3& q, bool second_variation = false, std::optional<double> hint = {}) const;

private:
    Expression F_;
    double x0_, lower_, upper_;
    Tolerances tol_;
};

struct PhasePoint {
    Vec3 q = Vec3::Zero();
    Vec3 p = Vec3::Zero();
};

// dL/dqdot at (q, qdot).
Vec3 legendre(const TrajectoryFamily& fam, const Vec3& q, const Vec3& qdot, std::optional<double> hint = {});

struct HamiltonianValue {
    double H = 0;
    Vec3 velocity;  // Legendre preimage of the momentum
    double x_star = 0;
    int iterations = 0;
};

// Inverts the Legendre map by Newton's method with the Lagrangian Hessian as
// Jacobian. Without a guess, the start is the cone direction whose image is
// proportional to the closest polar-curve sample. Throws DegenerateError on
// divergence.
HamiltonianValue hamiltonian(const Trajectory& traj, const Vec3& momentum, std::optional<Vec3> guess = {},
                             std::optional<double> hint = {});
HamiltonianValue hamiltonian(const TrajectoryFamily& fam, const Vec3& q, const Vec3& momentum,
                             std::optional<Vec3> guess = {}, std::optional<double> hint = {});

// dL/dq at fixed qdot, through the second variation of the solution and the
// implicit dependence of the root x* on q.
Vec3 lagrangian_base_gradient(const Trajectory& traj_with_psi, const Vec3& qdot, std::optional<double> hint = {});

// Canonical equations qdot = dH/dp, pdot = -dH/dq.
class Spray {
public:
    explicit Spray(const TrajectoryFamily& fam, Tolerances tol = {1e-11, 1e-11});

    void operator()(const State& y, State& dy, double t);
    PhasePoint step(const PhasePoint& state, double dt);

    // Warm starts for the Legendre inversion and the root search.
    void seed(const Vec3& velocity, double x_star);

private:
    const TrajectoryFamily& fam_;
    Tolerances tol_;
    std::optional<Vec3> velocity_;
    std::optional<double> x_star_;
};

PhasePoint spray_step(const TrajectoryFamily& fam, const PhasePoint& state, double dt);

struct GeodesicSample {
    double t = 0;
    Vec3 q, p, velocity;
    double H = 0;
    double L = 0;
    double x_star = 0;
};

// Integrates the spray from (P, Legendre(direction)) and samples the base
// curve at n + 1 equally spaced times in [0, t_end] (t_end may be negative).
std::vector<GeodesicSample> null_geodesic(const TrajectoryFamily& fam, const Vec3& P, const Vec3& direction,
                                          double t_end, int n = 20);

struct GeodesicComparison {
    double x_inc = 0;         // incidence abscissa of the starting direction
    double hausdorff = 0;     // between the geodesic and N_P at x_inc
    double h_drift = 0;       // max |H(t) - H(0)|
    double max_abs_L = 0;
    std::optional<IncidencePoint> endpoint;  // incidence_solve(P, q(t_end))
    std::vector<GeodesicSample> geodesic;
};

// Point-set comparison of a null geodesic with the incidence curve through
// the same contact element: each geodesic sample is matched to R(s) with s
// its second derivative at x_inc, and each incidence sample to the
// Hermite-interpolated geodesic.
GeodesicComparison compare_geodesic_with_incidence(const TrajectoryFamily& fam, const Vec3& P, const Vec3& direction,
                                                   double t_end, int n = 20);

}  // namespace wkit
