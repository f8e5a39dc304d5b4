#include "wkit/hamilton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wkit/errors.hpp"
#include "wkit/projective.hpp"

namespace wkit {

TrajectoryFamily::TrajectoryFamily(Expression F, double x0, double lower, double upper, Tolerances tol)
    : F_(std::move(F)), x0_(x0), lower_(std::min(lower, x0)), upper_(std::max(upper, x0)), tol_(tol) {}

Trajectory TrajectoryFamily::at(const Vec3& q, bool second_variation, std::optional<double> hint) const {
    TrajectoryOptions opt;
    opt.tol = tol_;
    opt.second_variation = second_variation;
    double lo = lower_, hi = upper_;
    if (hint) {
        const double margin = 0.25 * (upper_ - lower_);
        lo = std::max(lower_, std::min(x0_, *hint - margin));
        hi = std::min(upper_, std::max(x0_, *hint + margin));
    }
    return Trajectory::integrate(F_, SolutionParams::from(x0_, q), lo, hi, opt);
}

Vec3 legendre(const TrajectoryFamily& fam, const Vec3& q, const Vec3& qdot, std::optional<double> hint) {
    return lagrangian_derivatives(fam.at(q), qdot, hint).gradient;
}

namespace {

// Cone direction whose Legendre image is proportional to phi(x) for the
// polar sample closest to `momentum`, scaled to match it.
Vec3 initial_velocity(const Trajectory& traj, const Vec3& momentum, double& x_guess) {
    double best = std::numeric_limits<double>::infinity();
    const int n = 64;
    for (int i = 0; i <= n; ++i) {
        const double x = traj.lower() + (traj.upper() - traj.lower()) * i / n;
        const double d = projective_distance(traj.sample(x).phi[0], momentum);
        if (d < best) {
            best = d;
            x_guess = x;
        }
    }
    const TrajectorySample s = traj.sample(x_guess);
    const Vec3 dir = s.phi[0].cross(s.phi[1]);
    const double lambda = momentum.dot(s.phi[0]) / s.phi[0].squaredNorm();
    return lambda * dir / dir.dot(s.phi[2]);
}

}  // namespace

HamiltonianValue hamiltonian(const Trajectory& traj, const Vec3& momentum, std::optional<Vec3> guess,
                             std::optional<double> hint) {
    double x_hint = hint.value_or(traj.params().x0);
    Vec3 v = guess ? *guess : initial_velocity(traj, momentum, x_hint);
    const double scale = momentum.norm();
    for (int it = 1; it <= 40; ++it) {
        const LagrangianDerivatives d = lagrangian_derivatives(traj, v, x_hint);
        x_hint = d.value.x_star;
        const Vec3 r = d.gradient - momentum;
        if (r.norm() <= 1e-13 * scale) return {d.value.L, v, d.value.x_star, it};
        const Vec3 step = d.hessian.fullPivLu().solve(r);
        if (!step.allFinite()) break;
        v -= step;
        if (step.norm() <= 1e-15 * v.norm()) {
            const LagrangianValue lv = lagrangian(traj, v, x_hint);
            return {lv.L, v, lv.x_star, it};
        }
    }
    throw DegenerateError("Legendre inversion did not converge (momentum outside the Hamiltonian chart)");
}

HamiltonianValue hamiltonian(const TrajectoryFamily& fam, const Vec3& q, const Vec3& momentum, std::optional<Vec3> guess,
                             std::optional<double> hint) {
    return hamiltonian(fam.at(q), momentum, guess, hint);
}

Vec3 lagrangian_base_gradient(const Trajectory& traj, const Vec3& qdot, std::optional<double> hint) {
    if (!traj.options().second_variation) throw std::invalid_argument("lagrangian_base_gradient needs psi");
    const LagrangianValue lv = lagrangian(traj, qdot, hint);
    const TrajectorySample s = traj.sample(lv.x_star);
    const double g2 = lv.b, g3 = qdot.dot(s.phi[3]);
    const Eigen::RowVector3d v0 = qdot.transpose() * s.psi[0];
    const Eigen::RowVector3d v1 = qdot.transpose() * s.psi[1];
    const Eigen::RowVector3d v2 = qdot.transpose() * s.psi[2];
    const Eigen::RowVector3d dx = -v1 / g2;
    return (v0 * lv.b + lv.a * (v2 + g3 * dx)).transpose();
}

Spray::Spray(const TrajectoryFamily& fam, Tolerances tol) : fam_(fam), tol_(tol) {}

void Spray::seed(const Vec3& velocity, double x_star) {
    velocity_ = velocity;
    x_star_ = x_star;
}

void Spray::operator()(const State& y, State& dy, double) {
    const Vec3 q(y[0], y[1], y[2]);
    const Vec3 p(y[3], y[4], y[5]);
    const Trajectory traj = fam_.at(q, true, x_star_);
    const HamiltonianValue h = hamiltonian(traj, p, velocity_, x_star_);
    velocity_ = h.velocity;
    x_star_ = h.x_star;
    const Vec3 pdot = lagrangian_base_gradient(traj, h.velocity, h.x_star);
    for (int i = 0; i < 3; ++i) {
        dy[i] = h.velocity[i];
        dy[3 + i] = pdot[i];
    }
}

PhasePoint Spray::step(const PhasePoint& state, double dt) {
    const State y0{state.q[0], state.q[1], state.q[2], state.p[0], state.p[1], state.p[2]};
    const System sys = [this](const State& y, State& dy, double t) { (*this)(y, dy, t); };
    const State y = integrate_to(sys, y0, 0.0, dt, tol_);
    return {Vec3(y[0], y[1], y[2]), Vec3(y[3], y[4], y[5])};
}

PhasePoint spray_step(const TrajectoryFamily& fam, const PhasePoint& state, double dt) {
    Spray spray(fam);
    return spray.step(state, dt);
}

std::vector<GeodesicSample> null_geodesic(const TrajectoryFamily& fam, const Vec3& P, const Vec3& direction,
                                          double t_end, int n) {
    const Trajectory t0 = fam.at(P);
    const LagrangianDerivatives d0 = lagrangian_derivatives(t0, direction);
    Spray spray(fam);
    spray.seed(direction, d0.value.x_star);
    PhasePoint state{P, d0.gradient};
    std::vector<GeodesicSample> out;
    double x_hint = d0.value.x_star;
    Vec3 v_hint = direction;
    for (int k = 0; k <= n; ++k) {
        const double t = t_end * k / n;
        if (k > 0) {
            spray.seed(v_hint, x_hint);
            state = spray.step(state, t_end / n);
        }
        const Trajectory traj = fam.at(state.q, false, x_hint);
        const HamiltonianValue h = hamiltonian(traj, state.p, v_hint, x_hint);
        v_hint = h.velocity;
        x_hint = h.x_star;
        out.push_back({t, state.q, state.p, h.velocity, h.H, lagrangian(traj, h.velocity, h.x_star).L, h.x_star});
    }
    return out;
}

namespace {

// Cubic Hermite point on the segment between two geodesic samples.
Vec3 hermite(const GeodesicSample& a, const GeodesicSample& b, double u) {
    const double h = b.t - a.t;
    const double h00 = 2 * u * u * u - 3 * u * u + 1, h10 = u * u * u - 2 * u * u + u;
    const double h01 = -2 * u * u * u + 3 * u * u, h11 = u * u * u - u * u;
    return h00 * a.q + h10 * h * a.velocity + h01 * b.q + h11 * h * b.velocity;
}

}  // namespace

GeodesicComparison compare_geodesic_with_incidence(const TrajectoryFamily& fam, const Vec3& P, const Vec3& direction,
                                                   double t_end, int n) {
    GeodesicComparison out;
    const Trajectory tp = fam.at(P);
    out.x_inc = lagrangian(tp, direction).x_star;
    out.geodesic = null_geodesic(fam, P, direction, t_end, n);
    const auto& geo = out.geodesic;
    for (const auto& g : geo) {
        out.h_drift = std::max(out.h_drift, std::abs(g.H - geo.front().H));
        out.max_abs_L = std::max(out.max_abs_L, std::abs(g.L));
    }

    const Expression& F = fam.equation();
    const double x0 = fam.x0();
    const Vec3 contact = transport_jet(F, x0, P, out.x_inc);
    auto R = [&](double s) { return transport_jet(F, out.x_inc, Vec3(contact[0], contact[1], s), x0); };

    double hd = 0;
    std::vector<double> s_of_t;
    for (const auto& g : geo) {
        const double s = transport_jet(F, x0, g.q, out.x_inc)[2];
        s_of_t.push_back(s);
        hd = std::max(hd, (R(s) - g.q).norm());
    }
    const double s_lo = std::min(s_of_t.front(), s_of_t.back());
    const double s_hi = std::max(s_of_t.front(), s_of_t.back());
    const int m = 4 * n;
    for (int k = 0; k <= m; ++k) {
        const Vec3 r = R(s_lo + (s_hi - s_lo) * k / m);
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 1 < geo.size(); ++i) {
            Vec3 prev = geo[i].q;
            for (int j = 1; j <= 64; ++j) {
                const Vec3 next = hermite(geo[i], geo[i + 1], j / 64.0);
                const Vec3 seg = next - prev;
                const double u = std::clamp((r - prev).dot(seg) / std::max(seg.squaredNorm(), 1e-300), 0.0, 1.0);
                best = std::min(best, (prev + u * seg - r).norm());
                prev = next;
            }
        }
        hd = std::max(hd, best);
    }
    out.hausdorff = hd;

    const Trajectory tq = fam.at(geo.back().q);
    out.endpoint = incidence_solve(tp, tq, fam.lower(), fam.upper());
    return out;
}

}  // namespace wkit
