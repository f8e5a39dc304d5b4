#include "wkit/integrator.hpp"

#include <algorithm>
#include <cmath>

#include <boost/numeric/odeint/stepper/controlled_runge_kutta.hpp>
#include <boost/numeric/odeint/stepper/generation.hpp>
#include <boost/numeric/odeint/stepper/runge_kutta_fehlberg78.hpp>

#include "wkit/errors.hpp"

namespace wkit {
namespace {

namespace odeint = boost::numeric::odeint;
using Stepper = odeint::runge_kutta_fehlberg78<State>;

bool finite(const State& y) {
    return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
}

// Runs the controlled stepper from t0 to t1, calling `visit(t, y)` after each
// accepted step.
template <class Visit>
State drive(const System& sys, State y, double t0, double t1, Tolerances tol, Visit&& visit) {
    if (t1 == t0) return y;
    auto stepper = odeint::make_controlled<Stepper>(tol.atol, tol.rtol);
    const double dir = t1 > t0 ? 1.0 : -1.0;
    double t = t0;
    double dt = dir * std::min(1e-2, std::abs(t1 - t0));
    const double span = std::abs(t1 - t0);
    try {
        for (int iter = 0; iter < 5'000'000; ++iter) {
            // Absorb a remainder that would leave a sliver of a step.
            if (dir * (t + dt - t1) > -1e-3 * std::abs(dt)) dt = t1 - t;
            const bool last = (t + dt == t1);
            const double before = t;
            const auto res = stepper.try_step(sys, y, t, dt);
            if (res == odeint::success) {
                if (!finite(y)) throw IntegrationError("solution blew up", before);
                if (last) {
                    t = t1;
                    visit(t, y);
                    return y;
                }
                visit(t, y);
            } else if (std::abs(dt) < 1e-13 * std::max(1.0, span)) {
                throw IntegrationError("step size underflow", t);
            }
        }
    } catch (const DomainError& e) {
        throw IntegrationError(std::string("left the domain of F: ") + e.what(), t);
    }
    throw IntegrationError("too many steps", t);
}

}  // namespace

DenseSolution DenseSolution::integrate(System sys, const State& y0, double t0, double lower, double upper,
                                       Tolerances tol) {
    DenseSolution s;
    s.sys_ = std::move(sys);
    s.t0_ = t0;
    std::vector<double> tb;
    std::vector<State> yb;
    drive(s.sys_, y0, t0, lower, tol, [&](double t, const State& y) {
        tb.push_back(t);
        yb.push_back(y);
    });
    for (std::size_t i = tb.size(); i-- > 0;) {
        s.t_.push_back(tb[i]);
        s.y_.push_back(std::move(yb[i]));
    }
    s.t_.push_back(t0);
    s.y_.push_back(y0);
    drive(s.sys_, y0, t0, upper, tol, [&](double t, const State& y) {
        s.t_.push_back(t);
        s.y_.push_back(y);
    });
    return s;
}

State DenseSolution::operator()(double t) const {
    if (t_.empty()) throw Error("empty dense solution");
    const double slack = 1e-12 * (1.0 + std::abs(upper()) + std::abs(lower()));
    if (t < lower() - slack || t > upper() + slack)
        throw Error("evaluation at x = " + std::to_string(t) + " outside integrated interval [" +
                    std::to_string(lower()) + ", " + std::to_string(upper()) + "]");
    auto it = std::lower_bound(t_.begin(), t_.end(), t);
    std::size_t i = static_cast<std::size_t>(it - t_.begin());
    if (i == t_.size())
        i = t_.size() - 1;
    else if (i > 0 && std::abs(t_[i - 1] - t) < std::abs(t_[i] - t))
        i -= 1;
    const double dt = t - t_[i];
    if (dt == 0) return y_[i];
    Stepper stepper;
    State out(y_[i].size());
    stepper.do_step(sys_, y_[i], t_[i], out, dt);
    return out;
}

State integrate_to(const System& sys, State y, double t0, double t1, Tolerances tol) {
    return drive(sys, std::move(y), t0, t1, tol, [](double, const State&) {});
}

State integrate_fixed(const System& sys, State y, double t0, double t1, int steps) {
    Stepper stepper;
    const double h = (t1 - t0) / steps;
    for (int k = 0; k < steps; ++k) stepper.do_step(sys, y, t0 + k * h, h);
    return y;
}

}  // namespace wkit
