#pragma once

// Adaptive Runge-Kutta core shared by the solution, adjoint, Lie-flow and
// spray integrations. Steps are taken with an embedded 7(8) pair; dense
// output re-steps from the nearest accepted node, so interpolated values
// carry the same local accuracy as the nodes themselves.

#include <functional>
#include <vector>

namespace wkit {

using State = std::vector<double>;
using System = std::function<void(const State& y, State& dydt, double t)>;

struct Tolerances {
    double atol = 1e-10;
    double rtol = 1e-10;
};

class DenseSolution {
public:
    DenseSolution() = default;

    // Integrates from (t0, y0) forward to `upper` and backward to `lower`.
    // Throws IntegrationError on blow-up, domain exit or step underflow.
    static DenseSolution integrate(System sys, const State& y0, double t0, double lower, double upper,
                                   Tolerances tol);

    State operator()(double t) const;

    double lower() const { return t_.front(); }
    double upper() const { return t_.back(); }
    double origin() const { return t0_; }
    std::size_t size() const { return t_.size(); }
    const std::vector<double>& nodes() const { return t_; }
    const State& node_state(std::size_t i) const { return y_[i]; }

private:
    System sys_;
    double t0_ = 0;
    std::vector<double> t_;
    std::vector<State> y_;
};

// Adaptive integration from t0 to t1 without storing the path.
State integrate_to(const System& sys, State y, double t0, double t1, Tolerances tol);

// `steps` equal steps of the 7(8) pair's eighth-order solution.
State integrate_fixed(const System& sys, State y, double t0, double t1, int steps);

}  // namespace wkit
