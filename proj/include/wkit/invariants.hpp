#pragma once

// Pointwise contact invariants of y''' = F on the second jet space:
// K, the Wuenschmann invariant W, the degenerate Chern metric, its dual
// cometric and iterated Lie derivatives of the metric along the total
// derivative V = d/dx + p d/dy + q d/dp + F d/dq.
//
// Matrices are written in the coordinate coframe (dx, dy, dp, dq) or, for
// cometrics, the frame (d/dx, d/dy, d/dp, d/dq), in that order.

#include <array>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "wkit/expr.hpp"
#include "wkit/integrator.hpp"

namespace wkit {

using Mat4 = Eigen::Matrix4d;
using Vec4 = Eigen::Vector4d;

struct DegenerateMetric {
    Mat4 g = Mat4::Zero();
    Vec4 direction = Vec4::Zero();  // V = (1, p, q, F)
    JetPoint at;
};

struct Cometric {
    Mat4 m = Mat4::Zero();  // zero row and column for d/dx
    JetPoint at;
};

// Jet-level building blocks. `f` is F expanded about `pt`; the results have
// order f.order() - 2 (K) and f.order() - 3 (W).
Jet k_jet(const Jet& f, const JetPoint& pt);
Jet w_jet(const Jet& f, const JetPoint& pt);

double compute_K(const Expression& F, const JetPoint& pt);
double wuenschmann(const Expression& F, const JetPoint& pt);
DegenerateMetric chern_metric(const Expression& F, const JetPoint& pt);
Cometric dual_cometric(const Expression& F, const JetPoint& pt);

// A degenerate metric field and its degenerate direction, both expanded
// about a point. The direction carries one more order than the metric so
// that one Lie derivative can be taken.
using JetMatrix = std::array<std::array<Jet, 4>, 4>;

struct FieldJets {
    JetMatrix metric;
    std::array<Jet, 4> direction;
};

// (point, metric order) -> jets. Lets user-supplied fields share the Lie
// derivative and Gamma machinery with the Chern metric.
using DegenerateField = std::function<FieldJets(const JetPoint&, int)>;

DegenerateField chern_field(const Expression& F);

Mat4 value_of(const JetMatrix& m);

// (L_V g)_ij = V(g_ij) + g_kj d_i V^k + g_ik d_j V^k. Lowers the metric
// order by one.
FieldJets lie_derivative(const FieldJets& field);

// g, L_V g, ..., L_V^kmax g at `pt`.
std::vector<Mat4> lie_derivatives(const DegenerateField& field, const JetPoint& pt, int kmax);

// k-th Lie derivative of the Chern metric by nested differentiation of the
// closed-form entries. k <= 4.
Mat4 lie_derivative_metric(const Expression& F, const JetPoint& pt, int k);

// Same quantity by transporting g along the integrated flow of V (with its
// variational matrix) and differentiating the pulled-back metric in flow
// time with Richardson-extrapolated central differences.
Mat4 lie_derivative_metric_flow(const DegenerateField& field, const JetPoint& pt, int k);
Mat4 lie_derivative_metric_flow(const Expression& F, const JetPoint& pt, int k);

// min over lambda of |h - lambda g|_F / |h|_F; 0 when h = 0.
double proportionality_residual(const Mat4& g, const Mat4& h);

}  // namespace wkit
