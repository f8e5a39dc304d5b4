#include "wkit/invariants.hpp"

#include <cmath>
#include <stdexcept>

#include "wkit/errors.hpp"

namespace wkit {

Jet k_jet(const Jet& f, const JetPoint& pt) {
    const Jet fq = f.derivative(3);
    const Jet vfq = total_derivative(fq, f, pt);
    const int n = vfq.order();
    const Jet fqn = fq.truncated(n);
    return vfq / 6.0 - fqn * fqn / 9.0 - f.derivative(2).truncated(n) / 2.0;
}

Jet w_jet(const Jet& f, const JetPoint& pt) {
    const Jet k = k_jet(f, pt);
    const Jet vk = total_derivative(k, f, pt);
    const int n = vk.order();
    return f.derivative(1).truncated(n) + vk - (2.0 / 3.0) * f.derivative(3).truncated(n) * k.truncated(n);
}

double compute_K(const Expression& F, const JetPoint& pt) { return k_jet(eval_derivs(F, pt, 2).jet(), pt).value(); }

double wuenschmann(const Expression& F, const JetPoint& pt) { return w_jet(eval_derivs(F, pt, 3).jet(), pt).value(); }

namespace {

// g = th1 (x) w + w (x) th1 - th2 (x) th2 with th1 = dy - p dx,
// th2 = dp - q dx, w = dq - F_q/3 dp + K dy + (q F_q/3 - F - p K) dx.
JetMatrix assemble_chern(const Jet& f, const JetPoint& pt, int m) {
    const Jet k = k_jet(f, pt).truncated(m);
    const Jet fq = f.derivative(3).truncated(m);
    const Jet fm = f.truncated(m);
    const Jet p = Jet::variable(2, pt.p, m);
    const Jet q = Jet::variable(3, pt.q, m);
    const Jet one = Jet::constant(1.0, m);
    const Jet zero(m);
    const std::array<Jet, 4> th1{-p, one, zero, zero};
    const std::array<Jet, 4> th2{-q, zero, one, zero};
    const std::array<Jet, 4> w{q * fq / 3.0 - fm - p * k, k, -fq / 3.0, one};
    JetMatrix g;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) g[i][j] = th1[i] * w[j] + w[i] * th1[j] - th2[i] * th2[j];
    return g;
}

std::array<Jet, 4> total_direction(const Jet& f, const JetPoint& pt, int n) {
    return {Jet::constant(1.0, n), Jet::variable(2, pt.p, n), Jet::variable(3, pt.q, n), f.truncated(n)};
}

}  // namespace

Mat4 value_of(const JetMatrix& m) {
    Mat4 r;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) r(i, j) = m[i][j].value();
    return r;
}

DegenerateMetric chern_metric(const Expression& F, const JetPoint& pt) {
    const Jet f = eval_derivs(F, pt, 2).jet();
    DegenerateMetric d;
    d.g = value_of(assemble_chern(f, pt, 0));
    d.direction = Vec4(1.0, pt.p, pt.q, f.value());
    d.at = pt;
    return d;
}

Cometric dual_cometric(const Expression& F, const JetPoint& pt) {
    const Jet f = eval_derivs(F, pt, 2).jet();
    const double fq = f.partial(0, 0, 0, 1);
    const double fp = f.partial(0, 0, 1, 0);
    const double vfq = total_derivative(f.derivative(3), f, pt).value();
    Cometric c;
    c.at = pt;
    c.m(1, 3) = c.m(3, 1) = 1.0;
    c.m(2, 2) = -1.0;
    c.m(2, 3) = c.m(3, 2) = -fq / 3.0;
    c.m(3, 3) = (fq * fq - 3.0 * vfq + 9.0 * fp) / 9.0;
    return c;
}

DegenerateField chern_field(const Expression& F) {
    return [F](const JetPoint& pt, int m) {
        const Jet f = eval_derivs(F, pt, m + 2).jet();
        return FieldJets{assemble_chern(f, pt, m), total_direction(f, pt, m + 1)};
    };
}

FieldJets lie_derivative(const FieldJets& field) {
    const int m = field.metric[0][0].order();
    if (m < 1) throw std::invalid_argument("lie_derivative needs a metric jet of order >= 1");
    const int n = m - 1;
    std::array<std::array<Jet, 4>, 4> dv;  // dv[i][k] = d_i V^k
    for (int i = 0; i < 4; ++i)
        for (int k = 0; k < 4; ++k) dv[i][k] = field.direction[k].derivative(i).truncated(n);
    std::array<Jet, 4> v;
    for (int k = 0; k < 4; ++k) v[k] = field.direction[k].truncated(n);
    FieldJets out;
    for (int i = 0; i < 4; ++i)
        for (int j = i; j < 4; ++j) {
            Jet h(n);
            for (int k = 0; k < 4; ++k) {
                h += v[k] * field.metric[i][j].derivative(k);
                h += field.metric[k][j].truncated(n) * dv[i][k];
                h += field.metric[i][k].truncated(n) * dv[j][k];
            }
            out.metric[i][j] = h;
            out.metric[j][i] = h;
        }
    for (int k = 0; k < 4; ++k) out.direction[k] = field.direction[k].truncated(m);
    return out;
}

std::vector<Mat4> lie_derivatives(const DegenerateField& field, const JetPoint& pt, int kmax) {
    if (kmax < 0 || kmax + 2 > kMaxJetOrder) throw std::out_of_range("Lie derivative order out of range");
    FieldJets fj = field(pt, kmax);
    std::vector<Mat4> out{value_of(fj.metric)};
    for (int k = 1; k <= kmax; ++k) {
        fj = lie_derivative(fj);
        out.push_back(value_of(fj.metric));
    }
    return out;
}

Mat4 lie_derivative_metric(const Expression& F, const JetPoint& pt, int k) {
    if (k < 0 || k > 4) throw std::out_of_range("Lie derivative order must be in [0, 4]");
    return lie_derivatives(chern_field(F), pt, k).back();
}

namespace {

// Pulled-back metric M^T g(X_t) M after flowing for time t.
Mat4 transported(const DegenerateField& field, const JetPoint& pt, double t) {
    const System sys = [&field](const State& s, State& ds, double) {
        const FieldJets fj = field(JetPoint{s[0], s[1], s[2], s[3]}, 0);
        Eigen::Matrix4d dv;  // dv(k, i) = d_i V^k
        for (int k = 0; k < 4; ++k)
            for (int i = 0; i < 4; ++i) dv(k, i) = fj.direction[k].partial(i == 0, i == 1, i == 2, i == 3);
        for (int k = 0; k < 4; ++k) ds[k] = fj.direction[k].value();
        Eigen::Map<const Eigen::Matrix4d> m(s.data() + 4);
        Eigen::Map<Eigen::Matrix4d> dm(ds.data() + 4);
        dm = dv * m;
    };
    State s(20, 0.0);
    s[0] = pt.x;
    s[1] = pt.y;
    s[2] = pt.p;
    s[3] = pt.q;
    Eigen::Map<Eigen::Matrix4d>(s.data() + 4).setIdentity();
    if (t != 0.0) s = integrate_fixed(sys, s, 0.0, t, 6);
    const Mat4 g = value_of(field(JetPoint{s[0], s[1], s[2], s[3]}, 0).metric);
    Eigen::Map<const Eigen::Matrix4d> m(s.data() + 4);
    return m.transpose() * g * m;
}

Mat4 central_difference(const DegenerateField& field, const JetPoint& pt, int k, double h) {
    auto g = [&](double t) { return transported(field, pt, t); };
    switch (k) {
        case 1: return (g(h) - g(-h)) / (2 * h);
        case 2: return (g(h) - 2 * g(0) + g(-h)) / (h * h);
        case 3: return (g(2 * h) - 2 * g(h) + 2 * g(-h) - g(-2 * h)) / (2 * h * h * h);
        default: return (g(2 * h) - 4 * g(h) + 6 * g(0) - 4 * g(-h) + g(-2 * h)) / (h * h * h * h);
    }
}

}  // namespace

Mat4 lie_derivative_metric_flow(const DegenerateField& field, const JetPoint& pt, int k) {
    if (k < 0 || k > 4) throw std::out_of_range("Lie derivative order must be in [0, 4]");
    if (k == 0) return transported(field, pt, 0.0);
    const double h = k <= 2 ? 0.08 : 0.16;
    const Mat4 d0 = central_difference(field, pt, k, h);
    const Mat4 d1 = central_difference(field, pt, k, h / 2);
    const Mat4 d2 = central_difference(field, pt, k, h / 4);
    const Mat4 r0 = (4 * d1 - d0) / 3;
    const Mat4 r1 = (4 * d2 - d1) / 3;
    return (16 * r1 - r0) / 15;
}

Mat4 lie_derivative_metric_flow(const Expression& F, const JetPoint& pt, int k) {
    return lie_derivative_metric_flow(chern_field(F), pt, k);
}

double proportionality_residual(const Mat4& g, const Mat4& h) {
    const double gg = g.squaredNorm();
    if (gg == 0.0) throw std::invalid_argument("proportionality_residual: g must be nonzero");
    const double hn = h.norm();
    if (hn == 0.0) return 0.0;
    const double lambda = (g.array() * h.array()).sum() / gg;
    return (h - lambda * g).norm() / hn;
}

}  // namespace wkit
