#pragma once

// The inverse problem: decide whether a one-parameter family of conics, or
// a degenerate metric field with its degenerate direction, comes from a
// third-order ODE, and recover the generating curve when it does.
//
// Symmetric 3x3 matrices are vectorized as
//   (a11, a22, a33, sqrt2 a12, sqrt2 a13, sqrt2 a23)
// so that the trace pairing tr(A X) is the Euclidean dot product.

#include <array>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wkit/conic.hpp"
#include "wkit/invariants.hpp"
#include "wkit/ode.hpp"

namespace wkit {

using Sym6 = Eigen::Matrix<double, 6, 1>;
using TraceSystem = Eigen::Matrix<double, 5, 6>;

Sym6 vectorize(const Mat3& a);
Mat3 unvectorize(const Sym6& v);

class ConicFamily {
public:
    virtual ~ConicFamily() = default;
    virtual Mat3 operator()(double t) const = 0;
    // A, A', ..., A''''. The default uses Richardson-extrapolated central
    // differences with steps 8e-2, 4e-2, 2e-2 (samples t +- 0.16 at most).
    virtual std::array<Mat3, 5> derivatives(double t) const;
};

// Osculating conics of the phi curve of one solution, in the P-chart, with
// analytic derivatives (A = N^T B N, N = frame^-1, N' = -C N for the
// companion matrix C of the linearized equation).
class PipelineConicFamily : public ConicFamily {
public:
    explicit PipelineConicFamily(Trajectory traj) : traj_(std::move(traj)) {}
    Mat3 operator()(double t) const override;
    std::array<Mat3, 5> derivatives(double t) const override;
    const Trajectory& trajectory() const { return traj_; }

private:
    Trajectory traj_;
};

class FunctionConicFamily : public ConicFamily {
public:
    explicit FunctionConicFamily(std::function<Mat3(double)> f) : f_(std::move(f)) {}
    Mat3 operator()(double t) const override { return f_(t); }

private:
    std::function<Mat3(double)> f_;
};

// Tabulated family (t, a11, a22, a33, a12, a13, a23). Values and derivatives
// come from a local least-squares polynomial of degree 8 through the eleven
// samples nearest to t (degree n - 3 through all n samples when n < 11).
class SampledConicFamily : public ConicFamily {
public:
    SampledConicFamily(std::vector<double> t, std::vector<Mat3> a);
    static SampledConicFamily read_csv(std::istream& in);
    Mat3 operator()(double t) const override { return derivatives(t)[0]; }
    std::array<Mat3, 5> derivatives(double t) const override;

private:
    std::vector<double> t_;
    std::vector<Mat3> a_;
};

// Rows: vectorized A^(k)(t0), k = 0..4.
TraceSystem build_system(const ConicFamily& fam, double t0);
TraceSystem build_system(const std::array<Mat3, 5>& derivs);

struct RankEstimate {
    int rank = 0;
    Eigen::Matrix<double, 5, 1> singular_values;
    double gap = 0;  // sigma_rank / sigma_(rank+1) (infinite at full rank)
};

// sigma_k counts when sigma_k > tol * sigma_max.
RankEstimate classify_rank(const TraceSystem& system, double tol = 1e-8);

struct PointRecovery {
    bool rank_one = false;
    Mat3 X = Mat3::Zero();
    double minor_residual = 0;  // max |2x2 minor| / |X|_F^2
    std::optional<Vec3> point;  // sign-canonical
    double trace_residual = 0;  // max_k |phi^T A^(k) phi| / (|A^(k)| |phi|^2)
    std::string message;
};

// Veronese test on a symmetric X: all 2x2 minors vanish (<= 1e-7 |X|^2),
// then X = +-phi phi^T from the dominant eigenpair.
PointRecovery factor_veronese(const Mat3& X, double minor_tol = 1e-7);

// Null vector of a rank-5 system, factored and checked against every row.
PointRecovery recover_point(const TraceSystem& system, double minor_tol = 1e-7);

struct Rank2Report {
    bool diagonalizable = false;
    Mat3 M = Mat3::Identity();  // M^T A M and M^T A' M diagonal
    Vec3 a = Vec3::Zero(), ap = Vec3::Zero();  // the two diagonals
    Vec3 x = Vec3::Zero();  // a x a' (squares of the diagonal coordinates)
    std::vector<Vec3> points;  // phi = M y, y_i = +-sqrt(x_i), up to overall sign
    double trace_residual = 0;
    std::string message;
};

// Simultaneous diagonalization of (A, A') by congruence and the cross-product
// construction. Any solution curve of a rank-2 system is a fixed projective
// point, so at most these points are reported.
Rank2Report rank2_analysis(const Mat3& A, const Mat3& Ap);

enum class InverseTag { RANK5_CAUSAL, RANK1_WUENSCHMANN_ZERO, RANK2_POINT_OR_EMPTY, RANK34_DEGENERATE, INCONSISTENT };
std::string to_string(InverseTag tag);

struct InverseReport {
    RankEstimate rank;
    InverseTag tag = InverseTag::INCONSISTENT;
    std::optional<Vec3> point;
    std::optional<PointRecovery> recovery;
    std::optional<Rank2Report> rank2;
    std::string message;
};

// rank_tol is also the assumed relative noise of the input; the Veronese
// test on a rank-5 system uses max(1e-7, 10 rank_tol).
InverseReport analyze_family(const ConicFamily& fam, double t0, double rank_tol = 1e-8);
InverseReport analyze_system(const TraceSystem& system, const Mat3& A, const Mat3& Ap, double rank_tol = 1e-8);

// Gamma = g ^ L_V g ^ ... ^ L_V^4 g as a symmetric 3x3 matrix. Each L_V^k g
// is restricted to the three coordinate vectors other than the largest
// component of V (for J^2 fields: d/dy, d/dp, d/dq, i.e. the coframe
// theta_1, theta_2, theta_3 of ann V), vectorized, and the signed 5x5 minors
// of the resulting 5x6 matrix are read back as a symmetric matrix (off-
// diagonal entries divided by sqrt2). `basis` optionally changes the basis
// of the restricted forms (S -> T^T S T). Defined up to scale.
struct GammaInvariant {
    Mat3 gamma = Mat3::Zero();
    std::array<Mat3, 5> restricted;  // L_V^k g in the chosen basis
    double hadamard_ratio = 0;  // |minors| / prod |rows|; 0 when Gamma = 0
    double adjugate_ratio = 0;  // |adj Gamma|_F / |Gamma|_F^2
};

GammaInvariant gamma_invariant(const DegenerateField& field, const JetPoint& pt,
                               const std::optional<Mat3>& basis = std::nullopt);

enum class MetricTag { VANISHING_WUENSCHMANN, NONZERO_WUENSCHMANN, NOT_FROM_ODE };
std::string to_string(MetricTag tag);

struct MetricClassification {
    MetricTag tag = MetricTag::NOT_FROM_ODE;
    double proportionality = 0;  // max over points
    double adjugate = 0;         // max over points
    double hadamard = 0;         // min over points
};

// Proportionality of L_V g to g first (<= 1e-6); otherwise a nonzero Gamma
// whose adjugate vanishes (<= 1e-6 relative) at every point; otherwise not
// from an ODE.
MetricClassification theorem2_classify(const DegenerateField& field, const std::vector<JetPoint>& pts,
                                 double prop_tol = 1e-6, double adj_tol = 1e-6);
inline MetricClassification theorem2_classify(const DegenerateField& field, const JetPoint& pt, double prop_tol = 1e-6,
                                        double adj_tol = 1e-6) {
    return theorem2_classify(field, std::vector<JetPoint>{pt}, prop_tol, adj_tol);
}

// g + eps Theta^T S Theta with Theta = (dy - p dx, dp - q dx, dq - F dx) and
// S a smooth symmetric field with pseudo-random coefficients. Still
// degenerate along V, but generically not the metric of any equation.
DegenerateField perturbed_field(const Expression& F, double eps, unsigned seed = 7);

}  // namespace wkit
