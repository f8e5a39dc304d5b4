#include "wkit/inverse.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "wkit/errors.hpp"
#include "wkit/projective.hpp"

namespace wkit {
namespace {

// Local fit for sampled families: the kWindow nearest samples, degree
// kWindow - 3 (fewer samples shrink both).
constexpr int kWindow = 11;

constexpr double kSqrt2 = 1.4142135623730951;

double binom(int n, int k) {
    double r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

double factorial(int n) {
    double r = 1;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

Mat3 symmetrized(const Mat3& a) { return (a + a.transpose()) / 2; }

// Cofactor matrix (equal to the adjugate for symmetric input).
Mat3 cofactors(const Mat3& m) {
    Mat3 c;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const int i1 = (i + 1) % 3, i2 = (i + 2) % 3, j1 = (j + 1) % 3, j2 = (j + 2) % 3;
            c(i, j) = m(i1, j1) * m(i2, j2) - m(i1, j2) * m(i2, j1);
        }
    return c;
}

}  // namespace

Sym6 vectorize(const Mat3& a) {
    Sym6 v;
    v << a(0, 0), a(1, 1), a(2, 2), kSqrt2 * a(0, 1), kSqrt2 * a(0, 2), kSqrt2 * a(1, 2);
    return v;
}

Mat3 unvectorize(const Sym6& v) {
    Mat3 a;
    a(0, 0) = v[0];
    a(1, 1) = v[1];
    a(2, 2) = v[2];
    a(0, 1) = a(1, 0) = v[3] / kSqrt2;
    a(0, 2) = a(2, 0) = v[4] / kSqrt2;
    a(1, 2) = a(2, 1) = v[5] / kSqrt2;
    return a;
}

std::array<Mat3, 5> ConicFamily::derivatives(double t) const {
    const ConicFamily& a = *this;
    auto stencil = [&](double h) {
        const Mat3 m2 = a(t - 2 * h), m1 = a(t - h), z = a(t), p1 = a(t + h), p2 = a(t + 2 * h);
        // Five-point central differences, all O(h^2).
        std::array<Mat3, 5> d;
        d[0] = z;
        d[1] = (p1 - m1) / (2 * h);
        d[2] = (p1 - 2 * z + m1) / (h * h);
        d[3] = (p2 - 2 * p1 + 2 * m1 - m2) / (2 * h * h * h);
        d[4] = (p2 - 4 * p1 + 6 * z - 4 * m1 + m2) / (h * h * h * h);
        return d;
    };
    const auto d1 = stencil(8e-2), d2 = stencil(4e-2), d3 = stencil(2e-2);
    std::array<Mat3, 5> out;
    out[0] = d1[0];
    for (int k = 1; k < 5; ++k) {
        const Mat3 r1 = (4 * d2[k] - d1[k]) / 3, r2 = (4 * d3[k] - d2[k]) / 3;
        out[k] = symmetrized((16 * r2 - r1) / 15);
    }
    for (const Mat3& m : out)
        if (!m.allFinite()) throw DegenerateError("derivative estimation failed (non-finite conic values)");
    return out;
}

Mat3 PipelineConicFamily::operator()(double t) const { return cometric_on_solution_space(traj_, t); }

std::array<Mat3, 5> PipelineConicFamily::derivatives(double t) const {
    const TrajectorySample s = traj_.sample(t);
    const auto h = h_jets(traj_.equation(), s.point, 5);
    const Mat3 e = frame(s);
    if (std::abs(e.determinant()) < 1e-300) throw DegenerateError("singular frame");

    // C^(j): companion matrix of phi''' = h0 phi + h1 phi' + h2 phi'' and its derivatives.
    std::array<Mat3, 5> c;
    for (int j = 0; j < 5; ++j) {
        c[j].setZero();
        for (int i = 0; i < 3; ++i) c[j](i, 2) = h(i, j);
    }
    c[0](1, 0) = 1;
    c[0](2, 1) = 1;

    // N = E^-1, N' = -C N.
    std::array<Mat3, 5> n;
    n[0] = e.inverse();
    for (int k = 0; k < 4; ++k) {
        Mat3 acc = Mat3::Zero();
        for (int j = 0; j <= k; ++j) acc += binom(k, j) * c[j] * n[k - j];
        n[k + 1] = -acc;
    }

    // Basis conic and its derivatives; h2^(k) up to k = 5 enters B''''.
    auto h2sq = [&](int k) {
        double s2 = 0;
        for (int j = 0; j <= k; ++j) s2 += binom(k, j) * h(2, j) * h(2, k - j);
        return s2;
    };
    std::array<Mat3, 5> b;
    for (int k = 0; k < 5; ++k) {
        b[k].setZero();
        b[k](1, 2) = b[k](2, 1) = -h(2, k) / 3;
        b[k](2, 2) = (h2sq(k) - 3 * h(2, k + 1) + 9 * h(1, k)) / 9;
        if (k == 0) {
            b[k](0, 2) = b[k](2, 0) = 1;
            b[k](1, 1) = -1;
        }
    }

    std::array<Mat3, 5> out;
    for (int k = 0; k < 5; ++k) {
        Mat3 acc = Mat3::Zero();
        for (int i = 0; i <= k; ++i)
            for (int j = 0; i + j <= k; ++j) {
                const int l = k - i - j;
                const double coef = factorial(k) / (factorial(i) * factorial(j) * factorial(l));
                acc += coef * n[i].transpose() * b[j] * n[l];
            }
        out[k] = symmetrized(acc);
    }
    return out;
}

SampledConicFamily::SampledConicFamily(std::vector<double> t, std::vector<Mat3> a) : t_(std::move(t)), a_(std::move(a)) {
    if (t_.size() != a_.size()) throw std::invalid_argument("conic family: size mismatch");
    if (t_.size() < 9) throw std::invalid_argument("conic family: at least 9 samples are needed");
    if (!std::is_sorted(t_.begin(), t_.end()) || std::adjacent_find(t_.begin(), t_.end()) != t_.end())
        throw std::invalid_argument("conic family: t must be strictly increasing");
}

SampledConicFamily SampledConicFamily::read_csv(std::istream& in) {
    std::vector<double> t;
    std::vector<Mat3> a;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double v[7];
        int n = 0;
        while (n < 7 && ss >> v[n]) ++n;
        if (n == 0 && lineno == 1) continue;  // header
        if (n != 7) throw std::invalid_argument("conic family CSV line " + std::to_string(lineno) + ": expected 7 numbers");
        Mat3 m;
        m << v[1], v[4], v[5], v[4], v[2], v[6], v[5], v[6], v[3];
        t.push_back(v[0]);
        a.push_back(m);
    }
    return SampledConicFamily(std::move(t), std::move(a));
}

std::array<Mat3, 5> SampledConicFamily::derivatives(double t) const {
    if (t < t_.front() || t > t_.back()) throw std::out_of_range("conic family: t outside the sampled range");
    const int n = static_cast<int>(t_.size());
    const int window = std::min(kWindow, n), degree = window - 3;
    int first = static_cast<int>(std::lower_bound(t_.begin(), t_.end(), t) - t_.begin()) - window / 2;
    first = std::clamp(first, 0, n - window);
    double scale = 0;
    for (int i = first; i < first + window; ++i) scale = std::max(scale, std::abs(t_[i] - t));
    Eigen::MatrixXd vand(window, degree + 1), rhs(window, 6);
    for (int r = 0; r < window; ++r) {
        const double u = (t_[first + r] - t) / scale;
        double pw = 1;
        for (int c = 0; c <= degree; ++c, pw *= u) vand(r, c) = pw;
        rhs.row(r) = vectorize(a_[first + r]).transpose();
    }
    const Eigen::MatrixXd coef = vand.colPivHouseholderQr().solve(rhs);
    std::array<Mat3, 5> out;
    for (int k = 0; k < 5; ++k)
        out[k] = unvectorize(coef.row(k).transpose() * factorial(k) / std::pow(scale, k));
    return out;
}

TraceSystem build_system(const std::array<Mat3, 5>& derivs) {
    TraceSystem s;
    for (int k = 0; k < 5; ++k) s.row(k) = vectorize(derivs[k]).transpose();
    return s;
}

TraceSystem build_system(const ConicFamily& fam, double t0) { return build_system(fam.derivatives(t0)); }

RankEstimate classify_rank(const TraceSystem& system, double tol) {
    Eigen::JacobiSVD<TraceSystem> svd(system);
    RankEstimate r;
    r.singular_values = svd.singularValues();
    const double smax = r.singular_values[0];
    for (int k = 0; k < 5; ++k)
        if (smax > 0 && r.singular_values[k] > tol * smax) r.rank = k + 1;
    if (r.rank == 0)
        r.gap = 0;
    else if (r.rank == 5)
        r.gap = std::numeric_limits<double>::infinity();
    else
        r.gap = r.singular_values[r.rank] > 0 ? r.singular_values[r.rank - 1] / r.singular_values[r.rank]
                                               : std::numeric_limits<double>::infinity();
    return r;
}

PointRecovery factor_veronese(const Mat3& X, double minor_tol) {
    PointRecovery out;
    out.X = symmetrized(X);
    const double norm2 = out.X.squaredNorm();
    if (norm2 == 0) {
        out.message = "X vanishes";
        return out;
    }
    out.minor_residual = cofactors(out.X).cwiseAbs().maxCoeff() / norm2;
    if (out.minor_residual > minor_tol) {
        out.message = "X is not an outer product (2x2 minors do not vanish)";
        return out;
    }
    Eigen::SelfAdjointEigenSolver<Mat3> es(out.X);
    int k = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(es.eigenvalues()[i]) > std::abs(es.eigenvalues()[k])) k = i;
    out.rank_one = true;
    out.point = canonical(std::sqrt(std::abs(es.eigenvalues()[k])) * es.eigenvectors().col(k));
    return out;
}

PointRecovery recover_point(const TraceSystem& system, double minor_tol) {
    Eigen::JacobiSVD<Eigen::Matrix<double, 5, 6>> svd(system, Eigen::ComputeFullV);
    const Sym6 null = svd.matrixV().col(5);
    PointRecovery out = factor_veronese(unvectorize(null), minor_tol);
    if (!out.point) return out;
    const Vec3& phi = *out.point;
    for (int k = 0; k < 5; ++k) {
        const Mat3 a = unvectorize(system.row(k).transpose());
        const double scale = a.norm() * phi.squaredNorm();
        if (scale > 0) out.trace_residual = std::max(out.trace_residual, std::abs(phi.dot(a * phi)) / scale);
    }
    return out;
}

Rank2Report rank2_analysis(const Mat3& A_in, const Mat3& Ap_in) {
    Rank2Report r;
    const Mat3 A = symmetrized(A_in), Ap = symmetrized(Ap_in);
    auto is_diagonal = [](const Mat3& m) {
        return (m - Mat3(m.diagonal().asDiagonal())).norm() <= 1e-14 * std::max(1.0, m.norm());
    };
    if (is_diagonal(A) && is_diagonal(Ap)) {
        r.M.setIdentity();
    } else {
        Eigen::FullPivLU<Mat3> lu(A);
        if (!lu.isInvertible()) {
            r.message = "non-diagonalizable pencil: A is singular";
            return r;
        }
        Eigen::EigenSolver<Mat3> es(lu.inverse() * Ap);
        const auto& ev = es.eigenvalues();
        const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
        for (int i = 0; i < 3; ++i)
            if (std::abs(ev[i].imag()) > 1e-12 * scale) {
                r.message = "non-diagonalizable pencil: complex generalized eigenvalues";
                return r;
            }
        r.M = es.eigenvectors().real();
        // Repeated eigenvalues: A-orthogonalize inside the eigenspace.
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < i; ++j) {
                if (std::abs(ev[i].real() - ev[j].real()) > 1e-10 * scale) continue;
                const double ajj = r.M.col(j).dot(A * r.M.col(j));
                if (std::abs(ajj) < 1e-14) {
                    r.message = "non-diagonalizable pencil: null direction in a repeated eigenspace";
                    return r;
                }
                r.M.col(i) -= r.M.col(j).dot(A * r.M.col(i)) / ajj * r.M.col(j);
            }
        for (int i = 0; i < 3; ++i) r.M.col(i).normalize();
        const Mat3 da = r.M.transpose() * A * r.M, dap = r.M.transpose() * Ap * r.M;
        const double off = (da - Mat3(da.diagonal().asDiagonal())).norm() / da.norm() +
                           (dap - Mat3(dap.diagonal().asDiagonal())).norm() / std::max(dap.norm(), 1e-300);
        if (!(off <= 1e-8)) {
            r.message = "non-diagonalizable pencil: congruence did not diagonalize";
            return r;
        }
    }
    r.diagonalizable = true;
    r.a = (r.M.transpose() * A * r.M).diagonal();
    r.ap = (r.M.transpose() * Ap * r.M).diagonal();
    r.x = r.a.cross(r.ap);
    const double xs = r.x.cwiseAbs().maxCoeff();
    if (xs <= 1e-12 * r.a.norm() * r.ap.norm()) {
        r.message = "degenerate: A and A' are proportional";
        return r;
    }
    Vec3 x = r.x;
    if (x.maxCoeff() < 1e-12 * xs) x = -x;
    if (x.minCoeff() < -1e-12 * xs) {
        r.message = "no real solution: the products have mixed signs";
        return r;
    }
    for (int i = 0; i < 3; ++i)
        if (x[i] <= 1e-10 * xs) x[i] = 0;
    const Vec3 y = x.cwiseSqrt();
    // Sign patterns up to overall sign; zero entries collapse duplicates.
    for (int s = 0; s < 4; ++s) {
        Vec3 ys = y;
        if (s & 1) ys[1] = -ys[1];
        if (s & 2) ys[2] = -ys[2];
        const Vec3 phi = canonical(r.M * ys);
        const bool dup = std::any_of(r.points.begin(), r.points.end(),
                                     [&](const Vec3& p) { return projective_distance(p, phi) < 1e-12; });
        if (dup) continue;
        r.points.push_back(phi);
        const double n2 = phi.squaredNorm();
        r.trace_residual = std::max({r.trace_residual, std::abs(phi.dot(A * phi)) / (A.norm() * n2),
                                     std::abs(phi.dot(Ap * phi)) / (Ap.norm() * n2)});
    }
    r.message = "solution curve degenerates to a fixed projective point";
    return r;
}

std::string to_string(InverseTag tag) {
    switch (tag) {
        case InverseTag::RANK5_CAUSAL: return "RANK5_CAUSAL";
        case InverseTag::RANK1_WUENSCHMANN_ZERO: return "RANK1_WUENSCHMANN_ZERO";
        case InverseTag::RANK2_POINT_OR_EMPTY: return "RANK2_POINT_OR_EMPTY";
        case InverseTag::RANK34_DEGENERATE: return "RANK34_DEGENERATE";
        case InverseTag::INCONSISTENT: return "INCONSISTENT";
    }
    return "INCONSISTENT";
}

InverseReport analyze_system(const TraceSystem& system, const Mat3& A, const Mat3& Ap, double rank_tol) {
    InverseReport r;
    r.rank = classify_rank(system, rank_tol);
    switch (r.rank.rank) {
        case 0:
            r.tag = InverseTag::INCONSISTENT;
            r.message = "degenerate input: the trace system vanishes";
            break;
        case 1:
            r.tag = InverseTag::RANK1_WUENSCHMANN_ZERO;
            r.message = "constant conic up to scale: the Wuenschmann invariant vanishes";
            break;
        case 2:
            r.tag = InverseTag::RANK2_POINT_OR_EMPTY;
            r.rank2 = rank2_analysis(A, Ap);
            r.message = r.rank2->message;
            if (r.rank2->points.size() == 1) r.point = r.rank2->points.front();
            break;
        case 3:
        case 4:
            r.tag = InverseTag::RANK34_DEGENERATE;
            r.message = "rank 3 or 4: any solution curve is degenerate; no recovery attempted";
            break;
        default: {
            PointRecovery rec = recover_point(system, std::max(1e-7, 10 * rank_tol));
            r.point = rec.point;
            if (rec.point) {
                r.tag = InverseTag::RANK5_CAUSAL;
                r.message = "generating curve point recovered";
            } else {
                r.tag = InverseTag::INCONSISTENT;
                r.message = "not from an ODE: " + rec.message;
            }
            r.recovery = std::move(rec);
        }
    }
    return r;
}

InverseReport analyze_family(const ConicFamily& fam, double t0, double rank_tol) {
    const auto d = fam.derivatives(t0);
    return analyze_system(build_system(d), d[0], d[1], rank_tol);
}

GammaInvariant gamma_invariant(const DegenerateField& field, const JetPoint& pt, const std::optional<Mat3>& basis) {
    const std::vector<Mat4> lie = lie_derivatives(field, pt, 4);
    Vec4 v;
    {
        const FieldJets fj = field(pt, 0);
        for (int k = 0; k < 4; ++k) v[k] = fj.direction[k].value();
    }
    if (v.norm() == 0) throw DegenerateError("the degenerate direction vanishes");
    int pivot;
    v.cwiseAbs().maxCoeff(&pivot);
    int keep[3], n = 0;
    for (int i = 0; i < 4; ++i)
        if (i != pivot) keep[n++] = i;

    GammaInvariant out;
    TraceSystem rows;
    for (int k = 0; k < 5; ++k) {
        Mat3 s;
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) s(a, b) = lie[k](keep[a], keep[b]);
        if (basis) s = basis->transpose() * s * *basis;
        out.restricted[k] = symmetrized(s);
        rows.row(k) = vectorize(out.restricted[k]).transpose();
    }

    Sym6 minors;
    for (int j = 0; j < 6; ++j) {
        Eigen::Matrix<double, 5, 5> sub;
        for (int c = 0, cc = 0; c < 6; ++c)
            if (c != j) sub.col(cc++) = rows.col(c);
        minors[j] = ((j % 2) ? -1.0 : 1.0) * sub.determinant();
    }
    double prod = 1;
    for (int k = 0; k < 5; ++k) prod *= rows.row(k).norm();
    out.hadamard_ratio = prod > 0 ? minors.norm() / prod : 0.0;
    out.gamma = unvectorize(minors);
    const double g2 = out.gamma.squaredNorm();
    out.adjugate_ratio = g2 > 0 ? cofactors(out.gamma).norm() / g2 : 0.0;
    return out;
}

std::string to_string(MetricTag tag) {
    switch (tag) {
        case MetricTag::VANISHING_WUENSCHMANN: return "VANISHING_WUENSCHMANN";
        case MetricTag::NONZERO_WUENSCHMANN: return "NONZERO_WUENSCHMANN";
        case MetricTag::NOT_FROM_ODE: return "NOT_FROM_ODE";
    }
    return "NOT_FROM_ODE";
}

MetricClassification theorem2_classify(const DegenerateField& field, const std::vector<JetPoint>& pts, double prop_tol,
                                 double adj_tol) {
    if (pts.empty()) throw std::invalid_argument("theorem2_classify needs at least one point");
    MetricClassification r;
    r.hadamard = std::numeric_limits<double>::infinity();
    for (const JetPoint& pt : pts) {
        const auto lie = lie_derivatives(field, pt, 1);
        r.proportionality = std::max(r.proportionality, proportionality_residual(lie[0], lie[1]));
    }
    if (r.proportionality <= prop_tol) {
        r.tag = MetricTag::VANISHING_WUENSCHMANN;
        return r;
    }
    for (const JetPoint& pt : pts) {
        const GammaInvariant g = gamma_invariant(field, pt);
        r.adjugate = std::max(r.adjugate, g.adjugate_ratio);
        r.hadamard = std::min(r.hadamard, g.hadamard_ratio);
    }
    // Gamma counts as nonzero when its rows are independent beyond rounding.
    r.tag = (r.hadamard > 1e-12 && r.adjugate <= adj_tol) ? MetricTag::NONZERO_WUENSCHMANN : MetricTag::NOT_FROM_ODE;
    return r;
}

DegenerateField perturbed_field(const Expression& F, double eps, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::array<double, 6> a, b;
    std::array<Vec4, 6> w;
    for (int i = 0; i < 6; ++i) {
        a[i] = u(rng);
        b[i] = u(rng);
        w[i] = Vec4(u(rng), u(rng), u(rng), u(rng));
    }
    const DegenerateField base = chern_field(F);
    return [=](const JetPoint& pt, int m) {
        FieldJets fj = base(pt, m);
        const auto c = coordinate_jets(pt, m);
        const Jet f = F.evaluate(c);
        const Jet one = Jet::constant(1, m), zero = Jet::constant(0, m);
        const std::array<std::array<Jet, 4>, 3> theta{{{-c[2], one, zero, zero},
                                                       {-c[3], zero, one, zero},
                                                       {-f, zero, zero, one}}};
        // S_ab = a + b sin(w . (x, y, p, q)), packed like vectorize().
        const int idx[3][3] = {{0, 3, 4}, {3, 1, 5}, {4, 5, 2}};
        std::array<Jet, 6> s;
        for (int i = 0; i < 6; ++i) {
            Jet arg = Jet::constant(0, m);
            for (int k = 0; k < 4; ++k) arg += w[i][k] * c[k];
            s[i] = a[i] + b[i] * sin(arg);
        }
        for (int i = 0; i < 4; ++i)
            for (int j = i; j < 4; ++j) {
                Jet add = Jet::constant(0, m);
                for (int p = 0; p < 3; ++p)
                    for (int q = 0; q < 3; ++q) add += theta[p][i] * s[idx[p][q]] * theta[q][j];
                fj.metric[i][j] += eps * add;
                if (j != i) fj.metric[j][i] = fj.metric[i][j];
            }
        return fj;
    };
}

}  // namespace wkit
