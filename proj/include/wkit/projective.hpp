#pragma once

// Helpers for homogeneous coordinates.

#include <cmath>

#include <Eigen/Dense>

namespace wkit {

// Unit Euclidean norm, first nonzero component positive.
template <class V>
auto canonical(const V& v) {
    auto u = v.normalized().eval();
    for (Eigen::Index i = 0; i < u.size(); ++i)
        if (std::abs(u[i]) > 1e-14) {
            if (u[i] < 0) u = -u;
            break;
        }
    for (Eigen::Index i = 0; i < u.size(); ++i)
        if (u[i] == 0) u[i] = 0.0;  // no negative zeros
    return u;
}

// sin of the angle between the lines spanned by a and b.
template <class A, class B>
double projective_distance(const A& a, const B& b) {
    // Chord form keeps full relative accuracy for nearly parallel lines.
    const auto ua = a.normalized().eval();
    const auto ub = b.normalized().eval();
    const double d = std::min((ua - ub).norm(), (ua + ub).norm());
    return d * std::sqrt(std::max(0.0, 1.0 - d * d / 4));
}

// Entries of a symmetric 3x3 matrix as (a11, a22, a33, a12, a13, a23).
inline Eigen::Matrix<double, 6, 1> sym_entries(const Eigen::Matrix3d& m) {
    Eigen::Matrix<double, 6, 1> v;
    v << m(0, 0), m(1, 1), m(2, 2), m(0, 1), m(0, 2), m(1, 2);
    return v;
}

// Projective distance between symmetric matrices compared as 6-vectors.
inline double projective_distance(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b) {
    return projective_distance(sym_entries(a), sym_entries(b));
}

}  // namespace wkit
