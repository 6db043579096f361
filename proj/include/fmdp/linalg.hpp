#pragma once

// State-indexed vectors and matrices. Vectors carry the supremum norm and the
// componentwise partial order; square matrices carry the induced operator norm
// (maximum absolute row sum).

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "fmdp/error.hpp"

namespace fmdp {

template <typename Scalar>
using StateVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using StateMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vector = StateVector<double>;
using Matrix = StateMatrix<double>;

inline constexpr double tol_pmf = 1e-9;
inline constexpr double tol_residual = 1e-8;

namespace detail {

inline void require_same_size(Eigen::Index a, Eigen::Index b, const char* what) {
    if (a != b)
        throw Error(ErrorKind::DimensionMismatch,
                    std::string(what) + ": " + std::to_string(a) + " vs " + std::to_string(b));
}

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& a, const char* what) {
    require_same_size(a.rows(), a.cols(), what);
}

} // namespace detail

/// max_s |v(s)|; zero for the empty vector.
template <typename Derived>
typename Derived::Scalar sup_norm(const Eigen::MatrixBase<Derived>& v) {
    if (v.size() == 0)
        return typename Derived::Scalar(0);
    return v.cwiseAbs().maxCoeff();
}

/// Componentwise u <= v. Exact on floats; callers wanting slack shift one side.
template <typename DerivedU, typename DerivedV>
bool vec_leq(const Eigen::MatrixBase<DerivedU>& u, const Eigen::MatrixBase<DerivedV>& v) {
    detail::require_same_size(u.size(), v.size(), "vec_leq");
    return (u.array() <= v.array()).all();
}

/// Operator norm induced by the sup norm: the largest absolute row sum.
template <typename Derived>
typename Derived::Scalar op_norm(const Eigen::MatrixBase<Derived>& a) {
    if (a.rows() == 0)
        return typename Derived::Scalar(0);
    return a.cwiseAbs().rowwise().sum().maxCoeff();
}

template <typename DerivedA, typename DerivedV>
StateVector<typename DerivedA::Scalar> mat_vec(const Eigen::MatrixBase<DerivedA>& a,
                                               const Eigen::MatrixBase<DerivedV>& v) {
    detail::require_same_size(a.cols(), v.size(), "mat_vec");
    return a * v;
}

template <typename DerivedA, typename DerivedB>
StateMatrix<typename DerivedA::Scalar> mat_mul(const Eigen::MatrixBase<DerivedA>& a,
                                               const Eigen::MatrixBase<DerivedB>& b) {
    detail::require_same_size(a.cols(), b.rows(), "mat_mul");
    return a * b;
}

/// A^n by repeated squaring; A^0 is the identity.
template <typename Derived>
StateMatrix<typename Derived::Scalar> mat_pow(const Eigen::MatrixBase<Derived>& a, std::size_t n) {
    using Scalar = typename Derived::Scalar;
    detail::require_square(a, "mat_pow");
    StateMatrix<Scalar> result = StateMatrix<Scalar>::Identity(a.rows(), a.cols());
    StateMatrix<Scalar> base = a;
    while (n > 0) {
        if (n & 1U)
            result = result * base;
        n >>= 1U;
        if (n > 0)
            base = base * base;
    }
    return result;
}

/**
 * Row-stochastic test: every row sums to one within tol and no entry is below
 * -tol. Non-square matrices are never stochastic.
 */
template <typename Derived>
bool is_stochastic(const Eigen::MatrixBase<Derived>& a, double tol = tol_pmf) {
    if (a.rows() != a.cols())
        return false;
    if (a.size() > 0 && a.minCoeff() < -tol)
        return false;
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        if (std::abs(a.row(i).sum() - 1.0) > tol)
            return false;
    return true;
}

/**
 * Gelfand upper bound on the spectral radius: min over n in [1, n_max] of
 * ||A^n||^(1/n). Sound as a certificate for rho(A) < 1 and non-increasing in
 * n_max.
 */
template <typename Derived>
typename Derived::Scalar spectral_radius_estimate(const Eigen::MatrixBase<Derived>& a,
                                                  std::size_t n_max = 64) {
    using Scalar = typename Derived::Scalar;
    detail::require_square(a, "spectral_radius_estimate");
    if (n_max == 0)
        throw Error(ErrorKind::InvalidArgument, "spectral_radius_estimate needs n_max >= 1");
    StateMatrix<Scalar> power = a;
    Scalar best = std::numeric_limits<Scalar>::infinity();
    for (std::size_t n = 1; n <= n_max; ++n) {
        if (n > 1)
            power = power * a;
        const Scalar norm = op_norm(power);
        if (norm == Scalar(0))
            return Scalar(0);
        const Scalar root = std::pow(norm, Scalar(1) / static_cast<Scalar>(n));
        if (root < best)
            best = root;
    }
    return best;
}

struct NeumannOptions {
    double tol = 1e-10;
    std::size_t n_max = 10'000;
    std::size_t probe_depth = 8;
    double residual_tol = tol_residual;
};

/**
 * Inverse of A as the partial sum of the Neumann series sum_n (I - A)^n.
 *
 * With B = I - A and q = ||B|| when that is below one (otherwise a Gelfand
 * probe of B), the sum stops at the first term T_n with ||T_n|| q / (1 - q)
 * <= tol. The result must then satisfy ||A S - I|| <= residual_tol.
 */
template <typename Derived>
StateMatrix<typename Derived::Scalar> neumann_inverse(const Eigen::MatrixBase<Derived>& a,
                                                      const NeumannOptions& opts = {}) {
    using Scalar = typename Derived::Scalar;
    using Mat = StateMatrix<Scalar>;
    detail::require_square(a, "neumann_inverse");
    if (!(opts.tol > 0))
        throw Error(ErrorKind::InvalidArgument, "neumann_inverse needs tol > 0");

    const Eigen::Index n = a.rows();
    const Mat identity = Mat::Identity(n, n);
    const Mat b = identity - a;

    Scalar q = op_norm(b);
    if (!(q < Scalar(1)))
        q = spectral_radius_estimate(b, opts.probe_depth);
    if (!(q < Scalar(1)))
        throw Error(ErrorKind::SpectralRadiusNotBounded,
                    "Gelfand bound on rho(I - A) is " + std::to_string(q));

    Mat sum = identity;
    Mat term = identity;
    std::size_t k = 0;
    while (op_norm(term) * q / (Scalar(1) - q) > opts.tol) {
        if (++k > opts.n_max)
            throw Error(ErrorKind::IterationCapExceeded,
                        "Neumann series not within tolerance after " +
                            std::to_string(opts.n_max) + " terms");
        term = term * b;
        sum += term;
    }

    const Scalar residual = op_norm(Mat(a * sum - identity));
    if (!(residual <= opts.residual_tol))
        throw Error(ErrorKind::ResidualTooLarge,
                    "||A S - I|| = " + std::to_string(residual));
    return sum;
}

/**
 * Direct solve of A x = b by LU with partial pivoting; independent of the
 * Neumann route.
 */
template <typename DerivedA, typename DerivedB>
StateVector<typename DerivedA::Scalar> solve_linear(const Eigen::MatrixBase<DerivedA>& a,
                                                    const Eigen::MatrixBase<DerivedB>& b,
                                                    double residual_tol = tol_residual) {
    using Scalar = typename DerivedA::Scalar;
    detail::require_square(a, "solve_linear");
    detail::require_same_size(a.rows(), b.size(), "solve_linear");
    if (a.rows() == 0)
        return StateVector<Scalar>();

    const StateMatrix<Scalar> dense = a;
    Eigen::PartialPivLU<StateMatrix<Scalar>> lu(dense);
    const Scalar rcond = lu.rcond();
    if (!(rcond > std::numeric_limits<Scalar>::epsilon()))
        throw Error(ErrorKind::SingularMatrix, "reciprocal condition " + std::to_string(rcond));

    StateVector<Scalar> x = lu.solve(b);
    const Scalar residual = sup_norm(StateVector<Scalar>(dense * x - b));
    if (!(residual <= residual_tol))
        throw Error(ErrorKind::ResidualTooLarge, "||Ax - b|| = " + std::to_string(residual));
    return x;
}

} // namespace fmdp
