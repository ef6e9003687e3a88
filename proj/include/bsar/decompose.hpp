// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------


#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bsar/core/matrix.hpp"
#include "bsar/error.hpp"

namespace bsar {

/// Leading k singular triplets X v_i = sigma_i u_i.
struct TruncatedSvd {
    std::size_t k = 0;
    std::vector<double> singular_values;  // non-increasing
    ComplexMatrix left;                   // M x k, columns u_i
    ComplexMatrix right;                  // N x k, columns v_i
    double residual_energy = 0.0;         // ||X||_F^2 - sum sigma_i^2
    // Set when sigma_i / sigma_{i+1} < 1 + 1e-6 for the leading pair; the
    // first singular vectors are then not individually determined.
    bool leading_degenerate = false;
    std::vector<std::size_t> degenerate_pairs;  // i such that (i, i+1) is a near-tie
    // Set when trailing singular values are numerically zero; the matching
    // vectors on the derived side are an arbitrary orthonormal completion.
    bool rank_deficient = false;
    std::size_t numerical_rank = 0;
    std::size_t iterations = 0;

    ComplexVector left_vector(std::size_t i) const { return left.column(i); }
    ComplexVector right_vector(std::size_t i) const { return right.column(i); }
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& message, TruncatedSvd last_iterate)
        : Error(ErrorCode::convergence, message), last_(std::move(last_iterate)) {}

    const TruncatedSvd& last_iterate() const noexcept { return last_; }

private:
    TruncatedSvd last_;
};

namespace detail {

using DenseMatrix = Eigen::MatrixXcd;

inline constexpr double degeneracy_ratio = 1.0 + 1e-6;

// Hermitian Gram operator of whichever side of X is smaller. For small
// sides the Gram matrix is formed once; beyond `explicit_limit` it is
// applied implicitly as two products with X.
class GramOperator {
public:
    static constexpr std::size_t explicit_limit = 4096;

    explicit GramOperator(const ComplexMatrix& x) : x_(x), right_side_(x.cols() <= x.rows())
    {
        dim_ = right_side_ ? x.cols() : x.rows();
        if (dim_ <= explicit_limit) {
            form();
        }
    }

    std::size_t dim() const noexcept { return dim_; }
    // True when the operator is X^H X and its eigenvectors are right singular vectors.
    bool right_side() const noexcept { return right_side_; }

    DenseMatrix apply(const DenseMatrix& q) const
    {
        if (gram_.size() != 0) {
            return gram_.selfadjointView<Eigen::Upper>() * q;
        }
        return right_side_ ? adjoint_times(times(q)) : times(adjoint_times(q));
    }

    // X q, with q of X.cols() rows.
    DenseMatrix times(const DenseMatrix& q) const
    {
        DenseMatrix out = DenseMatrix::Zero(static_cast<Eigen::Index>(x_.rows()), q.cols());
        for (std::size_t r = 0; r < x_.rows(); ++r) {
            const auto row = x_.row(r);
            for (Eigen::Index j = 0; j < q.cols(); ++j) {
                double re = 0.0;
                double im = 0.0;
                for (std::size_t c = 0; c < x_.cols(); ++c) {
                    const cdouble a = row[c];
                    const cdouble b = q(static_cast<Eigen::Index>(c), j);
                    re += a.real() * b.real() - a.imag() * b.imag();
                    im += a.real() * b.imag() + a.imag() * b.real();
                }
                out(static_cast<Eigen::Index>(r), j) = cdouble(re, im);
            }
        }
        return out;
    }

    // X^H q, with q of X.rows() rows.
    DenseMatrix adjoint_times(const DenseMatrix& q) const
    {
        DenseMatrix out = DenseMatrix::Zero(static_cast<Eigen::Index>(x_.cols()), q.cols());
        for (std::size_t r = 0; r < x_.rows(); ++r) {
            const auto row = x_.row(r);
            for (Eigen::Index j = 0; j < q.cols(); ++j) {
                const cdouble b = q(static_cast<Eigen::Index>(r), j);
                for (std::size_t c = 0; c < x_.cols(); ++c) {
                    out(static_cast<Eigen::Index>(c), j) += std::conj(row[c]) * b;
                }
            }
        }
        return out;
    }

private:
    void form()
    {
        const auto n = static_cast<Eigen::Index>(dim_);
        gram_ = DenseMatrix::Zero(n, n);
        if (right_side_) {
            // X^H X accumulated one row of X at a time (rank-one updates).
            for (std::size_t r = 0; r < x_.rows(); ++r) {
                const auto row = x_.row(r);
                for (Eigen::Index i = 0; i < n; ++i) {
                    const cdouble a = std::conj(row[static_cast<std::size_t>(i)]);
                    if (a == cdouble{}) {
                        continue;
                    }
                    for (Eigen::Index j = i; j < n; ++j) {
                        gram_(i, j) += a * row[static_cast<std::size_t>(j)];
                    }
                }
            }
        } else {
            // X X^H from row inner products.
            for (Eigen::Index i = 0; i < n; ++i) {
                const auto ri = x_.row(static_cast<std::size_t>(i));
                for (Eigen::Index j = i; j < n; ++j) {
                    const auto rj = x_.row(static_cast<std::size_t>(j));
                    double re = 0.0;
                    double im = 0.0;
                    for (std::size_t c = 0; c < ri.size(); ++c) {
                        const cdouble a = ri[c];
                        const cdouble b = rj[c];
                        re += a.real() * b.real() + a.imag() * b.imag();
                        im += a.imag() * b.real() - a.real() * b.imag();
                    }
                    gram_(i, j) = cdouble(re, im);
                }
            }
        }
    }

    const ComplexMatrix& x_;
    bool right_side_;
    std::size_t dim_ = 0;
    DenseMatrix gram_;
};

// Modified Gram-Schmidt, applied twice, against `locked` leading columns of
// q and then among the remaining columns. Columns that vanish are replaced
// by fresh random directions.
inline void orthonormalize(DenseMatrix& q, Eigen::Index locked, std::mt19937_64& rng)
{
    std::normal_distribution<double> gauss;
    const Eigen::Index n = q.rows();
    for (Eigen::Index j = locked; j < q.cols(); ++j) {
        for (int attempt = 0; attempt < 4; ++attempt) {
            const double before = q.col(j).norm();
            for (int pass = 0; pass < 2; ++pass) {
                for (Eigen::Index i = 0; i < j; ++i) {
                    const cdouble proj = q.col(i).dot(q.col(j));
                    q.col(j) -= proj * q.col(i);
                }
            }
            const double after = q.col(j).norm();
            if (after > 1e-10 * before && after > std::numeric_limits<double>::min()) {
                q.col(j) /= after;
                break;
            }
            for (Eigen::Index r = 0; r < n; ++r) {
                q(r, j) = cdouble(gauss(rng), gauss(rng));
            }
        }
    }
}

// Eigenpairs of a small Hermitian matrix, largest first.
inline void hermitian_eigen_descending(const DenseMatrix& h, Eigen::VectorXd& values, DenseMatrix& vectors)
{
    Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(h);
    const Eigen::Index b = h.rows();
    values = solver.eigenvalues().reverse();
    vectors = solver.eigenvectors().rowwise().reverse();
    (void)b;
}

inline ComplexMatrix to_matrix(const DenseMatrix& m)
{
    ComplexMatrix out(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()));
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            out(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = m(r, c);
        }
    }
    return out;
}

// Turns an orthonormal basis of the Gram side into singular triplets by a
// Rayleigh-Ritz step through X itself, so that the derived side inherits
// orthogonality from the small eigenproblem rather than from convergence.
inline TruncatedSvd assemble(const GramOperator& op, const DenseMatrix& basis, std::size_t k,
                             double frobenius_sq, std::size_t iterations, std::uint64_t seed)
{
    const DenseMatrix mapped = op.right_side() ? op.times(basis) : op.adjoint_times(basis);
    Eigen::VectorXd theta;
    DenseMatrix y;
    hermitian_eigen_descending(mapped.adjoint() * mapped, theta, y);

    const auto kk = static_cast<Eigen::Index>(k);
    DenseMatrix gram_side = basis * y.leftCols(kk);
    DenseMatrix other_side = mapped * y.leftCols(kk);

    TruncatedSvd svd;
    svd.k = k;
    svd.iterations = iterations;
    svd.singular_values.resize(k);
    const double sigma1 = std::sqrt(std::max(theta(0), 0.0));
    const double zero_floor =
        sigma1 * 10.0 * static_cast<double>(std::max(op.dim(), static_cast<std::size_t>(mapped.rows()))) *
        std::numeric_limits<double>::epsilon();
    std::mt19937_64 rng(seed ^ 0x5bd1e995ULL);
    std::normal_distribution<double> gauss;
    // Ritz values are descending, so numerically zero ones form a trailing
    // block; their vectors are completed to an orthonormal set.
    std::size_t rank = 0;
    for (Eigen::Index i = 0; i < kk; ++i) {
        const double norm = other_side.col(i).norm();
        if (!(norm > zero_floor && norm > 0.0)) {
            break;
        }
        svd.singular_values[static_cast<std::size_t>(i)] = norm;
        other_side.col(i) /= norm;
        ++rank;
    }
    const auto first_zero = static_cast<Eigen::Index>(rank);
    if (first_zero < kk) {
        svd.rank_deficient = true;
        for (Eigen::Index i = first_zero; i < kk; ++i) {
            svd.singular_values[static_cast<std::size_t>(i)] = 0.0;
            for (Eigen::Index r = 0; r < other_side.rows(); ++r) {
                other_side(r, i) = cdouble(gauss(rng), gauss(rng));
            }
        }
        orthonormalize(other_side, first_zero, rng);
    }
    svd.numerical_rank = rank;

    // Degeneracy flags use the (k+1)-th Ritz value when the block holds one.
    std::vector<double> sig(svd.singular_values);
    if (theta.size() > kk) {
        sig.push_back(std::sqrt(std::max(theta(kk), 0.0)));
    }
    for (std::size_t i = 0; i + 1 < sig.size(); ++i) {
        if (sig[i] > 0.0 && sig[i] < degeneracy_ratio * sig[i + 1]) {
            svd.degenerate_pairs.push_back(i);
            if (i == 0) {
                svd.leading_degenerate = true;
            }
        }
    }

    double captured = 0.0;
    for (double s : svd.singular_values) {
        captured += s * s;
    }
    svd.residual_energy = std::max(frobenius_sq - captured, 0.0);

    svd.left = to_matrix(op.right_side() ? other_side : gram_side);
    svd.right = to_matrix(op.right_side() ? gram_side : other_side);
    return svd;
}

}  // namespace detail

/// Dominant k singular triplets by block power (subspace) iteration on the
/// smaller Gram operator, with Rayleigh-Ritz extraction and in-order locking
/// of converged leading vectors. Converged when every one of the first k
/// singular-value estimates changes by less than `tol` relatively between
/// iterations. Start vectors are drawn from `seed`.
inline TruncatedSvd leading_triplets(const ComplexMatrix& x, std::size_t k, double tol = 1e-10,
                                     std::size_t max_iter = 1000, std::uint64_t seed = 0x42)
{
    const std::size_t max_k = std::min(x.rows(), x.cols());
    if (k < 1 || k > max_k) {
        throw ParameterError("k = " + std::to_string(k) + " outside [1, " + std::to_string(max_k) + "]");
    }
    if (!(tol > 0.0)) {
        throw ParameterError("tol must be > 0");
    }
    if (max_iter < 1) {
        throw ParameterError("max_iter must be >= 1");
    }

    const detail::GramOperator op(x);
    const std::size_t n = op.dim();
    const std::size_t block = std::min(n, k + std::max<std::size_t>(8, k));
    const auto bk = static_cast<Eigen::Index>(block);
    const double frobenius_sq = x.frobenius_norm_squared();

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    detail::DenseMatrix q(static_cast<Eigen::Index>(n), bk);
    for (Eigen::Index j = 0; j < bk; ++j) {
        for (Eigen::Index r = 0; r < q.rows(); ++r) {
            q(r, j) = cdouble(gauss(rng), gauss(rng));
        }
    }
    detail::orthonormalize(q, 0, rng);

    if (frobenius_sq == 0.0) {
        return detail::assemble(op, q, k, frobenius_sq, 0, seed);
    }

    std::vector<double> previous(block, -1.0);
    Eigen::Index locked = 0;
    const double tiny = std::sqrt(frobenius_sq) * 1e-300;
    for (std::size_t iter = 1; iter <= max_iter; ++iter) {
        // Rayleigh-Ritz on the active (unlocked) columns.
        const Eigen::Index active = bk - locked;
        detail::DenseMatrix qa = q.rightCols(active);
        detail::DenseMatrix w = op.apply(qa);
        Eigen::VectorXd theta;
        detail::DenseMatrix y;
        detail::hermitian_eigen_descending(qa.adjoint() * w, theta, y);

        // sqrt of a Gram eigenvalue cannot resolve below sqrt(n eps) sigma1;
        // values that small are numerically zero and count as converged.
        const double top = locked > 0 ? previous[0] : std::sqrt(std::max(theta(0), 0.0));
        const double noise = top * std::sqrt(10.0 * static_cast<double>(n) * std::numeric_limits<double>::epsilon());
        bool all_converged = true;
        Eigen::Index newly_locked = 0;
        bool locking = true;
        for (Eigen::Index i = 0; i < active; ++i) {
            const auto idx = static_cast<std::size_t>(locked + i);
            const double sigma = std::sqrt(std::max(theta(i), 0.0));
            const double change = std::abs(sigma - previous[idx]);
            const bool converged =
                previous[idx] >= 0.0 && (change <= tol * std::max(sigma, tiny) || std::max(sigma, previous[idx]) <= noise);
            previous[idx] = sigma;
            if (idx < k) {
                all_converged = all_converged && converged;
                if (locking && converged) {
                    ++newly_locked;
                } else {
                    locking = false;
                }
            }
        }

        // Ritz vectors of the current block, then one power step for the
        // columns that stay active.
        q.rightCols(active) = qa * y;
        if (all_converged) {
            return detail::assemble(op, q, k, frobenius_sq, iter, seed);
        }
        const detail::DenseMatrix wy = w * y;
        locked += newly_locked;
        q.rightCols(bk - locked) = wy.rightCols(bk - locked);
        detail::orthonormalize(q, locked, rng);
    }

    TruncatedSvd last = detail::assemble(op, q, k, frobenius_sq, max_iter, seed);
    throw ConvergenceError("leading_triplets did not converge within " + std::to_string(max_iter) +
                               " iterations (k = " + std::to_string(k) + ")",
                           std::move(last));
}

struct SingularSpectrum {
    std::vector<double> values;
    double dominance_ratio = 0.0;  // sigma_1 / sigma_2
};

inline SingularSpectrum singular_spectrum(const TruncatedSvd& svd)
{
    if (svd.singular_values.size() < 2) {
        throw ParameterError("dominance ratio needs at least two singular values");
    }
    SingularSpectrum spec{svd.singular_values, 0.0};
    const double s1 = svd.singular_values[0];
    const double s2 = svd.singular_values[1];
    spec.dominance_ratio = s2 > 0.0 ? s1 / s2 : (s1 > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
    return spec;
}

/// 2x2 unitary mixing [x1, x2] -> [e1, e2] with orthogonal output columns:
///
///   [x1, x2] * | c   -s |  = [e1, e2],   |c|^2 + |s|^2 = 1
///              | s*   c |
///
/// c is real and non-negative; e1 carries the larger singular value unless the
/// inputs are already orthogonal.
struct GibbsRotation {
    cdouble c;
    cdouble s;
    cdouble orthogonality_residual;  // e1^H e2
    double first_norm = 0.0;         // ||e1||
    double second_norm = 0.0;        // ||e2||
};

inline GibbsRotation gibbs_rotation_check(std::span<const cdouble> x1, std::span<const cdouble> x2)
{
    if (x1.size() != x2.size() || x1.empty()) {
        throw ParameterError("gibbs_rotation_check needs two non-empty columns of equal length");
    }
    double a = 0.0;
    double b = 0.0;
    cdouble cross{};
    for (std::size_t i = 0; i < x1.size(); ++i) {
        a += std::norm(x1[i]);
        b += std::norm(x2[i]);
        cross += std::conj(x1[i]) * x2[i];
    }
    if (a == 0.0 || b == 0.0) {
        throw DegenerateInputError("gibbs_rotation_check: zero-norm input column");
    }
    // Eigenvector (cos t, e^{-j arg cross} sin t) of [[a, cross], [cross*, b]]
    // for the larger eigenvalue.
    // Already orthogonal columns keep the identity rotation.
    const double theta = std::abs(cross) == 0.0 ? 0.0 : 0.5 * std::atan2(2.0 * std::abs(cross), a - b);
    const double phase = std::arg(cross);
    GibbsRotation g;
    g.c = cdouble(std::cos(theta), 0.0);
    const cdouble s_conj = std::polar(std::sin(theta), -phase);
    g.s = std::conj(s_conj);

    cdouble dot{};
    double n1 = 0.0;
    double n2 = 0.0;
    for (std::size_t i = 0; i < x1.size(); ++i) {
        const cdouble e1 = g.c * x1[i] + s_conj * x2[i];
        const cdouble e2 = -g.s * x1[i] + g.c * x2[i];
        dot += std::conj(e1) * e2;
        n1 += std::norm(e1);
        n2 += std::norm(e2);
    }
    g.orthogonality_residual = dot;
    g.first_norm = std::sqrt(n1);
    g.second_norm = std::sqrt(n2);
    return g;
}

}  // namespace bsar
