#ifndef REGCB_MOMENTS_HPP
#define REGCB_MOMENTS_HPP

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace regcb {

/// x is in U_lambda(a) when f*(x,a) beats every other action by at least lambda.
template <typename Derived>
bool u_lambda_membership(const Eigen::MatrixBase<Derived>& mean, Eigen::Index a, typename Derived::Scalar lambda)
{
    for (Eigen::Index b = 0; b < mean.size(); ++b) {
        if (b != a && mean[b] + lambda > mean[a]) return false;
    }
    return true;
}

template <typename Scalar>
Scalar min_eigenvalue(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& m)
{
    if (m.rows() == 0) return Scalar(0);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

/// psi_min over all supports of size min(2s, d): the smallest eigenvalue of any principal
/// submatrix of that size. Exhaustive, so keep d and s small.
template <typename Scalar>
Scalar restricted_min_eigenvalue(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& m, std::size_t s)
{
    if (m.rows() != m.cols()) throw std::invalid_argument("restricted eigenvalue needs a square matrix");
    if (s == 0) throw std::invalid_argument("sparsity must be >= 1");
    const auto d = static_cast<std::size_t>(m.rows());
    const std::size_t k = std::min(2 * s, d);
    if (k == d) return min_eigenvalue(m);

    // walk all k-subsets via a selection mask in lexicographic order
    std::vector<bool> mask(d, false);
    std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(k), true);
    Scalar best = std::numeric_limits<Scalar>::infinity();
    std::vector<Eigen::Index> idx(k);
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> sub(k, k);
    do {
        std::size_t n = 0;
        for (std::size_t i = 0; i < d; ++i) {
            if (mask[i]) idx[n++] = static_cast<Eigen::Index>(i);
        }
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) sub(i, j) = m(idx[i], idx[j]);
        }
        best = std::min(best, min_eigenvalue(sub));
    } while (std::prev_permutation(mask.begin(), mask.end()));
    return best;
}

/// One sampled context: row a of `features` is phi(x,a), `mean` is f*(x,.).
template <typename Scalar>
struct MomentSample {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> features;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> mean;
};

template <typename Scalar>
struct MomentDiagnostics {
    using MatrixType = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    Scalar lambda = 0;
    std::size_t sparsity = 1;
    MatrixType masked;      ///< sum_a E[1{x in U_lambda(a)} phi phi']
    MatrixType unmasked;    ///< sum_a E[phi phi']
    Scalar l1_bound = 0;
    Scalar l2_bound = 0;
    Scalar l1_sparse_bound = 0;
    Scalar l2_sparse_bound = 0;
    bool l1_infinite = false;
    bool l2_infinite = false;
    Scalar margin = 0;      ///< empirical Massart margin of the sample
};

template <typename Scalar>
Scalar empirical_margin(const std::vector<MomentSample<Scalar>>& samples)
{
    if (samples.empty()) throw std::invalid_argument("empirical margin needs samples");
    Scalar margin = std::numeric_limits<Scalar>::infinity();
    for (const auto& s : samples) {
        if (s.mean.size() < 2) return Scalar(1);
        Eigen::Matrix<Scalar, Eigen::Dynamic, 1> m = s.mean;
        std::partial_sort(m.data(), m.data() + 2, m.data() + m.size(), std::greater<>());
        margin = std::min(margin, m[0] - m[1]);
    }
    return margin;
}

namespace detail {
template <typename Scalar>
Scalar moment_bound(Scalar numerator, Scalar eig, bool& infinite)
{
    infinite = !(eig > Scalar(0));
    return infinite ? std::numeric_limits<Scalar>::infinity() : numerator / eig;
}
}  // namespace detail

template <typename Scalar>
MomentDiagnostics<Scalar> moment_bounds(const std::vector<MomentSample<Scalar>>& samples, Scalar lambda,
                                        std::size_t sparsity = 1)
{
    if (samples.empty()) throw std::invalid_argument("moment bounds need samples");
    const Eigen::Index k = samples.front().features.rows();
    const Eigen::Index d = samples.front().features.cols();

    MomentDiagnostics<Scalar> out;
    out.lambda = lambda;
    out.sparsity = sparsity;
    out.masked.setZero(d, d);
    out.unmasked.setZero(d, d);
    for (const auto& s : samples) {
        if (s.features.rows() != k || s.features.cols() != d || s.mean.size() != k) {
            throw std::invalid_argument("moment samples must share K and d");
        }
        for (Eigen::Index a = 0; a < k; ++a) {
            const auto phi = s.features.row(a);
            out.unmasked.noalias() += phi.transpose() * phi;
            if (u_lambda_membership(s.mean, a, lambda)) out.masked.noalias() += phi.transpose() * phi;
        }
    }
    const Scalar n = static_cast<Scalar>(samples.size());
    out.masked /= n;
    out.unmasked /= n;

    const Scalar kk = static_cast<Scalar>(k);
    bool sparse_inf = false;
    out.l1_bound = detail::moment_bound(kk, min_eigenvalue(out.unmasked), out.l1_infinite);
    out.l2_bound = detail::moment_bound(kk, min_eigenvalue(out.masked), out.l2_infinite);
    const Scalar ks = Scalar(2) * kk * static_cast<Scalar>(sparsity);
    out.l1_sparse_bound = detail::moment_bound(ks, restricted_min_eigenvalue(out.unmasked, sparsity), sparse_inf);
    out.l2_sparse_bound = detail::moment_bound(ks, restricted_min_eigenvalue(out.masked, sparsity), sparse_inf);
    out.margin = empirical_margin(samples);
    return out;
}

}  // namespace regcb

#endif  // REGCB_MOMENTS_HPP
